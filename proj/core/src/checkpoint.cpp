#include "symflow/checkpoint.hpp"

#include <fstream>

#include <json.hpp>

#include "symflow/errors.hpp"
#include "symflow/version.hpp"

namespace symflow {

namespace {

Json spec_json(const MlpSpec& spec) {
    Json j = Json::object();
    j["in_dim"] = spec.in_dim;
    j["out_dim"] = spec.out_dim;
    Json hidden = Json::array();
    for (int h : spec.hidden) hidden.push_back(h);
    j["hidden"] = std::move(hidden);
    j["activation"] = "tanh";
    return j;
}

/// Per-layer nested arrays: [ [W (rows), b], ... ].
Json params_json(const MlpSpec& spec, const ParamVector& p) {
    Json layers = Json::array();
    for (int l = 0; l < layer_count(spec); ++l) {
        const LayerView v = layer_view(spec, l);
        Json w = Json::array();
        for (int j = 0; j < v.out; ++j) {
            Json row = Json::array();
            for (int i = 0; i < v.in; ++i)
                row.push_back(p.values[static_cast<std::size_t>(v.w_off + j * v.in + i)]);
            w.push_back(std::move(row));
        }
        Json b = Json::array();
        for (int j = 0; j < v.out; ++j)
            b.push_back(p.values[static_cast<std::size_t>(v.b_off + j)]);
        Json layer = Json::array();
        layer.push_back(std::move(w));
        layer.push_back(std::move(b));
        layers.push_back(std::move(layer));
    }
    return layers;
}

MlpSpec spec_from_json(const nlohmann::json& j) {
    MlpSpec spec;
    spec.in_dim = j.at("in_dim").get<int>();
    spec.out_dim = j.at("out_dim").get<int>();
    for (const auto& h : j.at("hidden")) spec.hidden.push_back(h.get<int>());
    if (j.at("activation").get<std::string>() != "tanh")
        throw CheckpointError("unsupported activation in checkpoint");
    return spec;
}

ParamVector params_from_json(const MlpSpec& spec, const nlohmann::json& layers) {
    ParamVector p;
    p.values.assign(static_cast<std::size_t>(param_count(spec)), 0.0);
    if (static_cast<int>(layers.size()) != layer_count(spec))
        throw CheckpointError("layer count mismatch in checkpoint params");
    for (int l = 0; l < layer_count(spec); ++l) {
        const LayerView v = layer_view(spec, l);
        const auto& layer = layers.at(static_cast<std::size_t>(l));
        const auto& w = layer.at(0);
        const auto& b = layer.at(1);
        if (static_cast<int>(w.size()) != v.out || static_cast<int>(b.size()) != v.out)
            throw CheckpointError("layer shape mismatch in checkpoint params");
        for (int j = 0; j < v.out; ++j) {
            const auto& row = w.at(static_cast<std::size_t>(j));
            if (static_cast<int>(row.size()) != v.in)
                throw CheckpointError("weight row length mismatch in checkpoint params");
            for (int i = 0; i < v.in; ++i)
                p.values[static_cast<std::size_t>(v.w_off + j * v.in + i)] =
                    row.at(static_cast<std::size_t>(i)).get<double>();
            p.values[static_cast<std::size_t>(v.b_off + j)] =
                b.at(static_cast<std::size_t>(j)).get<double>();
        }
    }
    return p;
}

}  // namespace

Json checkpoint_json(const NodeModel& model, const Json* config_echo,
                     const Json* history_summary) {
    Json j = Json::object();
    j["version"] = kCheckpointSchema;
    j["geometry"] = make_geometry(model.geometry).name();
    j["kind"] = to_string(model.kind);
    j["invariant_set"] = model.invariant_set_label;

    Json specs = Json::object();
    specs["A"] = spec_json(model.spec_a);
    specs["B"] = spec_json(model.spec_b);
    j["specs"] = std::move(specs);

    Json params = Json::object();
    params["A"] = params_json(model.spec_a, model.params_a);
    params["B"] = params_json(model.spec_b, model.params_b);
    j["params"] = std::move(params);

    Json cfg = config_echo ? *config_echo : Json::object();
    if (!config_echo) {
        cfg["n_steps"] = model.n_steps;
        cfg["include_time"] = model.include_time;
        cfg["delta_kick"] = model.delta_kick;
    }
    j["config"] = std::move(cfg);
    j["history_summary"] = history_summary ? *history_summary : Json::object();
    return j;
}

void save_checkpoint(const NodeModel& model, const std::string& path, const Json* config_echo,
                     const Json* history_summary) {
    write_text_file(path, checkpoint_json(model, config_echo, history_summary).dump());
}

NodeModel load_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CheckpointError("cannot open checkpoint " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw CheckpointError("checkpoint parse error in " + path + ": " + e.what());
    }

    try {
        const std::string version = j.at("version").get<std::string>();
        if (version != kCheckpointSchema)
            throw CheckpointError("checkpoint schema mismatch: got '" + version + "', expected '" +
                                  std::string(kCheckpointSchema) + "'");

        NodeModel m;
        m.geometry = geometry_from_name(j.at("geometry").get<std::string>()).id;
        m.kind = model_kind_from_string(j.at("kind").get<std::string>());
        m.invariant_set_label = j.at("invariant_set").get<std::string>();
        m.spec_a = spec_from_json(j.at("specs").at("A"));
        m.spec_b = spec_from_json(j.at("specs").at("B"));
        m.params_a = params_from_json(m.spec_a, j.at("params").at("A"));
        m.params_b = params_from_json(m.spec_b, j.at("params").at("B"));

        const auto& cfg = j.at("config");
        if (cfg.contains("n_steps")) m.n_steps = cfg.at("n_steps").get<int>();
        if (cfg.contains("include_time")) m.include_time = cfg.at("include_time").get<bool>();
        if (cfg.contains("delta_kick")) m.delta_kick = cfg.at("delta_kick").get<double>();
        return m;
    } catch (const CheckpointError&) {
        throw;
    } catch (const std::exception& e) {
        throw CheckpointError("malformed checkpoint " + path + ": " + e.what());
    }
}

}  // namespace symflow

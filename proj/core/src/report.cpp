#include "symflow/report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace symflow {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

Json Json::object() {
    Json j;
    j.value_ = Object{};
    return j;
}

Json Json::array() {
    Json j;
    j.value_ = Array{};
    return j;
}

bool Json::is_object() const { return std::holds_alternative<Object>(value_); }
bool Json::is_array() const { return std::holds_alternative<Array>(value_); }

Json& Json::operator[](const std::string& key) {
    if (std::holds_alternative<std::nullptr_t>(value_)) value_ = Object{};
    auto& obj = std::get<Object>(value_);
    for (auto& [k, v] : obj)
        if (k == key) return v;
    obj.emplace_back(key, Json());
    return obj.back().second;
}

void Json::push_back(Json v) {
    if (std::holds_alternative<std::nullptr_t>(value_)) value_ = Array{};
    std::get<Array>(value_).push_back(std::move(v));
}

namespace {
void escape_string(std::string& out, const std::string& s) {
    out += '"';
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    out += '"';
}
}  // namespace

void Json::dump_to(std::string& out, int indent, int depth) const {
    const std::string pad(static_cast<std::size_t>(indent) * (depth + 1), ' ');
    const std::string closing_pad(static_cast<std::size_t>(indent) * depth, ' ');

    if (std::holds_alternative<std::nullptr_t>(value_)) {
        out += "null";
    } else if (auto* b = std::get_if<bool>(&value_)) {
        out += *b ? "true" : "false";
    } else if (auto* i = std::get_if<std::int64_t>(&value_)) {
        out += std::to_string(*i);
    } else if (auto* d = std::get_if<double>(&value_)) {
        out += std::isfinite(*d) ? format_double(*d) : "null";
    } else if (auto* s = std::get_if<std::string>(&value_)) {
        escape_string(out, *s);
    } else if (auto* arr = std::get_if<Array>(&value_)) {
        if (arr->empty()) {
            out += "[]";
            return;
        }
        out += "[\n";
        for (std::size_t k = 0; k < arr->size(); ++k) {
            out += pad;
            (*arr)[k].dump_to(out, indent, depth + 1);
            if (k + 1 < arr->size()) out += ',';
            out += '\n';
        }
        out += closing_pad + "]";
    } else if (auto* obj = std::get_if<Object>(&value_)) {
        if (obj->empty()) {
            out += "{}";
            return;
        }
        out += "{\n";
        for (std::size_t k = 0; k < obj->size(); ++k) {
            out += pad;
            escape_string(out, (*obj)[k].first);
            out += ": ";
            (*obj)[k].second.dump_to(out, indent, depth + 1);
            if (k + 1 < obj->size()) out += ',';
            out += '\n';
        }
        out += closing_pad + "}";
    }
}

std::string Json::dump(int indent) const {
    std::string out;
    dump_to(out, indent, 0);
    out += '\n';
    return out;
}

void write_text_file(const std::string& path, const std::string& content) {
    const std::filesystem::path p(path);
    if (p.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(p.parent_path(), ec);
        if (ec) throw std::runtime_error("cannot create directory " + p.parent_path().string());
    }
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << content;
    if (!out) throw std::runtime_error("write failed for " + path);
}

std::string csv_join(const std::vector<std::string>& cells) {
    std::string row;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) row += ',';
        row += cells[i];
    }
    row += '\n';
    return row;
}

}  // namespace symflow

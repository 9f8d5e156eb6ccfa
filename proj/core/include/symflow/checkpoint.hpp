#pragma once

#include <string>

#include "symflow/model.hpp"
#include "symflow/report.hpp"

namespace symflow {

/// Checkpoint document (schema "symflow-ckpt-v1"): geometry, kind, invariant
/// set label, network specs, per-layer nested parameter arrays, plus optional
/// config echo and history summary. 17-significant-digit floats make
/// load(save(m)) evaluate bit-identically.
Json checkpoint_json(const NodeModel& model, const Json* config_echo = nullptr,
                     const Json* history_summary = nullptr);

void save_checkpoint(const NodeModel& model, const std::string& path,
                     const Json* config_echo = nullptr, const Json* history_summary = nullptr);

/// Throws CheckpointError on parse failure or schema-version mismatch; never
/// returns a partially filled model.
NodeModel load_checkpoint(const std::string& path);

}  // namespace symflow

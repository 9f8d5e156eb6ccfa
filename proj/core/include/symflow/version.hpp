#pragma once

namespace symflow {

inline constexpr const char* kProjectVersion = "0.1.0";
inline constexpr const char* kCheckpointSchema = "symflow-ckpt-v1";

}  // namespace symflow

#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace symflow {

/// Formats a double with 17 significant digits (round-trips exactly).
std::string format_double(double v);

/// Minimal ordered JSON value for emitted reports and checkpoints. Written by
/// hand so every float in machine-readable output carries 17 significant
/// digits; parsing (checkpoints, config files) uses nlohmann internally.
class Json {
public:
    Json() : value_(nullptr) {}
    Json(bool b) : value_(b) {}
    Json(int v) : value_(static_cast<std::int64_t>(v)) {}
    Json(std::int64_t v) : value_(v) {}
    Json(std::uint64_t v) : value_(static_cast<std::int64_t>(v)) {}
    Json(double v) : value_(v) {}
    Json(const char* s) : value_(std::string(s)) {}
    Json(std::string s) : value_(std::move(s)) {}

    static Json object();
    static Json array();

    /// Object access: returns existing member or appends a null one.
    Json& operator[](const std::string& key);
    void push_back(Json v);

    bool is_object() const;
    bool is_array() const;

    std::string dump(int indent = 2) const;

private:
    using Array = std::vector<Json>;
    using Object = std::vector<std::pair<std::string, Json>>;
    std::variant<std::nullptr_t, bool, std::int64_t, double, std::string, Array, Object> value_;

    void dump_to(std::string& out, int indent, int depth) const;
};

/// Creates dir (and parents) and writes content; throws std::runtime_error
/// on IO failure with the path in the message.
void write_text_file(const std::string& path, const std::string& content);

/// CSV with 17-significant-digit floats. Empty optionals become empty cells.
std::string csv_join(const std::vector<std::string>& cells);

}  // namespace symflow

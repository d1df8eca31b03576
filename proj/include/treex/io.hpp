#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "treex/errors.hpp"
#include "treex/wl.hpp"

namespace treex {

// Every artifact file carries {"schema": {"kind", "version"}} plus the seeds
// that produced it, so downstream stages can refuse mismatched inputs instead
// of silently misreading them. No timestamps anywhere: a rerun with the same
// config must produce byte-identical files.
inline constexpr int kSchemaVersion = 1;

inline nlohmann::json schema_header(const std::string& kind) {
    return nlohmann::json{{"kind", kind}, {"version", kSchemaVersion}};
}

inline void check_schema(const nlohmann::json& j, const std::string& kind,
                         const std::string& path) {
    if (!j.contains("schema"))
        throw IncompatibilityError(path + ": missing schema header");
    const auto& s = j["schema"];
    if (s.value("kind", "") != kind)
        throw IncompatibilityError(path + ": expected a " + kind + " artifact, found " +
                                   s.value("kind", "<unknown>"));
    if (s.value("version", -1) != kSchemaVersion)
        throw IncompatibilityError(path + ": schema version " +
                                   std::to_string(s.value("version", -1)) +
                                   " unsupported (want " + std::to_string(kSchemaVersion) + ")");
}

inline nlohmann::json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    return j;
}

inline void write_json_file(const std::string& path, const nlohmann::json& j) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << j.dump(1) << "\n";
    if (!out) throw IoError("write failed for " + path);
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << text;
}

// Content fingerprint of an artifact's identifying fields; stages check that
// the chain model -> concepts -> rules was produced from the same inputs.
inline std::uint64_t json_fingerprint(const nlohmann::json& j) {
    std::string s = j.dump();
    return detail::fnv1a(s.data(), s.size());
}

}  // namespace treex

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace fdrecon {

inline constexpr const char* kToolVersion = "0.1.0";

std::uint64_t fnv1a(std::string_view data);
std::uint64_t fnv1a_file(const std::string& path);
std::string hash_hex(std::uint64_t h);

/// Provenance record written once per CLI run: the subcommand, every
/// resolved setting, input content hashes, and output paths. Re-running the
/// recorded subcommand with the recorded settings reproduces the outputs.
struct RunManifest {
    std::string subcommand;
    std::string tool_version = kToolVersion;
    std::uint64_t seed = 0;
    std::vector<std::pair<std::string, std::string>> config;  // key, value (insertion order)
    std::vector<std::pair<std::string, std::string>> inputs;  // path, content hash
    std::vector<std::string> outputs;

    void set(const std::string& key, const std::string& value);
    void add_input(const std::string& path);  // hashes the file content

    std::string to_json() const;
    void write(const std::string& path) const;
};

}  // namespace fdrecon

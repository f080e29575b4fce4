#include "fdrecon/manifest.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fdrecon/errors.hpp"

namespace fdrecon {

std::uint64_t fnv1a(std::string_view data) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

std::uint64_t fnv1a_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for hashing: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return fnv1a(ss.str());
}

std::string hash_hex(std::uint64_t h) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void RunManifest::set(const std::string& key, const std::string& value) {
    for (auto& [k, v] : config) {
        if (k == key) {
            v = value;
            return;
        }
    }
    config.emplace_back(key, value);
}

void RunManifest::add_input(const std::string& path) {
    inputs.emplace_back(path, hash_hex(fnv1a_file(path)));
}

std::string RunManifest::to_json() const {
    nlohmann::ordered_json j;
    j["subcommand"] = subcommand;
    j["tool_version"] = tool_version;
    j["seed"] = seed;
    nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
    for (const auto& [k, v] : config) cfg[k] = v;
    j["config"] = cfg;
    nlohmann::ordered_json ins = nlohmann::ordered_json::array();
    for (const auto& [path, hash] : inputs) ins.push_back({{"path", path}, {"hash", hash}});
    j["inputs"] = ins;
    j["outputs"] = outputs;
    return j.dump(2) + "\n";
}

void RunManifest::write(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << to_json();
    out.flush();
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace fdrecon

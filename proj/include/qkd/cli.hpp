// Command-line front end. The binary in tools/ is a thin wrapper around
// run_cli so integration tests can drive commands in-process.
//
// Exit codes: 0 success, 1 verification violation, 2 usage or configuration
// error, 3 resource exhaustion (key pool).

#ifndef QKD_CLI_HPP
#define QKD_CLI_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace qkd::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitViolation = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitExhausted = 3;

// flat "key = value" text with '#' comments
std::map<std::string, std::string> parse_config_file(const std::string& path);

struct RunManifest {
    std::string command;
    std::string config_path;
    uint64_t seed = 0;
    int sessions = 0;
    std::string attack;
    std::string output_dir;
    std::string manifest_id; // hash of everything except the timestamp
    std::string timestamp;   // ISO-8601 UTC
};

std::string manifest_json(const RunManifest& m);

// argv-style entry point (without the program name)
int run_cli(const std::vector<std::string>& args);

} // namespace qkd::cli

#endif

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace otk::cli {

inline constexpr const char* kVersion = "0.1.0";

// invalid or inconsistent configuration; the CLI maps it to exit code 1
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunOverrides {
    std::optional<std::uint64_t> master_seed;
    std::optional<std::size_t> reps;
    std::optional<std::string> out_dir;
    std::optional<int> threads;
};

// registered processes and functions with parameter schemas, alphabetical
std::string list_registry();

// Parse, run, write <prefix>.csv and <prefix>.json.
// Exit code contract: 0 success, 1 config error, 2 a requested check failed.
int run_config_file(const std::string& path, const RunOverrides& overrides);

// exposed for tests: canonical form (defaults filled), round-trips exactly
std::string canonical_config(const std::string& config_text);
std::string config_digest(const std::string& config_text);

}  // namespace otk::cli

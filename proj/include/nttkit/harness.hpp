#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include <json.hpp>

#include "nttkit/rcg.hpp"

namespace nttkit {

inline constexpr const char* kVersion = "0.1.0";

/// Schema violation in an experiment config. Maps to exit status 2.
class ConfigError : public Error {
public:
    using Error::Error;
};

struct RunOptions {
    int jobs = 1;
    /// Overrides the config's "output" field.
    std::optional<std::filesystem::path> out;
};

/// Reads NTTKIT_LOG (error, info, debug; default info) and sets the global level.
void configure_logging();

/// Throws ConfigError on any schema violation. Never touches the filesystem.
void validate_config(const nlohmann::json& cfg);

/// "optimizer" block to RCGConfig; missing keys keep the defaults.
RCGConfig parse_optimizer(const nlohmann::json& block, RCGConfig base = {});

/// Validates, executes and writes artifacts. Returns the process exit status:
/// 0 on success, 2 on schema violation (nothing written), 1 on runtime failure.
int run_config(const nlohmann::json& cfg, const RunOptions& opts);
int run_config_file(const std::filesystem::path& path, const RunOptions& opts);

/// Prints one block per manifest under dir. Returns 1 when there is none.
int report(const std::filesystem::path& dir, std::ostream& out);

} // namespace nttkit

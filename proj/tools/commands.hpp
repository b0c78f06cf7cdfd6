#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace sica::cli {

enum ExitCode : int {
    kOk = 0,
    kCheckFailed = 1,
    kConfigError = 2,
    kIntegrationError = 3,
    kNotConverged = 4,
};

struct CommandOptions {
    std::filesystem::path config;
    std::vector<std::string> overrides;        // --set key.path=value
    std::optional<std::size_t> threads;        // --threads, else SICA_NOC_THREADS, else config
    std::optional<std::filesystem::path> out;  // --out
    std::optional<std::uint64_t> seed;         // --seed
    bool strict = false;                       // optimize: exit 4 when not converged
};

int cmd_simulate(const CommandOptions& opts, std::ostream& log);
int cmd_optimize(const CommandOptions& opts, std::ostream& log);
int cmd_ksweep(const CommandOptions& opts, std::ostream& log);
int cmd_verify(const CommandOptions& opts, std::ostream& log);
int cmd_gradcheck(const CommandOptions& opts, std::ostream& log);

} // namespace sica::cli

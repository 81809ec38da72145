#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ruinlab/serialize.hpp"

namespace ruinlab::cli {

inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode : int {
    kOk = 0,
    kFailure = 1,
    kDomainError = 2,
    kValidityError = 3,
};

/// Everything needed to re-run a command: the command name and every
/// resolved flag value, defaults included.
struct RunManifest {
    std::string command;
    std::map<std::string, std::string> parameters;
    std::string tool_version = kToolVersion;
    std::optional<std::uint64_t> seed;
};

Json to_json(const RunManifest& manifest);
/// Throws DomainError on a malformed manifest.
RunManifest manifest_from_json(const Json& json);

/// Strict decimal parsing shared by all flags.
///
/// Probabilities and fractions must be plain decimals; "50%" and values
/// above 1 are rejected with a hint. Integer flags also accept exact
/// scientific forms such as 1e6.
double parse_probability(const std::string& flag, const std::string& text);
double parse_real(const std::string& flag, const std::string& text);
std::int64_t parse_integer(const std::string& flag, const std::string& text);
std::uint64_t parse_seed(const std::string& flag, const std::string& text);

/// Runs one invocation. `args` excludes the program name. `env_format`
/// carries RUINLAB_FORMAT when set. Never throws.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        std::optional<std::string> env_format = std::nullopt);

}  // namespace ruinlab::cli

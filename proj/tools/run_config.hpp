// Flat `key = value` run configuration, `#` starts a comment.

#ifndef VSM_TOOLS_RUN_CONFIG_HPP
#define VSM_TOOLS_RUN_CONFIG_HPP

#include <string>
#include <string_view>

#include <json.hpp>

#include "vsm/solver.hpp"

namespace vsm::cli {

/// Thrown for unknown keys or malformed values.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Applies one key to `config`.
void apply_setting(SolveConfig& config, std::string_view key, std::string_view value);
/// Applies every line of a config file on top of `config`.
void apply_config_text(SolveConfig& config, std::string_view text);

/// Every key with its resolved value, in a fixed order.
nlohmann::ordered_json config_to_json(const SolveConfig& config);

}  // namespace vsm::cli

#endif  // VSM_TOOLS_RUN_CONFIG_HPP

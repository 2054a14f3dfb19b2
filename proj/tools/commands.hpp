#ifndef ATOMGREED_TOOLS_COMMANDS_HPP
#define ATOMGREED_TOOLS_COMMANDS_HPP

// Experiment commands behind the atomgreed executable. Each command is a
// pure function of (config, overrides) writing to the given stream.

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>

#include "atomgreed/atomgreed.hpp"

namespace atomgreed::cli {

enum ExitCode : int { kOk = 0, kConfigError = 1, kCheckFailed = 2 };

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::optional<std::string> out;
};

// Parsed config plus the raw text, kept so errors can name a line.
struct Config {
  Json json;
  std::string text;
  std::string source;  // file name used in messages

  int line_of(const std::string& key) const;
  std::string where(const std::string& key) const;
};

Config parse_config(const std::string& text, const std::string& source);
Config load_config(const std::string& path);

// Least-squares instance used by the bound checks: Gaussian design scaled by
// 1/sqrt(rows), target from a planted r-sparse vector plus noise.
Objective make_bounds_instance(std::uint64_t seed, Index n, Index rows, Index r, double noise_level);

int cmd_recover(const Config& cfg, const Overrides& ov, std::ostream& out);
int cmd_condnum(const Config& cfg, const Overrides& ov, std::ostream& out);
// Writes the sandwich table to `out`; the sigmoid and weak-submodularity
// tables go to `sigmoid_out` and `wksub_out`.
int cmd_submod(const Config& cfg, const Overrides& ov, std::ostream& out, std::ostream& sigmoid_out,
               std::ostream& wksub_out);
int cmd_bounds_check(const Config& cfg, const Overrides& ov, std::ostream& out);

// Runs `command` with output routed to the configured path (stdout when
// none). Config errors are reported on `err` and mapped to exit code 1.
int run(const std::string& command, const std::string& config_path, const Overrides& ov,
        std::ostream& err);

}  // namespace atomgreed::cli

#endif  // ATOMGREED_TOOLS_COMMANDS_HPP

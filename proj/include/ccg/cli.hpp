#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace ccg {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitVerifyFailed = 3;

struct CliOptions {
  std::string config_path;
  std::string out_dir;    // empty: primary output goes to stdout
  std::string data_path;  // empirics input
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> samples;
  std::optional<int> grid;
  std::uint64_t rounds = 0;  // sample: also log this many played rounds
  int threads = 1;           // 1 runs the serial kernels
};

int cmd_check_model(const CliOptions& opt, std::ostream& out, std::ostream& err);
int cmd_sample(const CliOptions& opt, std::ostream& out, std::ostream& err);
int cmd_verify(const CliOptions& opt, std::ostream& out, std::ostream& err);
int cmd_metrics(const CliOptions& opt, std::ostream& out, std::ostream& err);
int cmd_empirics(const CliOptions& opt, std::ostream& out, std::ostream& err);

int run_cli(int argc, char** argv);

}  // namespace ccg

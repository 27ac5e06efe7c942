#ifndef PENSIM_CLI_COMMON_HPP
#define PENSIM_CLI_COMMON_HPP

#include <CLI11.hpp>
#include <cstdint>
#include <string>
#include <vector>

#include "pensim/config.hpp"
#include "pensim/forecaster.hpp"
#include "pensim/manifest.hpp"

namespace pensim::cli {

// Exit codes: 0 ok, 2 input error, 3 numeric failure, 4 internal invariant
// violation.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitNumeric = 3;
inline constexpr int kExitInternal = 4;

struct GlobalOptions {
  std::string config_path;
  std::uint64_t seed = 1;
  std::string out_dir = "out";
  int threads = 0;  // 0 = hardware, capped by PENSIM_MAX_THREADS

  Config load_config() const {
    return config_path.empty() ? Config() : Config::parse_file(config_path);
  }
};

void add_global_options(CLI::App* cmd, GlobalOptions& g);

// Creates the output directory (never touches anything outside it).
void ensure_out_dir(const std::string& dir);

// Training hyper-parameter flags shared by train/tune/forecast. Flags win
// over config-file values, which win over the built-in defaults.
struct TrainFlags {
  CLI::Option* n = nullptr;
  CLI::Option* k = nullptr;
  CLI::Option* h = nullptr;
  CLI::Option* n_train = nullptr;
  CLI::Option* batch = nullptr;
  CLI::Option* steps = nullptr;
  CLI::Option* interval = nullptr;
  CLI::Option* rate = nullptr;
  CLI::Option* kappa = nullptr;
  CLI::Option* b_init = nullptr;
  CLI::Option* sigma_init = nullptr;
  CLI::Option* stop_gradient = nullptr;

  int v_n = 0, v_k = 0, v_h = 0, v_n_train = 0, v_batch = 0;
  long v_steps = 0, v_interval = 0;
  double v_rate = 0, v_kappa = 0, v_b_init = 0, v_sigma = 0;
  bool v_stop_gradient = false;

  void add_to(CLI::App* cmd);
  TrainConfig resolve(const Config& cfg) const;
};

// Effective-config snapshot entries for the manifest.
void snapshot_train_config(const TrainConfig& c, RunManifest& m);

std::vector<Sex> parse_sex_selection(const std::string& token);

int run_command(const std::string& name, const std::function<void()>& body);

}  // namespace pensim::cli

#endif  // PENSIM_CLI_COMMON_HPP

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <functional>

#include "cli_common.hpp"
#include "pensim/errors.hpp"
#include "pensim/manifest.hpp"

namespace pensim::cli {

void add_global_options(CLI::App* cmd, GlobalOptions& g) {
  cmd->add_option("--config", g.config_path, "Config file (key = value with [section] headers)");
  cmd->add_option("--seed", g.seed, "Master RNG seed; every numerical result depends on it");
  cmd->add_option("--out", g.out_dir, "Output directory (all files are written inside it)");
  cmd->add_option("--threads", g.threads,
                  "Worker threads (0 = hardware; PENSIM_MAX_THREADS caps it)");
}

void ensure_out_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir + "': " + ec.message());
}

void TrainFlags::add_to(CLI::App* cmd) {
  n = cmd->add_option("--n", v_n, "Input window size N (log-rates per window)");
  k = cmd->add_option("--k", v_k, "Layer count K, input and output included");
  h = cmd->add_option("--h", v_h, "Hidden layer width H");
  n_train = cmd->add_option("--n-train", v_n_train, "Training rollout length N_train");
  batch = cmd->add_option("--batch", v_batch, "Mini-batch size B");
  steps = cmd->add_option("--steps", v_steps, "Total RMSProp steps L_train");
  interval = cmd->add_option("--interval", v_interval, "Learning-rate review interval");
  rate = cmd->add_option("--rate", v_rate, "Initial learning rate");
  kappa = cmd->add_option("--kappa", v_kappa, "Learning-rate decay factor on stalled windows");
  b_init = cmd->add_option("--b-init", v_b_init, "Initial bias value");
  sigma_init = cmd->add_option("--sigma-init", v_sigma,
                               "Std dev of the truncated-normal weight init");
  stop_gradient = cmd->add_flag("--stop-gradient", v_stop_gradient,
                                "Ablation: do not propagate gradients through the recursion");
}

TrainConfig TrainFlags::resolve(const Config& cfg) const {
  TrainConfig c;
  c.input_size = static_cast<int>(cfg.get_long("train.n", c.input_size));
  c.depth = static_cast<int>(cfg.get_long("train.k", c.depth));
  c.hidden_width = static_cast<int>(cfg.get_long("train.h", c.hidden_width));
  c.train_horizon = static_cast<int>(cfg.get_long("train.n_train", c.train_horizon));
  c.batch_size = static_cast<int>(cfg.get_long("train.batch", c.batch_size));
  c.train_steps = cfg.get_long("train.steps", c.train_steps);
  c.schedule_interval = cfg.get_long("train.interval", c.schedule_interval);
  c.initial_rate = cfg.get_double("train.rate", c.initial_rate);
  c.rate_decay = cfg.get_double("train.kappa", c.rate_decay);
  c.b_init = cfg.get_double("train.b_init", c.b_init);
  c.sigma_init = cfg.get_double("train.sigma_init", c.sigma_init);
  c.rmsprop_decay = cfg.get_double("train.rmsprop_decay", c.rmsprop_decay);
  c.rmsprop_epsilon = cfg.get_double("train.rmsprop_epsilon", c.rmsprop_epsilon);
  c.stop_gradient = cfg.get_bool("train.stop_gradient", c.stop_gradient);

  if (n->count()) c.input_size = v_n;
  if (k->count()) c.depth = v_k;
  if (h->count()) c.hidden_width = v_h;
  if (n_train->count()) c.train_horizon = v_n_train;
  if (batch->count()) c.batch_size = v_batch;
  if (steps->count()) c.train_steps = v_steps;
  if (interval->count()) c.schedule_interval = v_interval;
  if (rate->count()) c.initial_rate = v_rate;
  if (kappa->count()) c.rate_decay = v_kappa;
  if (b_init->count()) c.b_init = v_b_init;
  if (sigma_init->count()) c.sigma_init = v_sigma;
  if (stop_gradient->count()) c.stop_gradient = v_stop_gradient;
  c.validate();
  return c;
}

void snapshot_train_config(const TrainConfig& c, RunManifest& m) {
  m.config["train.n"] = std::to_string(c.input_size);
  m.config["train.k"] = std::to_string(c.depth);
  m.config["train.h"] = std::to_string(c.hidden_width);
  m.config["train.n_train"] = std::to_string(c.train_horizon);
  m.config["train.batch"] = std::to_string(c.batch_size);
  m.config["train.steps"] = std::to_string(c.train_steps);
  m.config["train.interval"] = std::to_string(c.schedule_interval);
  m.config["train.rate"] = std::to_string(c.initial_rate);
  m.config["train.kappa"] = std::to_string(c.rate_decay);
  m.config["train.b_init"] = std::to_string(c.b_init);
  m.config["train.sigma_init"] = std::to_string(c.sigma_init);
  m.config["train.rmsprop_decay"] = std::to_string(c.rmsprop_decay);
  m.config["train.rmsprop_epsilon"] = std::to_string(c.rmsprop_epsilon);
  m.config["train.stop_gradient"] = c.stop_gradient ? "true" : "false";
}

std::vector<Sex> parse_sex_selection(const std::string& token) {
  if (token == "both") return {Sex::male, Sex::female};
  return {parse_sex(token)};
}

int run_command(const std::string& name, const std::function<void()>& body) {
  try {
    body();
    return kExitOk;
  } catch (const NumericFailure& e) {
    std::fprintf(stderr, "pensim %s: numeric failure: %s\n", name.c_str(), e.what());
    return kExitNumeric;
  } catch (const InputError& e) {
    std::fprintf(stderr, "pensim %s: %s\n", name.c_str(), e.what());
    return kExitInput;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "pensim %s: internal error: %s\n", name.c_str(), e.what());
    return kExitInternal;
  }
}

}  // namespace pensim::cli

namespace pensim::cli {
void register_train(CLI::App& app, int& rc);
void register_tune(CLI::App& app, int& rc);
void register_forecast(CLI::App& app, int& rc);
void register_life_table(CLI::App& app, int& rc);
void register_simulate(CLI::App& app, int& rc);
void register_report(CLI::App& app, int& rc);
}  // namespace pensim::cli

int main(int argc, char** argv) {
  CLI::App app{"Mortality forecasting and pension dependency-ratio microsimulation"};
  app.set_version_flag("--version", std::string(pensim::kToolVersion));
  app.require_subcommand(1);

  int rc = pensim::cli::kExitOk;
  pensim::cli::register_train(app, rc);
  pensim::cli::register_tune(app, rc);
  pensim::cli::register_forecast(app, rc);
  pensim::cli::register_life_table(app, rc);
  pensim::cli::register_simulate(app, rc);
  pensim::cli::register_report(app, rc);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : pensim::cli::kExitInput;
  }
  return rc;
}

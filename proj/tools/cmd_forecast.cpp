#include <map>
#include <sstream>

#include "cli_common.hpp"
#include "pensim/csv.hpp"
#include "pensim/data_io.hpp"
#include "pensim/parallel.hpp"

namespace pensim::cli {

namespace {

struct ForecastArgs {
  GlobalOptions global;
  TrainFlags flags;
  std::string input;
  std::string sex = "both";
  std::vector<std::string> checkpoints;
  int runs = 0;
  int horizon = 0;
  std::vector<int> sensitivity_ages;
  bool dump_runs = false;
  double floor_eps = 0.0;
};

void write_runs_csv(const ForecastEnsemble& e, const std::string& path) {
  std::ostringstream out;
  out << "year,age,sex,run,q\n";
  for (std::size_t r = 0; r < e.runs.size(); ++r) {
    const auto& g = e.runs[r];
    for (int y = g.first_year; y <= g.last_year; ++y) {
      for (int a = 0; a <= g.max_age; ++a) {
        out << y << ',' << a << ',' << sex_letter(g.sex) << ',' << r << ','
            << format_value(g.q[g.idx(y, a)]) << '\n';
      }
    }
  }
  write_text_file(path, out.str());
}

void write_mean_reversion_csv(const MeanReversionSummary& s, const std::string& path) {
  std::ostringstream out;
  out << "lag,mean,variance\n";
  for (std::size_t lag = 1; lag < s.lag_mean.size(); ++lag) {
    out << lag << ',' << format_value(s.lag_mean[lag]) << ','
        << format_value(s.lag_variance[lag]) << '\n';
  }
  write_text_file(path, out.str());
}

void run_forecast(const ForecastArgs& args) {
  const Config cfg = args.global.load_config();
  const double floor_eps =
      args.floor_eps > 0.0 ? args.floor_eps : cfg.get_double("io.floor", 0.0);
  const int horizon =
      args.horizon > 0 ? args.horizon : static_cast<int>(cfg.get_long("forecast.horizon", 0));
  int runs = args.runs > 0 ? args.runs : static_cast<int>(cfg.get_long("forecast.runs", 0));
  if (horizon <= 0) throw InputError("--horizon is required");
  if (!args.checkpoints.empty() && runs > 0) {
    throw InputError("--checkpoint and --runs are mutually exclusive");
  }
  if (args.checkpoints.empty() && runs <= 0) runs = 1;
  ensure_out_dir(args.global.out_dir);

  RunManifest manifest;
  manifest.command = "forecast";
  manifest.seed = args.global.seed;
  manifest.threads = args.global.threads;
  manifest.config["horizon"] = std::to_string(horizon);
  manifest.config["sex"] = args.sex;
  manifest.config["io.floor"] = format_value(floor_eps);
  manifest.add_input(args.input);

  const auto surfaces = load_mortality_surfaces(args.input, floor_eps);
  std::map<char, const MortalitySurface*> by_sex;
  for (const auto& s : surfaces) by_sex[sex_letter(s.sex)] = &s;

  std::vector<ForecastEnsemble> ensembles;
  std::map<char, DenseCell> sensitivity_models;

  if (!args.checkpoints.empty()) {
    manifest.config["mode"] = "checkpoint";
    std::map<char, std::vector<MortalitySurface>> grids;
    for (const auto& path : args.checkpoints) {
      const TrainedModel m = load_checkpoint(path);
      manifest.add_input(path);
      const char tag = sex_letter(m.sex);
      if (!by_sex.count(tag)) {
        throw CheckpointMismatch(path + ": checkpoint sex " + std::string(1, tag) +
                                 " not present in " + args.input);
      }
      const LogRateSurface x = to_log_rates(*by_sex.at(tag));
      if (m.history_last_year != x.last_year) {
        throw CheckpointMismatch(path + ": checkpoint trained through " +
                                 std::to_string(m.history_last_year) + " but table ends " +
                                 std::to_string(x.last_year));
      }
      grids[tag].push_back(extrapolate(m.cell, x, horizon));
      sensitivity_models.emplace(tag, m.cell);
    }
    for (auto& [tag, g] : grids) ensembles.push_back(make_ensemble(std::move(g)));
  } else {
    manifest.config["mode"] = "ensemble";
    manifest.config["runs"] = std::to_string(runs);
    const TrainConfig train_cfg = args.flags.resolve(cfg);
    snapshot_train_config(train_cfg, manifest);
    for (Sex sex : parse_sex_selection(args.sex)) {
      const char tag = sex_letter(sex);
      if (!by_sex.count(tag)) {
        throw InputError(args.input + ": no rows for sex " + std::string(1, tag));
      }
      const LogRateSurface x = to_log_rates(*by_sex.at(tag));
      ensembles.push_back(
          ensemble_forecast(train_cfg, x, runs, horizon, args.global.seed,
                            args.global.threads));
      if (!args.sensitivity_ages.empty()) {
        // Sensitivities are reported for the first run's model.
        const auto data = make_training_sequences(
            x, train_cfg.input_size, train_cfg.train_horizon, all_ages(x.max_age));
        sensitivity_models.emplace(tag, train(train_cfg, data, args.global.seed).cell);
      }
    }
  }

  write_forecast(ensembles, args.global.out_dir + "/forecast.csv");
  manifest.outputs.push_back("forecast.csv");

  if (args.dump_runs) {
    for (const auto& e : ensembles) {
      const std::string name = std::string("runs_") + sex_letter(e.median.sex) + ".csv";
      write_runs_csv(e, args.global.out_dir + "/" + name);
      manifest.outputs.push_back(name);
    }
  }

  for (const int age : args.sensitivity_ages) {
    for (const auto& [tag, cell] : sensitivity_models) {
      const LogRateSurface x = to_log_rates(*by_sex.at(tag));
      const SensitivityMatrix sm = sensitivity_matrix(cell, x, age, horizon);
      const std::string base = std::string("sensitivity_") + tag + std::to_string(age);
      write_sensitivity_csv(sm, args.global.out_dir + "/" + base + ".csv");
      manifest.outputs.push_back(base + ".csv");
      const MeanReversionSummary summary = mean_reversion_summary(sm);
      write_mean_reversion_csv(summary, args.global.out_dir + "/mean_reversion_" + tag +
                                            std::to_string(age) + ".csv");
      manifest.outputs.push_back("mean_reversion_" + tag + std::to_string(age) + ".csv");
      std::printf("sensitivity sex=%c age=%d reversion=%s window_diff=%.6g\n", tag, age,
                  summary.reversion ? "yes" : "no", summary.window_difference);
    }
  }
  manifest.write(args.global.out_dir);
}

}  // namespace

void register_forecast(CLI::App& app, int& rc) {
  auto args = std::make_shared<ForecastArgs>();
  CLI::App* cmd = app.add_subcommand(
      "forecast", "Extrapolate mortality to a horizon with ensemble confidence bands");
  add_global_options(cmd, args->global);
  cmd->add_option("--input", args->input, "Historical mortality CSV")->required();
  cmd->add_option("--sex", args->sex, "M, F or both (ensemble mode)");
  cmd->add_option("--checkpoint", args->checkpoints,
                  "Model checkpoint(s) to extrapolate instead of training");
  cmd->add_option("--runs", args->runs, "Ensemble size; run r trains with seed seed+r");
  cmd->add_option("--horizon", args->horizon, "Last forecast year");
  cmd->add_option("--sensitivity", args->sensitivity_ages,
                  "Emit the sensitivity matrix and lag summary for this age (repeatable)");
  cmd->add_flag("--dump-runs", args->dump_runs, "Also write every run's grid");
  cmd->add_option("--floor", args->floor_eps, "qx floor epsilon (off by default)");
  args->flags.add_to(cmd);
  cmd->callback(
      [args, &rc]() { rc = run_command("forecast", [&]() { run_forecast(*args); }); });
}

}  // namespace pensim::cli

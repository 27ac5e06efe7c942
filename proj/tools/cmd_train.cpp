#include <nlohmann/json.hpp>
#include <sstream>

#include "cli_common.hpp"
#include "pensim/csv.hpp"
#include "pensim/data_io.hpp"

namespace pensim::cli {

namespace {

struct TrainArgs {
  GlobalOptions global;
  TrainFlags flags;
  std::string input;
  std::string sex = "both";
  double floor_eps = 0.0;
  bool final_protocol = false;
};

void write_loss_history(const TrainedModel& m, const std::string& path) {
  std::ostringstream out;
  out << "window,step,batch_loss,full_loss,learning_rate";
  const bool with_val = !m.validation_loss.empty();
  if (with_val) out << ",validation_loss";
  out << '\n';
  for (std::size_t w = 0; w < m.window_loss.size(); ++w) {
    out << (w + 1) << ',' << (w + 1) * m.config.schedule_interval << ','
        << format_value(m.window_loss[w]) << ',' << format_value(m.checkpoint_loss[w]) << ','
        << format_value(m.learning_rates[w]);
    if (with_val) out << ',' << format_value(m.validation_loss[w]);
    out << '\n';
  }
  write_text_file(path, out.str());
}

void run_train(const TrainArgs& args) {
  const Config cfg = args.global.load_config();
  const TrainConfig train_cfg = args.flags.resolve(cfg);
  const double floor_eps =
      args.floor_eps > 0.0 ? args.floor_eps : cfg.get_double("io.floor", 0.0);
  ensure_out_dir(args.global.out_dir);

  RunManifest manifest;
  manifest.command = "train";
  manifest.seed = args.global.seed;
  manifest.threads = args.global.threads;
  snapshot_train_config(train_cfg, manifest);
  manifest.config["sex"] = args.sex;
  manifest.config["final_protocol"] = args.final_protocol ? "true" : "false";
  manifest.config["io.floor"] = format_value(floor_eps);
  manifest.add_input(args.input);

  const auto surfaces = load_mortality_surfaces(args.input, floor_eps);
  const auto selected = parse_sex_selection(args.sex);

  nlohmann::json report;
  for (Sex sex : selected) {
    const MortalitySurface* surface = nullptr;
    for (const auto& s : surfaces) {
      if (s.sex == sex) surface = &s;
    }
    if (!surface) {
      throw InputError(args.input + ": no rows for sex " + std::string(1, sex_letter(sex)));
    }
    const LogRateSurface x = to_log_rates(*surface);
    const AgeSplit split = AgeSplit::standard(x.max_age);
    const auto train_ages =
        args.final_protocol ? split.training_plus_validation() : all_ages(x.max_age);
    const auto data =
        make_training_sequences(x, train_cfg.input_size, train_cfg.train_horizon, train_ages);

    TrainedModel model = train(train_cfg, data, args.global.seed);
    model.sex = sex;
    model.history_last_year = x.last_year;

    const std::string tag(1, sex_letter(sex));
    save_checkpoint(model, args.global.out_dir + "/checkpoint_" + tag + ".json");
    write_loss_history(model, args.global.out_dir + "/loss_history_" + tag + ".csv");
    manifest.outputs.push_back("checkpoint_" + tag + ".json");
    manifest.outputs.push_back("loss_history_" + tag + ".csv");

    nlohmann::json entry;
    entry["final_training_loss"] =
        model.checkpoint_loss.empty() ? 0.0 : model.checkpoint_loss.back();
    if (args.final_protocol) {
      const auto test_data = make_training_sequences(x, train_cfg.input_size,
                                                     train_cfg.train_horizon, split.test);
      entry["test_loss"] = loss(model.cell, test_data);
      entry["test_bias"] = prediction_bias(model.cell, test_data);
    }
    report[tag] = entry;
    std::printf("trained sex=%s final loss %.6g\n", tag.c_str(),
                entry["final_training_loss"].get<double>());
  }

  write_text_file(args.global.out_dir + "/train_report.json", report.dump(1) + "\n");
  manifest.outputs.push_back("train_report.json");
  manifest.write(args.global.out_dir);
}

}  // namespace

void register_train(CLI::App& app, int& rc) {
  auto args = std::make_shared<TrainArgs>();
  CLI::App* cmd = app.add_subcommand("train", "Train extrapolation models on a mortality table");
  add_global_options(cmd, args->global);
  cmd->add_option("--input", args->input, "Mortality CSV (year,age,sex,qx)")->required();
  cmd->add_option("--sex", args->sex, "M, F or both");
  cmd->add_option("--floor", args->floor_eps,
                  "Replace qx below this epsilon instead of rejecting (off by default)");
  cmd->add_flag("--final-protocol", args->final_protocol,
                "Train on training+validation ages and report test-set loss and bias");
  args->flags.add_to(cmd);
  cmd->callback([args, &rc]() { rc = run_command("train", [&]() { run_train(*args); }); });
}

}  // namespace pensim::cli

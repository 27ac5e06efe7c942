#include "pensim/forecaster.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "pensim/csv.hpp"
#include "pensim/parallel.hpp"

namespace pensim {

using nlohmann::json;

void TrainConfig::validate() const {
  cell_spec().validate();
  if (train_horizon < 1) throw InvalidSpec("N_train must be >= 1");
  if (batch_size < 1) throw InvalidSpec("batch size must be >= 1");
  if (schedule_interval < 1) throw InvalidSpec("schedule interval must be >= 1");
  if (!(rate_decay > 0.0 && rate_decay < 1.0)) throw InvalidSpec("kappa must be in (0,1)");
  if (train_steps < 0 || train_steps % schedule_interval != 0) {
    throw InvalidSpec("train_steps must be a non-negative multiple of the schedule interval");
  }
  if (!(initial_rate > 0.0)) throw InvalidSpec("initial learning rate must be positive");
  if (!(b_init > 0.0) || !(sigma_init > 0.0)) {
    throw InvalidSpec("b_init and sigma_init must be positive");
  }
}

AgeSplit AgeSplit::standard(int max_age) {
  AgeSplit s;
  for (int a = 1; a <= max_age; a += 5) s.validation.push_back(a);
  for (int a = 2; a <= max_age; a += 5) s.test.push_back(a);
  for (int a = 0; a <= max_age; ++a) {
    if ((a % 5) != 1 && (a % 5) != 2) s.training.push_back(a);
  }
  return s;
}

std::vector<int> AgeSplit::training_plus_validation() const {
  std::vector<int> ages = training;
  ages.insert(ages.end(), validation.begin(), validation.end());
  std::sort(ages.begin(), ages.end());
  return ages;
}

std::vector<int> all_ages(int max_age) {
  std::vector<int> ages(max_age + 1);
  for (int a = 0; a <= max_age; ++a) ages[a] = a;
  return ages;
}

std::vector<TrainingPair> make_training_sequences(const LogRateSurface& x, int input_size,
                                                  int train_horizon,
                                                  const std::vector<int>& ages) {
  const int years = x.n_years();
  const int per_age = years - input_size - train_horizon + 1;
  if (per_age < 1) {
    throw SurfaceTooShort("surface spans " + std::to_string(years) + " years, need at least " +
                          std::to_string(input_size + train_horizon));
  }
  std::vector<TrainingPair> out;
  out.reserve(static_cast<std::size_t>(per_age) * ages.size());
  for (int age : ages) {
    if (age < 0 || age > x.max_age) throw ShapeMismatch("age outside surface");
    for (int t0 = 0; t0 < per_age; ++t0) {
      TrainingPair p;
      p.input.resize(input_size);
      p.target.resize(train_horizon);
      for (int i = 0; i < input_size; ++i) {
        p.input(i) = x.at(x.first_year + t0 + i, age);
      }
      for (int i = 0; i < train_horizon; ++i) {
        p.target(i) = x.at(x.first_year + t0 + input_size + i, age);
      }
      out.push_back(std::move(p));
    }
  }
  return out;
}

double next_learning_rate(double rate, double prev_window_mean, double new_window_mean,
                          double decay) {
  return new_window_mean >= prev_window_mean ? rate * decay : rate;
}

TrainedModel train(const TrainConfig& config, const std::vector<TrainingPair>& data,
                   std::uint64_t seed, const std::vector<TrainingPair>* eval_set) {
  config.validate();
  if (data.empty()) throw EmptyDataset("training dataset is empty");
  for (const auto& p : data) {
    if (p.input.size() != config.input_size || p.target.size() != config.train_horizon) {
      throw ShapeMismatch("dataset does not match config N/N_train");
    }
  }

  TrainedModel model;
  model.config = config;
  model.seed = seed;
  model.cell = init_cell(config.cell_spec(), config.b_init, config.sigma_init,
                         derive_seed(seed, 0));
  Rng batch_rng = Rng::split(seed, 1);
  RmsPropState opt = init_rmsprop(config.cell_spec(), config.initial_rate,
                                  config.rmsprop_decay, config.rmsprop_epsilon);

  std::vector<TrainingPair> batch(config.batch_size);
  double window_sum = 0.0;
  double prev_window_mean = 0.0;
  bool have_prev_window = false;

  for (long step = 0; step < config.train_steps; ++step) {
    for (int b = 0; b < config.batch_size; ++b) {
      batch[b] = data[batch_rng.uniform_int(data.size())];
    }
    double batch_loss = 0.0;
    const Gradients g = backward(model.cell, batch, !config.stop_gradient, &batch_loss);
    if (!g.all_finite() || !std::isfinite(batch_loss)) {
      throw NumericFailure("training diverged at step " + std::to_string(step + 1) +
                           ": non-finite loss or gradient");
    }
    rmsprop_step(opt, model.cell, g);
    window_sum += batch_loss;

    if ((step + 1) % config.schedule_interval == 0) {
      const double window_mean = window_sum / static_cast<double>(config.schedule_interval);
      window_sum = 0.0;
      model.window_loss.push_back(window_mean);
      model.learning_rates.push_back(opt.learning_rate);

      const double full_loss = loss(model.cell, data);
      if (!std::isfinite(full_loss)) {
        throw NumericFailure("training diverged: full-dataset loss is not finite at step " +
                             std::to_string(step + 1));
      }
      model.checkpoint_loss.push_back(full_loss);
      if (eval_set && !eval_set->empty()) {
        model.validation_loss.push_back(loss(model.cell, *eval_set));
      }

      if (have_prev_window) {
        opt.learning_rate = next_learning_rate(opt.learning_rate, prev_window_mean,
                                               window_mean, config.rate_decay);
      }
      prev_window_mean = window_mean;
      have_prev_window = true;
    }
  }
  return model;
}

double prediction_bias(const DenseCell& cell, const std::vector<TrainingPair>& data) {
  if (data.empty()) throw EmptyDataset("bias over an empty set");
  double sum = 0.0;
  long count = 0;
  for (const auto& pair : data) {
    const int t = static_cast<int>(pair.target.size());
    const auto outputs = rollout(cell, pair.input, t);
    for (int j = 0; j < t; ++j) {
      sum += outputs[j] - pair.target(j);
      ++count;
    }
  }
  return sum / static_cast<double>(count);
}

TuneResult tune(const LogRateSurface& x, const TuneGrid& grid, const TrainConfig& base,
                const AgeSplit& split, std::uint64_t master_seed, long tune_steps,
                int threads) {
  if (split.training.empty() || split.validation.empty()) {
    throw InvalidSpec("age split must have training and validation ages");
  }
  struct Combo {
    int n, k, h;
  };
  std::vector<Combo> combos;
  for (int n : grid.input_sizes) {
    for (int k : grid.depths) {
      for (int h : grid.hidden_widths) combos.push_back({n, k, h});
    }
  }
  if (combos.empty()) throw InvalidSpec("empty tuning grid");

  std::vector<TuneRow> rows(combos.size());
  parallel_for(static_cast<int>(combos.size()), threads, [&](int i) {
    const Combo c = combos[i];
    TrainConfig cfg = base;
    cfg.input_size = c.n;
    cfg.depth = c.k;
    cfg.hidden_width = c.h;
    cfg.train_steps = tune_steps;
    const auto train_data =
        make_training_sequences(x, cfg.input_size, cfg.train_horizon, split.training);
    const auto val_data =
        make_training_sequences(x, cfg.input_size, cfg.train_horizon, split.validation);
    const TrainedModel m = train(cfg, train_data, derive_seed(master_seed, i), &val_data);

    TuneRow row;
    row.input_size = c.n;
    row.depth = c.k;
    row.hidden_width = c.h;
    row.parameters = cfg.cell_spec().parameter_count();
    const auto it = std::min_element(m.validation_loss.begin(), m.validation_loss.end());
    row.min_validation_loss = *it;
    row.min_validation_step =
        (std::distance(m.validation_loss.begin(), it) + 1) * cfg.schedule_interval;
    row.final_validation_loss = m.validation_loss.back();
    rows[i] = row;
  });

  std::size_t best = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const bool better =
        rows[i].min_validation_loss < rows[best].min_validation_loss ||
        (rows[i].min_validation_loss == rows[best].min_validation_loss &&
         rows[i].parameters < rows[best].parameters);
    if (better) best = i;
  }

  TuneResult result;
  result.best = base;
  result.best.input_size = rows[best].input_size;
  result.best.depth = rows[best].depth;
  result.best.hidden_width = rows[best].hidden_width;
  result.best.train_steps = rows[best].min_validation_step;
  result.rows = std::move(rows);
  return result;
}

MortalitySurface extrapolate(const DenseCell& cell, const LogRateSurface& x, int horizon) {
  if (horizon <= x.last_year) {
    throw HorizonInPast("horizon " + std::to_string(horizon) + " is not beyond " +
                        std::to_string(x.last_year));
  }
  const int n = cell.spec.input_size;
  if (x.n_years() < n) {
    throw SurfaceTooShort("surface has fewer years than the model input size");
  }
  const int steps = horizon - x.last_year;

  MortalitySurface out;
  out.sex = x.sex;
  out.first_year = x.last_year + 1;
  out.last_year = horizon;
  out.max_age = x.max_age;
  out.q.assign(static_cast<std::size_t>(steps) * (x.max_age + 1), 0.0);

  Eigen::VectorXd window(n);
  for (int age = 0; age <= x.max_age; ++age) {
    for (int i = 0; i < n; ++i) {
      window(i) = x.at(x.last_year - n + 1 + i, age);
    }
    const auto preds = rollout(cell, window, steps);
    for (int j = 0; j < steps; ++j) {
      // exp keeps rates positive; probabilities are additionally capped at 1
      out.q[out.idx(out.first_year + j, age)] = std::min(std::exp(preds[j]), 1.0);
    }
  }
  return out;
}

ForecastEnsemble ensemble_forecast(const TrainConfig& config, const LogRateSurface& x,
                                   int runs, int horizon, std::uint64_t base_seed,
                                   int threads) {
  if (runs < 1) throw EmptyEnsemble("ensemble needs at least one run");
  const auto data =
      make_training_sequences(x, config.input_size, config.train_horizon, all_ages(x.max_age));

  std::vector<MortalitySurface> grids(runs);
  parallel_for(runs, threads, [&](int r) {
    const TrainedModel m = train(config, data, base_seed + static_cast<std::uint64_t>(r));
    grids[r] = extrapolate(m.cell, x, horizon);
  });
  return make_ensemble(std::move(grids));
}

SensitivityMatrix sensitivity_matrix(const DenseCell& cell, const LogRateSurface& x, int age,
                                     int horizon) {
  if (horizon <= x.last_year) {
    throw HorizonInPast("horizon " + std::to_string(horizon) + " is not beyond " +
                        std::to_string(x.last_year));
  }
  if (age < 0 || age > x.max_age) throw ShapeMismatch("age outside surface");
  const int n = cell.spec.input_size;
  if (x.n_years() < n) throw SurfaceTooShort("surface shorter than model input size");
  const int steps = horizon - x.last_year;

  Eigen::VectorXd window(n);
  for (int i = 0; i < n; ++i) window(i) = x.at(x.last_year - n + 1 + i, age);
  const RolloutJacobian rj = rollout_jacobian(cell, window, steps);

  // Source values in q-space: the historical window then the forecasts.
  std::vector<double> q_source(n + steps);
  std::vector<bool> capped(n + steps, false);
  for (int i = 0; i < n; ++i) q_source[i] = std::exp(window(i));
  for (int j = 0; j < steps; ++j) {
    const double raw = std::exp(rj.outputs[j]);
    capped[n + j] = raw > 1.0;
    q_source[n + j] = std::min(raw, 1.0);
  }

  SensitivityMatrix s;
  s.age = age;
  s.sex = x.sex;
  s.first_row_year = x.last_year + 1;
  s.first_col_year = x.last_year - n + 1;
  s.values = Eigen::MatrixXd::Zero(steps, n + steps);
  for (int j = 0; j < steps; ++j) {
    if (capped[n + j]) continue;  // dq/dx = 0 where the cap bound
    const double q_row = q_source[n + j];
    for (int m = 0; m < n + steps; ++m) {
      if (capped[m]) continue;
      s.values(j, m) = rj.jacobian(j, m) * q_row / q_source[m];
    }
  }
  return s;
}

void write_sensitivity_csv(const SensitivityMatrix& s, const std::string& path) {
  std::ostringstream out;
  out << "t,t_prime,value\n";
  for (Eigen::Index j = 0; j < s.values.rows(); ++j) {
    const int t = s.first_row_year + static_cast<int>(j);
    for (Eigen::Index m = 0; m < s.values.cols(); ++m) {
      const int t_prime = s.first_col_year + static_cast<int>(m);
      if (t_prime >= t) continue;  // zero by construction
      out << t << ',' << t_prime << ',' << format_value(s.values(j, m)) << '\n';
    }
  }
  write_text_file(path, out.str());
}

MeanReversionSummary mean_reversion_summary(const SensitivityMatrix& s) {
  const int rows = static_cast<int>(s.values.rows());
  const int cols = static_cast<int>(s.values.cols());
  const int n = cols - rows;  // model input size
  const int max_lag = cols - 1;
  if (max_lag < 2) throw DegenerateMatrix("need at least 2 lag diagonals");

  MeanReversionSummary out;
  out.lag_mean.assign(max_lag + 1, 0.0);
  out.lag_variance.assign(max_lag + 1, 0.0);
  for (int lag = 1; lag <= max_lag; ++lag) {
    double sum = 0.0, sum2 = 0.0;
    int count = 0;
    for (int r = 0; r < rows; ++r) {
      const int c = r + n - lag;
      if (c < 0 || c >= cols) continue;
      const double v = s.values(r, c);
      sum += v;
      sum2 += v * v;
      ++count;
    }
    if (count == 0) continue;
    const double mean = sum / count;
    out.lag_mean[lag] = mean;
    out.lag_variance[lag] = sum2 / count - mean * mean;
  }

  double neg_sum = 0.0, pos_sum = 0.0;
  int neg_count = 0, pos_count = 0;
  for (int lag = 1; lag <= std::min(16, max_lag); ++lag) {
    neg_sum += out.lag_mean[lag];
    ++neg_count;
  }
  for (int lag = 17; lag <= std::min(32, max_lag); ++lag) {
    pos_sum += out.lag_mean[lag];
    ++pos_count;
  }
  out.window_difference = pos_sum - neg_sum;
  out.reversion = neg_count > 0 && pos_count > 0 && neg_sum / neg_count < 0.0 &&
                  pos_sum / pos_count > 0.0;
  return out;
}

namespace {

json cell_to_json(const DenseCell& cell) {
  json layers = json::array();
  for (std::size_t k = 0; k < cell.weights.size(); ++k) {
    const auto& w = cell.weights[k];
    json weights = json::array();
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) weights.push_back(w(r, c));
    }
    json biases = json::array();
    for (Eigen::Index i = 0; i < cell.biases[k].size(); ++i) {
      biases.push_back(cell.biases[k](i));
    }
    layers.push_back({{"rows", w.rows()}, {"cols", w.cols()}, {"weights", weights},
                      {"biases", biases}});
  }
  return layers;
}

DenseCell cell_from_json(const CellSpec& spec, const json& layers) {
  DenseCell cell;
  cell.spec = spec;
  const auto dims = spec.layer_dims();
  if (static_cast<int>(layers.size()) != spec.depth - 1) {
    throw ParseError("checkpoint layer count does not match spec");
  }
  for (int k = 1; k < spec.depth; ++k) {
    const json& layer = layers[k - 1];
    const long rows = layer.at("rows").get<long>();
    const long cols = layer.at("cols").get<long>();
    if (rows != dims[k] || cols != dims[k - 1]) {
      throw ParseError("checkpoint layer " + std::to_string(k) + " has wrong shape");
    }
    Eigen::MatrixXd w(rows, cols);
    const auto& weights = layer.at("weights");
    if (static_cast<long>(weights.size()) != rows * cols) {
      throw ParseError("checkpoint weight payload truncated");
    }
    std::size_t i = 0;
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (Eigen::Index c = 0; c < cols; ++c) w(r, c) = weights[i++].get<double>();
    }
    Eigen::VectorXd b(rows);
    const auto& biases = layer.at("biases");
    if (static_cast<long>(biases.size()) != rows) {
      throw ParseError("checkpoint bias payload truncated");
    }
    for (Eigen::Index r = 0; r < rows; ++r) b(r) = biases[r].get<double>();
    cell.weights.push_back(std::move(w));
    cell.biases.push_back(std::move(b));
  }
  return cell;
}

}  // namespace

void save_checkpoint(const TrainedModel& model, const std::string& path) {
  json j;
  j["format"] = "pensim-model";
  j["version"] = 1;
  j["rng_algorithm"] = kRngAlgorithm;
  j["sex"] = std::string(1, sex_letter(model.sex));
  j["seed"] = model.seed;
  j["history_last_year"] = model.history_last_year;
  j["spec"] = {{"input_size", model.config.input_size},
               {"depth", model.config.depth},
               {"hidden_width", model.config.hidden_width}};
  j["config"] = {{"train_horizon", model.config.train_horizon},
                 {"batch_size", model.config.batch_size},
                 {"schedule_interval", model.config.schedule_interval},
                 {"initial_rate", model.config.initial_rate},
                 {"rate_decay", model.config.rate_decay},
                 {"train_steps", model.config.train_steps},
                 {"b_init", model.config.b_init},
                 {"sigma_init", model.config.sigma_init},
                 {"rmsprop_decay", model.config.rmsprop_decay},
                 {"rmsprop_epsilon", model.config.rmsprop_epsilon},
                 {"stop_gradient", model.config.stop_gradient}};
  j["layers"] = cell_to_json(model.cell);
  j["window_loss"] = model.window_loss;
  j["checkpoint_loss"] = model.checkpoint_loss;
  j["learning_rates"] = model.learning_rates;
  j["validation_loss"] = model.validation_loss;
  write_text_file(path, j.dump(1) + "\n");
}

TrainedModel load_checkpoint(const std::string& path) {
  json j;
  try {
    j = json::parse(read_text_file(path));
  } catch (const json::exception& e) {
    throw ParseError(path + ": invalid checkpoint JSON: " + e.what());
  }
  try {
    if (j.at("format").get<std::string>() != "pensim-model") {
      throw ParseError(path + ": not a model checkpoint");
    }
    if (j.at("version").get<int>() != 1) {
      throw ParseError(path + ": unsupported checkpoint version");
    }
    TrainedModel m;
    m.sex = parse_sex(j.at("sex").get<std::string>());
    m.seed = j.at("seed").get<std::uint64_t>();
    m.history_last_year = j.at("history_last_year").get<int>();
    m.config.input_size = j.at("spec").at("input_size").get<int>();
    m.config.depth = j.at("spec").at("depth").get<int>();
    m.config.hidden_width = j.at("spec").at("hidden_width").get<int>();
    const json& c = j.at("config");
    m.config.train_horizon = c.at("train_horizon").get<int>();
    m.config.batch_size = c.at("batch_size").get<int>();
    m.config.schedule_interval = c.at("schedule_interval").get<long>();
    m.config.initial_rate = c.at("initial_rate").get<double>();
    m.config.rate_decay = c.at("rate_decay").get<double>();
    m.config.train_steps = c.at("train_steps").get<long>();
    m.config.b_init = c.at("b_init").get<double>();
    m.config.sigma_init = c.at("sigma_init").get<double>();
    m.config.rmsprop_decay = c.at("rmsprop_decay").get<double>();
    m.config.rmsprop_epsilon = c.at("rmsprop_epsilon").get<double>();
    m.config.stop_gradient = c.at("stop_gradient").get<bool>();
    m.cell = cell_from_json(m.config.cell_spec(), j.at("layers"));
    m.window_loss = j.at("window_loss").get<std::vector<double>>();
    m.checkpoint_loss = j.at("checkpoint_loss").get<std::vector<double>>();
    m.learning_rates = j.at("learning_rates").get<std::vector<double>>();
    m.validation_loss = j.at("validation_loss").get<std::vector<double>>();
    return m;
  } catch (const json::exception& e) {
    throw ParseError(path + ": malformed checkpoint: " + e.what());
  }
}

}  // namespace pensim

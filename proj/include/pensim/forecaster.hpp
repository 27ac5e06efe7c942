#ifndef PENSIM_FORECASTER_HPP
#define PENSIM_FORECASTER_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pensim/ensemble.hpp"
#include "pensim/mortality.hpp"
#include "pensim/neural.hpp"

namespace pensim {

// Training hyper-parameters. Defaults are the production configuration;
// every field can be overridden from the CLI or a config file.
struct TrainConfig {
  int input_size = 40;         // N
  int depth = 6;               // K
  int hidden_width = 64;       // H
  int train_horizon = 10;      // N_train
  int batch_size = 16;         // B
  long schedule_interval = 10000;  // window between learning-rate reviews
  double initial_rate = 1e-4;
  double rate_decay = 0.9;     // kappa
  long train_steps = 270000;
  double b_init = 0.1;
  double sigma_init = 0.1;
  double rmsprop_decay = 0.9;
  double rmsprop_epsilon = 1e-10;
  bool stop_gradient = false;  // ablation: no gradients through the recursion

  void validate() const;
  CellSpec cell_spec() const { return {input_size, depth, hidden_width}; }
};

// Disjoint age groups for the tuning protocol: validation ages 1,6,11,...,
// test ages 2,7,12,..., training ages the remainder.
struct AgeSplit {
  std::vector<int> validation;
  std::vector<int> test;
  std::vector<int> training;

  static AgeSplit standard(int max_age);
  std::vector<int> training_plus_validation() const;
};

std::vector<int> all_ages(int max_age);

// One (window, target) pair per valid (year, age): per age the count is
// n_years - N - N_train + 1. Throws SurfaceTooShort when that is not
// positive.
std::vector<TrainingPair> make_training_sequences(const LogRateSurface& x, int input_size,
                                                  int train_horizon,
                                                  const std::vector<int>& ages);

struct TrainedModel {
  DenseCell cell;
  TrainConfig config;
  std::uint64_t seed = 0;
  Sex sex = Sex::male;
  int history_last_year = 0;             // last year of the surface trained on
  std::vector<double> window_loss;       // mean mini-batch loss per window
  std::vector<double> checkpoint_loss;   // full-dataset loss at window ends
  std::vector<double> learning_rates;    // rate in effect during each window
  std::vector<double> validation_loss;   // per window, when an eval set was given
};

// Learning-rate review: the rate is multiplied by `decay` when the new
// window's mean loss did not decrease (tie counts as not decreased).
double next_learning_rate(double rate, double prev_window_mean, double new_window_mean,
                          double decay);

// Runs `config.train_steps` RMSProp steps on uniformly-resampled
// mini-batches. Deterministic given (config, data, seed): the cell is
// initialised from derive_seed(seed, 0) and batches are drawn from
// derive_seed(seed, 1). `eval_set`, when given, is scored at every window
// end into validation_loss. Throws NumericFailure if the checkpoint loss
// stops being finite.
TrainedModel train(const TrainConfig& config, const std::vector<TrainingPair>& data,
                   std::uint64_t seed,
                   const std::vector<TrainingPair>* eval_set = nullptr);

// Mean of (predicted - target) log-rates over a sequence set.
double prediction_bias(const DenseCell& cell, const std::vector<TrainingPair>& data);

struct TuneGrid {
  std::vector<int> input_sizes{15, 25, 40};
  std::vector<int> depths{3, 4, 5, 6, 7};
  std::vector<int> hidden_widths{32, 64, 128, 256, 512};
};

struct TuneRow {
  int input_size, depth, hidden_width;
  long parameters;
  double min_validation_loss;
  long min_validation_step;
  double final_validation_loss;
};

struct TuneResult {
  TrainConfig best;
  std::vector<TuneRow> rows;
};

// Trains every grid combination on the training ages for `tune_steps`
// steps, scoring the validation ages every window. Picks the lowest minimum
// validation loss (ties: fewer parameters, then grid order) and sets the
// winner's train_steps to the checkpoint that achieved the minimum.
TuneResult tune(const LogRateSurface& x, const TuneGrid& grid, const TrainConfig& base,
                const AgeSplit& split, std::uint64_t master_seed, long tune_steps = 300000,
                int threads = 1);

// Recursive extrapolation of every age to `horizon`, returned in q-space
// (exp of the predicted log-rates, capped at 1).
MortalitySurface extrapolate(const DenseCell& cell, const LogRateSurface& x, int horizon);

// Trains `runs` models with seeds base_seed+0 .. base_seed+runs-1 and
// aggregates their forecasts cellwise (nearest-rank percentiles).
ForecastEnsemble ensemble_forecast(const TrainConfig& config, const LogRateSurface& x,
                                   int runs, int horizon, std::uint64_t base_seed,
                                   int threads = 1);

// d q_t / d q_t' for one age, assembled from the rollout Jacobian:
// (q_t / q_t') * d x_t / d x_t'. Rows are forecast years T_f+1..horizon;
// columns are years T_f-N+1..horizon (historical window then forecast
// years); entries with t' >= t are zero.
struct SensitivityMatrix {
  int age = 0;
  Sex sex = Sex::male;
  int first_row_year = 0;  // first forecast year
  int first_col_year = 0;  // oldest historical year in the window
  Eigen::MatrixXd values;  // k x (N + k)
};

SensitivityMatrix sensitivity_matrix(const DenseCell& cell, const LogRateSurface& x, int age,
                                     int horizon);

void write_sensitivity_csv(const SensitivityMatrix& s, const std::string& path);

// Diagonal lag structure of a sensitivity matrix. The reversion flag is set
// when the mean lag weight is negative over lags 1..16 and positive over
// lags 17..32: a rising long-term trend then pushes the forecast down.
struct MeanReversionSummary {
  std::vector<double> lag_mean;      // index = lag, entry 0 unused
  std::vector<double> lag_variance;  // along-diagonal variance per lag
  double window_difference = 0.0;    // sum s_j over 17..32 minus sum over 1..16
  bool reversion = false;
};

MeanReversionSummary mean_reversion_summary(const SensitivityMatrix& s);

// Checkpoint container: versioned JSON with spec dims, row-major weight
// payloads, seed, config and loss histories.
void save_checkpoint(const TrainedModel& model, const std::string& path);
TrainedModel load_checkpoint(const std::string& path);

}  // namespace pensim

#endif  // PENSIM_FORECASTER_HPP

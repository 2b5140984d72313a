#ifndef RADOPT_HARNESS_HPP
#define RADOPT_HARNESS_HPP

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "radopt/diagnostics.hpp"
#include "radopt/matrix.hpp"
#include "radopt/optim.hpp"
#include "radopt/problems.hpp"
#include "radopt/rng.hpp"

namespace radopt {

enum class Experiment { synthetic_classification, least_squares, mlp, timing, appendix_checks };

inline const char* experiment_name(Experiment e) {
  switch (e) {
    case Experiment::synthetic_classification: return "synthetic_classification";
    case Experiment::least_squares: return "least_squares";
    case Experiment::mlp: return "mlp";
    case Experiment::timing: return "timing";
    case Experiment::appendix_checks: return "appendix_checks";
  }
  return "?";
}

inline Experiment experiment_from_name(const std::string& name) {
  for (Experiment e : {Experiment::synthetic_classification, Experiment::least_squares,
                       Experiment::mlp, Experiment::timing, Experiment::appendix_checks})
    if (name == experiment_name(e)) return e;
  throw std::invalid_argument("unknown experiment: " + name);
}

struct RunConfig {
  Experiment experiment = Experiment::synthetic_classification;
  OptimizerConfig optimizer;

  // dataset parameters
  std::size_t n = 1000;
  std::size_t p = 125;
  double lambda0 = 30.0;
  double alpha = 1.3;
  double separation = 3.0;

  std::size_t epochs = 5;
  std::size_t batch_size = 1;
  std::size_t num_seeds = 5;
  std::uint64_t seed = 0;  // master seed
  std::vector<double> eta_grid;
  std::size_t tune_epochs = 0;  // 0: tune over `epochs`
  std::string out_dir = "out";
  bool record_walltime = false;  // off by default so outputs are byte-stable

  std::vector<double> grid() const {
    if (!eta_grid.empty()) return eta_grid;
    std::vector<double> g(9);
    for (int i = 0; i < 9; ++i) g[i] = std::pow(10.0, -3.0 + 0.5 * i);
    return g;
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

inline double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return x;
  } catch (const std::exception&) {
    throw std::invalid_argument("config key '" + key + "': bad numeric value '" + value + "'");
  }
}

inline std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const unsigned long long x = std::stoull(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return x;
  } catch (const std::exception&) {
    throw std::invalid_argument("config key '" + key + "': bad integer value '" + value + "'");
  }
}

inline std::vector<double> parse_grid(const std::string& key, const std::string& value) {
  std::vector<double> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(parse_double(key, item));
  }
  return out;
}

}  // namespace detail

// Applies one key=value assignment. Shared by the file parser and the CLI
// flag overrides so both spell keys identically.
inline void apply_config_key(RunConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "experiment") cfg.experiment = experiment_from_name(value);
  else if (key == "optimizer") cfg.optimizer.variant = variant_from_name(value);
  else if (key == "eta") {
    cfg.optimizer.eta = detail::parse_double(key, value);
    require(cfg.optimizer.eta > 0.0, "config key 'eta': must be positive");
  } else if (key == "delta") {
    cfg.optimizer.delta = detail::parse_double(key, value);
    require(cfg.optimizer.delta >= 0.0, "config key 'delta': must be nonnegative");
  } else if (key == "tau") cfg.optimizer.tau = detail::parse_u64(key, value);
  else if (key == "oversample") cfg.optimizer.oversample = detail::parse_u64(key, value);
  else if (key == "vr_update_freq") cfg.optimizer.vr_update_freq = detail::parse_u64(key, value);
  else if (key == "vr_warmup_epochs") cfg.optimizer.vr_warmup_epochs = detail::parse_u64(key, value);
  else if (key == "n") {
    cfg.n = detail::parse_u64(key, value);
    require(cfg.n >= 2, "config key 'n': must be at least 2");
  } else if (key == "p") {
    cfg.p = detail::parse_u64(key, value);
    require(cfg.p >= 1, "config key 'p': must be positive");
  } else if (key == "lambda0") {
    cfg.lambda0 = detail::parse_double(key, value);
    require(cfg.lambda0 > 0.0, "config key 'lambda0': must be positive");
  } else if (key == "alpha") {
    cfg.alpha = detail::parse_double(key, value);
    require(cfg.alpha >= 0.0, "config key 'alpha': must be nonnegative");
  } else if (key == "separation") {
    cfg.separation = detail::parse_double(key, value);
    require(cfg.separation >= 0.0, "config key 'separation': must be nonnegative");
  } else if (key == "epochs") cfg.epochs = detail::parse_u64(key, value);
  else if (key == "batch_size") {
    cfg.batch_size = detail::parse_u64(key, value);
    require(cfg.batch_size >= 1, "config key 'batch_size': must be positive");
  } else if (key == "num_seeds") {
    cfg.num_seeds = detail::parse_u64(key, value);
    require(cfg.num_seeds >= 1, "config key 'num_seeds': must be positive");
  } else if (key == "seed") cfg.seed = detail::parse_u64(key, value);
  else if (key == "eta_grid") cfg.eta_grid = detail::parse_grid(key, value);
  else if (key == "tune_epochs") cfg.tune_epochs = detail::parse_u64(key, value);
  else if (key == "out") cfg.out_dir = value;
  else if (key == "record_walltime") cfg.record_walltime = value == "1" || value == "true";
  else throw std::invalid_argument("unknown config key '" + key + "'");
}

// Flat key=value config file; '#' starts a comment. Flag overrides are
// applied by the caller after this returns.
inline RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config file not found: " + path);
  RunConfig cfg;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected key=value, got '" + line + "'");
    apply_config_key(cfg, detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)));
  }
  return cfg;
}

inline void write_config_echo(const RunConfig& cfg, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw std::runtime_error("cannot write config echo: " + path);
  std::fprintf(f, "experiment=%s\n", experiment_name(cfg.experiment));
  std::fprintf(f, "optimizer=%s\n", variant_name(cfg.optimizer.variant));
  std::fprintf(f, "eta=%.17g\n", cfg.optimizer.eta);
  std::fprintf(f, "delta=%.17g\n", cfg.optimizer.delta);
  std::fprintf(f, "tau=%zu\n", cfg.optimizer.tau);
  std::fprintf(f, "oversample=%zu\n", cfg.optimizer.oversample);
  std::fprintf(f, "vr_update_freq=%zu\n", cfg.optimizer.vr_update_freq);
  std::fprintf(f, "vr_warmup_epochs=%zu\n", cfg.optimizer.vr_warmup_epochs);
  std::fprintf(f, "n=%zu\np=%zu\n", cfg.n, cfg.p);
  std::fprintf(f, "lambda0=%.17g\nalpha=%.17g\nseparation=%.17g\n", cfg.lambda0, cfg.alpha,
               cfg.separation);
  std::fprintf(f, "epochs=%zu\nbatch_size=%zu\nnum_seeds=%zu\nseed=%llu\n", cfg.epochs,
               cfg.batch_size, cfg.num_seeds, static_cast<unsigned long long>(cfg.seed));
  const std::vector<double> grid = cfg.grid();
  std::fprintf(f, "eta_grid=");
  for (std::size_t i = 0; i < grid.size(); ++i)
    std::fprintf(f, "%s%.17g", i ? "," : "", grid[i]);
  std::fprintf(f, "\n");
  std::fprintf(f, "tune_epochs=%zu\n", cfg.tune_epochs);
  std::fprintf(f, "out=%s\n", cfg.out_dir.c_str());
  std::fprintf(f, "record_walltime=%d\n", cfg.record_walltime ? 1 : 0);
  std::fclose(f);
}

// ---- experiment orchestration ----

namespace detail {

inline std::unique_ptr<Problem> make_problem(const RunConfig& cfg, const Dataset& ds,
                                             MlpSpec* mlp_spec_out = nullptr) {
  switch (cfg.experiment) {
    case Experiment::least_squares: return std::make_unique<LeastSquaresProblem>(ds);
    case Experiment::mlp: {
      MlpSpec spec{{ds.x.cols(), 32, 2}, MlpSpec::Activation::tanh};
      if (mlp_spec_out) *mlp_spec_out = spec;
      return std::make_unique<MlpProblem>(spec, ds);
    }
    default: return std::make_unique<LogisticProblem>(ds);
  }
}

inline DenseVector initial_beta(const RunConfig& cfg, const Problem& prob) {
  if (cfg.experiment == Experiment::mlp) {
    const MlpSpec spec{{cfg.p, 32, 2}, MlpSpec::Activation::tanh};
    return mlp_init_params(spec, substream_seed(cfg.seed, "mlp-init"));
  }
  return DenseVector(prob.dim(), 0.0);
}

}  // namespace detail

// Classification accuracy for +-1 labels; mean loss for regression/MLP is
// handled by the caller.
inline double test_metric(const Problem& prob, const Dataset& ds, const DenseVector& beta,
                          Experiment experiment) {
  if (experiment == Experiment::synthetic_classification) {
    std::size_t hits = 0;
    for (std::size_t i : ds.test_idx) {
      double m = 0.0;
      for (std::size_t j = 0; j < ds.x.cols(); ++j) m += ds.x(i, j) * beta[j];
      if ((m >= 0.0 ? 1.0 : -1.0) == ds.y[i]) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(ds.test_idx.size());
  }
  return prob.mean_loss(beta, ds.test_idx);
}

struct TrajectoryResult {
  DenseVector beta;
  double final_train_loss = 0.0;
  bool diverged = false;
  // logging rows: (epoch, step, train_loss, test_metric, step_wall_us)
  struct Row {
    std::size_t epoch, step;
    double train_loss, metric, wall_us;
  };
  std::vector<Row> rows;
  DenseMatrix gradient_log;  // filled only when requested
  std::unique_ptr<Optimizer> optimizer;
};

// One seeded pass: the dataset is fixed, the visit order and the sketch are
// per-run substreams (run index = `run`). Losses are logged every 50 steps
// and at epoch ends.
inline TrajectoryResult run_trajectory(const RunConfig& cfg, const Dataset& ds,
                                       const Problem& prob, double eta, std::uint64_t run,
                                       std::size_t epochs, bool keep_gradient_log = false,
                                       bool log_rows = true) {
  OptimizerConfig ocfg = cfg.optimizer;
  ocfg.eta = eta;
  ocfg.seed = substream_seed(cfg.seed, "sketch", run);

  TrajectoryResult out;
  out.optimizer = make_optimizer(ocfg, detail::initial_beta(cfg, prob));
  Optimizer& opt = *out.optimizer;

  std::vector<std::size_t> order(ds.train_idx);
  Rng perm_rng(substream_seed(cfg.seed, "permutation", run));
  const std::size_t steps_per_epoch =
      (order.size() + cfg.batch_size - 1) / cfg.batch_size;
  if (keep_gradient_log)
    out.gradient_log = DenseMatrix(epochs * steps_per_epoch, prob.dim());

  DenseVector g(prob.dim()), batch_g(prob.dim());
  std::size_t step = 0;
  double wall_accum_us = 0.0;
  std::size_t wall_count = 0;
  for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
    perm_rng.shuffle(order);
    for (std::size_t pos = 0; pos < order.size(); pos += cfg.batch_size) {
      const std::size_t take = std::min(cfg.batch_size, order.size() - pos);
      if (take == 1) {
        prob.loss_grad(order[pos], opt.beta(), batch_g);
      } else {
        std::fill(batch_g.begin(), batch_g.end(), 0.0);
        for (std::size_t b = 0; b < take; ++b) {
          prob.loss_grad(order[pos + b], opt.beta(), g);
          axpy(1.0 / static_cast<double>(take), g, batch_g);
        }
      }
      if (keep_gradient_log)
        for (std::size_t j = 0; j < batch_g.size(); ++j) out.gradient_log(step, j) = batch_g[j];

      const auto t0 = std::chrono::steady_clock::now();
      try {
        opt.step(batch_g);
      } catch (const std::invalid_argument&) {
        out.diverged = true;  // non-finite parameters
      }
      const auto t1 = std::chrono::steady_clock::now();
      wall_accum_us += std::chrono::duration<double, std::micro>(t1 - t0).count();
      ++wall_count;
      ++step;
      if (out.diverged) break;

      const bool epoch_end = pos + take >= order.size();
      if (log_rows && (step % 50 == 0 || epoch_end)) {
        TrajectoryResult::Row row;
        row.epoch = epoch;
        row.step = step;
        row.train_loss = prob.mean_loss(opt.beta(), ds.train_idx);
        row.metric = test_metric(prob, ds, opt.beta(), cfg.experiment);
        row.wall_us = cfg.record_walltime ? wall_accum_us / static_cast<double>(wall_count) : 0.0;
        wall_accum_us = 0.0;
        wall_count = 0;
        out.rows.push_back(row);
      }
    }
    if (out.diverged) break;
  }
  out.beta = opt.beta();
  out.final_train_loss =
      out.diverged ? std::numeric_limits<double>::infinity() : prob.mean_loss(out.beta, ds.train_idx);
  return out;
}

// Grid search: one trajectory per grid point, scored by validation loss on
// the held-out split (single split rather than full cross validation). Ties
// break toward the smaller eta.
inline double tune_eta(const RunConfig& cfg, const Dataset& ds, const Problem& prob,
                       const std::vector<double>& grid) {
  require(!grid.empty(), "tune_eta: empty grid");
  const std::size_t epochs = cfg.tune_epochs > 0 ? cfg.tune_epochs : cfg.epochs;
  double best_eta = 0.0, best_val = std::numeric_limits<double>::infinity();
  std::vector<double> sorted(grid);
  std::sort(sorted.begin(), sorted.end());
  for (double eta : sorted) {
    TrajectoryResult res;
    try {
      res = run_trajectory(cfg, ds, prob, eta, /*run=*/0, epochs, false, /*log_rows=*/false);
    } catch (const std::exception&) {
      continue;
    }
    if (res.diverged) continue;
    const double val = prob.mean_loss(res.beta, ds.test_idx);
    if (std::isfinite(val) && val < best_val) {  // strict: ties keep smaller eta
      best_val = val;
      best_eta = eta;
    }
  }
  if (best_eta == 0.0) throw std::runtime_error("tune_eta: every grid point diverged");
  return best_eta;
}

}  // namespace radopt

#endif  // RADOPT_HARNESS_HPP

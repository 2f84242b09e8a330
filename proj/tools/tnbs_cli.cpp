// Command-line front end for TNBS-NARX identification.
//
//   tnbs fit       --data est.csv --out model.json [hyperparameters]
//   tnbs predict   --model model.json --data test.csv
//   tnbs simulate  --model model.json --data test.csv
//   tnbs synth     --out DIR
//   tnbs cv        --data est.csv --lambdas 0,0.01,0.1,1 --folds 3
//
// Every command prints a human-readable report and, with --report, writes a
// JSON sidecar. Sidecars contain no timing so seeded runs are byte-identical.
// Exit codes: 0 success, 2 input or configuration error, 3 numerical failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "tnbs/tnbs.hpp"

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;

template <typename T>
std::vector<T> parse_list(const std::string& text, const std::string& flag) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      if constexpr (std::is_same_v<T, double>) {
        out.push_back(item == "inf" ? std::numeric_limits<double>::infinity() : std::stod(item, &used));
        if (item == "inf") used = item.size();
      } else {
        if (item.front() == '-') throw std::invalid_argument(item);
        out.push_back(static_cast<T>(std::stoull(item, &used)));
      }
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      throw tnbs::ConfigError("cannot parse '" + item + "' in " + flag);
    }
  }
  return out;
}

template <typename T>
std::string join(const std::vector<T>& v) {
  std::ostringstream os;
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  return os.str();
}

double parse_snr(const std::string& text) {
  if (text == "inf" || text == "Inf" || text == "infinity") return std::numeric_limits<double>::infinity();
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::logic_error&) {
    throw tnbs::ConfigError("cannot parse SNR '" + text + "'");
  }
}

json snr_to_json(double snr) { return std::isinf(snr) ? json("inf") : json(snr); }

void write_sidecar(const std::string& path, const json& report) {
  if (path.empty()) return;
  tnbs::write_text_atomically(path, report.dump(2) + "\n");
}

// Hyperparameters shared by fit and cv.
struct FitOptions {
  std::string data;
  int degree = 3;
  int knots = 7;
  std::string ranks = "8";
  std::string lags_u = "1,2,3,4";
  std::string lags_y = "1,2,3,4";
  std::size_t alpha = 1;
  std::string lambda = "0";
  std::size_t sweeps = 12;
  double epsilon = 0.0;
  std::uint64_t seed = 0;
  std::size_t batch_size = 0;
  std::string scaling = "auto";
  std::string report;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--data", data, "Signal CSV with header u,y")->required();
    cmd->add_option("--degree", degree, "B-spline degree")->capture_default_str();
    cmd->add_option("--knots", knots, "Knot parameter m (m+1 knots)")->capture_default_str();
    cmd->add_option("--ranks", ranks, "TT-rank, one value or d-1 comma-separated values")->capture_default_str();
    cmd->add_option("--lags-u", lags_u, "Input lags, comma-separated (may be empty)")->capture_default_str();
    cmd->add_option("--lags-y", lags_y, "Output lags, comma-separated (may be empty)")->capture_default_str();
    cmd->add_option("--alpha", alpha, "Order of the difference penalty")->capture_default_str();
    cmd->add_option("--lambda", lambda, "Smoothing parameter, one value or d values")->capture_default_str();
    cmd->add_option("--sweeps", sweeps, "Maximum number of ALS sweeps")->capture_default_str();
    cmd->add_option("--epsilon", epsilon, "Stopping tolerance on the first-core objective")->capture_default_str();
    cmd->add_option("--seed", seed, "Seed for core initialization and batching")->capture_default_str();
    cmd->add_option("--batch-size", batch_size, "Rows sampled per core update (0 = all)")->capture_default_str();
    cmd->add_option("--scaling", scaling, "auto (min-max from data) or identity")
        ->check(CLI::IsMember({"auto", "identity"}))
        ->capture_default_str();
    cmd->add_option("--report", report, "Write a JSON report sidecar to this path");
  }

  tnbs::LagSpec lag_spec() const {
    return tnbs::make_lag_spec(parse_list<std::size_t>(lags_u, "--lags-u"), parse_list<std::size_t>(lags_y, "--lags-y"));
  }

  tnbs::FitConfig fit_config(std::size_t d) const {
    tnbs::FitConfig cfg;
    const auto r = parse_list<std::size_t>(ranks, "--ranks");
    if (r.size() == 1) {
      cfg.ranks.assign(d - 1, r[0]);
    } else {
      cfg.ranks = r;
    }
    const auto l = parse_list<double>(lambda, "--lambda");
    if (l.size() == 1) {
      cfg.lambdas.assign(d, l[0]);
    } else {
      cfg.lambdas = l;
    }
    cfg.penalty_order = alpha;
    cfg.max_sweeps = sweeps;
    cfg.epsilon = epsilon;
    cfg.seed = seed;
    if (batch_size > 0) cfg.batch_size = batch_size;
    return cfg;
  }

  std::optional<tnbs::Scaling> fixed_scaling() const {
    if (scaling == "identity") return tnbs::Scaling::identity();
    return std::nullopt;
  }

  json resolved(const tnbs::LagSpec& lags, const tnbs::FitConfig& cfg) const {
    json j;
    j["data"] = data;
    j["degree"] = degree;
    j["knot_param"] = knots;
    j["input_lags"] = lags.input_lags;
    j["output_lags"] = lags.output_lags;
    j["ranks"] = cfg.ranks;
    j["alpha"] = cfg.penalty_order;
    j["lambdas"] = cfg.lambdas;
    j["max_sweeps"] = cfg.max_sweeps;
    j["epsilon"] = cfg.epsilon;
    j["seed"] = cfg.seed;
    j["batch_size"] = cfg.batch_size ? json(*cfg.batch_size) : json(nullptr);
    j["scaling"] = scaling;
    return j;
  }
};

void print_config(const json& config) {
  std::cout << "configuration:\n";
  for (const auto& [key, value] : config.items()) std::cout << "  " << key << " = " << value.dump() << "\n";
}

json trace_to_json(const tnbs::SweepTrace& trace) {
  json j;
  j["sweeps_run"] = trace.sweeps_run;
  j["converged"] = trace.converged;
  j["first_core_objectives"] = trace.first_core_objectives;
  std::vector<double> objectives;
  for (const auto& u : trace.updates) objectives.push_back(u.objective);
  j["update_objectives"] = objectives;
  j["pseudo_inverse_solves"] = trace.pseudo_inverse_solves;
  j["max_condition"] = std::isfinite(trace.max_condition) ? json(trace.max_condition) : json("inf");
  j["clipped_inputs"] = trace.clipped_inputs;
  return j;
}

int run_fit(const FitOptions& opt, const std::string& out_path) {
  const tnbs::LagSpec lags = opt.lag_spec();
  const tnbs::FitConfig cfg = opt.fit_config(lags.dimension());
  const tnbs::BasisConfig basis = tnbs::make_basis(opt.degree, opt.knots);
  cfg.validate(lags.dimension(), basis.basis_count());
  json config = opt.resolved(lags, cfg);
  config["out"] = out_path;
  print_config(config);

  const tnbs::SignalPair data = tnbs::read_signal_csv(opt.data);
  const auto start = std::chrono::steady_clock::now();
  const tnbs::FitResult fit = tnbs::als_fit(data.u, data.y, lags, basis, cfg, opt.fixed_scaling());
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const tnbs::Signal yhat = tnbs::predict(fit.model, data.u, data.y);
  const std::span<const double> y_ref = std::span<const double>(data.y).subspan(lags.first_index());
  const double train_rmse = tnbs::rmse(y_ref, yhat);

  tnbs::save_model(fit.model, out_path);

  std::cout << "samples: " << data.u.size() << " (" << yhat.size() << " regressor rows)\n";
  std::cout << "parameters: " << fit.model.weights().parameter_count() << "\n";
  std::cout << "sweeps: " << fit.trace.sweeps_run << (fit.trace.converged ? " (converged)" : " (sweep cap)") << "\n";
  std::cout << "first-core objective per sweep:";
  for (double j : fit.trace.first_core_objectives) std::cout << " " << std::setprecision(8) << j;
  std::cout << "\n";
  if (fit.trace.pseudo_inverse_solves > 0) {
    std::cout << "pseudo-inverse solves: " << fit.trace.pseudo_inverse_solves << "\n";
  }
  std::cout << "training prediction RMSE: " << std::setprecision(6) << train_rmse << "\n";
  std::cout << "wall time: " << std::setprecision(3) << seconds << " s\n";
  std::cout << "model written to " << out_path << "\n";

  json report;
  report["command"] = "fit";
  report["config"] = config;
  report["parameter_count"] = fit.model.weights().parameter_count();
  report["training_rmse"] = train_rmse;
  report["trace"] = trace_to_json(fit.trace);
  write_sidecar(opt.report, report);
  return 0;
}

int run_eval(bool simulate, const std::string& model_path, const std::string& data_path, const std::string& output_csv,
             const std::string& report_path) {
  json config{{"model", model_path}, {"data", data_path}, {"output_csv", output_csv}};
  print_config(config);
  const tnbs::TnbsModel model = tnbs::load_model(model_path);
  const tnbs::SignalPair data = tnbs::read_signal_csv(data_path);
  const std::size_t n0 = model.lags().first_index();
  if (data.u.size() <= n0) {
    throw tnbs::InputError("data has " + std::to_string(data.u.size()) + " samples but the model needs more than " +
                           std::to_string(n0));
  }

  tnbs::ClipCounter clips;
  const tnbs::Signal yhat =
      simulate ? tnbs::simulate(model, data.u, std::span<const double>(data.y).first(n0), &clips)
               : tnbs::predict(model, data.u, data.y, &clips);
  const std::span<const double> y_ref = std::span<const double>(data.y).subspan(n0);
  const double err = tnbs::rmse(y_ref, yhat);

  if (!output_csv.empty()) {
    std::string text = "n,y,yhat\n";
    for (std::size_t i = 0; i < yhat.size(); ++i) {
      text += std::to_string(n0 + i) + "," + tnbs::format_double(y_ref[i]) + "," + tnbs::format_double(yhat[i]) + "\n";
    }
    tnbs::write_text_atomically(output_csv, text);
  }

  const char* what = simulate ? "simulation" : "prediction";
  std::cout << what << " RMSE: " << std::setprecision(6) << err << " over " << yhat.size() << " samples (from n="
            << n0 << ")\n";
  if (clips.clipped > 0) std::cout << "clipped basis evaluations: " << clips.clipped << "\n";

  json report;
  report["command"] = simulate ? "simulate" : "predict";
  report["config"] = config;
  report["rmse"] = err;
  report["samples"] = yhat.size();
  report["first_index"] = n0;
  report["clipped_inputs"] = clips.clipped;
  write_sidecar(report_path, report);
  return 0;
}

struct SynthOptions {
  std::string out_dir;
  std::uint64_t seed = 0;
  int degree = 2;
  int knots = 6;
  std::size_t rank = 5;
  std::string lags_u = "1,2,3,4";
  std::string lags_y = "1,2,3,4";
  std::size_t length = 3000;
  std::size_t train = 2000;
  std::size_t window = 5;
  std::string snr = "inf";
  double w_min = -4.0;
  double w_max = 5.0;
  std::string report;
};

int run_synth(const SynthOptions& opt) {
  tnbs::SynthSpec spec;
  spec.lags = tnbs::make_lag_spec(parse_list<std::size_t>(opt.lags_u, "--lags-u"),
                                  parse_list<std::size_t>(opt.lags_y, "--lags-y"));
  spec.degree = opt.degree;
  spec.knot_param = opt.knots;
  spec.rank = opt.rank;
  spec.w_min = opt.w_min;
  spec.w_max = opt.w_max;
  spec.length = opt.length;
  spec.train_length = opt.train;
  spec.window = opt.window;
  spec.seed = opt.seed;
  const double snr = parse_snr(opt.snr);
  spec.validate();

  json config{{"out", opt.out_dir},   {"seed", opt.seed},        {"degree", opt.degree},
              {"knot_param", opt.knots}, {"rank", opt.rank},       {"input_lags", spec.lags.input_lags},
              {"output_lags", spec.lags.output_lags}, {"length", opt.length}, {"train", opt.train},
              {"window", opt.window}, {"sigma", tnbs::kSmoothingSigma}, {"snr_db", snr_to_json(snr)},
              {"w_min", opt.w_min},   {"w_max", opt.w_max}};
  print_config(config);

  const tnbs::SynthDataset ds = tnbs::make_synthetic_dataset(spec, snr);
  fs::create_directories(opt.out_dir);
  const fs::path dir(opt.out_dir);
  tnbs::write_signal_csv(dir / "estimation.csv", ds.u_train(), ds.y_train());
  tnbs::write_signal_csv(dir / "test.csv", ds.u_test(), ds.y_test());
  tnbs::save_model(ds.truth, dir / "true_model.json");

  std::cout << "estimation samples: " << ds.train_length << "\n";
  std::cout << "test samples: " << ds.u.size() - ds.train_length << "\n";
  std::cout << "true ranks: " << join(ds.truth.weights().ranks()) << "\n";
  std::cout << "wrote estimation.csv, test.csv, true_model.json to " << opt.out_dir << "\n";

  json report;
  report["command"] = "synth";
  report["config"] = config;
  report["true_ranks"] = ds.truth.weights().ranks();
  report["estimation_samples"] = ds.train_length;
  report["test_samples"] = ds.u.size() - ds.train_length;
  write_sidecar(opt.report, report);
  return 0;
}

int run_cv(const FitOptions& opt, const std::string& grid_text, std::size_t folds) {
  const tnbs::LagSpec lags = opt.lag_spec();
  const tnbs::FitConfig cfg = opt.fit_config(lags.dimension());
  const tnbs::BasisConfig basis = tnbs::make_basis(opt.degree, opt.knots);
  const auto grid = parse_list<double>(grid_text, "--lambdas");
  cfg.validate(lags.dimension(), basis.basis_count());
  json config = opt.resolved(lags, cfg);
  config["lambdas"] = grid;
  config["folds"] = folds;
  print_config(config);

  const tnbs::SignalPair data = tnbs::read_signal_csv(opt.data);
  const tnbs::CrossValidation cv =
      tnbs::cross_validate_lambda(data.u, data.y, lags, basis, cfg, grid, folds, opt.fixed_scaling());

  std::cout << std::setw(14) << "lambda";
  for (std::size_t f = 0; f < folds; ++f) std::cout << std::setw(14) << ("fold " + std::to_string(f + 1));
  std::cout << std::setw(14) << "mean" << "\n";
  json table = json::array();
  for (std::size_t g = 0; g < cv.grid.size(); ++g) {
    std::cout << std::setw(14) << std::setprecision(6) << cv.grid[g];
    for (std::size_t f = 0; f < folds; ++f) {
      const double s = cv.scores(static_cast<Eigen::Index>(g), static_cast<Eigen::Index>(f));
      std::cout << std::setw(14) << s;
      table.push_back({{"lambda", cv.grid[g]}, {"fold", f + 1}, {"rmse", s}});
    }
    std::cout << std::setw(14) << cv.mean_scores[g] << "\n";
  }
  std::cout << "selected lambda: " << cv.best_lambda << "\n";

  json report;
  report["command"] = "cv";
  report["config"] = config;
  report["scores"] = table;
  report["mean_scores"] = cv.mean_scores;
  report["best_lambda"] = cv.best_lambda;
  write_sidecar(opt.report, report);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tensor-network B-spline NARX identification"};
  app.require_subcommand(1);

  FitOptions fit_opt;
  std::string fit_out;
  auto* fit = app.add_subcommand("fit", "Identify a model from estimation data");
  fit_opt.add_to(fit);
  fit->add_option("--out", fit_out, "Model JSON output path")->required();

  std::string model_path, data_path, output_csv, eval_report;
  auto* pred = app.add_subcommand("predict", "One-step-ahead prediction RMSE on a data set");
  auto* sim = app.add_subcommand("simulate", "Free-run simulation RMSE on a data set");
  for (auto* cmd : {pred, sim}) {
    cmd->add_option("--model", model_path, "Model JSON file")->required();
    cmd->add_option("--data", data_path, "Signal CSV with header u,y")->required();
    cmd->add_option("--out", output_csv, "Write per-sample n,y,yhat rows to this CSV");
    cmd->add_option("--report", eval_report, "Write a JSON report sidecar to this path");
    // Accepted for a uniform interface; evaluation is deterministic.
    cmd->add_option("--seed", fit_opt.seed, "Unused");
  }

  SynthOptions syn;
  auto* synth = app.add_subcommand("synth", "Generate the synthetic benchmark data set");
  synth->add_option("--out", syn.out_dir, "Output directory")->required();
  synth->add_option("--seed", syn.seed, "Random seed")->capture_default_str();
  synth->add_option("--degree", syn.degree, "B-spline degree")->capture_default_str();
  synth->add_option("--knots", syn.knots, "Knot parameter m")->capture_default_str();
  synth->add_option("--ranks", syn.rank, "TT-rank truncation of the true weights")->capture_default_str();
  synth->add_option("--lags-u", syn.lags_u, "Input lags")->capture_default_str();
  synth->add_option("--lags-y", syn.lags_y, "Output lags")->capture_default_str();
  synth->add_option("--length", syn.length, "Total signal length")->capture_default_str();
  synth->add_option("--train", syn.train, "Estimation samples (rest is test)")->capture_default_str();
  synth->add_option("--window", syn.window, "Gaussian smoothing window length (odd)")->capture_default_str();
  synth->add_option("--snr", syn.snr, "Estimation-output SNR in dB, or inf")->capture_default_str();
  synth->add_option("--w-min", syn.w_min, "Low weight value")->capture_default_str();
  synth->add_option("--w-max", syn.w_max, "High weight value")->capture_default_str();
  synth->add_option("--report", syn.report, "Write a JSON report sidecar to this path");

  FitOptions cv_opt;
  std::string grid = "0,0.001,0.01,0.1,1";
  std::size_t folds = 3;
  auto* cv = app.add_subcommand("cv", "Choose lambda by contiguous-block cross-validation");
  cv_opt.add_to(cv);
  cv->add_option("--lambdas", grid, "Comma-separated lambda grid")->capture_default_str();
  cv->add_option("--folds", folds, "Number of folds")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    if (*fit) return run_fit(fit_opt, fit_out);
    if (*pred) return run_eval(false, model_path, data_path, output_csv, eval_report);
    if (*sim) return run_eval(true, model_path, data_path, output_csv, eval_report);
    if (*synth) return run_synth(syn);
    if (*cv) return run_cv(cv_opt, grid, folds);
  } catch (const tnbs::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const tnbs::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return 0;
}

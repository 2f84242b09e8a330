// Identifies the default synthetic NARX system end to end, picking lambda by
// cross-validation, and reports held-out prediction and simulation errors.

#include <iostream>

#include "tnbs/tnbs.hpp"

int main() {
  tnbs::SynthSpec spec;
  spec.seed = 7;
  const tnbs::SynthDataset ds = tnbs::make_synthetic_dataset(spec, 20.0);

  const auto ranks = ds.truth.weights().interior_ranks();
  tnbs::FitConfig cfg = tnbs::make_fit_config(spec.lags.dimension(), 1, 2, 0.0, 16, spec.seed);
  cfg.ranks = ranks;

  const std::vector<double> grid{0.0, 1e-4, 1e-3, 1e-2, 1e-1};
  const tnbs::CrossValidation cv = tnbs::cross_validate_lambda(ds.u_train(), ds.y_train(), spec.lags, ds.truth.basis(),
                                                               cfg, grid, 3, tnbs::Scaling::identity());
  cfg.lambdas.assign(cfg.lambdas.size(), cv.best_lambda);

  const tnbs::FitResult fit =
      tnbs::als_fit(ds.u_train(), ds.y_train(), spec.lags, ds.truth.basis(), cfg, tnbs::Scaling::identity());

  const auto n0 = spec.lags.first_index();
  const auto y_test = ds.y_test();
  const auto pred = tnbs::predict(fit.model, ds.u_test(), y_test);
  const auto sim = tnbs::simulate(fit.model, ds.u_test(), y_test.first(n0));
  std::cout << "selected lambda:  " << cv.best_lambda << "\n"
            << "parameters:       " << fit.model.weights().parameter_count() << "\n"
            << "prediction RMSE:  " << tnbs::rmse(y_test.subspan(n0), pred) << "\n"
            << "simulation RMSE:  " << tnbs::rmse(y_test.subspan(n0), sim) << "\n";
}

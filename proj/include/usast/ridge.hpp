#pragma once

#include <vector>

#include "usast/transform.hpp"

namespace usast {

struct RidgeModel {
  // weights[c][f], one vector per class; decision is argmax of scores.
  std::vector<std::vector<double>> weights;
  std::vector<double> intercepts;
  double selected_alpha = 0.0;
  std::vector<double> alpha_grid;
  std::vector<double> loo_errors;  // mean squared LOO error per alpha

  std::vector<std::vector<double>> scores(const FeatureMatrix& x) const;
  std::vector<int> predict(const FeatureMatrix& x) const;
};

// One-vs-rest ridge on one-hot targets. The regularization strength is
// picked by exact leave-one-out squared error via the hat-matrix identity
// (no n refits). The intercept is a bias column penalized like any other
// coefficient, which keeps the closed-form LOO identity exact.
RidgeModel fit_ridge_loocv(const FeatureMatrix& x, const std::vector<int>& y,
                           std::size_t n_classes,
                           const std::vector<double>& alphas = {0.1, 1.0,
                                                                10.0});

}  // namespace usast

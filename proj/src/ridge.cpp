#include "usast/ridge.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace usast {

RidgeModel fit_ridge_loocv(const FeatureMatrix& x, const std::vector<int>& y,
                           std::size_t n_classes,
                           const std::vector<double>& alphas) {
  if (alphas.empty())
    throw std::invalid_argument("fit_ridge_loocv: empty alpha grid");
  const std::size_t n = x.rows;
  if (n < 2)
    throw std::invalid_argument("fit_ridge_loocv: need at least 2 samples");
  if (y.size() != n)
    throw std::invalid_argument("fit_ridge_loocv: label count mismatch");

  const std::size_t f = x.layout.columns();
  // augmented design: features plus a bias column
  Eigen::MatrixXd xa(n, f + 1);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < f; ++c) xa(r, c) = x.at(r, c);
    xa(r, f) = 1.0;
  }
  Eigen::MatrixXd target = Eigen::MatrixXd::Zero(n, n_classes);
  for (std::size_t r = 0; r < n; ++r) target(r, y[r]) = 1.0;

  Eigen::BDCSVD<Eigen::MatrixXd> svd(
      xa, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::MatrixXd& u = svd.matrixU();
  const Eigen::MatrixXd& v = svd.matrixV();
  const Eigen::VectorXd& sv = svd.singularValues();
  const Eigen::MatrixXd uty = u.transpose() * target;

  RidgeModel model;
  model.alpha_grid = alphas;
  std::size_t best = 0;
  for (std::size_t a = 0; a < alphas.size(); ++a) {
    const double alpha = alphas[a];
    Eigen::VectorXd shrink(sv.size());   // sigma^2 / (sigma^2 + alpha)
    for (Eigen::Index j = 0; j < sv.size(); ++j)
      shrink(j) = sv(j) * sv(j) / (sv(j) * sv(j) + alpha);
    // hat diagonal h_ii = sum_j u_ij^2 * shrink_j
    Eigen::VectorXd h = (u.array().square().matrix() * shrink);
    const Eigen::MatrixXd fitted = u * (shrink.asDiagonal() * uty);
    double err = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      const double denom = 1.0 - h(r);
      for (std::size_t c = 0; c < n_classes; ++c) {
        const double e = (target(r, c) - fitted(r, c)) / denom;
        err += e * e;
      }
    }
    err /= static_cast<double>(n * n_classes);
    model.loo_errors.push_back(err);
    if (err < model.loo_errors[best]) best = a;
  }
  model.selected_alpha = alphas[best];

  Eigen::VectorXd inv(sv.size());  // sigma / (sigma^2 + alpha)
  for (Eigen::Index j = 0; j < sv.size(); ++j)
    inv(j) = sv(j) / (sv(j) * sv(j) + model.selected_alpha);
  const Eigen::MatrixXd w = v * (inv.asDiagonal() * uty);  // (f+1) x classes

  model.weights.assign(n_classes, std::vector<double>(f, 0.0));
  model.intercepts.assign(n_classes, 0.0);
  for (std::size_t c = 0; c < n_classes; ++c) {
    for (std::size_t j = 0; j < f; ++j) model.weights[c][j] = w(j, c);
    model.intercepts[c] = w(f, c);
  }
  return model;
}

std::vector<std::vector<double>> RidgeModel::scores(
    const FeatureMatrix& x) const {
  const std::size_t f = x.layout.columns();
  if (!weights.empty() && weights[0].size() != f)
    throw std::invalid_argument("ridge: feature count mismatch");
  std::vector<std::vector<double>> out(
      x.rows, std::vector<double>(weights.size(), 0.0));
  for (std::size_t r = 0; r < x.rows; ++r) {
    for (std::size_t c = 0; c < weights.size(); ++c) {
      double s = intercepts[c];
      for (std::size_t j = 0; j < f; ++j) s += weights[c][j] * x.at(r, j);
      out[r][c] = s;
    }
  }
  return out;
}

std::vector<int> RidgeModel::predict(const FeatureMatrix& x) const {
  const auto s = scores(x);
  std::vector<int> out(x.rows, 0);
  for (std::size_t r = 0; r < x.rows; ++r) {
    std::size_t bestc = 0;
    for (std::size_t c = 1; c < s[r].size(); ++c)
      if (s[r][c] > s[r][bestc]) bestc = c;
    out[r] = static_cast<int>(bestc);
  }
  return out;
}

}  // namespace usast

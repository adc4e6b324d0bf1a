#include "hjb/core/errors.hpp"
#include "hjb/core/model.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <string>

namespace hjb {

namespace {

std::string at(const char* name, std::size_t j) {
  return std::string(name) + "[" + std::to_string(j) + "]";
}

std::string at(const char* name, std::size_t j, std::size_t l) {
  return std::string(name) + "[" + std::to_string(j) + "][" + std::to_string(l) + "]";
}

} // namespace

std::vector<Violation> validate_regime_model(const RegimeModel& m) {
  std::vector<Violation> out;
  const std::size_t k = m.delta.size();
  if (k < 2) {
    out.push_back({"delta", "regime count must be >= 2"});
  }
  auto check_size = [&](const char* field, std::size_t size) {
    if (size != k) out.push_back({field, "length must equal the regime count"});
    return size == k;
  };
  const bool sizes_ok = check_size("sigma", m.sigma.size()) & check_size("a", m.a.size()) &
                        check_size("b", m.b.size()) & check_size("p", m.p.size()) &
                        check_size("alpha", m.alpha.size());
  if (m.N < 1) {
    out.push_back({"N", "state dimension must be >= 1"});
  }
  if (!sizes_ok) return out;

  for (std::size_t j = 0; j < k; ++j) {
    if (!(m.delta[j] > 0.0)) out.push_back({at("delta", j), "discount must be positive"});
    if (!(m.sigma[j] > 0.0)) out.push_back({at("sigma", j), "volatility must be positive"});
    if (!(m.a[j] > 0.0)) out.push_back({at("a", j), "quadratic coefficient must be positive"});
    if (!(m.b[j] >= 0.0)) out.push_back({at("b", j), "constant term must be non-negative"});
    if (m.p[j] != 2.0) out.push_back({at("p", j), "exponent must equal 2"});
    if (m.alpha[j].size() != k) {
      out.push_back({at("alpha", j), "row length must equal the regime count"});
      continue;
    }
    double row = 0.0;
    for (std::size_t l = 0; l < k; ++l) {
      row += m.alpha[j][l];
      if (l != j && !(m.alpha[j][l] >= 0.0)) {
        out.push_back({at("alpha", j, l), "off-diagonal rate negative"});
      }
    }
    if (!(std::abs(row) <= 1e-12)) {
      out.push_back({at("alpha", j), "generator row must sum to 0"});
    }
    // With non-negative off-diagonal rates M = diag(delta) - alpha has
    // non-positive off-diagonals; the diagonal delta_j - alpha_jj must be > 0.
    if (!(m.delta[j] - m.alpha[j][j] > 0.0)) {
      out.push_back({at("alpha", j, j), "coupling matrix diagonal must be positive"});
    }
  }
  return out;
}

std::vector<std::vector<double>> coupling_matrix(const RegimeModel& model) {
  const std::size_t k = model.regimes();
  std::vector<std::vector<double>> M(k, std::vector<double>(k, 0.0));
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t l = 0; l < k; ++l) {
      M[j][l] = (j == l ? model.delta[j] : 0.0) - model.alpha[j][l];
    }
  }
  return M;
}

std::vector<double> stationary_distribution(const RegimeModel& model) {
  const auto k = static_cast<Eigen::Index>(model.regimes());
  // Replace one balance equation by the normalization.
  Eigen::MatrixXd system(k, k);
  for (Eigen::Index j = 0; j < k; ++j) {
    for (Eigen::Index l = 0; l < k; ++l) {
      system(l, j) = model.alpha[static_cast<std::size_t>(j)][static_cast<std::size_t>(l)];
    }
  }
  system.row(k - 1).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k);
  rhs(k - 1) = 1.0;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(system);
  if (!lu.isInvertible()) {
    throw MatrixError("regime chain has no unique stationary distribution");
  }
  const Eigen::VectorXd pi = lu.solve(rhs);
  return {pi.data(), pi.data() + k};
}

RegimeModel reference_two_regime_model() {
  RegimeModel m;
  m.delta = {1.0, 1.0};
  m.alpha = {{-0.4, 0.4}, {0.6, -0.6}};
  m.sigma = {0.3, 1.0};
  m.a = {2.5, 0.5};
  m.b = {1.0, 0.5};
  m.p = {2.0, 2.0};
  m.N = 2;
  return m;
}

} // namespace hjb

#include "hjb/exact/regime.hpp"

#include "hjb/core/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace hjb::exact {

namespace {

void require_valid(const RegimeModel& model) {
  const auto violations = validate_regime_model(model);
  if (!violations.empty()) {
    std::ostringstream msg;
    msg << "invalid regime model:";
    for (const auto& v : violations) msg << ' ' << v.field << " (" << v.predicate << ")";
    throw PreconditionError(msg.str());
  }
}

Eigen::VectorXd beta_equations(const RegimeModel& m, const Eigen::VectorXd& beta) {
  const auto k = beta.size();
  Eigen::VectorXd F(k);
  for (Eigen::Index j = 0; j < k; ++j) {
    const auto uj = static_cast<std::size_t>(j);
    double coupling = 0.0;
    for (Eigen::Index l = 0; l < k; ++l) {
      coupling += m.alpha[uj][static_cast<std::size_t>(l)] * beta(l);
    }
    F(j) = 2.0 * beta(j) * beta(j) + m.delta[uj] * beta(j) - coupling - m.a[uj];
  }
  return F;
}

Eigen::MatrixXd beta_jacobian(const RegimeModel& m, const Eigen::VectorXd& beta) {
  const auto k = beta.size();
  Eigen::MatrixXd J(k, k);
  for (Eigen::Index j = 0; j < k; ++j) {
    for (Eigen::Index l = 0; l < k; ++l) {
      const auto uj = static_cast<std::size_t>(j);
      J(j, l) = (j == l ? 4.0 * beta(j) + m.delta[uj] : 0.0) -
                m.alpha[uj][static_cast<std::size_t>(l)];
    }
  }
  return J;
}

} // namespace

double beta_residual(const RegimeModel& model, std::span<const double> beta) {
  const Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(beta.data(),
                                                             static_cast<Eigen::Index>(beta.size()));
  return beta_equations(model, b).cwiseAbs().maxCoeff();
}

double eta_residual(const RegimeModel& model, std::span<const double> beta,
                    std::span<const double> eta) {
  const auto M = coupling_matrix(model);
  double worst = 0.0;
  for (std::size_t j = 0; j < beta.size(); ++j) {
    double lhs = 0.0;
    for (std::size_t l = 0; l < eta.size(); ++l) lhs += M[j][l] * eta[l];
    const double rhs = model.b[j] + model.sigma[j] * model.sigma[j] * beta[j] * model.N;
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return worst;
}

std::vector<double> solve_regime_betas_from(const RegimeModel& model,
                                            std::span<const double> initial, double newton_tol,
                                            int max_iters) {
  require_valid(model);
  if (!(newton_tol > 0.0)) throw PreconditionError("newton_tol must be > 0");
  if (initial.size() != model.regimes()) throw PreconditionError("initial guess has wrong length");

  Eigen::VectorXd beta = Eigen::Map<const Eigen::VectorXd>(
      initial.data(), static_cast<Eigen::Index>(initial.size()));
  Eigen::VectorXd F = beta_equations(model, beta);
  double res = F.cwiseAbs().maxCoeff();
  std::vector<double> trace{res};
  int iter = 0;
  while (res > newton_tol) {
    if (iter == max_iters) {
      throw SolverError("beta Newton iteration did not converge", res, iter, trace);
    }
    const Eigen::VectorXd step = beta_jacobian(model, beta).partialPivLu().solve(-F);
    double damping = 1.0;
    Eigen::VectorXd trial = beta + step;
    Eigen::VectorXd F_trial = beta_equations(model, trial);
    while (F_trial.cwiseAbs().maxCoeff() > res && damping > 1e-10) {
      damping *= 0.5;
      trial = beta + damping * step;
      F_trial = beta_equations(model, trial);
    }
    beta = trial;
    F = F_trial;
    res = F.cwiseAbs().maxCoeff();
    trace.push_back(res);
    ++iter;
  }
  // One extra step takes the iterate from the tolerance down to round-off.
  if (res > 0.0) {
    const Eigen::VectorXd polished = beta + beta_jacobian(model, beta).partialPivLu().solve(-F);
    const double polished_res = beta_equations(model, polished).cwiseAbs().maxCoeff();
    if (polished_res <= res) beta = polished;
  }
  if ((beta.array() <= 0.0).any()) {
    throw BranchError("beta system converged to a non-positive root");
  }
  return {beta.data(), beta.data() + beta.size()};
}

std::vector<double> solve_regime_betas(const RegimeModel& model, double newton_tol,
                                       int max_iters) {
  require_valid(model);
  std::vector<double> initial(model.regimes());
  for (std::size_t j = 0; j < initial.size(); ++j) initial[j] = std::sqrt(model.a[j] / 2.0);
  return solve_regime_betas_from(model, initial, newton_tol, max_iters);
}

std::vector<double> solve_regime_etas(const RegimeModel& model, std::span<const double> beta) {
  require_valid(model);
  const auto k = static_cast<Eigen::Index>(model.regimes());
  if (beta.size() != model.regimes()) throw PreconditionError("beta has wrong length");
  const auto Mrows = coupling_matrix(model);
  Eigen::MatrixXd M(k, k);
  Eigen::VectorXd C(k);
  for (Eigen::Index j = 0; j < k; ++j) {
    const auto uj = static_cast<std::size_t>(j);
    for (Eigen::Index l = 0; l < k; ++l) M(j, l) = Mrows[uj][static_cast<std::size_t>(l)];
    C(j) = model.b[uj] + model.sigma[uj] * model.sigma[uj] * beta[uj] * model.N;
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
  if (!lu.isInvertible()) {
    throw MatrixError("coupling matrix is singular");
  }
  const Eigen::VectorXd eta = lu.solve(C);
  if (k == 2) {
    const double det = M(0, 0) * M(1, 1) - M(0, 1) * M(1, 0);
    const double e0 = (M(1, 1) * C(0) - M(0, 1) * C(1)) / det;
    const double e1 = (-M(1, 0) * C(0) + M(0, 0) * C(1)) / det;
    const double scale = 1.0 + std::max(std::abs(e0), std::abs(e1));
    if (std::abs(e0 - eta(0)) > 1e-12 * scale || std::abs(e1 - eta(1)) > 1e-12 * scale) {
      throw MatrixError("LU solve disagrees with the explicit 2x2 inverse");
    }
  }
  return {eta.data(), eta.data() + k};
}

RegimeCoefficients solve_regime_system(const RegimeModel& model, double newton_tol,
                                       int max_iters) {
  RegimeCoefficients out;
  out.beta = solve_regime_betas(model, newton_tol, max_iters);
  out.eta = solve_regime_etas(model, out.beta);
  out.residual_beta = beta_residual(model, out.beta);
  out.residual_eta = eta_residual(model, out.beta, out.eta);
  return out;
}

double beta_multistart_spread(const RegimeModel& model, int seeds, std::uint64_t seed,
                              double newton_tol) {
  const auto reference = solve_regime_betas(model, newton_tol);
  double scale = 1.0;
  for (double a : model.a) scale = std::max(scale, std::sqrt(a));
  std::mt19937_64 engine(seed);
  std::uniform_real_distribution<double> start(1e-3, 4.0 * scale);
  double spread = 0.0;
  std::vector<double> initial(model.regimes());
  for (int s = 0; s < seeds; ++s) {
    for (double& x : initial) x = start(engine);
    const auto beta = solve_regime_betas_from(model, initial, newton_tol, 200);
    for (std::size_t j = 0; j < beta.size(); ++j) {
      spread = std::max(spread, std::abs(beta[j] - reference[j]));
    }
  }
  return spread;
}

} // namespace hjb::exact

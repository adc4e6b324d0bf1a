#include "hjb/stochastic/estimators.hpp"

#include "hjb/core/errors.hpp"
#include "hjb/simd/kernels.hpp"

#include <cmath>
#include <sstream>

namespace hjb::stochastic {

namespace {

constexpr std::size_t kBlock = 256;

double squared_norm(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s = s + v * v;
  return s;
}

void require_burn_in(const PathSet& paths, double burn_in_fraction) {
  if (!(burn_in_fraction >= 0.2 && burn_in_fraction <= 0.8)) {
    throw PreconditionError("burn_in_fraction must lie in [0.2, 0.8]");
  }
  if (!(paths.meta.min_gain * paths.meta.T >= 5.0)) {
    throw PreconditionError("horizon shorter than five relaxation times (2A T < 5)");
  }
}

// Per-path time averages of g(|X|^2) over records with t >= burn_in * T.
template <class Fn>
MonteCarloEstimate time_average(const PathSet& paths, double burn_in_fraction, Fn&& g) {
  const double start = burn_in_fraction * paths.meta.T;
  std::vector<double> per_path(paths.n_paths);
  for (std::size_t p = 0; p < paths.n_paths; ++p) {
    std::vector<double> terms;
    terms.reserve(paths.n_records());
    for (std::size_t r = 0; r < paths.n_records(); ++r) {
      if (paths.times[r] + 1e-12 < start) continue;
      terms.push_back(g(squared_norm({paths.state(p, r), paths.dim})));
    }
    per_path[p] = pairwise_sum(terms) / static_cast<double>(terms.size());
  }
  return summarize(per_path);
}

} // namespace

MonteCarloEstimate summarize(std::span<const double> samples) {
  MonteCarloEstimate out;
  out.n_samples = samples.size();
  if (samples.empty()) return out;
  const double n = static_cast<double>(samples.size());
  out.mean = pairwise_sum(samples) / n;
  if (samples.size() < 2) return out;
  std::vector<double> dev(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double d = samples[i] - out.mean;
    dev[i] = d * d;
  }
  out.std_error = std::sqrt(pairwise_sum(dev) / (n - 1.0) / n);
  return out;
}

double linear_feedback_cost(double a, double b, int N, double sigma, double gain, double x0_sq) {
  return (0.5 * gain * gain + a) * (x0_sq + N * sigma * sigma) / (1.0 + 2.0 * gain) + b;
}

double truncation_tail_bound(double a, double b, int N, double sigma, double gain, double x0_sq,
                             double T) {
  const auto c = exact::scalar_quadratic_solution(a, b, N);
  const double s2 = sigma * sigma;
  const double quad = 0.5 * gain * gain + a;
  if (std::abs(gain - 2.0 * c.A) <= 1e-12 * c.A) {
    // e^{-T} E u(X_T) with E|X_T|^2 <= e^{-4AT}|x0|^2 + N sigma^2 / (4A).
    const double B = b + c.A * N * s2;
    return std::exp(-T) * (c.A * (std::exp(-4.0 * c.A * T) * x0_sq + N * s2 / (4.0 * c.A)) + B);
  }
  if (gain == 0.0) {
    return std::exp(-T) * (a * x0_sq + a * N * s2 * (T + 1.0) + b);
  }
  // Exact tail of the integral for E|X_t|^2 = |x0|^2 e^{-2kt} + N s^2 (1 - e^{-2kt})/(2k).
  const double k2 = 1.0 + 2.0 * gain;
  const double fast = std::exp(-k2 * T) / k2;
  return quad * (x0_sq * fast + N * s2 / (2.0 * gain) * (std::exp(-T) - fast)) + b * std::exp(-T);
}

DiscountedCostResult estimate_discounted_cost(const DiscountedCostParams& params,
                                              const RngSpec& rng) {
  const auto coeffs = exact::scalar_quadratic_solution(params.a, params.b, params.N);
  if (params.x0.size() != static_cast<std::size_t>(params.N)) {
    throw PreconditionError("x0 must have N coordinates");
  }
  if (!(params.sigma >= 0.0)) throw DomainError("sigma must be >= 0");
  if (params.n_paths == 0) throw PreconditionError("need at least one path");
  if (!(params.dt > 0.0)) throw PreconditionError("dt must be > 0");
  DiscountedCostResult result;
  result.gain = params.gain < 0.0 ? 2.0 * coeffs.A : params.gain;
  const double x0_sq = squared_norm(params.x0);
  result.truncation_bound = truncation_tail_bound(params.a, params.b, params.N, params.sigma,
                                                  result.gain, x0_sq, params.T);
  if (result.truncation_bound > params.truncation_budget) {
    std::ostringstream msg;
    msg << "truncation tail bound " << result.truncation_bound << " exceeds budget "
        << params.truncation_budget << "; increase T";
    throw PreconditionError(msg.str());
  }
  const std::size_t steps = step_count(params.T, params.dt);
  const std::size_t dim = params.x0.size();
  const double quad = 0.5 * result.gain * result.gain + params.a;
  const double gain_dt = result.gain * params.dt;
  const double vol = params.sigma * std::sqrt(params.dt);
  std::vector<double> weights(steps);
  for (std::size_t i = 0; i < steps; ++i) {
    weights[i] = std::exp(-static_cast<double>(i) * params.dt) * params.dt;
  }

  const auto& k = simd::kernels();
  std::vector<double> per_path(params.n_paths);
  for_each_block(params.n_paths, kBlock, params.threads, [&](std::size_t first, std::size_t last) {
    const std::size_t count = last - first;
    std::vector<PathStream> streams;
    streams.reserve(count);
    for (std::size_t p = first; p < last; ++p) streams.emplace_back(rng, p);
    std::vector<double> x(count * dim), noise(count * dim), sq(count), acc(count, 0.0);
    for (std::size_t p = 0; p < count; ++p) {
      for (std::size_t c = 0; c < dim; ++c) x[p * dim + c] = params.x0[c];
    }
    for (std::size_t i = 0; i < steps; ++i) {
      k.squared_norms(x.data(), count, dim, sq.data());
      k.accumulate_affine(acc.data(), sq.data(), count, weights[i], quad, params.b);
      for (std::size_t p = 0; p < count; ++p) {
        for (std::size_t c = 0; c < dim; ++c) noise[p * dim + c] = streams[p].normal();
      }
      k.euler_step(x.data(), noise.data(), x.size(), gain_dt, vol);
    }
    for (std::size_t p = 0; p < count; ++p) per_path[first + p] = acc[p];
  });
  result.estimate = summarize(per_path);
  return result;
}

VerificationResult verify_value_function(const DiscountedCostParams& params, const RngSpec& rng) {
  DiscountedCostParams optimal = params;
  optimal.gain = -1.0;
  const auto run = estimate_discounted_cost(optimal, rng);
  const auto c = exact::scalar_quadratic_solution(params.a, params.b, params.N);
  VerificationResult out;
  out.u_exact = c.A * squared_norm(params.x0) + params.b +
                c.A * params.N * params.sigma * params.sigma;
  out.estimate = run.estimate;
  out.truncation_bound = run.truncation_bound;
  out.tolerance = std::max(3.0 * run.estimate.std_error + run.truncation_bound, 0.02 * out.u_exact);
  const double diff = run.estimate.mean - out.u_exact;
  out.z_score = run.estimate.std_error > 0.0 ? diff / run.estimate.std_error : 0.0;
  out.pass = std::abs(diff) <= out.tolerance;
  return out;
}

MonteCarloEstimate estimate_stationary_moments(const PathSet& paths, double burn_in_fraction) {
  require_burn_in(paths, burn_in_fraction);
  return time_average(paths, burn_in_fraction, [](double sq) { return sq; });
}

MonteCarloEstimate long_run_cost_estimate(const PathSet& paths, double a, double b, double A,
                                          double burn_in_fraction) {
  require_burn_in(paths, burn_in_fraction);
  const double quad = 0.5 * (2.0 * A) * (2.0 * A) + a;
  return time_average(paths, burn_in_fraction, [&](double sq) { return quad * sq + b; });
}

std::vector<CheckpointEstimate> transversality_decay(const PathSet& paths,
                                                     const exact::QuadraticCoefficients& coeffs,
                                                     std::span<const double> checkpoints) {
  std::vector<CheckpointEstimate> out;
  std::vector<double> values(paths.n_paths);
  for (double t : checkpoints) {
    if (!(t >= 0.0 && t <= paths.meta.T + 1e-12)) {
      throw PreconditionError("checkpoint outside [0, T]");
    }
    std::size_t record = paths.n_records();
    for (std::size_t r = 0; r < paths.n_records(); ++r) {
      if (std::abs(paths.times[r] - t) <= 1e-9 * std::max(1.0, t)) record = r;
    }
    if (record == paths.n_records()) {
      throw PreconditionError("checkpoint does not fall on a recorded time");
    }
    const double discount = std::exp(-t);
    for (std::size_t p = 0; p < paths.n_paths; ++p) {
      const double sq = squared_norm({paths.state(p, record), paths.dim});
      values[p] = discount * std::abs(coeffs.A * sq + coeffs.B);
    }
    out.push_back({t, summarize(values)});
  }
  return out;
}

std::vector<MonteCarloEstimate> regime_occupation(const PathSet& paths, std::size_t regimes,
                                                  double burn_in_fraction) {
  if (!paths.has_regimes()) throw PreconditionError("path set carries no regime labels");
  if (!(burn_in_fraction >= 0.0 && burn_in_fraction < 1.0)) {
    throw PreconditionError("burn_in_fraction must lie in [0, 1)");
  }
  const double start = burn_in_fraction * paths.meta.T;
  std::vector<std::vector<double>> fractions(regimes, std::vector<double>(paths.n_paths));
  for (std::size_t p = 0; p < paths.n_paths; ++p) {
    std::vector<std::size_t> counts(regimes, 0);
    std::size_t total = 0;
    for (std::size_t r = 0; r < paths.n_records(); ++r) {
      if (paths.times[r] + 1e-12 < start) continue;
      ++counts[static_cast<std::size_t>(paths.regime(p, r) - 1)];
      ++total;
    }
    for (std::size_t j = 0; j < regimes; ++j) {
      fractions[j][p] = static_cast<double>(counts[j]) / static_cast<double>(total);
    }
  }
  std::vector<MonteCarloEstimate> out;
  for (const auto& f : fractions) out.push_back(summarize(f));
  return out;
}

MonteCarloEstimate switch_rate(const PathSet& paths) {
  std::vector<double> rates(paths.n_paths);
  for (std::size_t p = 0; p < paths.n_paths; ++p) {
    rates[p] = static_cast<double>(paths.switch_counts[p]) / paths.meta.T;
  }
  return summarize(rates);
}

double euler_second_moment(double gain, double sigma, int N, double x0_sq, double dt,
                           std::size_t steps) {
  const double contraction = (1.0 - gain * dt) * (1.0 - gain * dt);
  double m = x0_sq;
  for (std::size_t i = 0; i < steps; ++i) m = contraction * m + N * sigma * sigma * dt;
  return m;
}

} // namespace hjb::stochastic

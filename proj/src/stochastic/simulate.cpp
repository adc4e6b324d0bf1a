#include "hjb/core/errors.hpp"
#include "hjb/simd/kernels.hpp"
#include "hjb/stochastic/paths.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace hjb::stochastic {

namespace {

constexpr std::size_t kBlock = 256;

void check_common(std::span<const double> x0, double T, double dt, std::size_t n_paths,
                  const SimulationOptions& options) {
  if (x0.empty()) throw PreconditionError("x0 needs at least one coordinate");
  if (!(dt > 0.0) || !(T >= dt)) throw PreconditionError("need dt > 0 and T >= dt");
  if (n_paths == 0) throw PreconditionError("need at least one path");
  if (options.record_stride < 1) throw PreconditionError("record_stride must be >= 1");
}

PathSet allocate(std::span<const double> x0, double T, double dt, std::size_t n_paths,
                 const RngSpec& rng, const SimulationOptions& options) {
  PathSet ps;
  ps.n_paths = n_paths;
  ps.dim = x0.size();
  ps.rng = rng;
  ps.meta.dt = dt;
  ps.meta.T = T;
  ps.meta.n_steps = step_count(T, dt);
  ps.meta.record_stride = options.record_stride;
  const std::size_t stride = static_cast<std::size_t>(options.record_stride);
  for (std::size_t i = 0; i <= ps.meta.n_steps; i += stride) {
    ps.times.push_back(static_cast<double>(i) * dt);
  }
  ps.states.resize(n_paths * ps.times.size() * ps.dim);
  ps.switch_counts.assign(n_paths, 0);
  return ps;
}

void store(PathSet& ps, std::size_t first, std::size_t count, std::size_t record,
           const std::vector<double>& x) {
  for (std::size_t p = 0; p < count; ++p) {
    double* dst = ps.states.data() + ((first + p) * ps.times.size() + record) * ps.dim;
    for (std::size_t c = 0; c < ps.dim; ++c) dst[c] = x[p * ps.dim + c];
  }
}

} // namespace

const char* switching_name(Switching s) {
  return s == Switching::BernoulliEuler ? "bernoulli-euler" : "exponential-clock";
}

std::size_t step_count(double T, double dt) {
  const double steps = T / dt;
  const double rounded = std::round(steps);
  if (std::abs(steps - rounded) > 1e-9 * std::max(1.0, steps)) {
    throw PreconditionError("horizon T must be a whole number of steps dt");
  }
  return static_cast<std::size_t>(rounded);
}

PathSet simulate_ou(double A, double sigma, std::span<const double> x0, double T, double dt,
                    std::size_t n_paths, const RngSpec& rng, const SimulationOptions& options) {
  if (!(A > 0.0)) throw DomainError("A must be > 0");
  if (!(sigma >= 0.0)) throw DomainError("sigma must be >= 0");
  check_common(x0, T, dt, n_paths, options);
  PathSet ps = allocate(x0, T, dt, n_paths, rng, options);
  ps.meta.min_gain = 2.0 * A;
  ps.meta.stability_warning = 2.0 * A * dt >= 1.0;

  const double gain_dt = 2.0 * A * dt;
  const double vol = sigma * std::sqrt(dt);
  const std::size_t dim = ps.dim;
  const std::size_t stride = static_cast<std::size_t>(options.record_stride);
  const auto& k = simd::kernels();
  for_each_block(n_paths, kBlock, options.threads, [&](std::size_t first, std::size_t last) {
    const std::size_t count = last - first;
    std::vector<PathStream> streams;
    streams.reserve(count);
    for (std::size_t p = first; p < last; ++p) streams.emplace_back(rng, p);
    std::vector<double> x(count * dim);
    for (std::size_t p = 0; p < count; ++p) {
      for (std::size_t c = 0; c < dim; ++c) x[p * dim + c] = x0[c];
    }
    std::vector<double> noise(count * dim);
    store(ps, first, count, 0, x);
    for (std::size_t step = 1; step <= ps.meta.n_steps; ++step) {
      for (std::size_t p = 0; p < count; ++p) {
        for (std::size_t c = 0; c < dim; ++c) noise[p * dim + c] = streams[p].normal();
      }
      k.euler_step(x.data(), noise.data(), x.size(), gain_dt, vol);
      if (step % stride == 0) store(ps, first, count, step / stride, x);
    }
  });
  return ps;
}

PathSet simulate_regime_switching(const RegimeModel& model, std::span<const double> beta,
                                  std::span<const double> x0, std::size_t j0, double T, double dt,
                                  std::size_t n_paths, const RngSpec& rng, Switching switching,
                                  const SimulationOptions& options) {
  const auto violations = validate_regime_model(model);
  if (!violations.empty()) {
    throw PreconditionError("invalid regime model: " + violations.front().field + " (" +
                            violations.front().predicate + ")");
  }
  const std::size_t regimes = model.regimes();
  if (beta.size() != regimes) throw PreconditionError("beta has wrong length");
  if (j0 >= regimes) throw PreconditionError("initial regime out of range");
  check_common(x0, T, dt, n_paths, options);

  double max_rate = 0.0;
  for (std::size_t j = 0; j < regimes; ++j) max_rate = std::max(max_rate, -model.alpha[j][j]);
  if (switching == Switching::BernoulliEuler && !(dt * max_rate < 0.5)) {
    std::ostringstream msg;
    msg << "dt * max switching rate = " << dt * max_rate << " >= 0.5; Bernoulli steps invalid";
    throw PreconditionError(msg.str());
  }

  PathSet ps = allocate(x0, T, dt, n_paths, rng, options);
  ps.meta.switching = switching_name(switching);
  ps.regimes.assign(n_paths * ps.times.size(), 0);
  std::vector<double> gain_dt(regimes), vol(regimes);
  ps.meta.min_gain = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < regimes; ++j) {
    gain_dt[j] = 2.0 * beta[j] * dt;
    vol[j] = model.sigma[j] * std::sqrt(dt);
    ps.meta.min_gain = std::min(ps.meta.min_gain, 2.0 * beta[j]);
    if (gain_dt[j] >= 1.0) ps.meta.stability_warning = true;
  }

  const std::size_t dim = ps.dim;
  const std::size_t stride = static_cast<std::size_t>(options.record_stride);
  const auto& k = simd::kernels();

  // Next regime after leaving j, drawn with probability alpha_jl / rate_j.
  auto jump_target = [&](std::size_t j, double u) {
    const double rate = -model.alpha[j][j];
    double cumulative = 0.0;
    std::size_t target = j;
    for (std::size_t l = 0; l < regimes; ++l) {
      if (l == j) continue;
      cumulative += model.alpha[j][l] / rate;
      target = l;
      if (u < cumulative) break;
    }
    return target;
  };

  for_each_block(n_paths, kBlock, options.threads, [&](std::size_t first, std::size_t last) {
    const std::size_t count = last - first;
    std::vector<PathStream> streams;
    streams.reserve(count);
    for (std::size_t p = first; p < last; ++p) streams.emplace_back(rng, p);
    std::vector<double> x(count * dim);
    for (std::size_t p = 0; p < count; ++p) {
      for (std::size_t c = 0; c < dim; ++c) x[p * dim + c] = x0[c];
    }
    std::vector<std::size_t> state(count, j0);
    std::vector<double> next_jump(count, std::numeric_limits<double>::infinity());
    if (switching == Switching::ExponentialClock) {
      for (std::size_t p = 0; p < count; ++p) {
        const double rate = -model.alpha[j0][j0];
        if (rate > 0.0) next_jump[p] = streams[p].exponential(rate);
      }
    }
    std::vector<double> noise(count * dim), g(count * dim), v(count * dim);
    auto record = [&](std::size_t r) {
      store(ps, first, count, r, x);
      for (std::size_t p = 0; p < count; ++p) {
        ps.regimes[(first + p) * ps.times.size() + r] = static_cast<int>(state[p]) + 1;
      }
    };
    record(0);
    for (std::size_t step = 1; step <= ps.meta.n_steps; ++step) {
      const double t_end = static_cast<double>(step) * dt;
      for (std::size_t p = 0; p < count; ++p) {
        PathStream& s = streams[p];
        std::size_t& j = state[p];
        if (switching == Switching::BernoulliEuler && model.alpha[j][j] < 0.0) {
          const double u = s.uniform();
          double cumulative = 0.0;
          for (std::size_t l = 0; l < regimes; ++l) {
            if (l == j) continue;
            cumulative += model.alpha[j][l] * dt;
            if (u < cumulative) {
              j = l;
              ++ps.switch_counts[first + p];
              break;
            }
          }
        } else if (switching == Switching::ExponentialClock) {
          while (next_jump[p] <= t_end) {
            j = jump_target(j, s.uniform());
            ++ps.switch_counts[first + p];
            const double rate = -model.alpha[j][j];
            next_jump[p] = rate > 0.0 ? next_jump[p] + s.exponential(rate)
                                      : std::numeric_limits<double>::infinity();
          }
        }
        for (std::size_t c = 0; c < dim; ++c) {
          noise[p * dim + c] = s.normal();
          g[p * dim + c] = gain_dt[j];
          v[p * dim + c] = vol[j];
        }
      }
      k.euler_step_varying(x.data(), noise.data(), g.data(), v.data(), x.size());
      if (step % stride == 0) record(step / stride);
    }
  });
  return ps;
}

} // namespace hjb::stochastic

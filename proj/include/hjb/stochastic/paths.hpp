#pragma once

#include "hjb/core/model.hpp"
#include "hjb/stochastic/rng.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace hjb::stochastic {

enum class Switching { BernoulliEuler, ExponentialClock };

const char* switching_name(Switching s);

struct SchemeMetadata {
  double dt = 0.0;
  double T = 0.0;
  std::size_t n_steps = 0;
  int record_stride = 1;
  std::string scheme = "euler-maruyama";
  std::string switching = "none";
  std::string normal_method = kNormalMethod;
  // Smallest drift gain (2A for OU, min_j 2 beta_j with regimes).
  double min_gain = 0.0;
  bool stability_warning = false; // gain * dt >= 1 somewhere
};

// states are stored [path][record][coordinate]; regimes [path][record] with
// labels 1..k, empty for unmodulated runs.
struct PathSet {
  std::vector<double> times;
  std::size_t n_paths = 0;
  std::size_t dim = 0;
  std::vector<double> states;
  std::vector<int> regimes;
  std::vector<int> switch_counts;
  RngSpec rng;
  SchemeMetadata meta;

  std::size_t n_records() const noexcept { return times.size(); }
  const double* state(std::size_t path, std::size_t record) const {
    return states.data() + (path * times.size() + record) * dim;
  }
  int regime(std::size_t path, std::size_t record) const {
    return regimes[path * times.size() + record];
  }
  bool has_regimes() const noexcept { return !regimes.empty(); }
};

struct SimulationOptions {
  int record_stride = 1; // keep every k-th step (step 0 always kept)
  int threads = 0;       // 0: hardware concurrency
};

// Step count T/dt; throws unless T is a whole number of steps.
std::size_t step_count(double T, double dt);

// X <- X - 2A X dt + sigma sqrt(dt) xi
PathSet simulate_ou(double A, double sigma, std::span<const double> x0, double T, double dt,
                    std::size_t n_paths, const RngSpec& rng, const SimulationOptions& options = {});

// Regime update first, then the state update with the new regime's
// coefficients. j0 is 0-based.
PathSet simulate_regime_switching(const RegimeModel& model, std::span<const double> beta,
                                  std::span<const double> x0, std::size_t j0, double T, double dt,
                                  std::size_t n_paths, const RngSpec& rng, Switching switching,
                                  const SimulationOptions& options = {});

// Runs fn(first_path, last_path) over fixed blocks of paths on worker threads.
// Block boundaries do not depend on the thread count.
template <class Fn>
void for_each_block(std::size_t n_paths, std::size_t block, int threads, Fn&& fn);

} // namespace hjb::stochastic

#include "hjb/stochastic/paths_impl.hpp"

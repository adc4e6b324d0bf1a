#pragma once

#include "hjb/core/model.hpp"
#include "hjb/stochastic/paths.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace hjb::cli {

class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

inline constexpr const char* kCommands[] = {"exact",    "radial",   "grid2d", "monotone",
                                            "simulate", "regime",   "verify", "all"};

bool is_command(const std::string& name);

struct RunConfig {
  std::string command;
  std::uint64_t seed = 20240601;
  std::filesystem::path output_dir = "out";
  nlohmann::json parameters = nlohmann::json::object();
};

// Accepts {"command", "seed", "output_dir", "parameters"}; anything else is rejected.
// The parameters are validated against the command's schema.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::filesystem::path& path);

// Throws ConfigError on unknown keys or out-of-range values.
void validate_parameters(const std::string& command, const nlohmann::json& parameters);

struct ExactParams {
  double a = 1.0;
  double b = 0.0;
  int N = 2;
  int samples = 100;
  double r_max = 50.0;
};

enum class BcKind { NeumannExact, DirichletExact, Neumann, Dirichlet };

struct RadialParams {
  int N = 2;
  double a = 1.0;
  double b = 0.0;
  double p = 2.0;
  double R = 10.0;
  int m = 600;
  BcKind bc = BcKind::NeumannExact;
  double bc_value = 0.0;
  double newton_tol = 1e-10;
  int max_newton_iters = 100;
};

enum class InitKind { Source, Exact, Zero };

struct Grid2dParams {
  bool anisotropic = false;
  Quadratic quadratic{2.0, 1.0};
  AnisotropicQuadratic aniso{1.0, 3.0, 0.5, 2.0};
  double p = 2.0;
  double L = 2.0;
  int n = 60;
  double lambda = 20.0;
  double damping = 0.5;
  double tol = 1e-6;
  int max_iters = 500;
  double gradient_clip = 0.0;
  InitKind init = InitKind::Source;
  int bins = 20;

  SourceSpec source() const;
  bool has_closed_form() const { return !anisotropic && p == 2.0; }
};

struct MonotoneParams {
  double a = 1.0;
  double b = 0.0;
  int N = 1;
  std::vector<double> radii = {4.0, 6.0, 8.0, 10.0};
  double R_obs = 2.0;
  std::vector<double> eps; // empty: 1/(n+1)
  int nodes_per_unit = 60;
  double newton_tol = 2e-11;
  bool parallel = true;
};

struct SimulateParams {
  double a = 1.0;
  double b = 0.0;
  double sigma = 1.0;
  int N = 1;
  std::vector<double> x0 = {5.0};
  double T = 50.0;
  double dt = 0.01;
  int paths = 5000;
  int record_stride = 10;
  double burn_in = 0.5;
  std::vector<double> checkpoints = {1.0, 5.0, 10.0, 15.0};
  int output_paths = 8;
  int threads = 0;
};

struct VerifyParams {
  double a = 1.0;
  double b = 0.0;
  double sigma = 1.0;
  int N = 1;
  std::vector<double> x0 = {0.0, 2.0}; // one scalar start per entry, same value in every coordinate
  double T = 15.0;
  double dt = 0.005;
  int paths = 20000;
  std::vector<double> gain_factors = {1.5, 0.5, 0.0}; // perturbed gains, as multiples of 2A
  double truncation_budget = 1e-3;
  int threads = 0;
};

struct RegimeParams {
  RegimeModel model = reference_two_regime_model();
  std::vector<double> x0 = {5.0, 0.0};
  int j0 = 1; // 1-based
  double T = 30.0;
  double dt = 0.01;
  int paths = 2000;
  int record_stride = 10;
  stochastic::Switching switching = stochastic::Switching::BernoulliEuler;
  double burn_in = 0.5;
  int output_paths = 8;
  double switch_dt = 0.001;
  double switch_T = 20.0;
  int switch_paths = 800;
  int multistart_seeds = 20;
  int threads = 0;
};

ExactParams parse_exact(const nlohmann::json& j);
RadialParams parse_radial(const nlohmann::json& j);
Grid2dParams parse_grid2d(const nlohmann::json& j);
MonotoneParams parse_monotone(const nlohmann::json& j);
SimulateParams parse_simulate(const nlohmann::json& j);
VerifyParams parse_verify(const nlohmann::json& j);
RegimeParams parse_regime(const nlohmann::json& j);

} // namespace hjb::cli

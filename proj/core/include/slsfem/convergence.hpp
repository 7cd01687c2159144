#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "slsfem/fem.hpp"
#include "slsfem/noise.hpp"
#include "slsfem/spectral.hpp"
#include "slsfem/timestepper.hpp"

namespace slsfem {

struct NoiseConfig {
  bool enabled = false;
  double s1 = 2.501;
  double s2 = 2.501;
  std::optional<int> J;  // nullopt: auto, N_h of the reference mesh
};

enum class ReferenceKind { spectral_oracle, fine_mesh };

struct ExperimentConfig {
  std::vector<int> levels;
  ReferenceKind reference = ReferenceKind::spectral_oracle;
  int reference_level = 9;
  double dt = 0.01;
  double t_final = 1.0;
  std::string initial = "paper";
  TimeScheme mode = TimeScheme::backward_euler;
  NoiseConfig noise;
  int n_samples = 1;
  std::uint64_t seed = 0;
  int workers = 0;  // 0: all hardware threads
  double beta_target = 2.0;
  bool allow_divergent_noise = false;
  int oracle_modes = 4096;

  int n_steps() const;
  void validate(bool stochastic) const;
};

/// Initial data presets: "paper" = sin(2 pi x) + i x(1-x), "zero",
/// "mode:<j>" = e_j in the real component.
SpectralField initial_modal(const std::string& preset, int n_modes);

/// L2 projection of the preset onto V_h (closed-form sine loads;
/// Gauss quadrature, exact for the quadratic, for the polynomial part).
StateVector initial_fem(const std::string& preset, const Mesh1D& mesh);

/// Exact L2 errors (e1, e2) of a coarse state against a reference state
/// living on the (nested, finer) mesh of `fine_ops`: the coarse state is
/// prolonged exactly and e_i = sqrt(d^T M_fine d).
std::pair<double, double> error_l2(const FemOperators& fine_ops,
                                   const StateVector& coarse,
                                   const StateVector& reference_on_fine);

/// Exact L2 errors of a FEM state against a truncated modal field, via
/// ||u_h - u||^2 = c^T M c - 2 c^T E a + |a|^2 with E the modal load
/// matrix of the state's mesh (column count = field modes).
std::pair<double, double> error_vs_spectral(const FemOperators& ops,
                                            const Eigen::MatrixXd& modal_loads,
                                            const StateVector& state,
                                            const SpectralField& field);

struct LevelRecord {
  int level = 0;
  double h = 0.0;
  double error_u1 = 0.0;
  double stderr_u1 = 0.0;
  double error_u2 = 0.0;
  double stderr_u2 = 0.0;
  int n_samples = 0;
};

struct RateFit {
  double rate = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // max abs deviation of the fit in log2 space
};

struct ConvergenceReport {
  std::string study;
  std::vector<LevelRecord> levels;
  RateFit fit_u1;
  RateFit fit_u2;
  std::uint64_t seed = 0;
  std::map<std::string, std::string> config_echo;
  std::vector<std::string> warnings;
};

/// Least-squares slope of log2(error) against log2(h).
RateFit fit_rate(const std::vector<std::pair<double, double>>& h_error);

using ProgressFn = std::function<void(int done, int total)>;

/// Final-time errors of the homogeneous evolution of the preset initial
/// data on every level against the configured reference, plus the
/// fitted rates. Requires noise.enabled == false.
ConvergenceReport run_deterministic_study(const ExperimentConfig& config);

/// Coupled-noise Monte Carlo: each sample draws one increment block and
/// evolves every level and the fine reference with it; reports RMS
/// errors with delta-method standard errors and fitted rates. The
/// result is a pure function of (config, seed), independent of the
/// worker count.
ConvergenceReport run_stochastic_study(const ExperimentConfig& config,
                                       const ProgressFn& progress = {});

}  // namespace slsfem

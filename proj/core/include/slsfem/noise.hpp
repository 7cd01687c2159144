#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>

#include "slsfem/fem.hpp"
#include "slsfem/mesh.hpp"
#include "slsfem/rng.hpp"
#include "slsfem/spectral.hpp"

namespace slsfem {

/// Truncated Karhunen-Loeve description of the pair (W_1, W_2) with
/// Q_i = Lambda^(-s_i), J retained modes, and a seeded counter stream.
struct NoiseModel {
  CovarianceSpec spec1{0.0, 1};
  CovarianceSpec spec2{0.0, 2};
  int J = 1;
  std::uint64_t seed = 0;
  double dt = 0.0;
  int n_steps = 0;

  void validate() const;
  double final_time() const { return dt * n_steps; }
};

/// Raw N(0, dt) increments for one Monte Carlo sample; comp_i is J x
/// n_steps with column n holding the step-(n+1) increments. Increments
/// are covariance-free (gamma scaling happens in the loads), so two
/// meshes sharing (seed, sample) consume identical blocks.
struct IncrementBlock {
  int n_steps = 0;
  int J = 0;
  Eigen::MatrixXd comp1;
  Eigen::MatrixXd comp2;
};

/// Deterministic function of (model.seed, sample_index); entries are
/// independent N(0, dt) draws from the frozen counter stream.
IncrementBlock sample_increments(const NoiseModel& model,
                                 std::uint64_t sample_index);

/// Precomputed gamma-weighted modal load matrices for one mesh, so the
/// per-step load is a single matrix-vector product. Immutable; shared
/// freely across Monte Carlo workers.
class NoiseAssembler {
 public:
  NoiseAssembler(const Mesh1D& mesh, const NoiseModel& model);

  /// Load pair (b1, b2) for one step (0-based) of a block:
  /// b_i[k] = sum_j gamma_{j,i}^{1/2} dbeta^n_{j,i} (e_j, phi_k).
  std::pair<Eigen::VectorXd, Eigen::VectorXd> loads(
      const IncrementBlock& block, int step) const;

  /// All steps at once; column n of each matrix is the step-n load.
  std::pair<Eigen::MatrixXd, Eigen::MatrixXd> loads_all_steps(
      const IncrementBlock& block) const;

 private:
  Eigen::MatrixXd weighted1_;  // N_h x J
  Eigen::MatrixXd weighted2_;
};

/// One-shot convenience wrapper around NoiseAssembler::loads.
std::pair<Eigen::VectorXd, Eigen::VectorXd> noise_load(
    const Mesh1D& mesh, const NoiseModel& model, const IncrementBlock& block,
    int step);

/// Noise truncation policy: keep J = N_h of the finest mesh (preserves
/// the FEM order) unless explicitly overridden.
struct TruncationPolicy {
  std::optional<int> override_J;
};

struct TruncationChoice {
  int J = 0;
  std::string warning;  // non-empty when an override undercuts N_h
};

TruncationChoice truncation_level(const Mesh1D& finest,
                                  const TruncationPolicy& policy = {});

/// Empirical check of the Ito isometry for the constant integrand:
/// E||W_J(T)||^2 against T * sum_j (gamma_{j,1} + gamma_{j,2}).
struct IsometryReport {
  double empirical = 0.0;
  double exact = 0.0;
  double rel_deviation = 0.0;
  double sigma_mean = 0.0;  // theoretical std. error of the empirical mean
  int n_samples = 0;
  bool within_3sigma = false;
};

IsometryReport ito_isometry_check(const NoiseModel& model, int n_samples);

}  // namespace slsfem

#pragma once

#include <Eigen/Dense>
#include <functional>
#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

#include "slsfem/fem.hpp"
#include "slsfem/tridiag.hpp"

namespace slsfem {

enum class TimeScheme { backward_euler, exact_semidiscrete };

struct SchemeConfig {
  double dt = 0.0;
  int n_steps = 0;
  TimeScheme mode = TimeScheme::backward_euler;

  double final_time() const { return dt * n_steps; }
};

/// Per-step right-hand-side loads (b1, b2) for 1-based step n ending at
/// time t_n. Deterministic forcing supplies dt * (f_i(t_n), phi_k);
/// noise supplies the increment loads directly. nullopt means no load.
using StepLoads =
    std::function<std::optional<std::pair<Eigen::VectorXd, Eigen::VectorXd>>(
        int step, double t_n)>;

/// One backward Euler solve per call against the cached factorization
/// of M - i dt S; immutable after construction, shareable across
/// Monte Carlo workers.
class BackwardEulerStepper {
 public:
  BackwardEulerStepper(const FemOperators& ops, double dt);

  /// Solves [[M, kS], [-kS, M]] X^n = (M U1 + b1, M U2 + b2) through the
  /// equivalent complex system (M - i k S) Z^n = M Z^{n-1} + (b1 + i b2).
  StateVector step(const StateVector& state, const Eigen::VectorXd* b1,
                   const Eigen::VectorXd* b2) const;

  double dt() const { return dt_; }

 private:
  const FemOperators* ops_;
  double dt_;
  ComplexTridiagonalFactor factor_;
};

/// Advances `initial` over scheme.n_steps steps. With
/// TimeScheme::backward_euler this is the implicit Euler scheme; with
/// TimeScheme::exact_semidiscrete the deterministic part is propagated
/// exactly through the discrete eigenpairs and any loads are rotated
/// with the state (exponential Euler), X^n = E_h(dt)(X^{n-1} + M^{-1}B^n).
/// When `trajectory` is non-null it receives states at steps 0..n_steps.
StateVector evolve(const FemOperators& ops, const SchemeConfig& scheme,
                   const StateVector& initial, const StepLoads& loads = {},
                   std::vector<StateVector>* trajectory = nullptr);

/// E_h(t) applied through the discrete eigenpairs: mode j rotates by
/// t * lambda_{h,j}. Conserves the discrete energy exactly.
StateVector exact_semidiscrete_apply(const FemOperators& ops, double t,
                                     const StateVector& state);

/// Time-dependent forcing given as coefficients of P_h f_i(t) in V_h.
using FemForcing = std::function<Eigen::VectorXd(double t)>;

/// Empirical check of the semidiscrete stability bound: evolves the
/// forced system exactly in the discrete eigenbasis and reports
///   lhs = ||u_{h,1}(t)||_{h,alpha} + ||u_{h,2}(t)||_{h,alpha},
///   rhs = initial norms + int_0^t (||P_h f_1||_{h,alpha} +
///         ||P_h f_2||_{h,alpha}) ds.
/// The bound holds with constant at most sqrt(2).
struct StabilityReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;  // lhs / rhs (0 when rhs is 0)
};

StabilityReport stability_check(const FemOperators& ops,
                                const FemForcing& forcing1,
                                const FemForcing& forcing2,
                                const StateVector& initial, double alpha,
                                double t_final);

/// Trajectory dump: header then one line per (step, node):
/// step,time,node_index,u1,u2 with node_index 1-based.
void write_trajectory_csv(std::ostream& os, const Mesh1D& mesh,
                          const std::vector<StateVector>& trajectory,
                          double dt);

}  // namespace slsfem

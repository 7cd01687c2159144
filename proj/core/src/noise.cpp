#include "slsfem/noise.hpp"

#include <cmath>

#include "slsfem/errors.hpp"

namespace slsfem {

void NoiseModel::validate() const {
  if (J < 1) throw ValidationError("NoiseModel: J must be >= 1");
  if (dt <= 0.0) throw ValidationError("NoiseModel: dt must be > 0");
  if (n_steps < 1) throw ValidationError("NoiseModel: n_steps must be >= 1");
  if (spec1.s < 0.0 || spec2.s < 0.0)
    throw ValidationError("NoiseModel: covariance exponent s must be >= 0");
}

IncrementBlock sample_increments(const NoiseModel& model,
                                 std::uint64_t sample_index) {
  model.validate();
  IncrementBlock block;
  block.n_steps = model.n_steps;
  block.J = model.J;
  block.comp1.resize(model.J, model.n_steps);
  block.comp2.resize(model.J, model.n_steps);
  const GaussianCounterStream stream(model.seed);
  const double scale = std::sqrt(model.dt);
  for (int n = 0; n < model.n_steps; ++n) {
    for (int j = 0; j < model.J; ++j) {
      block.comp1(j, n) =
          scale * stream.normal(sample_index, static_cast<std::uint32_t>(n),
                                static_cast<std::uint32_t>(j), 0);
      block.comp2(j, n) =
          scale * stream.normal(sample_index, static_cast<std::uint32_t>(n),
                                static_cast<std::uint32_t>(j), 1);
    }
  }
  return block;
}

NoiseAssembler::NoiseAssembler(const Mesh1D& mesh, const NoiseModel& model) {
  model.validate();
  const Eigen::MatrixXd loads = modal_load_matrix(mesh, model.J);
  Eigen::VectorXd w1(model.J), w2(model.J);
  for (int j = 1; j <= model.J; ++j) {
    w1[j - 1] = std::sqrt(model.spec1.gamma(j));
    w2[j - 1] = std::sqrt(model.spec2.gamma(j));
  }
  weighted1_ = loads * w1.asDiagonal();
  weighted2_ = loads * w2.asDiagonal();
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> NoiseAssembler::loads(
    const IncrementBlock& block, int step) const {
  if (step < 0 || step >= block.n_steps)
    throw ValidationError("NoiseAssembler: step out of range");
  return {weighted1_ * block.comp1.col(step),
          weighted2_ * block.comp2.col(step)};
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> NoiseAssembler::loads_all_steps(
    const IncrementBlock& block) const {
  return {weighted1_ * block.comp1, weighted2_ * block.comp2};
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> noise_load(
    const Mesh1D& mesh, const NoiseModel& model, const IncrementBlock& block,
    int step) {
  return NoiseAssembler(mesh, model).loads(block, step);
}

TruncationChoice truncation_level(const Mesh1D& finest,
                                  const TruncationPolicy& policy) {
  TruncationChoice choice;
  if (!policy.override_J) {
    choice.J = finest.n_interior;
    return choice;
  }
  choice.J = *policy.override_J;
  if (choice.J < 1)
    throw ValidationError("truncation_level: J override must be >= 1");
  if (choice.J < finest.n_interior)
    choice.warning = "noise truncation J=" + std::to_string(choice.J) +
                     " is below N_h=" + std::to_string(finest.n_interior) +
                     " of the finest mesh; the FEM order may degrade";
  return choice;
}

IsometryReport ito_isometry_check(const NoiseModel& model, int n_samples) {
  model.validate();
  if (n_samples < 1)
    throw ValidationError("ito_isometry_check: n_samples must be >= 1");
  const double t_final = model.final_time();

  Eigen::VectorXd gamma1(model.J), gamma2(model.J);
  for (int j = 1; j <= model.J; ++j) {
    gamma1[j - 1] = model.spec1.gamma(j);
    gamma2[j - 1] = model.spec2.gamma(j);
  }

  // ||W_J(T)||^2 = sum_j gamma_{j,1} beta_{j,1}(T)^2 + gamma_{j,2}
  // beta_{j,2}(T)^2 in the orthonormal basis; compensated accumulation
  // over samples.
  double sum = 0.0, comp = 0.0;
  for (int i = 0; i < n_samples; ++i) {
    const IncrementBlock block =
        sample_increments(model, static_cast<std::uint64_t>(i));
    const Eigen::VectorXd beta1 = block.comp1.rowwise().sum();
    const Eigen::VectorXd beta2 = block.comp2.rowwise().sum();
    const double stat = gamma1.dot(beta1.cwiseProduct(beta1)) +
                        gamma2.dot(beta2.cwiseProduct(beta2));
    const double y = stat - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }

  IsometryReport report;
  report.n_samples = n_samples;
  report.empirical = sum / n_samples;
  report.exact = t_final * (gamma1.sum() + gamma2.sum());
  // Var(gamma beta(T)^2) = 2 T^2 gamma^2 per independent mode/component.
  const double var_sample =
      2.0 * t_final * t_final *
      (gamma1.squaredNorm() + gamma2.squaredNorm());
  report.sigma_mean = std::sqrt(var_sample / n_samples);
  report.rel_deviation =
      (report.exact != 0.0)
          ? std::abs(report.empirical - report.exact) / report.exact
          : std::abs(report.empirical);
  report.within_3sigma =
      std::abs(report.empirical - report.exact) <= 3.0 * report.sigma_mean ||
      (report.exact == 0.0 && report.empirical == 0.0);
  return report;
}

}  // namespace slsfem

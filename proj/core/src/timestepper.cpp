#include "slsfem/timestepper.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <ostream>

#include "slsfem/errors.hpp"
#include "slsfem/spectral.hpp"

namespace slsfem {

BackwardEulerStepper::BackwardEulerStepper(const FemOperators& ops, double dt)
    : ops_(&ops),
      dt_(dt),
      factor_(ComplexTridiagonalFactor::mass_minus_i_stiffness(
          ops.mass, ops.stiffness, dt)) {
  if (dt <= 0.0) throw ValidationError("BackwardEulerStepper: dt must be > 0");
}

StateVector BackwardEulerStepper::step(const StateVector& state,
                                       const Eigen::VectorXd* b1,
                                       const Eigen::VectorXd* b2) const {
  const int n = ops_->mesh.n_interior;
  if (state.u1.size() != n || state.u2.size() != n)
    throw ValidationError("BackwardEulerStepper: state/mesh size mismatch");
  Eigen::VectorXcd rhs(n);
  const Eigen::VectorXd m_u1 = ops_->mass.apply(state.u1);
  const Eigen::VectorXd m_u2 = ops_->mass.apply(state.u2);
  for (int i = 0; i < n; ++i)
    rhs[i] = std::complex<double>(m_u1[i] + (b1 ? (*b1)[i] : 0.0),
                                  m_u2[i] + (b2 ? (*b2)[i] : 0.0));
  const Eigen::VectorXcd z = factor_.solve(rhs);
  StateVector next;
  next.mesh_level = state.mesh_level;
  next.u1 = z.real();
  next.u2 = z.imag();
  return next;
}

namespace {

StateVector evolve_backward_euler(const FemOperators& ops,
                                  const SchemeConfig& scheme,
                                  const StateVector& initial,
                                  const StepLoads& loads,
                                  std::vector<StateVector>* trajectory) {
  const BackwardEulerStepper stepper(ops, scheme.dt);
  StateVector state = initial;
  if (trajectory) trajectory->push_back(state);
  for (int n = 1; n <= scheme.n_steps; ++n) {
    std::optional<std::pair<Eigen::VectorXd, Eigen::VectorXd>> b;
    if (loads) b = loads(n, n * scheme.dt);
    state = stepper.step(state, b ? &b->first : nullptr,
                         b ? &b->second : nullptr);
    if (trajectory) trajectory->push_back(state);
  }
  return state;
}

StateVector evolve_exact(const FemOperators& ops, const SchemeConfig& scheme,
                         const StateVector& initial, const StepLoads& loads,
                         std::vector<StateVector>* trajectory) {
  const DiscreteEigenpairs& eig = ops.eig();
  const int n = ops.mesh.n_interior;

  // Work in modal coordinates a_j = phi_j^T M u; the modal coefficient
  // of M^{-1} b is phi_j^T b.
  Eigen::VectorXd a1 = eig.vectors.transpose() * ops.mass.apply(initial.u1);
  Eigen::VectorXd a2 = eig.vectors.transpose() * ops.mass.apply(initial.u2);
  Eigen::VectorXd cos_k(n), sin_k(n);
  for (int j = 0; j < n; ++j) {
    cos_k[j] = std::cos(scheme.dt * eig.values[j]);
    sin_k[j] = std::sin(scheme.dt * eig.values[j]);
  }
  const auto reconstruct = [&](const Eigen::VectorXd& c1,
                               const Eigen::VectorXd& c2) {
    StateVector s;
    s.mesh_level = initial.mesh_level;
    s.u1 = eig.vectors * c1;
    s.u2 = eig.vectors * c2;
    return s;
  };
  if (trajectory) trajectory->push_back(initial);
  for (int step = 1; step <= scheme.n_steps; ++step) {
    if (loads) {
      if (auto b = loads(step, step * scheme.dt)) {
        a1 += eig.vectors.transpose() * b->first;
        a2 += eig.vectors.transpose() * b->second;
      }
    }
    for (int j = 0; j < n; ++j) {
      const double v1 = cos_k[j] * a1[j] - sin_k[j] * a2[j];
      const double v2 = sin_k[j] * a1[j] + cos_k[j] * a2[j];
      a1[j] = v1;
      a2[j] = v2;
    }
    if (trajectory) trajectory->push_back(reconstruct(a1, a2));
  }
  return reconstruct(a1, a2);
}

}  // namespace

StateVector evolve(const FemOperators& ops, const SchemeConfig& scheme,
                   const StateVector& initial, const StepLoads& loads,
                   std::vector<StateVector>* trajectory) {
  if (scheme.dt <= 0.0 || scheme.n_steps < 0)
    throw ValidationError("evolve: need dt > 0 and n_steps >= 0");
  if (scheme.mode == TimeScheme::backward_euler)
    return evolve_backward_euler(ops, scheme, initial, loads, trajectory);
  return evolve_exact(ops, scheme, initial, loads, trajectory);
}

StateVector exact_semidiscrete_apply(const FemOperators& ops, double t,
                                     const StateVector& state) {
  const DiscreteEigenpairs& eig = ops.eig();
  Eigen::VectorXd a1 = eig.vectors.transpose() * ops.mass.apply(state.u1);
  Eigen::VectorXd a2 = eig.vectors.transpose() * ops.mass.apply(state.u2);
  for (int j = 0; j < eig.count(); ++j) {
    const double angle = t * eig.values[j];
    const double c = std::cos(angle), s = std::sin(angle);
    const double v1 = c * a1[j] - s * a2[j];
    const double v2 = s * a1[j] + c * a2[j];
    a1[j] = v1;
    a2[j] = v2;
  }
  StateVector out;
  out.mesh_level = state.mesh_level;
  out.u1 = eig.vectors * a1;
  out.u2 = eig.vectors * a2;
  return out;
}

StabilityReport stability_check(const FemOperators& ops,
                                const FemForcing& forcing1,
                                const FemForcing& forcing2,
                                const StateVector& initial, double alpha,
                                double t_final) {
  const DiscreteEigenpairs& eig = ops.eig();
  const int n = eig.count();

  // Modal forcing g_{i,j}(t) = phi_j^T M f_i(t).
  const auto modal_forcing = [&](const FemForcing& f, double t) {
    return Eigen::VectorXd(eig.vectors.transpose() * ops.mass.apply(f(t)));
  };

  Eigen::VectorXd a1 = eig.vectors.transpose() * ops.mass.apply(initial.u1);
  Eigen::VectorXd a2 = eig.vectors.transpose() * ops.mass.apply(initial.u2);

  double lhs1 = 0.0, lhs2 = 0.0;
  for (int j = 0; j < n; ++j) {
    const double lambda = eig.values[j];
    const double angle = t_final * lambda;
    const double c = std::cos(angle), s = std::sin(angle);
    const auto [conv_re, conv_im] = semigroup_convolution(
        t_final, lambda,
        [&](double tau) {
          return eig.vectors.col(j).dot(ops.mass.apply(forcing1(tau)));
        },
        [&](double tau) {
          return eig.vectors.col(j).dot(ops.mass.apply(forcing2(tau)));
        });
    const double v1 = c * a1[j] - s * a2[j] + conv_re;
    const double v2 = s * a1[j] + c * a2[j] + conv_im;
    const double w = std::pow(lambda, alpha);
    lhs1 += w * v1 * v1;
    lhs2 += w * v2 * v2;
  }

  const auto norm_h_alpha = [&](const Eigen::VectorXd& modal) {
    double sum = 0.0;
    for (int j = 0; j < n; ++j)
      sum += std::pow(eig.values[j], alpha) * modal[j] * modal[j];
    return std::sqrt(sum);
  };

  using gk = boost::math::quadrature::gauss_kronrod<double, 15>;
  const double forcing_integral = gk::integrate(
      [&](double s) {
        return norm_h_alpha(modal_forcing(forcing1, s)) +
               norm_h_alpha(modal_forcing(forcing2, s));
      },
      0.0, t_final, 12, 1e-9);

  StabilityReport report;
  report.lhs = std::sqrt(lhs1) + std::sqrt(lhs2);
  report.rhs = norm_h_alpha(a1) + norm_h_alpha(a2) + forcing_integral;
  report.ratio = (report.rhs > 0.0) ? report.lhs / report.rhs : 0.0;
  return report;
}

void write_trajectory_csv(std::ostream& os, const Mesh1D& mesh,
                          const std::vector<StateVector>& trajectory,
                          double dt) {
  os << "step,time,node_index,u1,u2\n";
  for (std::size_t n = 0; n < trajectory.size(); ++n) {
    const StateVector& s = trajectory[n];
    for (int k = 0; k < mesh.n_interior; ++k)
      os << n << ',' << n * dt << ',' << k + 1 << ',' << s.u1[k] << ','
         << s.u2[k] << '\n';
  }
}

}  // namespace slsfem

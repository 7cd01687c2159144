#pragma once

#include <Eigen/Dense>
#include <functional>
#include <utility>

namespace slsfem {

/// Continuous Dirichlet Laplacian eigenvalue on (0,1): lambda_j = (j pi)^2.
double laplace_eigenvalue(int j);

/// L2-normalized eigenfunction e_j(x) = sqrt(2) sin(j pi x).
double laplace_eigenfunction(int j, double x);

/// Modal representation of the pair (u1, u2) in the basis {e_j}.
struct SpectralField {
  Eigen::VectorXd coeffs1;
  Eigen::VectorXd coeffs2;

  static SpectralField zero(int n_modes);
  int modes() const { return static_cast<int>(coeffs1.size()); }
};

/// (sum_j lambda_j^alpha c_j^2)^{1/2} for one coefficient vector.
double modal_norm_alpha(const Eigen::VectorXd& coeffs, double alpha);

/// Unitary group E(t) applied mode-wise:
///   (c1, c2) -> (cos(t l) c1 - sin(t l) c2, sin(t l) c1 + cos(t l) c2).
/// Valid for any real t (group, not just semigroup).
SpectralField semigroup_apply(double t, const SpectralField& x);

/// sum_j lambda_j^(2r+alpha) (c1_j^2 + c2_j^2); the conserved quantity of
/// the homogeneous evolution for every r >= 0 and alpha.
double energy(const SpectralField& x, int r, double alpha);

/// Mode-wise forcing (f1_j(t), f2_j(t)).
using ModalForcing = std::function<std::pair<double, double>(int j, double t)>;

/// int_0^t e^{i (t-tau) lambda} (f1 + i f2)(tau) dtau as a (real, imag)
/// pair; the scalar Duhamel convolution of one rotation mode. Panels are
/// sized to the rotation frequency and refined until the Gauss-Kronrod
/// error estimate meets `tol`; non-convergence throws NumericalError.
std::pair<double, double> semigroup_convolution(
    double t, double lambda, const std::function<double(double)>& f1,
    const std::function<double(double)>& f2, double tol = 1e-10);

/// Variation-of-constants solution X(t) = E(t)X0 + int_0^t E(t-s)F(s) ds.
/// Forcing is zero beyond `forced_modes`. The convolution is integrated
/// per mode with frequency-resolved composite Gauss-Kronrod panels,
/// refined until the error estimate meets `tol`; non-convergence throws.
SpectralField duhamel_forced_solution(double t, const SpectralField& x0,
                                      int forced_modes,
                                      const ModalForcing& forcing,
                                      double tol = 1e-10);

/// Spectral covariance Q = Lambda^(-s) of one Wiener component.
struct CovarianceSpec {
  double s = 0.0;
  int component = 1;  // 1 or 2

  /// Q eigenvalue gamma_j = lambda_j^(-s) = (j pi)^(-2s).
  double gamma(int j) const;
};

/// Verified enclosure of ||Lambda^(beta/2) Q^(1/2)||_HS^2 = sum_j
/// lambda_j^(beta-s): partial sum to j_max plus an integral-test tail
/// bound, so [value, value + tail_bound] brackets the series.
struct HsNormBracket {
  double value = 0.0;
  double tail_bound = 0.0;
};

/// Requires beta < s - 1/2 (the d=1 summability condition); otherwise a
/// ValidationError naming the condition is thrown.
HsNormBracket hs_norm_squared(const CovarianceSpec& spec, double beta,
                              long j_max);

}  // namespace slsfem

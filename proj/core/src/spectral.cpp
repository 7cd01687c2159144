#include "slsfem/spectral.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>

#include "slsfem/errors.hpp"

namespace slsfem {

namespace {
constexpr double kPi = std::numbers::pi;
}

double laplace_eigenvalue(int j) {
  const double a = static_cast<double>(j) * kPi;
  return a * a;
}

double laplace_eigenfunction(int j, double x) {
  return std::sqrt(2.0) * std::sin(static_cast<double>(j) * kPi * x);
}

SpectralField SpectralField::zero(int n_modes) {
  SpectralField f;
  f.coeffs1 = Eigen::VectorXd::Zero(n_modes);
  f.coeffs2 = Eigen::VectorXd::Zero(n_modes);
  return f;
}

double modal_norm_alpha(const Eigen::VectorXd& coeffs, double alpha) {
  double sum = 0.0;
  for (int j = static_cast<int>(coeffs.size()); j >= 1; --j)
    sum += std::pow(laplace_eigenvalue(j), alpha) * coeffs[j - 1] * coeffs[j - 1];
  return std::sqrt(sum);
}

SpectralField semigroup_apply(double t, const SpectralField& x) {
  const int n = x.modes();
  SpectralField y = SpectralField::zero(n);
  for (int j = 1; j <= n; ++j) {
    const double angle = t * laplace_eigenvalue(j);
    const double c = std::cos(angle), s = std::sin(angle);
    y.coeffs1[j - 1] = c * x.coeffs1[j - 1] - s * x.coeffs2[j - 1];
    y.coeffs2[j - 1] = s * x.coeffs1[j - 1] + c * x.coeffs2[j - 1];
  }
  return y;
}

double energy(const SpectralField& x, int r, double alpha) {
  double sum = 0.0;
  for (int j = x.modes(); j >= 1; --j) {
    const double w = std::pow(laplace_eigenvalue(j), 2.0 * r + alpha);
    sum += w * (x.coeffs1[j - 1] * x.coeffs1[j - 1] +
                x.coeffs2[j - 1] * x.coeffs2[j - 1]);
  }
  return sum;
}

std::pair<double, double> semigroup_convolution(
    double t, double lambda, const std::function<double(double)>& f1,
    const std::function<double(double)>& f2, double tol) {
  using gk = boost::math::quadrature::gauss_kronrod<double, 15>;
  const auto re_integrand = [&](double tau) {
    const double angle = (t - tau) * lambda;
    return std::cos(angle) * f1(tau) - std::sin(angle) * f2(tau);
  };
  const auto im_integrand = [&](double tau) {
    const double angle = (t - tau) * lambda;
    return std::sin(angle) * f1(tau) + std::cos(angle) * f2(tau);
  };

  long panels =
      std::max<long>(4, static_cast<long>(std::ceil(std::abs(lambda * t) / 3.0)));
  for (int round = 0; round < 8; ++round) {
    double re = 0.0, im = 0.0, err = 0.0;
    const double width = t / static_cast<double>(panels);
    for (long p = 0; p < panels; ++p) {
      const double a = p * width, b = (p + 1) * width;
      double e1 = 0.0, e2 = 0.0;
      re += gk::integrate(re_integrand, a, b, 0, 0.0, &e1);
      im += gk::integrate(im_integrand, a, b, 0, 0.0, &e2);
      err += e1 + e2;
    }
    if (err <= tol) return {re, im};
    panels *= 2;
  }
  throw NumericalError(
      "semigroup_convolution: quadrature failed to reach tolerance " +
      std::to_string(tol) + " at lambda=" + std::to_string(lambda));
}

SpectralField duhamel_forced_solution(double t, const SpectralField& x0,
                                      int forced_modes,
                                      const ModalForcing& forcing, double tol) {
  if (t < 0.0) throw ValidationError("duhamel_forced_solution: t must be >= 0");
  SpectralField y = semigroup_apply(t, x0);
  const int n = std::min(forced_modes, x0.modes());
  for (int j = 1; j <= n; ++j) {
    const auto [re, im] = semigroup_convolution(
        t, laplace_eigenvalue(j),
        [&](double tau) { return forcing(j, tau).first; },
        [&](double tau) { return forcing(j, tau).second; }, tol);
    y.coeffs1[j - 1] += re;
    y.coeffs2[j - 1] += im;
  }
  return y;
}

double CovarianceSpec::gamma(int j) const {
  return std::pow(laplace_eigenvalue(j), -s);
}

HsNormBracket hs_norm_squared(const CovarianceSpec& spec, double beta,
                              long j_max) {
  if (!(beta < spec.s - 0.5))
    throw ValidationError(
        "hs_norm_squared: divergent Hilbert-Schmidt norm, requires "
        "beta < s - 1/2 (got beta=" +
        std::to_string(beta) + ", s=" + std::to_string(spec.s) + ")");
  if (j_max < 1) throw ValidationError("hs_norm_squared: j_max must be >= 1");
  const double p = 2.0 * (spec.s - beta);  // > 1
  double sum = 0.0;
  for (long j = j_max; j >= 1; --j)
    sum += std::pow(static_cast<double>(j) * kPi, -p);
  // Integral test: sum_{j > J} (j pi)^(-p) <= pi^(-p) J^(1-p) / (p-1).
  const double tail = std::pow(kPi, -p) *
                      std::pow(static_cast<double>(j_max), 1.0 - p) / (p - 1.0);
  return {sum, tail};
}

}  // namespace slsfem

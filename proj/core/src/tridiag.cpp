#include "slsfem/tridiag.hpp"

#include <cmath>

#include "slsfem/errors.hpp"

namespace slsfem {

Eigen::VectorXd SymTridiagonal::apply(const Eigen::VectorXd& x) const {
  const int n = size();
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    double v = diag[i] * x[i];
    if (i > 0) v += off[i - 1] * x[i - 1];
    if (i + 1 < n) v += off[i] * x[i + 1];
    y[i] = v;
  }
  return y;
}

Eigen::MatrixXd SymTridiagonal::dense() const {
  const int n = size();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    m(i, i) = diag[i];
    if (i + 1 < n) {
      m(i, i + 1) = off[i];
      m(i + 1, i) = off[i];
    }
  }
  return m;
}

Eigen::VectorXd solve_spd_tridiagonal(const SymTridiagonal& a,
                                      const Eigen::VectorXd& b) {
  const int n = a.size();
  if (b.size() != n)
    throw NumericalError("solve_spd_tridiagonal: size mismatch");
  Eigen::VectorXd d(n), l(std::max(n - 1, 0)), x = b;
  // LDL^T: d = pivots, l = subdiagonal multipliers.
  d[0] = a.diag[0];
  if (d[0] <= 0.0) throw NumericalError("solve_spd_tridiagonal: not SPD");
  for (int i = 1; i < n; ++i) {
    l[i - 1] = a.off[i - 1] / d[i - 1];
    d[i] = a.diag[i] - l[i - 1] * a.off[i - 1];
    if (d[i] <= 0.0) throw NumericalError("solve_spd_tridiagonal: not SPD");
  }
  for (int i = 1; i < n; ++i) x[i] -= l[i - 1] * x[i - 1];
  x[n - 1] /= d[n - 1];
  for (int i = n - 2; i >= 0; --i) x[i] = x[i] / d[i] - l[i] * x[i + 1];
  return x;
}

ComplexTridiagonalFactor::ComplexTridiagonalFactor(std::vector<Complex> lower,
                                                   std::vector<Complex> diag,
                                                   std::vector<Complex> upper)
    : n_(static_cast<int>(diag.size())),
      dl_(std::move(lower)),
      d_(std::move(diag)),
      du_(std::move(upper)) {
  if (static_cast<int>(dl_.size()) != n_ - 1 ||
      static_cast<int>(du_.size()) != n_ - 1)
    throw NumericalError("ComplexTridiagonalFactor: band size mismatch");
  du2_.assign(std::max(n_ - 2, 0), Complex(0.0, 0.0));
  swap_.assign(std::max(n_ - 1, 0), 0);

  // dgttrf-style elimination.
  for (int i = 0; i + 1 < n_; ++i) {
    if (std::abs(d_[i]) >= std::abs(dl_[i])) {
      if (d_[i] == Complex(0.0, 0.0))
        throw NumericalError("ComplexTridiagonalFactor: singular pivot");
      const Complex mult = dl_[i] / d_[i];
      dl_[i] = mult;
      d_[i + 1] -= mult * du_[i];
      if (i + 2 < n_) du2_[i] = Complex(0.0, 0.0);
    } else {
      pivoted_ = true;
      swap_[i] = 1;
      const Complex mult = d_[i] / dl_[i];
      d_[i] = dl_[i];
      dl_[i] = mult;
      const Complex tmp = du_[i];
      du_[i] = d_[i + 1];
      d_[i + 1] = tmp - mult * d_[i + 1];
      if (i + 2 < n_) {
        du2_[i] = du_[i + 1];
        du_[i + 1] = -mult * du_[i + 1];
      }
    }
  }
  if (d_[n_ - 1] == Complex(0.0, 0.0))
    throw NumericalError("ComplexTridiagonalFactor: singular pivot");
}

ComplexTridiagonalFactor ComplexTridiagonalFactor::mass_minus_i_stiffness(
    const SymTridiagonal& mass, const SymTridiagonal& stiffness, double scale) {
  const int n = mass.size();
  std::vector<Complex> lower(std::max(n - 1, 0)), diag(n),
      upper(std::max(n - 1, 0));
  for (int i = 0; i < n; ++i)
    diag[i] = Complex(mass.diag[i], -scale * stiffness.diag[i]);
  for (int i = 0; i + 1 < n; ++i) {
    lower[i] = Complex(mass.off[i], -scale * stiffness.off[i]);
    upper[i] = lower[i];
  }
  return ComplexTridiagonalFactor(std::move(lower), std::move(diag),
                                  std::move(upper));
}

Eigen::VectorXcd ComplexTridiagonalFactor::solve(
    const Eigen::VectorXcd& rhs) const {
  if (rhs.size() != n_) throw NumericalError("ComplexTridiagonalFactor: size");
  Eigen::VectorXcd x = rhs;
  for (int i = 0; i + 1 < n_; ++i) {
    if (swap_[i]) std::swap(x[i], x[i + 1]);
    x[i + 1] -= dl_[i] * x[i];
  }
  x[n_ - 1] /= d_[n_ - 1];
  if (n_ >= 2) x[n_ - 2] = (x[n_ - 2] - du_[n_ - 2] * x[n_ - 1]) / d_[n_ - 2];
  for (int i = n_ - 3; i >= 0; --i)
    x[i] = (x[i] - du_[i] * x[i + 1] - du2_[i] * x[i + 2]) / d_[i];
  return x;
}

}  // namespace slsfem

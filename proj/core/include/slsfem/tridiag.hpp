#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace slsfem {

/// Symmetric tridiagonal matrix: diag has n entries, off has n-1
/// (off[i] couples rows i and i+1).
struct SymTridiagonal {
  Eigen::VectorXd diag;
  Eigen::VectorXd off;

  int size() const { return static_cast<int>(diag.size()); }

  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd dense() const;
};

/// Solves A x = b for SPD tridiagonal A by LDL^T elimination.
/// No pivoting; positive pivots are asserted and a NumericalError is
/// thrown if one is not.
Eigen::VectorXd solve_spd_tridiagonal(const SymTridiagonal& a,
                                      const Eigen::VectorXd& b);

/// LU factorization of a complex tridiagonal matrix with partial
/// pivoting (row swaps introduce a second superdiagonal). For the
/// row-diagonally-dominant systems M - i*dt*S produced by the backward
/// Euler scheme no swap ever triggers and this reduces to the Thomas
/// algorithm; the pivoted path is the fallback for general input.
class ComplexTridiagonalFactor {
 public:
  using Complex = std::complex<double>;

  /// Factors the matrix with subdiagonal `lower`, diagonal `diag`,
  /// superdiagonal `upper` (sizes n-1, n, n-1).
  ComplexTridiagonalFactor(std::vector<Complex> lower,
                           std::vector<Complex> diag,
                           std::vector<Complex> upper);

  /// Builds and factors M - i*scale*S for symmetric tridiagonal M, S.
  static ComplexTridiagonalFactor mass_minus_i_stiffness(
      const SymTridiagonal& mass, const SymTridiagonal& stiffness,
      double scale);

  Eigen::VectorXcd solve(const Eigen::VectorXcd& rhs) const;

  int size() const { return n_; }
  bool pivoted() const { return pivoted_; }

 private:
  int n_;
  bool pivoted_ = false;
  std::vector<Complex> dl_, d_, du_, du2_;  // multipliers + U diagonals
  std::vector<int> swap_;                   // swap_[i]: rows i,i+1 exchanged
};

}  // namespace slsfem

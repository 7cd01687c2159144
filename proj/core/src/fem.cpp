#include "slsfem/fem.hpp"

#include <cmath>
#include <numbers>
#include <ostream>

#include "slsfem/errors.hpp"

namespace slsfem {

namespace {
constexpr double kPi = std::numbers::pi;
}

const DiscreteEigenpairs& FemOperators::eig() const {
  if (!eigenpairs)
    throw NumericalError("FemOperators: eigenpairs not assembled");
  return *eigenpairs;
}

SymTridiagonal assemble_mass(const Mesh1D& mesh) {
  const int n = mesh.n_interior;
  SymTridiagonal m;
  m.diag = Eigen::VectorXd::Constant(n, 2.0 * mesh.h / 3.0);
  m.off = Eigen::VectorXd::Constant(std::max(n - 1, 0), mesh.h / 6.0);
  return m;
}

SymTridiagonal assemble_stiffness(const Mesh1D& mesh) {
  const int n = mesh.n_interior;
  SymTridiagonal s;
  s.diag = Eigen::VectorXd::Constant(n, 2.0 / mesh.h);
  s.off = Eigen::VectorXd::Constant(std::max(n - 1, 0), -1.0 / mesh.h);
  return s;
}

FemOperators assemble_operators(const Mesh1D& mesh, bool with_eigenpairs) {
  FemOperators ops;
  ops.mesh = mesh;
  ops.mass = assemble_mass(mesh);
  ops.stiffness = assemble_stiffness(mesh);
  if (with_eigenpairs) ops.eigenpairs = discrete_eigenpairs(ops);
  return ops;
}

DiscreteEigenpairs discrete_eigenpairs(const FemOperators& ops) {
  const int n = ops.mesh.n_interior;
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      ops.stiffness.dense(), ops.mass.dense(),
      Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
  if (solver.info() != Eigen::Success)
    throw NumericalError("discrete_eigenpairs: eigensolver failed at level " +
                         std::to_string(ops.mesh.level) + " (n=" +
                         std::to_string(n) + ")");
  DiscreteEigenpairs eig;
  eig.values = solver.eigenvalues();
  eig.vectors = solver.eigenvectors();
  // Deterministic sign: first entry of nontrivial magnitude positive.
  for (int j = 0; j < n; ++j) {
    auto col = eig.vectors.col(j);
    const double scale = col.cwiseAbs().maxCoeff();
    for (int i = 0; i < n; ++i) {
      if (std::abs(col[i]) > 1e-12 * scale) {
        if (col[i] < 0.0) col = -col;
        break;
      }
    }
  }
  return eig;
}

Eigen::VectorXd sine_load(const Mesh1D& mesh, int j) {
  if (j < 1) throw ValidationError("sine_load: mode index must be >= 1");
  const int n = mesh.n_interior;
  const double a = static_cast<double>(j) * kPi;
  const double s = std::sin(a * mesh.h / 2.0);
  const double factor = std::sqrt(2.0) * 4.0 * s * s / (a * a * mesh.h);
  Eigen::VectorXd b(n);
  for (int k = 0; k < n; ++k) b[k] = factor * std::sin(a * mesh.node(k));
  return b;
}

Eigen::MatrixXd modal_load_matrix(const Mesh1D& mesh, int j_count) {
  Eigen::MatrixXd e(mesh.n_interior, j_count);
  for (int j = 1; j <= j_count; ++j) e.col(j - 1) = sine_load(mesh, j);
  return e;
}

Eigen::VectorXd load_vector(const Mesh1D& mesh, const ScalarFn& f) {
  // 3-point Gauss-Legendre on each element.
  static const double gx[3] = {-std::sqrt(3.0 / 5.0), 0.0,
                               std::sqrt(3.0 / 5.0)};
  static const double gw[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  const int n = mesh.n_interior;
  const double h = mesh.h;
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  for (int e = 0; e <= n; ++e) {
    const double x_left = e * h;
    const int left = e - 1;   // hat peaking at x_left (absent for e=0)
    const int right = e;      // hat peaking at x_left + h (absent for e=n)
    for (int q = 0; q < 3; ++q) {
      const double x = x_left + 0.5 * h * (1.0 + gx[q]);
      const double w = 0.5 * h * gw[q];
      const double fv = f(x);
      const double t = (x - x_left) / h;
      if (left >= 0) b[left] += w * fv * (1.0 - t);
      if (right < n) b[right] += w * fv * t;
    }
  }
  return b;
}

Eigen::VectorXd l2_project(const Mesh1D& mesh, const ScalarFn& f) {
  return solve_spd_tridiagonal(assemble_mass(mesh), load_vector(mesh, f));
}

Eigen::VectorXd l2_project_modal(const Mesh1D& mesh,
                                 const Eigen::VectorXd& modal_coeffs) {
  Eigen::VectorXd b = Eigen::VectorXd::Zero(mesh.n_interior);
  for (int j = 1; j <= modal_coeffs.size(); ++j)
    if (modal_coeffs[j - 1] != 0.0)
      b += modal_coeffs[j - 1] * sine_load(mesh, j);
  return solve_spd_tridiagonal(assemble_mass(mesh), b);
}

Eigen::VectorXd ritz_project(const Mesh1D& mesh, const ScalarFn& f) {
  const int n = mesh.n_interior;
  const double h = mesh.h;
  Eigen::VectorXd node_vals(n + 2);
  node_vals[0] = f(0.0);
  for (int k = 0; k < n; ++k) node_vals[k + 1] = f(mesh.node(k));
  node_vals[n + 1] = f(1.0);
  Eigen::VectorXd b(n);
  for (int k = 0; k < n; ++k)
    b[k] = (2.0 * node_vals[k + 1] - node_vals[k] - node_vals[k + 2]) / h;
  return solve_spd_tridiagonal(assemble_stiffness(mesh), b);
}

double discrete_norm(const FemOperators& ops, const Eigen::VectorXd& v,
                     double alpha) {
  const DiscreteEigenpairs& eig = ops.eig();
  const Eigen::VectorXd mv = ops.mass.apply(v);
  double sum = 0.0;
  for (int j = 0; j < eig.count(); ++j) {
    const double c = eig.vectors.col(j).dot(mv);
    sum += std::pow(eig.values[j], alpha) * c * c;
  }
  return std::sqrt(sum);
}

double mass_norm(const SymTridiagonal& mass, const Eigen::VectorXd& v) {
  return std::sqrt(v.dot(mass.apply(v)));
}

Eigen::VectorXd prolong(const Mesh1D& from, const Mesh1D& to,
                        const Eigen::VectorXd& v) {
  if (to.level < from.level)
    throw ValidationError("prolong: target mesh must be at least as fine");
  if (v.size() != from.n_interior)
    throw ValidationError("prolong: coefficient size mismatch");
  Eigen::VectorXd cur = v;
  for (int lvl = from.level; lvl < to.level; ++lvl) {
    const int nc = static_cast<int>(cur.size());
    const int nf = 2 * nc + 1;
    Eigen::VectorXd fine(nf);
    for (int m = 0; m < nf; ++m) {
      if (m % 2 == 1) {
        fine[m] = cur[(m - 1) / 2];
      } else {
        const double a = (m / 2 - 1 >= 0) ? cur[m / 2 - 1] : 0.0;
        const double b = (m / 2 < nc) ? cur[m / 2] : 0.0;
        fine[m] = 0.5 * (a + b);
      }
    }
    cur = std::move(fine);
  }
  return cur;
}

Eigen::VectorXd restrict_to_nodes(const Mesh1D& fine, const Mesh1D& coarse,
                                  const Eigen::VectorXd& v) {
  if (coarse.level > fine.level)
    throw ValidationError("restrict_to_nodes: coarse mesh must be coarser");
  const int stride = 1 << (fine.level - coarse.level);
  Eigen::VectorXd out(coarse.n_interior);
  for (int k = 0; k < coarse.n_interior; ++k)
    out[k] = v[(k + 1) * stride - 1];
  return out;
}

void write_matrix_csv(std::ostream& os, const SymTridiagonal& m) {
  os << "row,col,value\n";
  const int n = m.size();
  for (int i = 0; i < n; ++i) {
    if (i > 0) os << i << ',' << i - 1 << ',' << m.off[i - 1] << '\n';
    os << i << ',' << i << ',' << m.diag[i] << '\n';
    if (i + 1 < n) os << i << ',' << i + 1 << ',' << m.off[i] << '\n';
  }
}

}  // namespace slsfem

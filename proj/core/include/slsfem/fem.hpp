#pragma once

#include <Eigen/Dense>
#include <functional>
#include <iosfwd>
#include <optional>

#include "slsfem/mesh.hpp"
#include "slsfem/tridiag.hpp"

namespace slsfem {

using ScalarFn = std::function<double(double)>;

/// Generalized eigenpairs of (S, M): stiffness*phi = lambda*mass*phi.
/// Eigenvalues ascending, eigenvectors mass-orthonormal, sign fixed so
/// the first nonzero entry of each vector is positive.
struct DiscreteEigenpairs {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;  // column j is phi_{h,j+1}

  int count() const { return static_cast<int>(values.size()); }
};

/// Assembled piecewise-linear FEM operators on a uniform mesh.
/// Immutable after construction; safe to share across threads.
struct FemOperators {
  Mesh1D mesh;
  SymTridiagonal mass;
  SymTridiagonal stiffness;
  std::optional<DiscreteEigenpairs> eigenpairs;

  const DiscreteEigenpairs& eig() const;
};

/// Real/imaginary coefficient pair at one time level.
struct StateVector {
  Eigen::VectorXd u1;
  Eigen::VectorXd u2;
  int mesh_level = 0;
};

SymTridiagonal assemble_mass(const Mesh1D& mesh);
SymTridiagonal assemble_stiffness(const Mesh1D& mesh);

/// Assembles mass and stiffness; eigenpairs too when requested.
FemOperators assemble_operators(const Mesh1D& mesh,
                                bool with_eigenpairs = false);

DiscreteEigenpairs discrete_eigenpairs(const FemOperators& ops);

/// Load vector of the j-th Dirichlet eigenfunction e_j = sqrt(2) sin(j pi x)
/// against the hat basis, in closed form:
///   b_k = sqrt(2) sin(j pi x_k) * 4 sin^2(j pi h / 2) / ((j pi)^2 h).
Eigen::VectorXd sine_load(const Mesh1D& mesh, int j);

/// Columns j = 1..J of sine_load; the matrix E with E(k,j-1) = (e_j, phi_k).
Eigen::MatrixXd modal_load_matrix(const Mesh1D& mesh, int j_count);

/// Load vector b_k = int f(x) phi_k(x) dx by 3-point Gauss-Legendre per
/// element (exact for polynomial f of degree <= 4).
Eigen::VectorXd load_vector(const Mesh1D& mesh, const ScalarFn& f);

/// L2 projection P_h f: solves M c = b with the quadrature of load_vector.
Eigen::VectorXd l2_project(const Mesh1D& mesh, const ScalarFn& f);

/// L2 projection of a modal field sum_j coeffs[j-1] e_j using exact loads.
Eigen::VectorXd l2_project_modal(const Mesh1D& mesh,
                                 const Eigen::VectorXd& modal_coeffs);

/// Ritz projection R_h f: solves S c = b with the telescoped gradient
/// loads b_k = (2 f(x_k) - f(x_{k-1}) - f(x_{k+1})) / h, which equal
/// int f' phi_k' exactly for absolutely continuous f with f(0)=f(1)=0.
Eigen::VectorXd ritz_project(const Mesh1D& mesh, const ScalarFn& f);

/// Discrete fractional norm ||v||_{h,alpha} = (sum_j lambda_{h,j}^alpha
/// (v^T M phi_j)^2)^{1/2}, evaluated spectrally.
double discrete_norm(const FemOperators& ops, const Eigen::VectorXd& v,
                     double alpha);

/// sqrt(v^T M v), the L2 norm of the piecewise-linear function with
/// coefficients v.
double mass_norm(const SymTridiagonal& mass, const Eigen::VectorXd& v);

/// Exact piecewise-linear injection from a coarse dyadic mesh into a
/// finer one (values copied at shared nodes, averaged at midpoints).
Eigen::VectorXd prolong(const Mesh1D& from, const Mesh1D& to,
                        const Eigen::VectorXd& v);

/// Values of a fine-mesh coefficient vector at the nodes of a coarser
/// nested mesh.
Eigen::VectorXd restrict_to_nodes(const Mesh1D& fine, const Mesh1D& coarse,
                                  const Eigen::VectorXd& v);

/// Debug dump, one line per stored entry: row,col,value (0-based).
void write_matrix_csv(std::ostream& os, const SymTridiagonal& m);

}  // namespace slsfem

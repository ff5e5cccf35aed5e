#pragma once

#include <memory>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "fsstokes/common.hpp"

namespace fsstokes {

/// Compressed sparse storage used throughout (column-compressed, sorted
/// unique indices once `makeCompressed()` has run).
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;
using Triplets = std::vector<Eigen::Triplet<double, int>>;

/// Pivoted sparse LU (UMFPACK). Immutable once constructed; `solve` may be
/// called concurrently.
class DirectSolver {
public:
  explicit DirectSolver(const SparseMatrix& matrix);
  ~DirectSolver();
  DirectSolver(const DirectSolver&) = delete;
  DirectSolver& operator=(const DirectSolver&) = delete;
  DirectSolver(DirectSolver&&) noexcept;
  DirectSolver& operator=(DirectSolver&&) noexcept;

  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;
  Eigen::Index size() const { return matrix_.rows(); }

private:
  SparseMatrix matrix_;
  void* symbolic_ = nullptr;
  void* numeric_ = nullptr;
};

/// Factor and solve once. Throws SolverError on a singular pivot (message
/// names the row) or if ||Kx - rhs||_inf > 1e-10 (||K||_inf ||x||_inf + ||rhs||_inf).
Eigen::VectorXd factor_solve(const SparseMatrix& matrix, const Eigen::VectorXd& rhs);

double max_abs(const SparseMatrix& matrix);
double inf_norm(const SparseMatrix& matrix);

/// Dirichlet data on a subset of unknowns, eliminated symmetrically: rows and
/// columns of fixed dofs are removed from the operator, the diagonal is set
/// to `diagonal_scale`, and the right-hand side is lifted.
struct Constraints {
  std::vector<char> fixed;
  Eigen::VectorXd values;

  explicit Constraints(Eigen::Index n = 0) : fixed(n, 0), values(Eigen::VectorXd::Zero(n)) {}
  void fix(Eigen::Index dof, double value = 0.0) {
    fixed[dof] = 1;
    values[dof] = value;
  }
  bool is_fixed(Eigen::Index dof) const { return fixed[dof] != 0; }
  Eigen::Index size() const { return static_cast<Eigen::Index>(fixed.size()); }
};

/// Velocity block A, divergence operator B (B_kj = integral of q_k div v_j),
/// momentum load f and divergence load g. The assembled block system is
/// [[A, -B^T], [-B, 0]] (u, pi) = (f, -g), symmetric when A is.
struct SaddleSystem {
  SparseMatrix A;
  SparseMatrix B;
  Eigen::VectorXd f;
  Eigen::VectorXd g;
};

/// Extra unknowns y appended to the block system:
///   [[A, -B^T, upper], [-B, 0, 0], [lower, 0, corner]] (u, pi, y) = (f, -g, rhs).
struct Border {
  SparseMatrix upper;   // n_u x n_y
  SparseMatrix lower;   // n_y x n_u
  SparseMatrix corner;  // n_y x n_y
  Eigen::VectorXd rhs;
};

struct SaddleSolution {
  Eigen::VectorXd u;
  Eigen::VectorXd pi;
  Eigen::VectorXd extra;  // y when solved with a Border, empty otherwise
  double momentum_residual = 0.0;    // relative, inf-norm
  double continuity_residual = 0.0;  // ||B u - g||_inf / (||B||_inf ||u||_inf)
};

/// Solves the block system with an optional extra velocity block (normal
/// penalty or FSSA operator) and extra momentum load. Constraints on the
/// velocity are eliminated symmetrically before factorization.
SaddleSolution solve_saddle(const SaddleSystem& system, const Constraints& constraints,
                            const SparseMatrix* extra_block = nullptr,
                            const Eigen::VectorXd* extra_load = nullptr,
                            const Border* border = nullptr);

}  // namespace fsstokes

#include "fsstokes/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include <umfpack.h>

namespace fsstokes {

namespace {

std::string umfpack_status(int status) {
  switch (status) {
    case UMFPACK_ERROR_out_of_memory:
      return "out of memory";
    case UMFPACK_ERROR_invalid_matrix:
      return "invalid matrix";
    case UMFPACK_WARNING_singular_matrix:
      return "singular matrix";
    default:
      return "status " + std::to_string(status);
  }
}

// Row of the original matrix whose pivot vanished.
int singular_row(void* numeric, int n) {
  int lnz = 0, unz = 0, nr = 0, nc = 0, nzud = 0;
  umfpack_di_get_lunz(&lnz, &unz, &nr, &nc, &nzud, numeric);
  std::vector<int> P(n), Q(n);
  std::vector<double> D(n), Rs(n);
  int do_recip = 0;
  const int status = umfpack_di_get_numeric(nullptr, nullptr, nullptr, nullptr, nullptr, nullptr,
                                            P.data(), Q.data(), D.data(), &do_recip, Rs.data(),
                                            numeric);
  if (status != UMFPACK_OK) {
    return -1;
  }
  for (int k = 0; k < n; ++k) {
    if (D[k] == 0.0 || !std::isfinite(D[k])) {
      return P[k];
    }
  }
  return -1;
}

}  // namespace

DirectSolver::DirectSolver(const SparseMatrix& matrix) : matrix_(matrix) {
  if (matrix_.rows() != matrix_.cols()) {
    throw SolverError("direct solver needs a square matrix");
  }
  matrix_.makeCompressed();
  const int n = static_cast<int>(matrix_.rows());
  if (n == 0) {
    return;
  }
  const int* Ap = matrix_.outerIndexPtr();
  const int* Ai = matrix_.innerIndexPtr();
  const double* Ax = matrix_.valuePtr();

  int status = umfpack_di_symbolic(n, n, Ap, Ai, Ax, &symbolic_, nullptr, nullptr);
  if (status != UMFPACK_OK) {
    throw SolverError("symbolic factorization failed: " + umfpack_status(status));
  }
  status = umfpack_di_numeric(Ap, Ai, Ax, symbolic_, &numeric_, nullptr, nullptr);
  if (status == UMFPACK_WARNING_singular_matrix) {
    const int row = singular_row(numeric_, n);
    umfpack_di_free_numeric(&numeric_);
    umfpack_di_free_symbolic(&symbolic_);
    std::ostringstream msg;
    msg << "matrix is singular to working precision: zero pivot in row " << row;
    throw SolverError(msg.str());
  }
  if (status != UMFPACK_OK) {
    umfpack_di_free_symbolic(&symbolic_);
    throw SolverError("numeric factorization failed: " + umfpack_status(status));
  }
}

DirectSolver::~DirectSolver() {
  if (numeric_) umfpack_di_free_numeric(&numeric_);
  if (symbolic_) umfpack_di_free_symbolic(&symbolic_);
}

DirectSolver::DirectSolver(DirectSolver&& other) noexcept
    : matrix_(std::move(other.matrix_)), symbolic_(other.symbolic_), numeric_(other.numeric_) {
  other.symbolic_ = nullptr;
  other.numeric_ = nullptr;
}

DirectSolver& DirectSolver::operator=(DirectSolver&& other) noexcept {
  if (this != &other) {
    if (numeric_) umfpack_di_free_numeric(&numeric_);
    if (symbolic_) umfpack_di_free_symbolic(&symbolic_);
    matrix_ = std::move(other.matrix_);
    symbolic_ = other.symbolic_;
    numeric_ = other.numeric_;
    other.symbolic_ = nullptr;
    other.numeric_ = nullptr;
  }
  return *this;
}

Eigen::VectorXd DirectSolver::solve(const Eigen::VectorXd& rhs) const {
  if (rhs.size() != matrix_.rows()) {
    throw SolverError("right-hand side has the wrong length");
  }
  Eigen::VectorXd x = Eigen::VectorXd::Zero(rhs.size());
  if (rhs.size() == 0) {
    return x;
  }
  // Wi/W are the per-call workspaces, so concurrent solves do not share state.
  std::vector<int> Wi(rhs.size());
  std::vector<double> W(5 * rhs.size());
  const int status = umfpack_di_wsolve(UMFPACK_A, matrix_.outerIndexPtr(), matrix_.innerIndexPtr(),
                                       matrix_.valuePtr(), x.data(), rhs.data(), numeric_,
                                       nullptr, nullptr, Wi.data(), W.data());
  if (status != UMFPACK_OK) {
    throw SolverError("triangular solve failed: " + umfpack_status(status));
  }
  return x;
}

double max_abs(const SparseMatrix& matrix) {
  double m = 0.0;
  for (Eigen::Index k = 0; k < matrix.nonZeros(); ++k) {
    m = std::max(m, std::abs(matrix.valuePtr()[k]));
  }
  return m;
}

double inf_norm(const SparseMatrix& matrix) {
  Eigen::VectorXd rows = Eigen::VectorXd::Zero(matrix.rows());
  for (Eigen::Index j = 0; j < matrix.outerSize(); ++j) {
    for (SparseMatrix::InnerIterator it(matrix, j); it; ++it) {
      rows[it.row()] += std::abs(it.value());
    }
  }
  return rows.size() ? rows.maxCoeff() : 0.0;
}

Eigen::VectorXd factor_solve(const SparseMatrix& matrix, const Eigen::VectorXd& rhs) {
  DirectSolver solver(matrix);
  Eigen::VectorXd x = solver.solve(rhs);
  const double res = (matrix * x - rhs).lpNorm<Eigen::Infinity>();
  const double scale = inf_norm(matrix) * x.lpNorm<Eigen::Infinity>() + rhs.lpNorm<Eigen::Infinity>();
  if (!(res <= 1e-10 * scale)) {
    std::ostringstream msg;
    msg << "direct solve residual " << res << " exceeds tolerance (scale " << scale << ")";
    throw SolverError(msg.str());
  }
  return x;
}

SaddleSolution solve_saddle(const SaddleSystem& sys, const Constraints& constraints,
                            const SparseMatrix* extra_block, const Eigen::VectorXd* extra_load,
                            const Border* border) {
  const Eigen::Index nu = sys.A.rows();
  const Eigen::Index np = sys.B.rows();
  const Eigen::Index ny = border ? border->corner.rows() : 0;
  if (border && (border->corner.cols() != ny || border->upper.rows() != nu ||
                 border->upper.cols() != ny || border->lower.rows() != ny ||
                 border->lower.cols() != nu || border->rhs.size() != ny)) {
    throw SolverError("border blocks have inconsistent dimensions");
  }
  if (sys.A.cols() != nu || sys.B.cols() != nu || sys.f.size() != nu || sys.g.size() != np ||
      constraints.size() != nu) {
    throw SolverError("saddle system blocks have inconsistent dimensions");
  }
  if ((extra_block && (extra_block->rows() != nu || extra_block->cols() != nu)) ||
      (extra_load && extra_load->size() != nu)) {
    throw SolverError("stabilization block or load has the wrong dimensions");
  }

  SparseMatrix Au = extra_block ? SparseMatrix(sys.A + *extra_block) : sys.A;
  double diag = 0.0;
  for (Eigen::Index i = 0; i < nu; ++i) {
    diag += std::abs(Au.coeff(i, i));
  }
  diag = nu > 0 && diag > 0.0 ? diag / static_cast<double>(nu) : 1.0;

  const Eigen::Index n = nu + np + ny;
  Triplets full;
  full.reserve(static_cast<std::size_t>(Au.nonZeros() + 2 * sys.B.nonZeros()));
  if (border) {
    const auto add = [&](const SparseMatrix& m, Eigen::Index r0, Eigen::Index c0) {
      for (Eigen::Index j = 0; j < m.outerSize(); ++j) {
        for (SparseMatrix::InnerIterator it(m, j); it; ++it) {
          full.emplace_back(static_cast<int>(r0 + it.row()), static_cast<int>(c0 + j), it.value());
        }
      }
    };
    add(border->upper, 0, nu + np);
    add(border->lower, nu + np, 0);
    add(border->corner, nu + np, nu + np);
  }
  for (Eigen::Index j = 0; j < nu; ++j) {
    for (SparseMatrix::InnerIterator it(Au, j); it; ++it) {
      full.emplace_back(static_cast<int>(it.row()), static_cast<int>(j), it.value());
    }
    for (SparseMatrix::InnerIterator it(sys.B, j); it; ++it) {
      full.emplace_back(static_cast<int>(nu + it.row()), static_cast<int>(j), -it.value());
      full.emplace_back(static_cast<int>(j), static_cast<int>(nu + it.row()), -it.value());
    }
  }
  SparseMatrix K(n, n);
  K.setFromTriplets(full.begin(), full.end());

  Eigen::VectorXd rhs(n);
  rhs.head(nu) = extra_load ? Eigen::VectorXd(sys.f + *extra_load) : sys.f;
  rhs.segment(nu, np) = -sys.g;
  if (border) {
    rhs.tail(ny) = border->rhs;
  }
  Eigen::VectorXd lift = Eigen::VectorXd::Zero(n);
  bool any_value = false;
  for (Eigen::Index i = 0; i < nu; ++i) {
    if (constraints.is_fixed(i) && constraints.values[i] != 0.0) {
      lift[i] = constraints.values[i];
      any_value = true;
    }
  }
  if (any_value) {
    rhs -= K * lift;
  }

  Triplets reduced;
  reduced.reserve(static_cast<std::size_t>(K.nonZeros()));
  auto fixed = [&](Eigen::Index k) { return k < nu && constraints.is_fixed(k); };
  for (Eigen::Index j = 0; j < n; ++j) {
    for (SparseMatrix::InnerIterator it(K, j); it; ++it) {
      if (!fixed(it.row()) && !fixed(j)) {
        reduced.emplace_back(static_cast<int>(it.row()), static_cast<int>(j), it.value());
      }
    }
  }
  for (Eigen::Index i = 0; i < nu; ++i) {
    if (constraints.is_fixed(i)) {
      reduced.emplace_back(static_cast<int>(i), static_cast<int>(i), diag);
      rhs[i] = diag * constraints.values[i];
    }
  }
  SparseMatrix Kr(n, n);
  Kr.setFromTriplets(reduced.begin(), reduced.end());
  Kr.makeCompressed();

  DirectSolver solver(Kr);
  Eigen::VectorXd x = solver.solve(rhs);
  const Eigen::VectorXd res = Kr * x - rhs;
  const double scale = inf_norm(Kr) * x.lpNorm<Eigen::Infinity>() + rhs.lpNorm<Eigen::Infinity>();

  SaddleSolution out;
  out.u = x.head(nu);
  out.pi = x.segment(nu, np);
  out.extra = x.tail(ny);
  for (Eigen::Index i = 0; i < nu; ++i) {
    if (constraints.is_fixed(i)) {
      out.u[i] = constraints.values[i];
    }
  }
  out.momentum_residual = scale > 0.0 ? res.head(nu).lpNorm<Eigen::Infinity>() / scale : 0.0;
  const double bscale = inf_norm(sys.B) * out.u.lpNorm<Eigen::Infinity>();
  const double div = (sys.B * out.u - sys.g).lpNorm<Eigen::Infinity>();
  out.continuity_residual = bscale > 0.0 ? div / bscale : div;
  if (!(res.lpNorm<Eigen::Infinity>() <= 1e-10 * scale)) {
    std::ostringstream msg;
    msg << "saddle solve residual " << res.lpNorm<Eigen::Infinity>() << " exceeds tolerance";
    throw SolverError(msg.str());
  }
  return out;
}

}  // namespace fsstokes

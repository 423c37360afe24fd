#include "shapehom/sparse.hpp"

#include <cmath>

#include "shapehom/errors.hpp"

namespace shapehom {

namespace {

void check_residual(const Eigen::SparseMatrix<double>& M, const VecX& x,
                    const VecX& b, double max_abs, double rel_tol,
                    const char* where) {
  double res = (M * x - b).norm();
  double bound = rel_tol * (b.norm() + max_abs * x.norm());
  if (!(res <= bound + 1e-300) || !x.allFinite())
    throw SolverError(std::string(where) + ": residual check failed");
}

double sparse_max_abs(const Eigen::SparseMatrix<double>& M) {
  double mx = 0.0;
  for (int k = 0; k < M.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(M, k); it; ++it)
      mx = std::max(mx, std::abs(it.value()));
  return mx;
}

}  // namespace

double SparseMatrix::max_abs() const { return sparse_max_abs(mat_); }

double SparseMatrix::symmetry_defect() const {
  Eigen::SparseMatrix<double> d = mat_ - Eigen::SparseMatrix<double>(mat_.transpose());
  return sparse_max_abs(d);
}

SpdFactorization::SpdFactorization(const SparseMatrix& A)
    : A_(A.eigen()), max_abs_(sparse_max_abs(A_)) {
  ldlt_.compute(A_);
  if (ldlt_.info() != Eigen::Success)
    throw SolverError("solve_spd: factorization failed");
  if (ldlt_.vectorD().minCoeff() <= 0.0)
    throw SolverError("solve_spd: non-positive pivot (matrix not SPD)");
}

VecX SpdFactorization::solve(const VecX& b) const {
  VecX x = ldlt_.solve(b);
  x += ldlt_.solve(b - A_ * x);
  check_residual(A_, x, b, max_abs_, 1e-10, "solve_spd");
  return x;
}

VecX solve_spd(const SparseMatrix& A, const VecX& b) {
  return SpdFactorization(A).solve(b);
}

LuFactorization::LuFactorization(const SparseMatrix& A)
    : A_(A.eigen()), max_abs_(sparse_max_abs(A_)) {
  lu_.compute(A_);
  if (lu_.info() != Eigen::Success)
    throw SolverError("sparse LU: factorization failed");
}

VecX LuFactorization::solve(const VecX& b) const {
  VecX x = lu_.solve(b);
  x += lu_.solve(b - A_ * x);
  check_residual(A_, x, b, max_abs_, 1e-9, "sparse LU");
  return x;
}

SaddleFactorization::SaddleFactorization(const SparseMatrix& A,
                                         const SparseMatrix& B)
    : m_(A.rows()), k_(B.cols()) {
  if (A.rows() != A.cols() || B.rows() != A.rows())
    throw SolverError("solve_saddle: block dimensions do not match");
  std::vector<Eigen::Triplet<double>> trips;
  const auto& Ae = A.eigen();
  const auto& Be = B.eigen();
  trips.reserve(Ae.nonZeros() + 2 * Be.nonZeros());
  for (int c = 0; c < Ae.outerSize(); ++c)
    for (Eigen::SparseMatrix<double>::InnerIterator it(Ae, c); it; ++it)
      trips.emplace_back(it.row(), it.col(), it.value());
  for (int c = 0; c < Be.outerSize(); ++c)
    for (Eigen::SparseMatrix<double>::InnerIterator it(Be, c); it; ++it) {
      trips.emplace_back(it.row(), m_ + it.col(), it.value());
      trips.emplace_back(m_ + it.col(), it.row(), it.value());
    }
  K_ = Eigen::SparseMatrix<double>(m_ + k_, m_ + k_);
  K_.setFromTriplets(trips.begin(), trips.end());
  K_.makeCompressed();
  max_abs_ = sparse_max_abs(K_);
  lu_.compute(K_);
  if (lu_.info() != Eigen::Success)
    throw SolverError("solve_saddle: singular saddle system");
}

std::pair<VecX, VecX> SaddleFactorization::solve(const VecX& rhs) const {
  if (rhs.size() != m_ + k_)
    throw SolverError("solve_saddle: rhs length does not match");
  VecX z = lu_.solve(rhs);
  z += lu_.solve(rhs - K_ * z);
  check_residual(K_, z, rhs, max_abs_, 1e-9, "solve_saddle");
  return {z.head(m_), z.tail(k_)};
}

std::pair<VecX, VecX> solve_saddle(const SparseMatrix& A,
                                   const SparseMatrix& B, const VecX& rhs) {
  return SaddleFactorization(A, B).solve(rhs);
}

}  // namespace shapehom

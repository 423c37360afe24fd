#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <memory>
#include <utility>
#include <vector>

namespace shapehom {

using VecX = Eigen::VectorXd;

// Triplet-accumulating sparse matrix. Duplicate (row,col) entries are
// summed on finalize(); finalized matrices are immutable.
class SparseMatrix {
 public:
  SparseMatrix(int rows, int cols) : rows_(rows), cols_(cols) {}

  void add(int r, int c, double v) { trips_.emplace_back(r, c, v); }

  void finalize() {
    mat_ = Eigen::SparseMatrix<double>(rows_, cols_);
    mat_.setFromTriplets(trips_.begin(), trips_.end());
    mat_.makeCompressed();
    trips_.clear();
    finalized_ = true;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool finalized() const { return finalized_; }

  const Eigen::SparseMatrix<double>& eigen() const { return mat_; }

  double max_abs() const;
  VecX multiply(const VecX& x) const { return mat_ * x; }
  double symmetry_defect() const;  // max |A - A^T| entry

 private:
  int rows_, cols_;
  bool finalized_ = false;
  std::vector<Eigen::Triplet<double>> trips_;
  Eigen::SparseMatrix<double> mat_;
};

// Cholesky-type factorization for symmetric positive definite systems.
// Every solve re-verifies the residual and throws SolverError on failure.
class SpdFactorization {
 public:
  explicit SpdFactorization(const SparseMatrix& A);
  VecX solve(const VecX& b) const;

 private:
  const Eigen::SparseMatrix<double> A_;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt_;
  double max_abs_;
};

VecX solve_spd(const SparseMatrix& A, const VecX& b);

// LU factorization of a general square sparse matrix (used for the
// regularized Newton variants whose matrices need not be definite).
class LuFactorization {
 public:
  explicit LuFactorization(const SparseMatrix& A);
  VecX solve(const VecX& b) const;

 private:
  Eigen::SparseMatrix<double> A_;
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu_;
  double max_abs_;
};

// Factorization of the saddle system
//   [ A  B ] [V  ]   [rhs_V ]
//   [ B^T 0] [xi ] = [rhs_xi]
// with A of size m x m and B of size m x k. Solved by sparse LU with
// partial pivoting; one step of iterative refinement, then a residual
// check (relative 1e-9) that throws SolverError on failure. The
// factorization is immutable and reusable across right-hand sides.
class SaddleFactorization {
 public:
  SaddleFactorization(const SparseMatrix& A, const SparseMatrix& B);

  // rhs has length m + k; returns (V, xi).
  std::pair<VecX, VecX> solve(const VecX& rhs) const;

  int m() const { return m_; }
  int k() const { return k_; }

 private:
  int m_, k_;
  Eigen::SparseMatrix<double> K_;
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu_;
  double max_abs_;
};

std::pair<VecX, VecX> solve_saddle(const SparseMatrix& A,
                                   const SparseMatrix& B, const VecX& rhs);

}  // namespace shapehom

#pragma once

#include <cstddef>
#include <vector>

namespace pbe {

struct Triplet {
  int row;
  int col;
  double value;
};

/// Square CSR matrix with sorted, unique column indices per row.
struct SparseMatrix {
  int n = 0;
  std::vector<int> row_ptr{0};
  std::vector<int> col;
  std::vector<double> val;

  std::size_t nnz() const { return val.size(); }
  void multiply(const std::vector<double> &x, std::vector<double> &y) const;
  std::vector<double> operator*(const std::vector<double> &x) const;
  /// Entry (i, j) or 0 if not stored.
  double at(int i, int j) const;
  std::vector<double> diagonal() const;
  double max_asymmetry() const;
};

/// Duplicates are summed.
SparseMatrix csr_from_triplets(int n, const std::vector<Triplet> &triplets);
/// A + s B (matching dimension).
SparseMatrix add_scaled(const SparseMatrix &A, const SparseMatrix &B, double s);

enum class Preconditioner { None, Jacobi };

struct SolveStats {
  int iterations = 0;
  double residual = 0.0; // relative: ||b - Ax|| / ||b||
  bool converged = false;
};

/// Preconditioned conjugate gradients from the initial guess in x.
/// Throws SolverError on non-finite arithmetic or a non-positive curvature.
SolveStats cg_solve(const SparseMatrix &A, const std::vector<double> &b,
                    std::vector<double> &x, double tol, int maxit,
                    Preconditioner precond = Preconditioner::Jacobi);

double dot(const std::vector<double> &a, const std::vector<double> &b);
double norm2(const std::vector<double> &a);

} // namespace pbe

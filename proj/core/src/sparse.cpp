#include "pbe/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pbe/error.hpp"

namespace pbe {

double dot(const std::vector<double> &a, const std::vector<double> &b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    s += a[i] * b[i];
  return s;
}

double norm2(const std::vector<double> &a) { return std::sqrt(dot(a, a)); }

void SparseMatrix::multiply(const std::vector<double> &x,
                            std::vector<double> &y) const {
  y.resize(n);
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k)
      s += val[k] * x[col[k]];
    y[i] = s;
  }
}

std::vector<double> SparseMatrix::operator*(const std::vector<double> &x) const {
  std::vector<double> y;
  multiply(x, y);
  return y;
}

double SparseMatrix::at(int i, int j) const {
  auto first = col.begin() + row_ptr[i], last = col.begin() + row_ptr[i + 1];
  auto it = std::lower_bound(first, last, j);
  return it != last && *it == j ? val[it - col.begin()] : 0.0;
}

std::vector<double> SparseMatrix::diagonal() const {
  std::vector<double> d(n);
  for (int i = 0; i < n; ++i)
    d[i] = at(i, i);
  return d;
}

double SparseMatrix::max_asymmetry() const {
  double m = 0.0;
  for (int i = 0; i < n; ++i)
    for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k)
      m = std::max(m, std::abs(val[k] - at(col[k], i)));
  return m;
}

SparseMatrix csr_from_triplets(int n, const std::vector<Triplet> &triplets) {
  SparseMatrix A;
  A.n = n;
  std::vector<int> count(n + 1, 0);
  for (const auto &t : triplets) {
    if (t.row < 0 || t.row >= n || t.col < 0 || t.col >= n)
      throw Error("triplet index (" + std::to_string(t.row) + ", " +
                  std::to_string(t.col) + ") out of range for n = " +
                  std::to_string(n));
    ++count[t.row + 1];
  }
  for (int i = 0; i < n; ++i)
    count[i + 1] += count[i];
  std::vector<int> cols(triplets.size());
  std::vector<double> vals(triplets.size());
  std::vector<int> fill(count.begin(), count.end() - 1);
  for (const auto &t : triplets) {
    cols[fill[t.row]] = t.col;
    vals[fill[t.row]++] = t.value;
  }
  A.row_ptr.assign(n + 1, 0);
  std::vector<std::pair<int, double>> row;
  for (int i = 0; i < n; ++i) {
    row.clear();
    for (int k = count[i]; k < count[i + 1]; ++k)
      row.emplace_back(cols[k], vals[k]);
    std::stable_sort(row.begin(), row.end(),
                     [](const auto &a, const auto &b) { return a.first < b.first; });
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (!A.col.empty() && static_cast<int>(A.col.size()) > A.row_ptr[i] &&
          A.col.back() == row[k].first)
        A.val.back() += row[k].second;
      else {
        A.col.push_back(row[k].first);
        A.val.push_back(row[k].second);
      }
    }
    A.row_ptr[i + 1] = static_cast<int>(A.col.size());
  }
  return A;
}

SparseMatrix add_scaled(const SparseMatrix &A, const SparseMatrix &B, double s) {
  if (A.n != B.n)
    throw Error("matrix dimensions differ in add_scaled");
  std::vector<Triplet> t;
  t.reserve(A.nnz() + B.nnz());
  for (int i = 0; i < A.n; ++i) {
    for (int k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k)
      t.push_back({i, A.col[k], A.val[k]});
    for (int k = B.row_ptr[i]; k < B.row_ptr[i + 1]; ++k)
      t.push_back({i, B.col[k], s * B.val[k]});
  }
  return csr_from_triplets(A.n, t);
}

SolveStats cg_solve(const SparseMatrix &A, const std::vector<double> &b,
                    std::vector<double> &x, double tol, int maxit,
                    Preconditioner precond) {
  const int n = A.n;
  if (static_cast<int>(b.size()) != n)
    throw SolverError("right-hand side length does not match matrix");
  if (static_cast<int>(x.size()) != n)
    x.assign(n, 0.0);
  SolveStats stats;
  const double bnorm = norm2(b);
  if (bnorm == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    stats.converged = true;
    return stats;
  }
  std::vector<double> inv_diag(n, 1.0);
  if (precond == Preconditioner::Jacobi) {
    const auto d = A.diagonal();
    for (int i = 0; i < n; ++i) {
      if (!(d[i] > 0.0))
        throw SolverError("non-positive diagonal entry " + std::to_string(i) +
                          " in Jacobi preconditioner");
      inv_diag[i] = 1.0 / d[i];
    }
  }
  std::vector<double> r(n), z(n), p(n), Ap(n);
  A.multiply(x, Ap);
  for (int i = 0; i < n; ++i)
    r[i] = b[i] - Ap[i];
  double rnorm = norm2(r);
  std::vector<double> best_x = x;
  double best = rnorm;
  for (int i = 0; i < n; ++i)
    z[i] = inv_diag[i] * r[i];
  p = z;
  double rz = dot(r, z);
  while (rnorm > tol * bnorm && stats.iterations < maxit) {
    A.multiply(p, Ap);
    const double pAp = dot(p, Ap);
    if (!std::isfinite(pAp) || !(pAp > 0.0))
      throw SolverError("CG breakdown: non-positive or non-finite curvature p'Ap = " +
                        std::to_string(pAp) + " at iteration " +
                        std::to_string(stats.iterations));
    const double alpha = rz / pAp;
    for (int i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * Ap[i];
    }
    ++stats.iterations;
    const double previous = rnorm;
    rnorm = norm2(r);
    if (!std::isfinite(rnorm))
      throw SolverError("CG breakdown: non-finite residual");
    if (rnorm < best) {
      best = rnorm;
      best_x = x;
    }
    for (int i = 0; i < n; ++i)
      z[i] = inv_diag[i] * r[i];
    if (rnorm > 10.0 * previous) {
      // restart from the best iterate with a recomputed residual
      x = best_x;
      A.multiply(x, Ap);
      for (int i = 0; i < n; ++i) {
        r[i] = b[i] - Ap[i];
        z[i] = inv_diag[i] * r[i];
      }
      rnorm = norm2(r);
      p = z;
      rz = dot(r, z);
      continue;
    }
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (int i = 0; i < n; ++i)
      p[i] = z[i] + beta * p[i];
  }
  stats.converged = rnorm <= tol * bnorm;
  if (!stats.converged) {
    x = best_x;
    rnorm = best;
  }
  stats.residual = rnorm / bnorm;
  return stats;
}

} // namespace pbe

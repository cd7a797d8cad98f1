#pragma once

#include "ccg/geometry.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace ccg {

inline constexpr double kDropTolerance = 1e-14;

/// Square compressed-row matrix. Column indices are strictly increasing
/// within each row.
class SparseMatrix {
 public:
  using Storage = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;

  SparseMatrix() = default;
  explicit SparseMatrix(Storage m);
  /// Takes ownership of a CSR triple; columns must be sorted per row.
  SparseMatrix(int n, std::vector<int> row_offsets, std::vector<int> columns,
               std::vector<double> values);
  static SparseMatrix identity(int n);
  static SparseMatrix diagonal(const Eigen::VectorXd& d);

  [[nodiscard]] int rows() const { return static_cast<int>(m_.rows()); }
  [[nodiscard]] std::size_t nnz() const { return static_cast<std::size_t>(m_.nonZeros()); }
  [[nodiscard]] std::span<const int> row_offsets() const;
  [[nodiscard]] std::span<const int> columns() const;
  [[nodiscard]] std::span<const double> values() const;
  [[nodiscard]] double coeff(int i, int j) const { return m_.coeff(i, j); }
  [[nodiscard]] const Storage& eigen() const { return m_; }
  [[nodiscard]] Storage& eigen() { return m_; }

  /// Removes stored entries with |a| <= tol.
  void prune(double tol = kDropTolerance);
  [[nodiscard]] Eigen::VectorXd operator*(const Eigen::VectorXd& x) const { return m_ * x; }
  [[nodiscard]] Eigen::MatrixXd dense() const { return Eigen::MatrixXd(m_); }
  [[nodiscard]] SparseMatrix transpose() const;

  /// Replaces row i by the identity row.
  void pin_row(int i);

 private:
  Storage m_;
};

/// alpha A + beta B
[[nodiscard]] SparseMatrix combine(double alpha, const SparseMatrix& a, double beta,
                                   const SparseMatrix& b);

struct NnzReport {
  std::size_t nnz = 0;
  int rows = 0;
  double nnz_per_row = 0.0;
};

[[nodiscard]] NnzReport nnz_report(const SparseMatrix& m);

class SolveError : public Error {
 public:
  using Error::Error;
};

struct SolverOptions {
  int direct_cap = 200000;
  double tolerance = 1e-10;
  int max_iterations = 5000;
  int restart = 60;
};

struct SolveInfo {
  bool direct = true;
  int iterations = 0;
  double residual = 0.0;  // ||Ax - b|| / ||b||
};

/// Solves A x = b. Direct sparse LU up to `direct_cap` unknowns, restarted
/// GMRES with an ILUT preconditioner beyond. The symbolic LU analysis is
/// reused while the sparsity pattern does not change.
class LinearSolver {
 public:
  explicit LinearSolver(SolverOptions options = {});
  ~LinearSolver();
  LinearSolver(LinearSolver&&) noexcept;
  LinearSolver& operator=(LinearSolver&&) noexcept;

  Eigen::VectorXd solve(const SparseMatrix& a, const Eigen::VectorXd& b);
  [[nodiscard]] const SolveInfo& info() const { return info_; }
  [[nodiscard]] const SolverOptions& options() const { return options_; }

 private:
  struct Impl;
  SolverOptions options_;
  SolveInfo info_;
  std::unique_ptr<Impl> impl_;
};

[[nodiscard]] Eigen::VectorXd solve_linear(const SparseMatrix& a, const Eigen::VectorXd& b,
                                           const SolverOptions& options = {},
                                           SolveInfo* info = nullptr);

/// Conjugate gradients with a diagonal preconditioner; A must be SPD.
[[nodiscard]] Eigen::VectorXd solve_cg(const SparseMatrix& a, const Eigen::VectorXd& b,
                                       double tolerance = 1e-12, int max_iterations = 20000);

}  // namespace ccg

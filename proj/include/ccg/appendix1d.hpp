#pragma once

#include "ccg/sparse.hpp"

#include <vector>

namespace ccg {

/// Bands of the 1D CCG stiffness matrix with barycentric reconstruction,
/// zero Dirichlet data, symmetry parameter eps and penalty sigma (h = 1).
struct ToeplitzCoefficients {
  double a, b, c, d;
  double a1, a0, b0, c0;
};

[[nodiscard]] ToeplitzCoefficients toeplitz_coefficients(double eps, double sigma);

/// (1/h) T_{eps,sigma}, N >= 7. Symmetric seven-band layout with boundary
/// bands (a0, b0, c0) and (a1) in the first and last three rows.
[[nodiscard]] SparseMatrix build_T(int n, double eps, double sigma, double h = 1.0);

/// Off-diagonal entries all <= 1e-14.
[[nodiscard]] bool is_z_matrix(const SparseMatrix& m);

/// Strong connectivity of the directed graph of the off-diagonal pattern.
[[nodiscard]] bool is_irreducible(const SparseMatrix& m);

/// Only the main and first off-diagonals hold entries above 1e-14.
[[nodiscard]] bool is_tridiagonal(const SparseMatrix& m);

struct MonotonicityReport {
  bool monotone = false;
  double min_inverse_entry = 0.0;
};

/// Dense inverse; monotone iff every entry >= -1e-10. Throws SolveError for
/// a singular matrix and std::invalid_argument above `cap` rows.
[[nodiscard]] MonotonicityReport monotonicity(const SparseMatrix& m, int cap = 512);
[[nodiscard]] bool is_monotone(const SparseMatrix& m, int cap = 512);

/// Z-matrix with nonnegative inverse.
[[nodiscard]] bool is_m_matrix(const SparseMatrix& m, int cap = 512);

/// Entrywise a <= b (structural zeros compare as 0).
[[nodiscard]] bool entrywise_leq(const SparseMatrix& a, const SparseMatrix& b);

/// Toeplitz bounds with A = max{a0, a1, a}, B = max{b0, b}, C = max{c0, c}:
/// lower = tridiag(B, A, B), upper = seven-band (d, C, B, A, B, C, d).
struct SandwichMatrices {
  double A, B, C, d;
  SparseMatrix lower;
  SparseMatrix upper;
};

[[nodiscard]] SandwichMatrices sandwich(int n, double eps, double sigma);

/// 104 sqrt(2)/79 - 12/79
[[nodiscard]] double monotone_range_sigma2();

/// 17/16 - 79 sigma^2/256 - 3 sigma/32
[[nodiscard]] double range_discriminant(double sigma);

/// Conditions under which Q(w) = C w^2 + B w + (A - 2C) has two real roots
/// w > 2, so that every root z = (w +- sqrt(w^2 - 4))/2 of
/// p(z) = C z^4 + B z^3 + A z^2 + B z + C is positive.
struct RootCriterion {
  double A = 0.0, B = 0.0, C = 0.0;
  double discriminant = 0.0;  // (4C + B)^2 - 4C(2C + 2B + A)
  bool c_positive = false;
  bool four_c_plus_b_negative = false;
  bool two_c_two_b_a_positive = false;
  bool discriminant_nonnegative = false;
  bool real_roots = false;
  double w1 = 0.0, w2 = 0.0;  // w1 <= w2 when real
  bool roots_above_two = false;
  std::vector<double> z;  // roots of p when real and w > 2
  [[nodiscard]] bool all_hold() const {
    return c_positive && four_c_plus_b_negative && two_c_two_b_a_positive &&
           discriminant_nonnegative && roots_above_two;
  }
};

/// Requires eps + sigma = 1 (then d = 0).
[[nodiscard]] RootCriterion root_criterion_check(double eps, double sigma);

struct DominanceRow {
  int row = 0;
  double diagonal = 0.0;
  double off_diagonal_sum = 0.0;  // sum of |a_ij|, j != i
};

[[nodiscard]] std::vector<DominanceRow> diagonal_dominance(const SparseMatrix& m);

}  // namespace ccg

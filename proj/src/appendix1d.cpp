#include "ccg/appendix1d.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>

namespace ccg {

ToeplitzCoefficients toeplitz_coefficients(double eps, double sigma) {
  ToeplitzCoefficients t{};
  t.a = 5.0 * sigma / 4.0 - eps / 4.0 + 3.0 / 4.0;
  t.b = eps / 16.0 - 15.0 * sigma / 16.0 - 1.0 / 16.0;
  t.c = eps / 8.0 + 3.0 * sigma / 8.0 - 3.0 / 8.0;
  t.d = 1.0 / 16.0 - sigma / 16.0 - eps / 16.0;
  t.a1 = 5.0 * sigma / 4.0 - 3.0 * eps / 16.0 + 11.0 / 16.0;
  t.a0 = 13.0 * sigma / 8.0 - 5.0 * eps / 16.0 + 13.0 / 16.0;
  t.b0 = 5.0 / 16.0 - 9.0 * sigma / 8.0 - eps / 16.0;
  t.c0 = 3.0 * eps / 16.0 + 7.0 * sigma / 16.0 - 7.0 / 16.0;
  return t;
}

namespace {

SparseMatrix banded(int n, const std::function<double(int, int)>& entry, int bandwidth) {
  std::vector<int> offsets(n + 1, 0);
  std::vector<int> cols;
  std::vector<double> vals;
  for (int i = 0; i < n; ++i) {
    for (int j = std::max(0, i - bandwidth); j <= std::min(n - 1, i + bandwidth); ++j) {
      const double v = entry(std::min(i, j), std::max(i, j));
      if (v == 0.0) continue;
      cols.push_back(j);
      vals.push_back(v);
    }
    offsets[i + 1] = static_cast<int>(cols.size());
  }
  return SparseMatrix(n, std::move(offsets), std::move(cols), std::move(vals));
}

}  // namespace

SparseMatrix build_T(int n, double eps, double sigma, double h) {
  if (n < 7) throw std::invalid_argument("build_T needs N >= 7, got " + std::to_string(n));
  const ToeplitzCoefficients t = toeplitz_coefficients(eps, sigma);
  const double s = 1.0 / h;
  // i <= j
  auto entry = [&](int i, int j) {
    const int last = n - 1;
    switch (j - i) {
      case 0:
        if (i == 0 || i == last) return s * t.a0;
        if (i == 1 || i == last - 1) return s * t.a1;
        return s * t.a;
      case 1:
        return s * ((i == 0 || j == last) ? t.b0 : t.b);
      case 2:
        return s * ((i == 0 || j == last) ? t.c0 : t.c);
      case 3:
        return s * t.d;
      default:
        return 0.0;
    }
  };
  return banded(n, entry, 3);
}

bool is_z_matrix(const SparseMatrix& m) {
  const auto rows = m.row_offsets();
  const auto cols = m.columns();
  const auto vals = m.values();
  for (int i = 0; i < m.rows(); ++i) {
    for (int k = rows[i]; k < rows[i + 1]; ++k) {
      if (cols[k] != i && vals[k] > 1e-14) return false;
    }
  }
  return true;
}

bool is_irreducible(const SparseMatrix& m) {
  const int n = m.rows();
  if (n <= 1) return true;
  const auto rows = m.row_offsets();
  const auto cols = m.columns();
  const auto vals = m.values();
  std::vector<std::vector<int>> fwd(n);
  std::vector<std::vector<int>> bwd(n);
  for (int i = 0; i < n; ++i) {
    for (int k = rows[i]; k < rows[i + 1]; ++k) {
      if (cols[k] == i || std::abs(vals[k]) <= 1e-14) continue;
      fwd[i].push_back(cols[k]);
      bwd[cols[k]].push_back(i);
    }
  }
  auto reaches_all = [n](const std::vector<std::vector<int>>& g) {
    std::vector<char> seen(n, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int count = 1;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (int w : g[v]) {
        if (!seen[w]) {
          seen[w] = 1;
          ++count;
          stack.push_back(w);
        }
      }
    }
    return count == n;
  };
  return reaches_all(fwd) && reaches_all(bwd);
}

bool is_tridiagonal(const SparseMatrix& m) {
  const auto rows = m.row_offsets();
  const auto cols = m.columns();
  const auto vals = m.values();
  for (int i = 0; i < m.rows(); ++i) {
    for (int k = rows[i]; k < rows[i + 1]; ++k) {
      if (std::abs(cols[k] - i) > 1 && std::abs(vals[k]) > 1e-14) return false;
    }
  }
  return true;
}

MonotonicityReport monotonicity(const SparseMatrix& m, int cap) {
  const int n = m.rows();
  if (n > cap) {
    throw std::invalid_argument("dense monotonicity check capped at " + std::to_string(cap) +
                                " rows, got " + std::to_string(n));
  }
  const Eigen::MatrixXd a = m.dense();
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  if (!lu.isInvertible()) throw SolveError("matrix is singular; no inverse to inspect");
  const Eigen::MatrixXd inv = lu.inverse();
  MonotonicityReport r;
  r.min_inverse_entry = inv.minCoeff();
  r.monotone = r.min_inverse_entry >= -1e-10;
  return r;
}

bool is_monotone(const SparseMatrix& m, int cap) { return monotonicity(m, cap).monotone; }

bool is_m_matrix(const SparseMatrix& m, int cap) {
  return is_z_matrix(m) && is_monotone(m, cap);
}

bool entrywise_leq(const SparseMatrix& a, const SparseMatrix& b) {
  if (a.rows() != b.rows()) return false;
  const SparseMatrix::Storage diff = b.eigen() - a.eigen();
  for (int i = 0; i < diff.outerSize(); ++i) {
    for (SparseMatrix::Storage::InnerIterator it(diff, i); it; ++it) {
      if (it.value() < 0.0) return false;
    }
  }
  return true;
}

SandwichMatrices sandwich(int n, double eps, double sigma) {
  const ToeplitzCoefficients t = toeplitz_coefficients(eps, sigma);
  SandwichMatrices s{};
  s.A = std::max({t.a0, t.a1, t.a});
  s.B = std::max(t.b0, t.b);
  s.C = std::max(t.c0, t.c);
  s.d = t.d;
  const double A = s.A;
  const double B = s.B;
  const double C = s.C;
  const double d = s.d;
  s.lower = banded(n, [&](int i, int j) { return j == i ? A : (j == i + 1 ? B : 0.0); }, 1);
  s.upper = banded(
      n,
      [&](int i, int j) {
        switch (j - i) {
          case 0:
            return A;
          case 1:
            return B;
          case 2:
            return C;
          case 3:
            return d;
          default:
            return 0.0;
        }
      },
      3);
  return s;
}

double monotone_range_sigma2() { return 104.0 * std::sqrt(2.0) / 79.0 - 12.0 / 79.0; }

double range_discriminant(double sigma) {
  return 17.0 / 16.0 - 79.0 * sigma * sigma / 256.0 - 3.0 * sigma / 32.0;
}

RootCriterion root_criterion_check(double eps, double sigma) {
  if (std::abs(eps + sigma - 1.0) > 1e-12) {
    throw std::invalid_argument("root criterion needs eps + sigma = 1");
  }
  const ToeplitzCoefficients t = toeplitz_coefficients(eps, sigma);
  RootCriterion r;
  r.A = std::max({t.a0, t.a1, t.a});
  r.B = std::max(t.b0, t.b);
  r.C = std::max(t.c0, t.c);
  const double A = r.A;
  const double B = r.B;
  const double C = r.C;
  r.discriminant = (4.0 * C + B) * (4.0 * C + B) - 4.0 * C * (2.0 * C + 2.0 * B + A);
  r.c_positive = C > 0.0;
  r.four_c_plus_b_negative = 4.0 * C + B < 0.0;
  r.two_c_two_b_a_positive = 2.0 * C + 2.0 * B + A > 0.0;
  r.discriminant_nonnegative = r.discriminant >= 0.0;
  // Q(w) = C w^2 + B w + (A - 2C); its discriminant equals that of the
  // shifted polynomial.
  if (C != 0.0 && r.discriminant >= 0.0) {
    const double sq = std::sqrt(r.discriminant);
    const double q = -0.5 * (B + std::copysign(sq, B));
    double w1 = q / C;
    double w2 = q != 0.0 ? (A - 2.0 * C) / q : w1;
    if (w1 > w2) std::swap(w1, w2);
    r.real_roots = true;
    r.w1 = w1;
    r.w2 = w2;
    r.roots_above_two = w1 > 2.0;
    if (r.roots_above_two) {
      for (double w : {w1, w2}) {
        const double s = std::sqrt(w * w - 4.0);
        r.z.push_back(0.5 * (w - s));
        r.z.push_back(0.5 * (w + s));
      }
    }
  }
  return r;
}

std::vector<DominanceRow> diagonal_dominance(const SparseMatrix& m) {
  std::vector<DominanceRow> out(m.rows());
  const auto rows = m.row_offsets();
  const auto cols = m.columns();
  const auto vals = m.values();
  for (int i = 0; i < m.rows(); ++i) {
    out[i].row = i;
    for (int k = rows[i]; k < rows[i + 1]; ++k) {
      if (cols[k] == i) {
        out[i].diagonal = vals[k];
      } else {
        out[i].off_diagonal_sum += std::abs(vals[k]);
      }
    }
  }
  return out;
}

}  // namespace ccg

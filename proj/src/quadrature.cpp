#include "ccg/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace ccg {

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
    }
    nodes[i] = 0.5 * (1.0 - x);
    weights[i] = 1.0 / ((1.0 - x * x) * dp * dp);  // = 0.5 * 2/((1-x^2) P'^2)
  }
}

std::vector<QuadraturePoint> quadrature(int dim, int order) {
  if (dim < 0 || dim > 3) throw std::invalid_argument("quadrature dimension must be 0..3");
  if (order < 1 || order > kMaxQuadratureOrder) {
    throw std::invalid_argument("unsupported quadrature order " + std::to_string(order));
  }
  if (dim == 0) return {QuadraturePoint{Vec3::Zero(), 1.0}};
  if (order == 1) {
    QuadraturePoint q;
    for (int i = 0; i < dim; ++i) q.point[i] = 1.0 / (dim + 1);
    q.weight = dim == 1 ? 1.0 : dim == 2 ? 0.5 : 1.0 / 6.0;
    return {q};
  }
  // Collapsed (Duffy) tensor Gauss-Legendre rule. The Jacobian adds up to
  // dim-1 to the polynomial degree along the collapsed directions.
  const int n = (order + dim) / 2 + 1;
  std::vector<double> x;
  std::vector<double> w;
  gauss_legendre(n, x, w);
  std::vector<QuadraturePoint> rule;
  if (dim == 1) {
    for (int i = 0; i < n; ++i) rule.push_back({Vec3(x[i], 0.0, 0.0), w[i]});
  } else if (dim == 2) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const double u = x[i];
        const double v = x[j];
        rule.push_back({Vec3(u, v * (1.0 - u), 0.0), w[i] * w[j] * (1.0 - u)});
      }
    }
  } else {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
          const double u = x[i];
          const double v = x[j];
          const double s = x[k];
          rule.push_back({Vec3(u, v * (1.0 - u), s * (1.0 - u) * (1.0 - v)),
                          w[i] * w[j] * w[k] * (1.0 - u) * (1.0 - u) * (1.0 - v)});
        }
      }
    }
  }
  return rule;
}

}  // namespace ccg

#include <array>
#include <mutex>

namespace ccg {

const std::vector<QuadraturePoint>& reference_rule(int dim, int order) {
  static std::array<std::array<std::vector<QuadraturePoint>, kMaxQuadratureOrder + 1>, 4> cache;
  static std::once_flag once;
  std::call_once(once, [] {
    for (int d = 0; d <= 3; ++d)
      for (int q = 1; q <= kMaxQuadratureOrder; ++q) cache[d][q] = quadrature(d, q);
  });
  if (dim < 0 || dim > 3 || order < 1 || order > kMaxQuadratureOrder) {
    throw std::invalid_argument("unsupported quadrature order " + std::to_string(order));
  }
  return cache[dim][order];
}

void cell_rule(const Mesh& mesh, int cell, int order, std::vector<QuadraturePoint>& out) {
  const int d = mesh.dim();
  const auto& ref = reference_rule(d, order);
  const auto vs = mesh.cell_vertices(cell);
  const double scale = mesh.cell_measure(cell) * (d == 1 ? 1.0 : d == 2 ? 2.0 : 6.0);
  out.clear();
  for (const auto& q : ref) {
    Vec3 x = mesh.vertex(vs[0]);
    for (int k = 1; k <= d; ++k) x += q.point[k - 1] * (mesh.vertex(vs[k]) - mesh.vertex(vs[0]));
    out.push_back({x, q.weight * scale});
  }
}

void face_rule(const Mesh& mesh, int face, int order, std::vector<QuadraturePoint>& out) {
  const int fd = mesh.dim() - 1;
  const Face& f = mesh.face(face);
  const auto& ref = reference_rule(fd, order);
  const double scale = f.measure * (fd <= 1 ? 1.0 : 2.0);
  out.clear();
  for (const auto& q : ref) {
    Vec3 x = mesh.vertex(f.vertices[0]);
    for (int k = 1; k <= fd; ++k) {
      x += q.point[k - 1] * (mesh.vertex(f.vertices[k]) - mesh.vertex(f.vertices[0]));
    }
    out.push_back({x, q.weight * scale});
  }
}

}  // namespace ccg

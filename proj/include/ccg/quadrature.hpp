#pragma once

#include "ccg/geometry.hpp"

#include <vector>

namespace ccg {

struct QuadraturePoint {
  Vec3 point = Vec3::Zero();  // reference coordinates (first `dim` used)
  double weight = 0.0;
};

inline constexpr int kMaxQuadratureOrder = 6;

/// Rule on the reference simplex {x_i >= 0, sum x_i <= 1} exact for
/// polynomials of total degree `order`. Order 1 is the centroid rule.
/// Weights sum to the reference measure 1/dim!. dim == 0 yields the single
/// point rule used on the faces of 1D meshes.
[[nodiscard]] std::vector<QuadraturePoint> quadrature(int dim, int order);

/// Gauss-Legendre nodes and weights on [0, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace ccg

#include "ccg/mesh.hpp"

namespace ccg {

/// Cached reference rule; same contents as quadrature(dim, order).
[[nodiscard]] const std::vector<QuadraturePoint>& reference_rule(int dim, int order);

/// Rule mapped to a physical cell: points in physical coordinates, weights
/// scaled to integrate over the cell. Clears and fills `out`.
void cell_rule(const Mesh& mesh, int cell, int order, std::vector<QuadraturePoint>& out);

/// Rule mapped to a face; weights sum to the face measure.
void face_rule(const Mesh& mesh, int face, int order, std::vector<QuadraturePoint>& out);

}  // namespace ccg

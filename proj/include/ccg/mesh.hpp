#pragma once

#include "ccg/geometry.hpp"

#include <array>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace ccg {

class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  [[nodiscard]] int line() const { return line_; }

 private:
  int line_;
};

class TopologyError : public Error {
 public:
  using Error::Error;
};

class AdmissibilityError : public Error {
 public:
  AdmissibilityError(const std::string& what, int face)
      : Error(what), face_(face) {}
  [[nodiscard]] int face() const { return face_; }

 private:
  int face_;
};

/// A facet of the simplicial mesh.
///
/// `cells[0]` is the lower cell id. For interior faces `normal` is the
/// outward normal of `cells[0]` (so it points from cells[0] into cells[1]);
/// for boundary faces it points out of the domain and `cells[1] == -1`.
struct Face {
  std::array<int, 3> vertices{-1, -1, -1};
  std::array<int, 2> cells{-1, -1};
  double measure = 0.0;
  Vec3 barycenter = Vec3::Zero();
  Vec3 normal = Vec3::Zero();

  [[nodiscard]] bool boundary() const { return cells[1] < 0; }
};

/// Conforming simplicial mesh in one, two or three dimensions.
///
/// Cells store d+1 vertex ids. Local face i of a cell is the facet opposite
/// local vertex i. Immutable after construction.
class Mesh {
 public:
  Mesh(int dim, std::vector<Vec3> vertices,
       std::vector<std::array<int, 4>> cells);

  [[nodiscard]] int dim() const { return dim_; }
  [[nodiscard]] int num_vertices() const { return static_cast<int>(vertices_.size()); }
  [[nodiscard]] int num_cells() const { return static_cast<int>(cells_.size()); }
  [[nodiscard]] int num_faces() const { return static_cast<int>(faces_.size()); }
  [[nodiscard]] int num_boundary_faces() const { return num_boundary_faces_; }

  [[nodiscard]] const Vec3& vertex(int v) const { return vertices_[v]; }
  [[nodiscard]] std::span<const int> cell_vertices(int c) const {
    return {cells_[c].data(), static_cast<std::size_t>(dim_ + 1)};
  }
  [[nodiscard]] std::span<const int> cell_faces(int c) const {
    return {cell_faces_[c].data(), static_cast<std::size_t>(dim_ + 1)};
  }
  [[nodiscard]] const Face& face(int f) const { return faces_[f]; }
  [[nodiscard]] std::span<const Face> faces() const { return faces_; }

  [[nodiscard]] double cell_measure(int c) const { return measure_[c]; }
  [[nodiscard]] double cell_diameter(int c) const { return diameter_[c]; }
  [[nodiscard]] const Vec3& centroid(int c) const { return centroid_[c]; }

  /// +1 when the stored face normal is the outward normal of `cell`, else -1.
  [[nodiscard]] double normal_sign(int cell, int face) const {
    return faces_[face].cells[0] == cell ? 1.0 : -1.0;
  }
  [[nodiscard]] Vec3 outward_normal(int cell, int face) const {
    return normal_sign(cell, face) * faces_[face].normal;
  }
  /// Cell across local face `local` of `cell`, or -1 on the boundary.
  [[nodiscard]] int neighbor(int cell, int local) const;

  /// Gradients of the barycentric coordinates of `cell` (constant per cell).
  [[nodiscard]] std::span<const Vec3> barycentric_gradients(int c) const {
    return {bary_grad_[c].data(), static_cast<std::size_t>(dim_ + 1)};
  }
  /// Barycentric coordinates of `x` with respect to the vertices of `cell`.
  [[nodiscard]] std::array<double, 4> barycentric(int cell, const Vec3& x) const;

  [[nodiscard]] Box bounding_box() const;
  [[nodiscard]] double max_diameter() const;

  /// Cell containing x (lowest id among candidates on shared facets), or -1.
  [[nodiscard]] int locate(const Vec3& x, double tol = 1e-12) const;

 private:
  void build_geometry();
  void build_faces();
  void build_locator();

  int dim_;
  std::vector<Vec3> vertices_;
  std::vector<std::array<int, 4>> cells_;
  std::vector<std::array<int, 4>> cell_faces_;
  std::vector<Face> faces_;
  int num_boundary_faces_ = 0;
  std::vector<double> measure_;
  std::vector<double> diameter_;
  std::vector<Vec3> centroid_;
  std::vector<std::array<Vec3, 4>> bary_grad_;

  // uniform bucket grid for point location
  Box locator_box_;
  std::array<int, 3> locator_dims_{1, 1, 1};
  std::vector<std::vector<int>> locator_buckets_;
};

/// Structured simplicial mesh of `box`: n intervals (1D), 2n^2 triangles
/// (2D, squares split along the main diagonal) or 6n^3 tetrahedra (3D,
/// Kuhn/Freudenthal split of each cube).
[[nodiscard]] Mesh generate_structured(int dim, int n_per_axis,
                                       const Box& box = Box::unit());

/// Reads the plain-text mesh format:
///   dim nv nc
///   nv lines of `dim` coordinates
///   nc lines of `dim+1` zero-based vertex ids
/// Whitespace separated; `#` starts a comment.
[[nodiscard]] Mesh load_mesh(const std::filesystem::path& path);
[[nodiscard]] Mesh parse_mesh(const std::string& text);
void write_mesh(const Mesh& mesh, const std::filesystem::path& path);

struct StencilOptions {
  double degeneracy_floor = 1e-6;
  double max_extrapolation = 2.0;
};

/// Cells B_h^F used by the barycentric trace interpolator on one face, with
/// the barycentric coordinates of the face barycenter in the simplex of
/// their centroids. Boundary faces carry the single adjacent cell, weight 1.
struct FaceStencil {
  int face = -1;
  int size = 0;
  std::array<int, 4> cells{-1, -1, -1, -1};
  std::array<double, 4> weights{0.0, 0.0, 0.0, 0.0};

  [[nodiscard]] std::span<const int> cell_span() const {
    return {cells.data(), static_cast<std::size_t>(size)};
  }
  [[nodiscard]] std::span<const double> weight_span() const {
    return {weights.data(), static_cast<std::size_t>(size)};
  }
};

/// Deterministic B_h^F selection: both face-adjacent cells plus the first
/// (ascending id) combination of d-1 further cells, drawn from the face
/// neighbours of those two, whose centroid simplex passes the degeneracy
/// floor and whose weights lie in [-w_max, 1 + w_max].
[[nodiscard]] std::vector<FaceStencil> select_face_stencils(
    const Mesh& mesh, const StencilOptions& options = {});

}  // namespace ccg

#pragma once

#include "ccg/mesh.hpp"

#include <Eigen/Core>

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace ccg {

using ScalarFunction = std::function<double(const Vec3&)>;

enum class SpaceKind { ccg, dg };

/// How the CCG trace interpolator treats boundary faces.
///   dirichlet: I_F = g(x_F) from the field's boundary data (zero if absent)
///   mirror:    I_F = the adjacent cell average, so the face does not
///              contribute to the reconstructed gradient
enum class BoundaryTrace { dirichlet, mirror };

inline constexpr int kMaxLocalDofs = 32;

/// Compressed-row coupling pattern of a space: element blocks plus the
/// union of the two adjacent cells' dofs on every interior face.
struct SparsityPattern {
  std::vector<int> row_offsets;
  std::vector<int> columns;
  [[nodiscard]] int rows() const { return static_cast<int>(row_offsets.size()) - 1; }
  [[nodiscard]] std::size_t nnz() const { return columns.size(); }
  /// Position of (row, col) in `columns`, or -1.
  [[nodiscard]] int find(int row, int col) const;
};

/// Discrete space on a simplicial mesh. Every cell exposes a short list of
/// global dofs and the values/gradients of the matching local shape
/// functions at arbitrary points of the cell, which is all the assembly
/// kernels need to treat CCG and DG uniformly.
class FeSpace {
 public:
  virtual ~FeSpace() = default;

  [[nodiscard]] virtual SpaceKind kind() const = 0;
  [[nodiscard]] virtual std::string name() const = 0;
  [[nodiscard]] int num_dofs() const { return num_dofs_; }
  [[nodiscard]] const Mesh& mesh() const { return *mesh_; }
  [[nodiscard]] const std::shared_ptr<const Mesh>& mesh_ptr() const { return mesh_; }

  [[nodiscard]] virtual std::span<const int> cell_dofs(int cell) const = 0;
  /// Fills values[a], grads[a] for a < cell_dofs(cell).size().
  virtual void evaluate(int cell, const Vec3& x, double* values, Vec3* grads) const = 0;
  /// Contribution of boundary trace data to the function on `cell` (the
  /// inhomogeneous part of the CCG reconstruction). Zero for DG.
  [[nodiscard]] virtual bool has_lifting(int /*cell*/) const { return false; }
  virtual void lifting(int /*cell*/, const Vec3& /*x*/, const ScalarFunction& /*data*/,
                       double& value, Vec3& grad) const {
    value = 0.0;
    grad.setZero();
  }

  /// Quadrature orders the assembly uses by default.
  [[nodiscard]] virtual int default_volume_order() const = 0;
  [[nodiscard]] virtual int default_face_order() const = 0;

  [[nodiscard]] const SparsityPattern& pattern() const { return pattern_; }

 protected:
  FeSpace(std::shared_ptr<const Mesh> mesh, int num_dofs)
      : mesh_(std::move(mesh)), num_dofs_(num_dofs) {}
  void build_pattern();

 private:
  std::shared_ptr<const Mesh> mesh_;
  int num_dofs_;
  SparsityPattern pattern_;
};

class Field;

/// Cell-centered Galerkin space: one dof (the cell average) per cell, and
/// on each cell the affine reconstruction
///   A_h(v)|_E(x) = v_E + G_h(v)|_E . (x - x_E),
///   G_h(v)|_E    = sum_{F in dE} |F|/|E| (I_F(v) - v_E) n_{E,F}.
/// The reconstruction coefficients G_h(v)|_E = sum_j g_{E,j} v_j are
/// precomputed.
class CcgSpace final : public FeSpace {
 public:
  struct GradientTerm {
    int cell;
    Vec3 coefficient;
  };

  explicit CcgSpace(std::shared_ptr<const Mesh> mesh,
                    BoundaryTrace policy = BoundaryTrace::mirror,
                    const StencilOptions& options = {});
  CcgSpace(std::shared_ptr<const Mesh> mesh, std::vector<BoundaryTrace> per_face,
           const StencilOptions& options = {});

  [[nodiscard]] SpaceKind kind() const override { return SpaceKind::ccg; }
  [[nodiscard]] std::string name() const override { return "ccg"; }
  [[nodiscard]] std::span<const int> cell_dofs(int cell) const override;
  void evaluate(int cell, const Vec3& x, double* values, Vec3* grads) const override;
  [[nodiscard]] bool has_lifting(int cell) const override { return lifted_[cell] != 0; }
  void lifting(int cell, const Vec3& x, const ScalarFunction& data, double& value,
               Vec3& grad) const override;
  [[nodiscard]] int default_volume_order() const override { return 1; }
  [[nodiscard]] int default_face_order() const override { return 1; }

  [[nodiscard]] const std::vector<FaceStencil>& stencils() const { return stencils_; }
  [[nodiscard]] BoundaryTrace boundary_trace(int face) const { return trace_[face]; }
  /// Cached g_{E,j}; entries that cancel to zero are omitted.
  [[nodiscard]] std::span<const GradientTerm> gradient_stencil(int cell) const;

  /// I_F(v) evaluated from the definition (stencil weights).
  [[nodiscard]] double trace_interpolate(const Field& field, int face) const;
  /// G_h(v)|_E evaluated from the definition (face sums of traces).
  [[nodiscard]] Vec3 reconstruct_gradient(const Field& field, int cell) const;
  /// A_h(v)|_E(x).
  [[nodiscard]] double reconstruct_affine(const Field& field, int cell, const Vec3& x) const;

 private:
  void build();

  std::vector<BoundaryTrace> trace_;
  std::vector<FaceStencil> stencils_;
  std::vector<int> dof_offsets_;
  std::vector<int> dofs_;
  std::vector<Vec3> coefficients_;  // aligned with dofs_
  std::vector<int> term_offsets_;
  std::vector<GradientTerm> terms_;
  std::vector<char> lifted_;
};

/// Full P_k discontinuous space (k = 1, 2, 3) with a nodal Lagrange basis
/// on each simplex, written in barycentric coordinates. Dofs of a cell are
/// contiguous: cell * binom(k+d, d) + local.
class DgSpace final : public FeSpace {
 public:
  DgSpace(std::shared_ptr<const Mesh> mesh, int degree);

  [[nodiscard]] SpaceKind kind() const override { return SpaceKind::dg; }
  [[nodiscard]] std::string name() const override { return "dg" + std::to_string(degree_); }
  [[nodiscard]] std::span<const int> cell_dofs(int cell) const override;
  void evaluate(int cell, const Vec3& x, double* values, Vec3* grads) const override;
  [[nodiscard]] int default_volume_order() const override { return 2 * degree_; }
  [[nodiscard]] int default_face_order() const override { return 2 * degree_; }

  [[nodiscard]] int degree() const { return degree_; }
  [[nodiscard]] int local_size() const { return local_size_; }
  /// Lagrange node of local shape function `a` in physical coordinates.
  [[nodiscard]] Vec3 node(int cell, int a) const;

 private:
  int degree_;
  int local_size_;
  std::vector<std::array<int, 4>> multi_indices_;
  std::vector<int> dofs_;
};

/// binom(k + d, d)
[[nodiscard]] int dg_local_size(int degree, int dim);

/// Dof vector bound to a space. `boundary` supplies Dirichlet trace data
/// for CCG reconstruction on boundary faces with the dirichlet policy.
class Field {
 public:
  explicit Field(std::shared_ptr<const FeSpace> space);
  Field(std::shared_ptr<const FeSpace> space, Eigen::VectorXd values,
        ScalarFunction boundary = {});

  [[nodiscard]] const FeSpace& space() const { return *space_; }
  [[nodiscard]] const std::shared_ptr<const FeSpace>& space_ptr() const { return space_; }
  [[nodiscard]] const Eigen::VectorXd& values() const { return values_; }
  [[nodiscard]] Eigen::VectorXd& values() { return values_; }
  [[nodiscard]] const ScalarFunction& boundary() const { return boundary_; }
  void set_boundary(ScalarFunction g) { boundary_ = std::move(g); }

  [[nodiscard]] double value(int cell, const Vec3& x) const;
  [[nodiscard]] Vec3 gradient(int cell, const Vec3& x) const;
  void value_and_gradient(int cell, const Vec3& x, double& value, Vec3& grad) const;
  [[nodiscard]] double cell_average(int cell) const;

 private:
  std::shared_ptr<const FeSpace> space_;
  Eigen::VectorXd values_;
  ScalarFunction boundary_;
};

/// ||u_h - u||_{L2} with a rule of the given order on every cell.
[[nodiscard]] double l2_error(const Field& field, const ScalarFunction& exact, int order = 6);

/// Coefficients of A_h(v) in the P1 Lagrange basis (values at vertices).
[[nodiscard]] Eigen::VectorXd ccg_to_p1(const Field& ccg_field, const DgSpace& p1);

}  // namespace ccg

#pragma once

#include "ccg/physics.hpp"
#include "ccg/sparse.hpp"
#include "ccg/spaces.hpp"

#include <functional>
#include <memory>
#include <vector>

namespace ccg {

/// Interior penalty weight on a face.
///   constant: sigma / h_e, with h_e the face length scale (mean adjacent
///             cell length in 1D, |e| in 2D, |e|^{1/2} in 3D)
///   formula:  4 (n.K n) |e| / min(|E1|, |E2|), K the larger permeability
///             of the adjacent cells
struct Penalty {
  enum class Rule { constant, formula };
  Rule rule = Rule::constant;
  double sigma = 1.0;

  static Penalty constant(double s) { return {Rule::constant, s}; }
  static Penalty formula() { return {Rule::formula, 0.0}; }
};

/// Face length scale h_e used by the constant penalty rule.
[[nodiscard]] double face_length_scale(const Mesh& mesh, int face);

/// Which boundary faces carry Dirichlet data; all others are no-flow.
struct BoundarySpec {
  std::vector<char> dirichlet;  // per face id
  std::function<double(const Vec3& x, double t)> data;

  static BoundarySpec no_flow(const Mesh& mesh);
  static BoundarySpec dirichlet_everywhere(const Mesh& mesh,
                                           std::function<double(const Vec3&, double)> g);
  [[nodiscard]] bool is_dirichlet(int face) const {
    return !dirichlet.empty() && dirichlet[face] != 0;
  }
  [[nodiscard]] bool any_dirichlet() const;
  /// Data frozen at time t, or an empty function when there is none.
  [[nodiscard]] ScalarFunction at(double t) const;
};

/// Selects individual contributions; used to check the form structure.
struct TermSelection {
  bool volume = true;
  bool consistency = true;
  bool symmetry = true;
  bool penalty = true;
  bool advection = true;
  bool sources = true;
};

struct FlowFormParams {
  double epsilon = -1.0;
  Penalty penalty;
  /// Pin dof 0 when no boundary face is Dirichlet.
  bool pin_gauge = true;
  int volume_order = 0;  // 0 selects the space default
  int face_order = 0;
  int threads = 1;
  TermSelection terms;
};

struct TransportFormParams {
  double epsilon = -1.0;
  Penalty penalty;
  double porosity = 1.0;
  bool upwind = true;
  int volume_order = 0;
  int face_order = 0;
  int threads = 1;
  TermSelection terms;
};

class SingularSystemError : public Error {
 public:
  using Error::Error;
};

/// Darcy velocity u = -(K_E / mu(c_h(x))) grad p_h(x), evaluated on demand.
class VelocityField {
 public:
  VelocityField(Field pressure, Field concentration, std::vector<double> kappa,
                ViscosityModel viscosity);
  /// Prescribed velocity (tests and pure transport runs).
  explicit VelocityField(std::function<Vec3(int cell, const Vec3& x)> u);

  [[nodiscard]] Vec3 at(int cell, const Vec3& x) const;
  /// Average of the two one-sided normal components on an interior face,
  /// the one-sided value on a boundary face. `n` is the stored face normal.
  [[nodiscard]] double normal_flux(int face, const Mesh& mesh, const Vec3& x) const;

 private:
  std::function<Vec3(int, const Vec3&)> eval_;
};

/// c^ on an interior face: the E1 trace if u.n >= 0, else the E2 trace.
[[nodiscard]] double upwind_trace(double c_e1, double c_e2, double u_dot_n);
[[nodiscard]] double upwind_trace(const Field& c, int face, const Vec3& x, double u_dot_n);

struct LinearSystem {
  SparseMatrix matrix;
  Eigen::VectorXd rhs;
  bool pinned = false;
};

/// B_p(p, v) = (q^I - q^P, v) with mobility K/mu(c) in place of K.
/// `concentration` supplies c for mu(c); `t` selects source and boundary data.
[[nodiscard]] LinearSystem assemble_flow(const FeSpace& space, const std::vector<double>& kappa,
                                         const ViscosityModel& viscosity,
                                         const Field& concentration, const FlowFormParams& params,
                                         const BoundarySpec& boundary, const SourceTerms& sources,
                                         double t);

struct TransportSystem {
  SparseMatrix stiffness;  // A
  SparseMatrix mass;       // M for d/dt(phi c)
  Eigen::VectorXd rhs;
};

/// B_c with dispersion D(u), upwind advection and the c q^P reaction term.
/// `kappa` is only used by the formula penalty.
[[nodiscard]] TransportSystem assemble_transport(const FeSpace& space, const VelocityField& u,
                                                 const DispersionParams& dispersion,
                                                 const std::vector<double>& kappa,
                                                 const TransportFormParams& params,
                                                 const BoundarySpec& boundary,
                                                 const SourceTerms& sources, double t);

/// Right-hand side only (same terms as assemble_transport).
[[nodiscard]] Eigen::VectorXd assemble_transport_rhs(const FeSpace& space, const VelocityField& u,
                                                     const DispersionParams& dispersion,
                                                     const std::vector<double>& kappa,
                                                     const TransportFormParams& params,
                                                     const BoundarySpec& boundary,
                                                     const SourceTerms& sources, double t);

/// Weighted mass matrix (weight * phi_a, phi_b).
[[nodiscard]] SparseMatrix assemble_mass(const FeSpace& space, double weight, int order = 0);

/// L2 projection of f (one-point quadrature for CCG, local solves for DG).
[[nodiscard]] Field project(std::shared_ptr<const FeSpace> space, const ScalarFunction& f,
                            ScalarFunction boundary = {});

/// Rows: P1-DG dofs, columns: CCG dofs; maps cell averages to the nodal
/// values of the homogeneous reconstruction.
[[nodiscard]] SparseMatrix prolongation(const CcgSpace& ccg, const DgSpace& p1);

}  // namespace ccg

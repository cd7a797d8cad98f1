#include "ccg/spaces.hpp"

#include "ccg/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace ccg {

int SparsityPattern::find(int row, int col) const {
  const auto first = columns.begin() + row_offsets[row];
  const auto last = columns.begin() + row_offsets[row + 1];
  const auto it = std::lower_bound(first, last, col);
  return (it != last && *it == col) ? static_cast<int>(it - columns.begin()) : -1;
}

void FeSpace::build_pattern() {
  const Mesh& m = *mesh_;
  std::vector<std::vector<int>> rows(num_dofs_);
  auto couple = [&](std::span<const int> a, std::span<const int> b) {
    for (int r : a) rows[r].insert(rows[r].end(), b.begin(), b.end());
  };
  for (int c = 0; c < m.num_cells(); ++c) couple(cell_dofs(c), cell_dofs(c));
  for (const Face& f : m.faces()) {
    if (f.boundary()) continue;
    const auto a = cell_dofs(f.cells[0]);
    const auto b = cell_dofs(f.cells[1]);
    couple(a, b);
    couple(b, a);
  }
  pattern_.row_offsets.assign(num_dofs_ + 1, 0);
  pattern_.columns.clear();
  for (int r = 0; r < num_dofs_; ++r) {
    auto& cols = rows[r];
    std::sort(cols.begin(), cols.end());
    cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
    pattern_.columns.insert(pattern_.columns.end(), cols.begin(), cols.end());
    pattern_.row_offsets[r + 1] = static_cast<int>(pattern_.columns.size());
    std::vector<int>().swap(cols);
  }
}

// ---------------------------------------------------------------------------
// CcgSpace

CcgSpace::CcgSpace(std::shared_ptr<const Mesh> mesh, BoundaryTrace policy,
                   const StencilOptions& options)
    : FeSpace(mesh, mesh->num_cells()),
      trace_(mesh->num_faces(), policy),
      stencils_(select_face_stencils(*mesh, options)) {
  build();
}

CcgSpace::CcgSpace(std::shared_ptr<const Mesh> mesh, std::vector<BoundaryTrace> per_face,
                   const StencilOptions& options)
    : FeSpace(mesh, mesh->num_cells()),
      trace_(std::move(per_face)),
      stencils_(select_face_stencils(*mesh, options)) {
  if (static_cast<int>(trace_.size()) != mesh->num_faces()) {
    throw std::invalid_argument("boundary trace policy needs one entry per face");
  }
  build();
}

void CcgSpace::build() {
  const Mesh& m = mesh();
  const int nc = m.num_cells();
  dof_offsets_.assign(nc + 1, 0);
  term_offsets_.assign(nc + 1, 0);
  lifted_.assign(nc, 0);
  for (int e = 0; e < nc; ++e) {
    std::map<int, Vec3> acc;
    acc[e] = Vec3::Zero();
    double scale = 0.0;
    for (int f : m.cell_faces(e)) {
      const Face& face = m.face(f);
      const Vec3 coef = (face.measure / m.cell_measure(e)) * m.outward_normal(e, f);
      scale = std::max(scale, coef.norm());
      if (!face.boundary()) {
        const FaceStencil& s = stencils_[f];
        for (int k = 0; k < s.size; ++k) {
          auto [it, _] = acc.try_emplace(s.cells[k], Vec3::Zero());
          it->second += s.weights[k] * coef;
        }
        acc[e] -= coef;
      } else if (trace_[f] == BoundaryTrace::dirichlet) {
        acc[e] -= coef;
        lifted_[e] = 1;
      }
    }
    const double tol = 1e-12 * scale;
    for (const auto& [j, g] : acc) {
      const bool keep = g.norm() > tol;
      if (j == e || keep) {
        dofs_.push_back(j);
        coefficients_.push_back(keep ? g : Vec3::Zero());
      }
      if (keep) terms_.push_back({j, g});
    }
    dof_offsets_[e + 1] = static_cast<int>(dofs_.size());
    term_offsets_[e + 1] = static_cast<int>(terms_.size());
    if (dof_offsets_[e + 1] - dof_offsets_[e] > kMaxLocalDofs) {
      throw Error("CCG reconstruction stencil of cell " + std::to_string(e) +
                  " exceeds the local dof limit");
    }
  }
  build_pattern();
}

std::span<const int> CcgSpace::cell_dofs(int cell) const {
  return {dofs_.data() + dof_offsets_[cell],
          static_cast<std::size_t>(dof_offsets_[cell + 1] - dof_offsets_[cell])};
}

std::span<const CcgSpace::GradientTerm> CcgSpace::gradient_stencil(int cell) const {
  return {terms_.data() + term_offsets_[cell],
          static_cast<std::size_t>(term_offsets_[cell + 1] - term_offsets_[cell])};
}

void CcgSpace::evaluate(int cell, const Vec3& x, double* values, Vec3* grads) const {
  const Vec3 dx = x - mesh().centroid(cell);
  const int begin = dof_offsets_[cell];
  const int end = dof_offsets_[cell + 1];
  for (int a = begin; a < end; ++a) {
    const Vec3& g = coefficients_[a];
    values[a - begin] = (dofs_[a] == cell ? 1.0 : 0.0) + g.dot(dx);
    grads[a - begin] = g;
  }
}

void CcgSpace::lifting(int cell, const Vec3& x, const ScalarFunction& data, double& value,
                       Vec3& grad) const {
  grad.setZero();
  value = 0.0;
  if (!lifted_[cell] || !data) return;
  const Mesh& m = mesh();
  for (int f : m.cell_faces(cell)) {
    const Face& face = m.face(f);
    if (!face.boundary() || trace_[f] != BoundaryTrace::dirichlet) continue;
    grad += (face.measure / m.cell_measure(cell)) * data(face.barycenter) *
            m.outward_normal(cell, f);
  }
  value = grad.dot(x - m.centroid(cell));
}

double CcgSpace::trace_interpolate(const Field& field, int face) const {
  if (face < 0 || face >= mesh().num_faces()) {
    throw std::out_of_range("face id " + std::to_string(face) + " out of range");
  }
  const Face& f = mesh().face(face);
  const auto& v = field.values();
  if (f.boundary()) {
    if (trace_[face] == BoundaryTrace::mirror) return v[f.cells[0]];
    return field.boundary() ? field.boundary()(f.barycenter) : 0.0;
  }
  const FaceStencil& s = stencils_[face];
  double sum = 0.0;
  for (int k = 0; k < s.size; ++k) sum += s.weights[k] * v[s.cells[k]];
  return sum;
}

Vec3 CcgSpace::reconstruct_gradient(const Field& field, int cell) const {
  if (cell < 0 || cell >= mesh().num_cells()) {
    throw std::out_of_range("cell id " + std::to_string(cell) + " out of range");
  }
  const Mesh& m = mesh();
  const double own = field.values()[cell];
  Vec3 g = Vec3::Zero();
  for (int f : m.cell_faces(cell)) {
    g += (m.face(f).measure / m.cell_measure(cell)) * (trace_interpolate(field, f) - own) *
         m.outward_normal(cell, f);
  }
  return g;
}

double CcgSpace::reconstruct_affine(const Field& field, int cell, const Vec3& x) const {
  return field.values()[cell] +
         reconstruct_gradient(field, cell).dot(x - mesh().centroid(cell));
}

// ---------------------------------------------------------------------------
// DgSpace

int dg_local_size(int degree, int dim) {
  int num = 1;
  int den = 1;
  for (int i = 1; i <= dim; ++i) {
    num *= degree + i;
    den *= i;
  }
  return num / den;
}

namespace {

// Lagrange factor prod_{j<m} (k t - j)/(j+1) and its derivative in t.
void lagrange_factor(int k, int m, double t, double& value, double& deriv) {
  value = 1.0;
  deriv = 0.0;
  for (int j = 0; j < m; ++j) {
    const double f = (k * t - j) / (j + 1.0);
    const double df = k / (j + 1.0);
    deriv = deriv * f + value * df;
    value *= f;
  }
}

}  // namespace

DgSpace::DgSpace(std::shared_ptr<const Mesh> mesh, int degree)
    : FeSpace(mesh, mesh->num_cells() * dg_local_size(degree, mesh->dim())),
      degree_(degree),
      local_size_(dg_local_size(degree, mesh->dim())) {
  if (degree < 1 || degree > 3) {
    throw std::invalid_argument("DG degree must be 1, 2 or 3");
  }
  const int d = mesh->dim();
  // multi-indices alpha with |alpha| = k over d+1 barycentric components,
  // vertices first
  std::vector<std::array<int, 4>> all;
  std::array<int, 4> a{0, 0, 0, 0};
  auto rec = [&](auto&& self, int pos, int left) -> void {
    if (pos == d) {
      a[d] = left;
      all.push_back(a);
      return;
    }
    for (int v = left; v >= 0; --v) {
      a[pos] = v;
      self(self, pos + 1, left - v);
    }
    a[pos] = 0;
  };
  rec(rec, 0, degree);
  std::stable_sort(all.begin(), all.end(), [](const auto& x, const auto& y) {
    return *std::max_element(x.begin(), x.end()) > *std::max_element(y.begin(), y.end());
  });
  multi_indices_ = std::move(all);
  dofs_.resize(num_dofs());
  for (int i = 0; i < num_dofs(); ++i) dofs_[i] = i;
  build_pattern();
}

std::span<const int> DgSpace::cell_dofs(int cell) const {
  return {dofs_.data() + static_cast<std::size_t>(cell) * local_size_,
          static_cast<std::size_t>(local_size_)};
}

void DgSpace::evaluate(int cell, const Vec3& x, double* values, Vec3* grads) const {
  const Mesh& m = mesh();
  const int d = m.dim();
  const auto lam = m.barycentric(cell, x);
  const auto dl = m.barycentric_gradients(cell);
  std::array<std::array<double, 4>, 4> fv{};
  std::array<std::array<double, 4>, 4> fd{};
  for (int i = 0; i <= d; ++i) {
    for (int p = 0; p <= degree_; ++p) lagrange_factor(degree_, p, lam[i], fv[i][p], fd[i][p]);
  }
  for (int a = 0; a < local_size_; ++a) {
    const auto& alpha = multi_indices_[a];
    double v = 1.0;
    for (int i = 0; i <= d; ++i) v *= fv[i][alpha[i]];
    Vec3 g = Vec3::Zero();
    for (int i = 0; i <= d; ++i) {
      double prod = fd[i][alpha[i]];
      if (prod == 0.0) continue;
      for (int l = 0; l <= d; ++l) {
        if (l != i) prod *= fv[l][alpha[l]];
      }
      g += prod * dl[i];
    }
    values[a] = v;
    grads[a] = g;
  }
}

Vec3 DgSpace::node(int cell, int a) const {
  const Mesh& m = mesh();
  const auto vs = m.cell_vertices(cell);
  Vec3 x = Vec3::Zero();
  for (int i = 0; i <= m.dim(); ++i) {
    x += (static_cast<double>(multi_indices_[a][i]) / degree_) * m.vertex(vs[i]);
  }
  return x;
}

// ---------------------------------------------------------------------------
// Field

Field::Field(std::shared_ptr<const FeSpace> space)
    : space_(std::move(space)), values_(Eigen::VectorXd::Zero(space_->num_dofs())) {}

Field::Field(std::shared_ptr<const FeSpace> space, Eigen::VectorXd values,
             ScalarFunction boundary)
    : space_(std::move(space)), values_(std::move(values)), boundary_(std::move(boundary)) {
  if (values_.size() != space_->num_dofs()) {
    throw std::invalid_argument("field length " + std::to_string(values_.size()) +
                                " does not match space dimension " +
                                std::to_string(space_->num_dofs()));
  }
}

void Field::value_and_gradient(int cell, const Vec3& x, double& value, Vec3& grad) const {
  std::array<double, kMaxLocalDofs> phi{};
  std::array<Vec3, kMaxLocalDofs> dphi;
  const auto dofs = space_->cell_dofs(cell);
  space_->evaluate(cell, x, phi.data(), dphi.data());
  value = 0.0;
  grad.setZero();
  for (std::size_t a = 0; a < dofs.size(); ++a) {
    value += phi[a] * values_[dofs[a]];
    grad += values_[dofs[a]] * dphi[a];
  }
  if (space_->has_lifting(cell)) {
    double lv = 0.0;
    Vec3 lg;
    space_->lifting(cell, x, boundary_, lv, lg);
    value += lv;
    grad += lg;
  }
}

double Field::value(int cell, const Vec3& x) const {
  double v = 0.0;
  Vec3 g;
  value_and_gradient(cell, x, v, g);
  return v;
}

Vec3 Field::gradient(int cell, const Vec3& x) const {
  double v = 0.0;
  Vec3 g;
  value_and_gradient(cell, x, v, g);
  return g;
}

double Field::cell_average(int cell) const {
  if (space_->kind() == SpaceKind::ccg) return values_[cell];
  const auto* dg = static_cast<const DgSpace*>(space_.get());
  std::vector<QuadraturePoint> rule;
  cell_rule(space_->mesh(), cell, std::max(1, dg->degree()), rule);
  double sum = 0.0;
  for (const auto& q : rule) sum += q.weight * value(cell, q.point);
  return sum / space_->mesh().cell_measure(cell);
}

double l2_error(const Field& field, const ScalarFunction& exact, int order) {
  const Mesh& m = field.space().mesh();
  std::vector<QuadraturePoint> rule;
  double sum = 0.0;
  for (int c = 0; c < m.num_cells(); ++c) {
    cell_rule(m, c, order, rule);
    for (const auto& q : rule) {
      const double e = field.value(c, q.point) - exact(q.point);
      sum += q.weight * e * e;
    }
  }
  return std::sqrt(sum);
}

Eigen::VectorXd ccg_to_p1(const Field& ccg_field, const DgSpace& p1) {
  if (p1.degree() != 1) throw std::invalid_argument("ccg_to_p1 needs a P1 space");
  const Mesh& m = p1.mesh();
  Eigen::VectorXd out(p1.num_dofs());
  for (int c = 0; c < m.num_cells(); ++c) {
    const auto dofs = p1.cell_dofs(c);
    for (int a = 0; a < p1.local_size(); ++a) {
      out[dofs[a]] = ccg_field.value(c, p1.node(c, a));
    }
  }
  return out;
}

}  // namespace ccg

#include "ccg/assembly.hpp"

#include "ccg/quadrature.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <thread>

namespace ccg {

double face_length_scale(const Mesh& mesh, int face) {
  const Face& f = mesh.face(face);
  switch (mesh.dim()) {
    case 1: {
      double h = mesh.cell_measure(f.cells[0]);
      if (!f.boundary()) h = 0.5 * (h + mesh.cell_measure(f.cells[1]));
      return h;
    }
    case 2:
      return f.measure;
    default:
      return std::sqrt(f.measure);
  }
}

BoundarySpec BoundarySpec::no_flow(const Mesh& mesh) {
  BoundarySpec b;
  b.dirichlet.assign(mesh.num_faces(), 0);
  return b;
}

BoundarySpec BoundarySpec::dirichlet_everywhere(const Mesh& mesh,
                                                std::function<double(const Vec3&, double)> g) {
  BoundarySpec b;
  b.dirichlet.assign(mesh.num_faces(), 0);
  for (int f = 0; f < mesh.num_faces(); ++f) b.dirichlet[f] = mesh.face(f).boundary() ? 1 : 0;
  b.data = std::move(g);
  return b;
}

bool BoundarySpec::any_dirichlet() const {
  return std::any_of(dirichlet.begin(), dirichlet.end(), [](char c) { return c != 0; });
}

ScalarFunction BoundarySpec::at(double t) const {
  if (!data) return {};
  auto g = data;
  return [g, t](const Vec3& x) { return g(x, t); };
}

// ---------------------------------------------------------------------------

VelocityField::VelocityField(Field pressure, Field concentration, std::vector<double> kappa,
                             ViscosityModel viscosity) {
  auto p = std::make_shared<const Field>(std::move(pressure));
  auto c = std::make_shared<const Field>(std::move(concentration));
  auto k = std::make_shared<const std::vector<double>>(std::move(kappa));
  eval_ = [p, c, k, viscosity](int cell, const Vec3& x) -> Vec3 {
    const double mu = viscosity(c->value(cell, x));
    return -((*k)[cell] / mu) * p->gradient(cell, x);
  };
}

VelocityField::VelocityField(std::function<Vec3(int, const Vec3&)> u) : eval_(std::move(u)) {}

Vec3 VelocityField::at(int cell, const Vec3& x) const { return eval_(cell, x); }

double VelocityField::normal_flux(int face, const Mesh& mesh, const Vec3& x) const {
  const Face& f = mesh.face(face);
  const double un = eval_(f.cells[0], x).dot(f.normal);
  if (f.boundary()) return un;
  return 0.5 * (un + eval_(f.cells[1], x).dot(f.normal));
}

double upwind_trace(double c_e1, double c_e2, double u_dot_n) {
  return u_dot_n >= 0.0 ? c_e1 : c_e2;
}

double upwind_trace(const Field& c, int face, const Vec3& x, double u_dot_n) {
  const Face& f = c.space().mesh().face(face);
  if (f.boundary()) throw std::invalid_argument("upwind_trace needs an interior face");
  return u_dot_n >= 0.0 ? c.value(f.cells[0], x) : c.value(f.cells[1], x);
}

// ---------------------------------------------------------------------------

namespace {

using DiffusionFn = std::function<Mat3(int cell, const Vec3& x)>;
using PointFn = std::function<double(int cell, const Vec3& x)>;

struct FormSpec {
  DiffusionFn diffusion;
  PointFn reaction;
  PointFn source;
  const VelocityField* velocity = nullptr;
  bool upwind = true;
  double epsilon = -1.0;
  Penalty penalty;
  const std::vector<double>* kappa = nullptr;
  const BoundarySpec* boundary = nullptr;
  ScalarFunction g;
  TermSelection terms;
  int volume_order = 1;
  int face_order = 1;
  int threads = 1;
  bool matrix = true;
};

double penalty_weight(const Mesh& mesh, const FormSpec& spec, int face) {
  if (spec.penalty.rule == Penalty::Rule::constant) {
    return spec.penalty.sigma / face_length_scale(mesh, face);
  }
  const Face& f = mesh.face(face);
  double k = 1.0;
  double m = mesh.cell_measure(f.cells[0]);
  if (spec.kappa) k = (*spec.kappa)[f.cells[0]];
  if (!f.boundary()) {
    m = std::min(m, mesh.cell_measure(f.cells[1]));
    if (spec.kappa) k = std::max(k, (*spec.kappa)[f.cells[1]]);
  }
  return 4.0 * k * f.measure / m;
}

struct Workspace {
  std::vector<double> values;
  Eigen::VectorXd rhs;
  std::vector<QuadraturePoint> rule;
  std::vector<double> local;  // row-major local matrix
  std::vector<double> local_rhs;
  std::array<double, 2 * kMaxLocalDofs> phi{};
  std::array<Vec3, 2 * kMaxLocalDofs> grad;
  std::array<double, 2 * kMaxLocalDofs> jump{};
  std::array<double, 2 * kMaxLocalDofs> flux{};
  std::array<double, 2 * kMaxLocalDofs> up{};
  std::array<int, 2 * kMaxLocalDofs> dofs{};
};

class Assembler {
 public:
  Assembler(const FeSpace& space, const FormSpec& spec) : space_(space), spec_(spec) {}

  void run(std::vector<double>* values, Eigen::VectorXd* rhs) {
    const Mesh& mesh = space_.mesh();
    const int nt = std::max(1, spec_.threads);
    std::vector<Workspace> ws(nt);
    for (auto& w : ws) {
      if (spec_.matrix) w.values.assign(space_.pattern().nnz(), 0.0);
      w.rhs = Eigen::VectorXd::Zero(space_.num_dofs());
      w.local.resize(4 * kMaxLocalDofs * kMaxLocalDofs);
      w.local_rhs.resize(2 * kMaxLocalDofs);
    }
    auto work = [&](int tid) {
      Workspace& w = ws[tid];
      const int nc = mesh.num_cells();
      for (int c = tid * nc / nt; c < (tid + 1) * nc / nt; ++c) cell_terms(c, w);
      const int nf = mesh.num_faces();
      for (int f = tid * nf / nt; f < (tid + 1) * nf / nt; ++f) {
        if (mesh.face(f).boundary()) {
          boundary_terms(f, w);
        } else {
          interior_terms(f, w);
        }
      }
    };
    if (nt == 1) {
      work(0);
    } else {
      std::vector<std::thread> pool;
      for (int t = 0; t < nt; ++t) pool.emplace_back(work, t);
      for (auto& th : pool) th.join();
    }
    if (values) {
      *values = std::move(ws[0].values);
      for (int t = 1; t < nt; ++t) {
        for (std::size_t i = 0; i < values->size(); ++i) (*values)[i] += ws[t].values[i];
      }
    }
    if (rhs) {
      *rhs = ws[0].rhs;
      for (int t = 1; t < nt; ++t) *rhs += ws[t].rhs;
    }
  }

 private:
  void scatter(Workspace& w, int n) {
    const SparsityPattern& pat = space_.pattern();
    for (int a = 0; a < n; ++a) {
      w.rhs[w.dofs[a]] += w.local_rhs[a];
      if (!spec_.matrix) continue;
      const int row = w.dofs[a];
      for (int b = 0; b < n; ++b) {
        const double v = w.local[a * n + b];
        if (v == 0.0) continue;
        w.values[pat.find(row, w.dofs[b])] += v;
      }
    }
  }

  void cell_terms(int cell, Workspace& w) {
    const Mesh& mesh = space_.mesh();
    const auto dofs = space_.cell_dofs(cell);
    const int n = static_cast<int>(dofs.size());
    std::copy(dofs.begin(), dofs.end(), w.dofs.begin());
    std::fill_n(w.local.begin(), n * n, 0.0);
    std::fill_n(w.local_rhs.begin(), n, 0.0);
    const bool lifted = spec_.g && space_.has_lifting(cell);
    const bool vol = spec_.terms.volume;
    const bool adv = spec_.terms.advection && spec_.velocity;
    cell_rule(mesh, cell, spec_.volume_order, w.rule);
    for (const auto& q : w.rule) {
      space_.evaluate(cell, q.point, w.phi.data(), w.grad.data());
      const Mat3 A = spec_.diffusion ? spec_.diffusion(cell, q.point) : Mat3::Zero();
      const double r = spec_.reaction ? spec_.reaction(cell, q.point) : 0.0;
      const Vec3 u = adv ? spec_.velocity->at(cell, q.point) : Vec3::Zero();
      if (spec_.terms.sources && spec_.source) {
        const double f = spec_.source(cell, q.point);
        for (int a = 0; a < n; ++a) w.local_rhs[a] += q.weight * f * w.phi[a];
      }
      double lv = 0.0;
      Vec3 lg = Vec3::Zero();
      if (lifted) space_.lifting(cell, q.point, spec_.g, lv, lg);
      for (int a = 0; a < n; ++a) {
        const Vec3& ga = w.grad[a];
        const double u_ga = u.dot(ga);
        if (spec_.matrix) {
          for (int b = 0; b < n; ++b) {
            double v = 0.0;
            if (vol) v += (A * w.grad[b]).dot(ga) + r * w.phi[b] * w.phi[a];
            if (adv) v -= u_ga * w.phi[b];
            w.local[a * n + b] += q.weight * v;
          }
        }
        if (lifted) {
          double v = 0.0;
          if (vol) v += (A * lg).dot(ga) + r * lv * w.phi[a];
          if (adv) v -= u_ga * lv;
          w.local_rhs[a] -= q.weight * v;
        }
      }
    }
    scatter(w, n);
  }

  void interior_terms(int face, Workspace& w) {
    const Mesh& mesh = space_.mesh();
    const Face& f = mesh.face(face);
    const int e1 = f.cells[0];
    const int e2 = f.cells[1];
    const auto d1 = space_.cell_dofs(e1);
    const auto d2 = space_.cell_dofs(e2);
    const int n1 = static_cast<int>(d1.size());
    const int n = n1 + static_cast<int>(d2.size());
    std::copy(d1.begin(), d1.end(), w.dofs.begin());
    std::copy(d2.begin(), d2.end(), w.dofs.begin() + n1);
    std::fill_n(w.local.begin(), n * n, 0.0);
    std::fill_n(w.local_rhs.begin(), n, 0.0);

    const bool lift1 = spec_.g && space_.has_lifting(e1);
    const bool lift2 = spec_.g && space_.has_lifting(e2);
    const bool adv = spec_.terms.advection && spec_.velocity;
    const double cons = spec_.terms.consistency ? 1.0 : 0.0;
    const double sym = spec_.terms.symmetry ? spec_.epsilon : 0.0;
    const double pen = spec_.terms.penalty ? penalty_weight(mesh, spec_, face) : 0.0;
    const Vec3& nrm = f.normal;

    face_rule(mesh, face, spec_.face_order, w.rule);
    for (const auto& q : w.rule) {
      space_.evaluate(e1, q.point, w.phi.data(), w.grad.data());
      space_.evaluate(e2, q.point, w.phi.data() + n1, w.grad.data() + n1);
      const Mat3 A1 = spec_.diffusion ? spec_.diffusion(e1, q.point) : Mat3::Zero();
      const Mat3 A2 = spec_.diffusion ? spec_.diffusion(e2, q.point) : Mat3::Zero();
      const Vec3 An1 = A1.transpose() * nrm;
      const Vec3 An2 = A2.transpose() * nrm;
      const double un = adv ? spec_.velocity->normal_flux(face, mesh, q.point) : 0.0;
      const bool from1 = !spec_.upwind || un >= 0.0;
      for (int i = 0; i < n; ++i) {
        const bool side1 = i < n1;
        w.jump[i] = side1 ? w.phi[i] : -w.phi[i];
        w.flux[i] = 0.5 * (side1 ? An1 : An2).dot(w.grad[i]);
        w.up[i] = spec_.upwind ? ((side1 == from1) ? w.phi[i] : 0.0) : 0.5 * w.phi[i];
      }
      if (spec_.matrix) {
        for (int a = 0; a < n; ++a) {
          for (int b = 0; b < n; ++b) {
            const double v = -cons * w.flux[b] * w.jump[a] + sym * w.flux[a] * w.jump[b] +
                             pen * w.jump[b] * w.jump[a] + un * w.up[b] * w.jump[a];
            w.local[a * n + b] += q.weight * v;
          }
        }
      }
      if (lift1 || lift2) {
        double l1 = 0.0;
        double l2 = 0.0;
        Vec3 g1 = Vec3::Zero();
        Vec3 g2 = Vec3::Zero();
        if (lift1) space_.lifting(e1, q.point, spec_.g, l1, g1);
        if (lift2) space_.lifting(e2, q.point, spec_.g, l2, g2);
        const double jump_l = l1 - l2;
        const double flux_l = 0.5 * (An1.dot(g1) + An2.dot(g2));
        const double up_l = spec_.upwind ? (from1 ? l1 : l2) : 0.5 * (l1 + l2);
        for (int a = 0; a < n; ++a) {
          const double v = -cons * flux_l * w.jump[a] + sym * w.flux[a] * jump_l +
                           pen * jump_l * w.jump[a] + un * up_l * w.jump[a];
          w.local_rhs[a] -= q.weight * v;
        }
      }
    }
    scatter(w, n);
  }

  void boundary_terms(int face, Workspace& w) {
    if (!spec_.boundary || !spec_.boundary->is_dirichlet(face)) return;
    const Mesh& mesh = space_.mesh();
    const Face& f = mesh.face(face);
    const int e = f.cells[0];
    const auto dofs = space_.cell_dofs(e);
    const int n = static_cast<int>(dofs.size());
    std::copy(dofs.begin(), dofs.end(), w.dofs.begin());
    std::fill_n(w.local.begin(), n * n, 0.0);
    std::fill_n(w.local_rhs.begin(), n, 0.0);

    const bool lifted = spec_.g && space_.has_lifting(e);
    const bool adv = spec_.terms.advection && spec_.velocity;
    const double cons = spec_.terms.consistency ? 1.0 : 0.0;
    const double sym = spec_.terms.symmetry ? spec_.epsilon : 0.0;
    const double pen = spec_.terms.penalty ? penalty_weight(mesh, spec_, face) : 0.0;
    const bool data = spec_.terms.sources && spec_.g;
    const Vec3& nrm = f.normal;

    face_rule(mesh, face, spec_.face_order, w.rule);
    for (const auto& q : w.rule) {
      space_.evaluate(e, q.point, w.phi.data(), w.grad.data());
      const Mat3 A = spec_.diffusion ? spec_.diffusion(e, q.point) : Mat3::Zero();
      const Vec3 An = A.transpose() * nrm;
      const double un = adv ? spec_.velocity->normal_flux(face, mesh, q.point) : 0.0;
      const bool outflow = !spec_.upwind || un >= 0.0;
      const double g = data ? spec_.g(q.point) : 0.0;
      for (int i = 0; i < n; ++i) w.flux[i] = An.dot(w.grad[i]);
      if (spec_.matrix) {
        for (int a = 0; a < n; ++a) {
          for (int b = 0; b < n; ++b) {
            double v = -cons * w.flux[b] * w.phi[a] + sym * w.flux[a] * w.phi[b] +
                       pen * w.phi[b] * w.phi[a];
            if (outflow) v += un * w.phi[b] * w.phi[a];
            w.local[a * n + b] += q.weight * v;
          }
        }
      }
      double lv = 0.0;
      Vec3 lg = Vec3::Zero();
      if (lifted) space_.lifting(e, q.point, spec_.g, lv, lg);
      const double flux_l = An.dot(lg);
      for (int a = 0; a < n; ++a) {
        double v = sym * w.flux[a] * g + pen * g * w.phi[a];
        if (!outflow) v -= un * g * w.phi[a];
        if (lifted) {
          v -= -cons * flux_l * w.phi[a] + sym * w.flux[a] * lv + pen * lv * w.phi[a];
          if (outflow) v -= un * lv * w.phi[a];
        }
        w.local_rhs[a] += q.weight * v;
      }
    }
    scatter(w, n);
  }

  const FeSpace& space_;
  const FormSpec& spec_;
};

SparseMatrix finalize(const FeSpace& space, std::vector<double> values) {
  const SparsityPattern& pat = space.pattern();
  SparseMatrix m(space.num_dofs(), pat.row_offsets, pat.columns, std::move(values));
  m.prune();
  return m;
}

int order_or(int requested, int fallback) { return requested > 0 ? requested : fallback; }

}  // namespace

LinearSystem assemble_flow(const FeSpace& space, const std::vector<double>& kappa,
                           const ViscosityModel& viscosity, const Field& concentration,
                           const FlowFormParams& params, const BoundarySpec& boundary,
                           const SourceTerms& sources, double t) {
  const Mesh& mesh = space.mesh();
  if (static_cast<int>(kappa.size()) != mesh.num_cells()) {
    throw std::invalid_argument("permeability needs one value per cell");
  }
  FormSpec spec;
  spec.diffusion = [&](int cell, const Vec3& x) -> Mat3 {
    const double mob = kappa[cell] / viscosity(concentration.value(cell, x));
    Mat3 a = Mat3::Zero();
    for (int i = 0; i < mesh.dim(); ++i) a(i, i) = mob;
    return a;
  };
  if (sources.injection || sources.production) {
    spec.source = [&](int cell, const Vec3& x) {
      double s = 0.0;
      if (sources.injection) s += sources.injection(cell, x, t);
      if (sources.production) s -= sources.production(cell, x, t);
      return s;
    };
  }
  spec.epsilon = params.epsilon;
  spec.penalty = params.penalty;
  spec.kappa = &kappa;
  spec.boundary = &boundary;
  spec.g = boundary.any_dirichlet() ? boundary.at(t) : ScalarFunction{};
  spec.terms = params.terms;
  spec.terms.advection = false;
  spec.volume_order = order_or(params.volume_order, space.default_volume_order());
  spec.face_order = order_or(params.face_order, space.default_face_order());
  spec.threads = params.threads;

  std::vector<double> values;
  LinearSystem sys;
  Assembler(space, spec).run(&values, &sys.rhs);
  sys.matrix = finalize(space, std::move(values));
  if (!boundary.any_dirichlet()) {
    if (!params.pin_gauge) {
      throw SingularSystemError(
          "flow system with no-flow boundaries everywhere is singular; enable gauge pinning");
    }
    sys.matrix.pin_row(0);
    sys.rhs[0] = 0.0;
    sys.pinned = true;
  }
  return sys;
}

namespace {

FormSpec transport_spec(const FeSpace& space, const VelocityField& u,
                        const DispersionParams& dispersion, const std::vector<double>& kappa,
                        const TransportFormParams& params, const BoundarySpec& boundary,
                        const SourceTerms& sources, double t) {
  const int dim = space.mesh().dim();
  FormSpec spec;
  const VelocityField* vel = &u;
  spec.diffusion = [vel, dispersion, dim](int cell, const Vec3& x) {
    return dispersion_tensor(dispersion, vel->at(cell, x), dim);
  };
  if (sources.production) {
    auto qp = sources.production;
    spec.reaction = [qp, t](int cell, const Vec3& x) { return qp(cell, x, t); };
  }
  if (sources.injected_load) {
    auto load = sources.injected_load;
    spec.source = [load, t](int cell, const Vec3& x) { return load(cell, x, t); };
  }
  spec.velocity = vel;
  spec.upwind = params.upwind;
  spec.epsilon = params.epsilon;
  spec.penalty = params.penalty;
  spec.kappa = kappa.empty() ? nullptr : &kappa;
  spec.boundary = &boundary;
  spec.g = boundary.any_dirichlet() ? boundary.at(t) : ScalarFunction{};
  spec.terms = params.terms;
  spec.volume_order = order_or(params.volume_order, space.default_volume_order());
  spec.face_order = order_or(params.face_order, space.default_face_order());
  spec.threads = params.threads;
  return spec;
}

}  // namespace

TransportSystem assemble_transport(const FeSpace& space, const VelocityField& u,
                                   const DispersionParams& dispersion,
                                   const std::vector<double>& kappa,
                                   const TransportFormParams& params,
                                   const BoundarySpec& boundary, const SourceTerms& sources,
                                   double t) {
  if (!(params.porosity > 0.0)) throw std::invalid_argument("porosity must be positive");
  const FormSpec spec = transport_spec(space, u, dispersion, kappa, params, boundary, sources, t);
  std::vector<double> values;
  TransportSystem sys;
  Assembler(space, spec).run(&values, &sys.rhs);
  sys.stiffness = finalize(space, std::move(values));
  sys.mass = assemble_mass(space, params.porosity, params.volume_order);
  return sys;
}

Eigen::VectorXd assemble_transport_rhs(const FeSpace& space, const VelocityField& u,
                                       const DispersionParams& dispersion,
                                       const std::vector<double>& kappa,
                                       const TransportFormParams& params,
                                       const BoundarySpec& boundary, const SourceTerms& sources,
                                       double t) {
  FormSpec spec = transport_spec(space, u, dispersion, kappa, params, boundary, sources, t);
  spec.matrix = false;
  Eigen::VectorXd rhs;
  Assembler(space, spec).run(nullptr, &rhs);
  return rhs;
}

SparseMatrix assemble_mass(const FeSpace& space, double weight, int order) {
  const Mesh& mesh = space.mesh();
  const int q_order = order_or(order, space.default_volume_order());
  if (space.kind() == SpaceKind::ccg && q_order == 1) {
    Eigen::VectorXd d(mesh.num_cells());
    for (int c = 0; c < mesh.num_cells(); ++c) d[c] = weight * mesh.cell_measure(c);
    return SparseMatrix::diagonal(d);
  }
  const SparsityPattern& pat = space.pattern();
  std::vector<double> values(pat.nnz(), 0.0);
  std::vector<QuadraturePoint> rule;
  std::array<double, kMaxLocalDofs> phi{};
  std::array<Vec3, kMaxLocalDofs> grad;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const auto dofs = space.cell_dofs(c);
    cell_rule(mesh, c, q_order, rule);
    for (const auto& q : rule) {
      space.evaluate(c, q.point, phi.data(), grad.data());
      for (std::size_t a = 0; a < dofs.size(); ++a) {
        for (std::size_t b = 0; b < dofs.size(); ++b) {
          values[pat.find(dofs[a], dofs[b])] += q.weight * weight * phi[a] * phi[b];
        }
      }
    }
  }
  return finalize(space, std::move(values));
}

Field project(std::shared_ptr<const FeSpace> space, const ScalarFunction& f,
              ScalarFunction boundary) {
  const Mesh& mesh = space->mesh();
  Eigen::VectorXd values = Eigen::VectorXd::Zero(space->num_dofs());
  if (space->kind() == SpaceKind::ccg) {
    for (int c = 0; c < mesh.num_cells(); ++c) values[c] = f(mesh.centroid(c));
  } else {
    const auto& dg = static_cast<const DgSpace&>(*space);
    const int n = dg.local_size();
    std::vector<QuadraturePoint> rule;
    std::array<double, kMaxLocalDofs> phi{};
    std::array<Vec3, kMaxLocalDofs> grad;
    Eigen::MatrixXd m(n, n);
    Eigen::VectorXd r(n);
    for (int c = 0; c < mesh.num_cells(); ++c) {
      m.setZero();
      r.setZero();
      cell_rule(mesh, c, std::min(kMaxQuadratureOrder, 2 * dg.degree() + 2), rule);
      for (const auto& q : rule) {
        dg.evaluate(c, q.point, phi.data(), grad.data());
        const double fx = f(q.point);
        for (int a = 0; a < n; ++a) {
          r[a] += q.weight * fx * phi[a];
          for (int b = 0; b < n; ++b) m(a, b) += q.weight * phi[a] * phi[b];
        }
      }
      const Eigen::VectorXd x = m.llt().solve(r);
      const auto dofs = dg.cell_dofs(c);
      for (int a = 0; a < n; ++a) values[dofs[a]] = x[a];
    }
  }
  return Field(std::move(space), std::move(values), std::move(boundary));
}

SparseMatrix prolongation(const CcgSpace& ccg, const DgSpace& p1) {
  if (p1.degree() != 1) throw std::invalid_argument("prolongation needs a P1 space");
  if (&ccg.mesh() != &p1.mesh()) throw std::invalid_argument("spaces live on different meshes");
  const Mesh& mesh = ccg.mesh();
  std::vector<Eigen::Triplet<double>> triplets;
  std::array<double, kMaxLocalDofs> phi{};
  std::array<Vec3, kMaxLocalDofs> grad;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const auto cd = ccg.cell_dofs(c);
    const auto pd = p1.cell_dofs(c);
    for (int a = 0; a < p1.local_size(); ++a) {
      ccg.evaluate(c, p1.node(c, a), phi.data(), grad.data());
      for (std::size_t j = 0; j < cd.size(); ++j) {
        if (phi[j] != 0.0) triplets.emplace_back(pd[a], cd[j], phi[j]);
      }
    }
  }
  SparseMatrix::Storage r(p1.num_dofs(), ccg.num_dofs());
  r.setFromTriplets(triplets.begin(), triplets.end());
  return SparseMatrix(std::move(r));
}

}  // namespace ccg

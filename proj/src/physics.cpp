#include "ccg/physics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <numbers>
#include <sstream>

namespace ccg {

PermeabilityField PermeabilityField::uniform(double kappa) {
  if (!(kappa > 0.0)) throw Error("permeability must be positive");
  PermeabilityField k;
  k.kind_ = Kind::uniform;
  k.kappa_ = kappa;
  return k;
}

PermeabilityField PermeabilityField::lens(double kappa_in, double kappa_out, const Box& box) {
  if (!(kappa_in > 0.0) || !(kappa_out > 0.0)) throw Error("permeability must be positive");
  PermeabilityField k;
  k.kind_ = Kind::lens;
  k.kappa_ = kappa_in;
  k.kappa_out_ = kappa_out;
  k.box_ = box;
  return k;
}

PermeabilityField PermeabilityField::raster(int nx, int ny, std::vector<double> values,
                                            const Box& domain) {
  if (nx < 1 || ny < 1) throw Error("raster dimensions must be positive");
  if (values.size() != static_cast<std::size_t>(nx) * ny) {
    throw Error("raster holds " + std::to_string(values.size()) + " values, expected " +
                std::to_string(static_cast<std::size_t>(nx) * ny));
  }
  for (double v : values) {
    if (!(v > 0.0) || !std::isfinite(v)) throw Error("raster permeability must be positive");
  }
  PermeabilityField k;
  k.kind_ = Kind::raster;
  k.nx_ = nx;
  k.ny_ = ny;
  k.values_ = std::move(values);
  k.box_ = domain;
  return k;
}

PermeabilityField PermeabilityField::load_raster(const std::filesystem::path& path, bool log10,
                                                 const Box& domain) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open raster file " + path.string());
  int nx = 0;
  int ny = 0;
  if (!(in >> nx >> ny)) throw Error("raster file " + path.string() + ": bad header");
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(std::max(nx, 0)) * std::max(ny, 0));
  double v = 0.0;
  while (in >> v) values.push_back(log10 ? std::pow(10.0, v) : v);
  if (!in.eof()) throw Error("raster file " + path.string() + ": non-numeric value");
  return raster(nx, ny, std::move(values), domain);
}

double PermeabilityField::at(const Vec3& x, int dim) const {
  switch (kind_) {
    case Kind::uniform:
      return kappa_;
    case Kind::lens:
      return box_.contains(x, dim) ? kappa_ : kappa_out_;
    case Kind::raster: {
      auto index = [&](int axis, int n) {
        const double s = (x[axis] - box_.lo[axis]) / (box_.hi[axis] - box_.lo[axis]);
        return std::clamp(static_cast<int>(std::floor(s * n)), 0, n - 1);
      };
      const int i = index(0, nx_);
      const int j = dim > 1 ? index(1, ny_) : 0;
      return values_[static_cast<std::size_t>(j) * nx_ + i];
    }
  }
  return kappa_;
}

std::vector<double> PermeabilityField::per_cell(const Mesh& mesh) const {
  std::vector<double> k(mesh.num_cells());
  for (int c = 0; c < mesh.num_cells(); ++c) k[c] = at(mesh.centroid(c), mesh.dim());
  return k;
}

ViscosityModel ViscosityModel::power(double mu0, double alpha, double beta) {
  ViscosityModel m;
  m.kind_ = Kind::power;
  m.a_ = mu0;
  m.b_ = alpha;
  m.e_ = beta;
  return m;
}

ViscosityModel ViscosityModel::quarter_mix(double mu_s, double mu_o) {
  if (!(mu_s > 0.0) || !(mu_o > 0.0)) throw Error("viscosities must be positive");
  ViscosityModel m;
  m.kind_ = Kind::quarter_mix;
  m.a_ = std::pow(mu_s, -0.25);
  m.b_ = std::pow(mu_o, -0.25);
  m.e_ = -4.0;
  m.mu_s_ = mu_s;
  m.mu_o_ = mu_o;
  return m;
}

double ViscosityModel::operator()(double c) const {
  if (kind_ == Kind::power) return std::pow(a_ + b_ * c, e_);
  if (c <= 0.0) return mu_o_;
  if (c >= 1.0) return mu_s_;
  const double s = c * a_ + (1.0 - c) * b_;
  const double s2 = s * s;
  return 1.0 / (s2 * s2);
}

double ViscosityModel::derivative(double c) const {
  if (kind_ == Kind::power) return e_ * b_ * std::pow(a_ + b_ * c, e_ - 1.0);
  if (c < 0.0 || c > 1.0) return 0.0;
  const double s = c * a_ + (1.0 - c) * b_;
  return -4.0 * (a_ - b_) / std::pow(s, 5);
}

Mat3 dispersion_tensor(const DispersionParams& params, const Vec3& u, int dim) {
  Mat3 d = Mat3::Zero();
  Vec3 w = Vec3::Zero();
  w.head(dim) = u.head(dim);
  const double speed = w.norm();
  for (int i = 0; i < dim; ++i) d(i, i) = params.d_m;
  if (speed < kVelocityFloor) return d;
  for (int i = 0; i < dim; ++i) d(i, i) += params.a_t * speed;
  d += ((params.a_l - params.a_t) / speed) * (w * w.transpose());
  return d;
}

namespace {

double support_measure(const Well& well, const Mesh& mesh, bool discrete) {
  const double box = well.support.measure(mesh.dim());
  if (!(box > 0.0)) throw Error("well support box has zero measure");
  if (!discrete) return box;
  double m = 0.0;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    if (well.support.contains(mesh.centroid(c), mesh.dim())) m += mesh.cell_measure(c);
  }
  if (!(m > 0.0)) throw Error("well support box contains no cell centroid");
  return m;
}

}  // namespace

WellDensity well_density(const WellSources& wells, const Mesh& mesh, bool discrete) {
  WellDensity out;
  out.injection.assign(mesh.num_cells(), 0.0);
  out.production.assign(mesh.num_cells(), 0.0);
  const double mi = support_measure(wells.injector, mesh, discrete);
  const double mp = support_measure(wells.producer, mesh, discrete);
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const Vec3& x = mesh.centroid(c);
    if (wells.injector.support.contains(x, mesh.dim())) out.injection[c] = wells.injector.rate / mi;
    if (wells.producer.support.contains(x, mesh.dim())) out.production[c] = wells.producer.rate / mp;
  }
  return out;
}

SourceTerms well_sources(const WellSources& wells, const Mesh& mesh) {
  auto density = std::make_shared<const WellDensity>(well_density(wells, mesh));
  const double ct = wells.injected_concentration;
  SourceTerms s;
  s.injection = [density](int cell, const Vec3&, double) { return density->injection[cell]; };
  s.production = [density](int cell, const Vec3&, double) { return density->production[cell]; };
  s.injected_load = [density, ct](int cell, const Vec3&, double) {
    return ct * density->injection[cell];
  };
  return s;
}

// ---------------------------------------------------------------------------

namespace {

constexpr double kPi = std::numbers::pi;

struct PressureJet {
  double value;
  Vec3 grad;
  Mat3 hess;
};

struct ConcentrationJet {
  double value;
  double dt;
  Vec3 grad;
  Mat3 hess;
};

PressureJet pressure_jet(const Vec3& x, double t) {
  const double e = std::exp(-t);
  const double sx = std::sin(kPi * x[0]);
  const double sy = std::sin(kPi * x[1]);
  const double cx = std::cos(kPi * x[0]);
  const double cy = std::cos(kPi * x[1]);
  PressureJet j;
  j.value = e * sx * sy;
  j.grad = Vec3(e * kPi * cx * sy, e * kPi * sx * cy, 0.0);
  j.hess = Mat3::Zero();
  j.hess(0, 0) = -e * kPi * kPi * sx * sy;
  j.hess(1, 1) = j.hess(0, 0);
  j.hess(0, 1) = e * kPi * kPi * cx * cy;
  j.hess(1, 0) = j.hess(0, 1);
  return j;
}

ConcentrationJet concentration_jet(const Vec3& x, double t) {
  const double w = 2.0 * kPi;
  const double sx = std::sin(w * x[0]);
  const double sy = std::sin(w * x[1]);
  const double cx = std::cos(w * x[0]);
  const double cy = std::cos(w * x[1]);
  ConcentrationJet j;
  j.value = 0.5 * t * t + cx * cy;
  j.dt = t;
  j.grad = Vec3(-w * sx * cy, -w * cx * sy, 0.0);
  j.hess = Mat3::Zero();
  j.hess(0, 0) = -w * w * cx * cy;
  j.hess(1, 1) = j.hess(0, 0);
  j.hess(0, 1) = w * w * sx * sy;
  j.hess(1, 0) = j.hess(0, 1);
  return j;
}

}  // namespace

ManufacturedSolution::ManufacturedSolution(ViscosityModel viscosity, DispersionParams dispersion,
                                           double kappa, double porosity)
    : viscosity_(viscosity), dispersion_(dispersion), kappa_(kappa), porosity_(porosity) {}

double ManufacturedSolution::pressure(const Vec3& x, double t) const {
  return pressure_jet(x, t).value;
}

double ManufacturedSolution::concentration(const Vec3& x, double t) const {
  return concentration_jet(x, t).value;
}

Vec3 ManufacturedSolution::grad_pressure(const Vec3& x, double t) const {
  return pressure_jet(x, t).grad;
}

Vec3 ManufacturedSolution::grad_concentration(const Vec3& x, double t) const {
  return concentration_jet(x, t).grad;
}

Vec3 ManufacturedSolution::velocity(const Vec3& x, double t) const {
  const double c = concentration(x, t);
  return -(kappa_ / viscosity_(c)) * grad_pressure(x, t);
}

namespace {

// u = -m(c) grad p with m = kappa / mu(c); returns u and its Jacobian
// J(i, j) = d u_i / d x_j.
void velocity_jet(const ManufacturedSolution& s, const PressureJet& p, const ConcentrationJet& c,
                  Vec3& u, Mat3& jac) {
  const double mu = s.viscosity()(c.value);
  const double m = s.kappa() / mu;
  const Vec3 grad_m = (-s.kappa() * s.viscosity().derivative(c.value) / (mu * mu)) * c.grad;
  u = -m * p.grad;
  jac = -(p.grad * grad_m.transpose() + m * p.hess);
}

}  // namespace

double ManufacturedSolution::flow_source(const Vec3& x, double t) const {
  Vec3 u;
  Mat3 jac;
  velocity_jet(*this, pressure_jet(x, t), concentration_jet(x, t), u, jac);
  return jac.trace();
}

double ManufacturedSolution::transport_source(const Vec3& x, double t) const {
  const PressureJet p = pressure_jet(x, t);
  const ConcentrationJet c = concentration_jet(x, t);
  Vec3 u;
  Mat3 jac;
  velocity_jet(*this, p, c, u, jac);
  const double div_u = jac.trace();
  const double laplace_c = c.hess.trace();
  const double speed = u.norm();

  double div_flux = dispersion_.d_m * laplace_c;
  if (speed >= kVelocityFloor) {
    const DispersionParams& d = dispersion_;
    const Vec3 grad_speed = jac.transpose() * u / speed;
    const double u_dot_gc = u.dot(c.grad);
    const Vec3 grad_u_dot_gc = jac.transpose() * c.grad + c.hess * u;
    const double div_w = div_u / speed - u.dot(grad_speed) / (speed * speed);
    div_flux += d.a_t * (grad_speed.dot(c.grad) + speed * laplace_c);
    div_flux += (d.a_l - d.a_t) * (grad_u_dot_gc.dot(u) / speed + u_dot_gc * div_w);
  }
  return porosity_ * c.dt - div_flux + u.dot(c.grad) + c.value * div_u;
}

SourceTerms ManufacturedSolution::sources() const {
  SourceTerms s;
  const ManufacturedSolution self = *this;
  s.injection = [self](int, const Vec3& x, double t) { return self.flow_source(x, t); };
  s.production = [](int, const Vec3&, double) { return 0.0; };
  s.injected_load = [self](int, const Vec3& x, double t) { return self.transport_source(x, t); };
  return s;
}

}  // namespace ccg

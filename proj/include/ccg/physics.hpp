#pragma once

#include "ccg/mesh.hpp"

#include <filesystem>
#include <functional>
#include <vector>

namespace ccg {

/// Isotropic permeability, constant per cell.
class PermeabilityField {
 public:
  enum class Kind { uniform, lens, raster };

  static PermeabilityField uniform(double kappa);
  /// kappa_in inside `box` (cell centroid test), kappa_out elsewhere.
  static PermeabilityField lens(double kappa_in, double kappa_out, const Box& box);
  /// Row-major nx*ny grid covering `domain`; row 0 is the lowest y.
  static PermeabilityField raster(int nx, int ny, std::vector<double> values,
                                  const Box& domain = Box::unit());
  /// File: `nx ny` then nx*ny values. With `log10` the values are exponents.
  static PermeabilityField load_raster(const std::filesystem::path& path, bool log10 = false,
                                       const Box& domain = Box::unit());

  [[nodiscard]] Kind kind() const { return kind_; }
  [[nodiscard]] double at(const Vec3& x, int dim) const;
  /// kappa_E for every cell, sampled at centroids.
  [[nodiscard]] std::vector<double> per_cell(const Mesh& mesh) const;

 private:
  Kind kind_ = Kind::uniform;
  double kappa_ = 1.0;
  double kappa_out_ = 1.0;
  Box box_;
  int nx_ = 0;
  int ny_ = 0;
  std::vector<double> values_;
};

class ViscosityModel {
 public:
  enum class Kind { power, quarter_mix };

  /// (mu0 + alpha c)^beta
  static ViscosityModel power(double mu0, double alpha, double beta);
  /// (c mu_s^-1/4 + (1-c) mu_o^-1/4)^-4, c clamped to [0, 1].
  static ViscosityModel quarter_mix(double mu_s, double mu_o);
  static ViscosityModel constant(double mu) { return power(mu, 0.0, 1.0); }

  [[nodiscard]] Kind kind() const { return kind_; }
  [[nodiscard]] double operator()(double c) const;
  [[nodiscard]] double derivative(double c) const;

 private:
  Kind kind_ = Kind::power;
  double a_ = 1.0;
  double b_ = 0.0;
  double e_ = 1.0;
  double mu_s_ = 1.0;  // quarter_mix endpoints, returned exactly
  double mu_o_ = 1.0;
};

struct DispersionParams {
  double d_m = 1.0;
  double a_l = 0.0;
  double a_t = 0.0;
};

inline constexpr double kVelocityFloor = 1e-12;

/// D(u) = (a_t|u| + d_m) I + (a_l - a_t) u u^T / |u|, and d_m I for |u| below
/// the floor. Only the leading dim x dim block is nonzero.
[[nodiscard]] Mat3 dispersion_tensor(const DispersionParams& params, const Vec3& u, int dim);

struct Well {
  Box support;
  double rate = 0.0;
};

struct WellSources {
  Well injector;
  Well producer;
  double injected_concentration = 1.0;
};

/// Piecewise constant well densities per cell.
struct WellDensity {
  std::vector<double> injection;
  std::vector<double> production;
};

/// density = rate / measure of the support. With `discrete` the measure is
/// the total measure of the cells whose centroid lies in the box, which
/// keeps sum density |E| = rate on meshes that do not resolve the box.
[[nodiscard]] WellDensity well_density(const WellSources& wells, const Mesh& mesh,
                                       bool discrete = true);

/// Point-wise flow and transport sources, possibly time dependent.
struct SourceTerms {
  std::function<double(int cell, const Vec3& x, double t)> injection;
  std::function<double(int cell, const Vec3& x, double t)> production;
  /// c~ q^I
  std::function<double(int cell, const Vec3& x, double t)> injected_load;
};

[[nodiscard]] SourceTerms well_sources(const WellSources& wells, const Mesh& mesh);

/// Smooth exact solution on the unit square:
///   p = e^{-t} sin(pi x) sin(pi y)
///   c = t^2/2 + cos(2 pi x) cos(2 pi y)
/// with K = kappa I and porosity phi. Sources follow from substitution:
///   q^P = 0, q^I = div u, c~ q^I = d/dt(phi c) - div(D(u) grad c) + div(u c).
class ManufacturedSolution {
 public:
  ManufacturedSolution(ViscosityModel viscosity, DispersionParams dispersion,
                       double kappa = 1.0, double porosity = 1.0);

  [[nodiscard]] double pressure(const Vec3& x, double t) const;
  [[nodiscard]] double concentration(const Vec3& x, double t) const;
  [[nodiscard]] Vec3 grad_pressure(const Vec3& x, double t) const;
  [[nodiscard]] Vec3 grad_concentration(const Vec3& x, double t) const;
  [[nodiscard]] Vec3 velocity(const Vec3& x, double t) const;
  [[nodiscard]] double flow_source(const Vec3& x, double t) const;
  [[nodiscard]] double transport_source(const Vec3& x, double t) const;

  [[nodiscard]] SourceTerms sources() const;

  [[nodiscard]] const ViscosityModel& viscosity() const { return viscosity_; }
  [[nodiscard]] const DispersionParams& dispersion() const { return dispersion_; }
  [[nodiscard]] double kappa() const { return kappa_; }
  [[nodiscard]] double porosity() const { return porosity_; }

 private:
  ViscosityModel viscosity_;
  DispersionParams dispersion_;
  double kappa_;
  double porosity_;
};

}  // namespace ccg

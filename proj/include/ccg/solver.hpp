#pragma once

#include "ccg/assembly.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <vector>

namespace ccg {

enum class TimeScheme { backward_euler, crank_nicolson };

struct TimeGrid {
  double t_end = 1.0;
  double dt = 0.1;
  TimeScheme scheme = TimeScheme::backward_euler;

  /// round(t_end / dt); throws on dt <= 0 or t_end < dt.
  [[nodiscard]] int steps() const;
};

/// Everything a coupled flow/transport run needs besides the time grid.
struct Problem {
  std::shared_ptr<const FeSpace> space;           // concentration
  std::shared_ptr<const FeSpace> pressure_space;  // defaults to `space`
  std::vector<double> kappa;  // per cell
  ViscosityModel viscosity = ViscosityModel::constant(1.0);
  DispersionParams dispersion;
  FlowFormParams flow;
  TransportFormParams transport;
  BoundarySpec pressure_bc;
  BoundarySpec concentration_bc;
  SourceTerms sources;
  ScalarFunction initial_concentration;  // projected onto the space
  SolverOptions solver;
};

/// Global mass bookkeeping: stored = (phi c_h, 1), injected and produced are
/// cumulative time integrals of (c~ q^I, 1) and (q^P c_h, 1).
struct MassLedger {
  double initial = 0.0;
  double stored = 0.0;
  double injected = 0.0;
  double produced = 0.0;

  /// injected - produced - (stored - initial)
  [[nodiscard]] double residual() const { return injected - produced - (stored - initial); }
};

struct StepDiagnostics {
  int step = 0;
  double time = 0.0;
  double c_min = 0.0;  // over cell averages
  double c_max = 0.0;
  double mass_residual = 0.0;  // this step only
  double flow_seconds = 0.0;
  double transport_seconds = 0.0;
};

class StageError : public Error {
 public:
  using Error::Error;
};

/// Sequential splitting: per step solve the flow with mu(c^n), rebuild the
/// velocity, then advance c with the velocity frozen.
class Simulation {
 public:
  explicit Simulation(Problem problem, TimeGrid grid);

  void step();
  void run(const std::function<void(const Simulation&)>& after_step = {});

  [[nodiscard]] double time() const { return time_; }
  [[nodiscard]] int steps_taken() const { return steps_; }
  [[nodiscard]] int total_steps() const { return total_steps_; }
  [[nodiscard]] const Field& pressure() const { return pressure_; }
  [[nodiscard]] const Field& concentration() const { return concentration_; }
  [[nodiscard]] const VelocityField& velocity() const { return *velocity_; }
  [[nodiscard]] const MassLedger& ledger() const { return ledger_; }
  [[nodiscard]] const std::vector<StepDiagnostics>& diagnostics() const { return diagnostics_; }
  [[nodiscard]] const Problem& problem() const { return problem_; }
  [[nodiscard]] const TimeGrid& grid() const { return grid_; }

  /// Solves the flow problem for the current concentration and time.
  void solve_flow();

 private:
  [[nodiscard]] double stored_mass(const Eigen::VectorXd& c) const;
  [[nodiscard]] double production_rate(const Field& c, double t) const;
  [[nodiscard]] double injection_rate(double t) const;

  Problem problem_;
  TimeGrid grid_;
  int total_steps_;
  double time_ = 0.0;
  int steps_ = 0;
  Field pressure_;
  Field concentration_;
  std::unique_ptr<VelocityField> velocity_;
  SparseMatrix mass_;
  SparseMatrix unit_mass_;
  double domain_measure_ = 0.0;
  LinearSolver flow_solver_;
  LinearSolver transport_solver_;
  MassLedger ledger_;
  std::vector<StepDiagnostics> diagnostics_;
};

}  // namespace ccg

#pragma once

#include "ccg/harness/config.hpp"
#include "ccg/harness/io.hpp"

#include <functional>
#include <optional>

namespace ccg::harness {

using Logger = std::function<void(const std::string&)>;

// ---------------------------------------------------------------- rates

struct ConvergenceRow {
  int cells = 0;
  double h = 0.0;
  double error = 0.0;
  double rate = 0.0;  // NaN on the first row
};

/// log(e_prev / e) / log(h_prev / h); the first entry is NaN.
[[nodiscard]] std::vector<double> convergence_rates(const std::vector<double>& h,
                                                    const std::vector<double>& errors);

// ---------------------------------------------------------------- MMS

struct MmsLevel {
  int n = 0;
  int cells = 0;
  double h = 0.0;
  double pressure_error = 0.0;
  double concentration_error = 0.0;
  double seconds = 0.0;
};

/// Manufactured-solution run on the n x n structured mesh. With t_end = 0
/// no step is taken: the errors are those of the projected initial data
/// and of the first pressure solve.
[[nodiscard]] MmsLevel run_mms_level(const MmsConfig& config, const std::string& method, int n);

struct MmsResult {
  std::string method;
  std::vector<ConvergenceRow> pressure;
  std::vector<ConvergenceRow> concentration;
  std::vector<double> seconds;
};

[[nodiscard]] std::vector<MmsResult> run_mms_convergence(const MmsConfig& config,
                                                         const Logger& log = {});
/// method,variable,cells,h,error,rate
[[nodiscard]] Table mms_table(const std::vector<MmsResult>& results);

// ---------------------------------------------------------------- runs

[[nodiscard]] Problem build_problem(const SimulationConfig& config,
                                    const std::shared_ptr<const Mesh>& mesh);

/// Cell whose centroid is nearest the far corner of the producer box.
[[nodiscard]] int producer_cell(const Mesh& mesh, const WellSources& wells);
/// Measure-weighted mean of cell averages over cells with centroid in `box`.
[[nodiscard]] double box_mean(const Field& field, const Box& box);
/// Image of a 2D box under (x, y) -> (1 - y, 1 - x); z is kept.
[[nodiscard]] Box mirror_box(const Box& box);

/// Position s where the profile first crosses `level`, linearly
/// interpolated between samples.
[[nodiscard]] std::optional<double> first_crossing(const std::vector<ProfileSample>& profile,
                                                   double level);
/// |s(lo) - s(hi)| over the first crossings of both levels.
[[nodiscard]] std::optional<double> front_width(const std::vector<ProfileSample>& profile,
                                                double lo = 0.25, double hi = 0.75);

struct Snapshot {
  double time = 0.0;
  Field concentration;
  Field pressure;
};

struct RunOptions {
  /// Keep stepping past t_end, up to the breakthrough horizon, until the
  /// producer cell breaks through.
  bool track_breakthrough = false;
  double threshold = 0.1;
};

struct RunResult {
  std::string label;
  std::vector<Snapshot> snapshots;
  std::vector<ProfileSample> profile;  // empty if profile_time was not reached
  MassLedger ledger;
  std::vector<StepDiagnostics> diagnostics;
  int producer = -1;
  std::optional<double> breakthrough;
  double final_time = 0.0;
  double seconds = 0.0;

  [[nodiscard]] const Snapshot* snapshot_at(double t, double tol = 1e-9) const;
};

[[nodiscard]] RunResult run_simulation(const SimulationConfig& config,
                                       const std::shared_ptr<const Mesh>& mesh,
                                       const RunOptions& options = {}, const Logger& log = {});

/// Relative closure |residual| / max(|initial|, |stored|, |injected|, |produced|).
[[nodiscard]] double relative_ledger_residual(const MassLedger& ledger);

/// Writes <prefix>profile.csv, <prefix>ledger.csv, <prefix>diagnostics.csv
/// (deterministic), <prefix>timings.csv and, if enabled, one VTK file per
/// snapshot.
void write_run_outputs(const RunResult& run, const SimulationConfig& config,
                       const std::filesystem::path& dir, const std::string& prefix = "");

struct LensResult {
  RunResult lens;
  RunResult homogeneous;
  Box lens_box;
  Box mirrored;
  double compare_time = 0.0;
  double lens_box_mean = 0.0;    // lens run, inside the lens
  double mirror_box_mean = 0.0;  // lens run, inside the mirrored box
};

/// Lens run plus the homogeneous run with identical settings, both tracked
/// to breakthrough. Box means are taken at the profile time.
[[nodiscard]] LensResult run_lens(const SimulationConfig& config,
                                  const std::shared_ptr<const Mesh>& mesh, const Logger& log = {});
/// quantity,value
[[nodiscard]] Table lens_summary(const LensResult& result);

// ---------------------------------------------------------------- cost

/// 100 (nnz_dg - nnz_ccg) / nnz_ccg
[[nodiscard]] double percent_improvement(std::size_t nnz_dg, std::size_t nnz_ccg);

/// Counts published for the same cell counts, if any.
[[nodiscard]] std::optional<std::size_t> reference_nnz(int dim, bool structured, int cells,
                                                       const std::string& method);

struct NnzRow {
  std::string mesh;
  int dim = 2;
  bool structured = true;
  int cells = 0;
  std::string method;
  int rows = 0;
  std::size_t nnz = 0;  // entries with |a_ij| > 1e-14
  double nnz_per_row = 0.0;
  std::size_t pattern_nnz = 0;  // structural coupling pattern
  bool assembled = true;        // false: nnz is the pattern count
  std::optional<std::size_t> reference;
};

struct ImprovementRow {
  std::string mesh;
  int dim = 2;
  int cells = 0;
  std::size_t ccg = 0;
  std::size_t dg1 = 0;
  double percent = 0.0;
  std::optional<double> reference_percent;
};

struct NnzResult {
  std::vector<NnzRow> rows;
  std::vector<ImprovementRow> improvement;
};

/// Meshes at or above this size are counted from the pattern only.
inline constexpr int kPatternOnlyCells = 196608;

/// Flow matrices with homogeneous Dirichlet data on every boundary face.
[[nodiscard]] NnzRow count_nnz(const std::shared_ptr<const Mesh>& mesh, const std::string& label,
                               bool structured, const std::string& method, double sigma);
[[nodiscard]] NnzResult run_nnz_report(const NnzConfig& config, const Logger& log = {});
[[nodiscard]] Table nnz_table(const NnzResult& result);
[[nodiscard]] Table improvement_table(const NnzResult& result);

// ---------------------------------------------------------------- 1D

/// eps,sigma,N,a,...,c0,z_matrix,irreducible,tridiagonal,monotone,
/// m_matrix,min_inverse_entry,cond2 with h = 1/N.
[[nodiscard]] Table matrix_1d_table(const Matrix1dConfig& config);

}  // namespace ccg::harness

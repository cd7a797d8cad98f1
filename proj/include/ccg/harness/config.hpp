#pragma once

#include "ccg/solver.hpp"

#include <boost/property_tree/ptree.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace ccg::harness {

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Structured generator parameters or a mesh file.
struct MeshSource {
  int dim = 2;
  int n = 64;  // intervals per axis
  std::filesystem::path file;  // overrides the generator when set

  [[nodiscard]] Mesh build() const;
  [[nodiscard]] std::string label() const;
};

/// "ccg", "dg1", "dg2" or "dg3".
[[nodiscard]] std::shared_ptr<const FeSpace> make_space(const std::string& method,
                                                      std::shared_ptr<const Mesh> mesh,
                                                      BoundaryTrace trace = BoundaryTrace::mirror);

struct SimulationConfig {
  MeshSource mesh;
  std::string method = "ccg";
  std::string pressure_method;  // empty: same as `method`

  std::string permeability = "uniform";  // uniform | lens | raster
  double kappa = 9.44e-3;
  double lens_kappa = 9.44e-6;
  Box lens_box{Vec3(0.25, 0.25, 0.0), Vec3(0.5, 0.5, 1.0)};
  std::filesystem::path raster_file;
  bool raster_log10 = false;

  std::string viscosity = "constant";  // constant | power | quarter_mix
  double mu = 1.0;
  double mu0 = 1.0;
  double alpha = 0.0;
  double beta = 1.0;
  double mu_s = 2.9;
  double mu_o = 5.8;

  DispersionParams dispersion{1.8e-7, 1.8e-5, 1.8e-6};
  double porosity = 0.2;
  /// [0, 0.1]^d and [0.9, 1]^d at 0.018 each, injecting c~ = 1.
  WellSources wells{{Box{Vec3::Zero(), Vec3::Constant(0.1)}, 0.018},
                    {Box{Vec3::Constant(0.9), Vec3::Ones()}, 0.018},
                    1.0};

  double flow_epsilon = -1.0;
  Penalty flow_penalty = Penalty::constant(1.0);
  double transport_epsilon = -1.0;
  Penalty transport_penalty = Penalty::constant(1.0);
  bool upwind = true;

  TimeGrid time{7.5, 0.05, TimeScheme::backward_euler};

  std::vector<double> snapshots{2.5, 5.0, 7.5};
  double profile_time = 5.0;
  Vec3 profile_from = Vec3::Zero();
  Vec3 profile_to = Vec3(1.0, 1.0, 0.0);
  int profile_samples = 201;
  bool write_vtk = true;
  /// Paired runs stop at the first step past breakthrough or at this time.
  double breakthrough_horizon = 30.0;

  int threads = 1;

  /// Throws ConfigError on inconsistent values or missing files.
  void validate() const;
  [[nodiscard]] ViscosityModel viscosity_model() const;
};

struct MmsConfig {
  std::vector<int> meshes{8, 16, 32};  // intervals per axis
  std::vector<std::string> methods{"ccg", "dg1"};
  double epsilon = -1.0;
  double sigma = 14.0;
  double t_end = 0.1;
  double dt = 1e-4;
  TimeScheme scheme = TimeScheme::backward_euler;
  DispersionParams dispersion{0.1, 0.0, 0.0};
  double mu0 = 1.0;
  double alpha = 0.0524;
  double beta = 4.75;
  int threads = 1;

  void validate() const;
};

struct NnzConfig {
  std::vector<int> structured_2d{32, 64};
  std::vector<std::filesystem::path> files_2d;
  std::vector<int> structured_3d{8, 16};
  std::vector<std::string> methods_2d{"ccg", "dg1", "dg2"};
  std::vector<std::string> methods_3d{"ccg", "dg1"};
  double sigma = 1.0;

  void validate() const;
};

struct Matrix1dConfig {
  std::vector<double> epsilons{-1.0, 0.0, 1.0};
  std::vector<double> sigmas{0.5, 1.0, 1.5};
  std::vector<int> sizes{8, 16, 64};

  void validate() const;
};

/// An INI file: `[section]` headers, `key = value` lines, `;` or `#`
/// comments. Relative paths resolve against the working directory first
/// and the file's directory second.
class ConfigFile {
 public:
  ConfigFile() = default;
  static ConfigFile load(const std::filesystem::path& path);
  static ConfigFile parse(const std::string& text, std::filesystem::path base = {});

  [[nodiscard]] SimulationConfig simulation() const;
  [[nodiscard]] MmsConfig mms() const;
  [[nodiscard]] NnzConfig nnz() const;
  [[nodiscard]] Matrix1dConfig matrix1d() const;

  [[nodiscard]] const boost::property_tree::ptree& tree() const { return tree_; }

 private:
  [[nodiscard]] std::filesystem::path resolve(const std::string& p) const;

  boost::property_tree::ptree tree_;
  std::filesystem::path base_;
};

[[nodiscard]] TimeScheme parse_scheme(const std::string& s);
[[nodiscard]] std::string scheme_name(TimeScheme s);
/// A number or the word "formula".
[[nodiscard]] Penalty parse_penalty(const std::string& s);

}  // namespace ccg::harness

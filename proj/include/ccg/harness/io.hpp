#pragma once

#include "ccg/spaces.hpp"

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace ccg::harness {

class IoError : public Error {
 public:
  using Error::Error;
};

/// Legacy ASCII unstructured grid. Points are duplicated per cell so that
/// discontinuous fields survive: each field is written as CELL_DATA (cell
/// averages) and as POINT_DATA (the discrete function at the cell vertices).
void write_vtk(const Mesh& mesh, const std::vector<std::pair<std::string, const Field*>>& fields,
               const std::filesystem::path& path);

struct ProfileSample {
  double s = 0.0;  // arclength from the start of the line
  Vec3 x = Vec3::Zero();
  double value = 0.0;
};

/// n equispaced samples on the segment [from, to]. Throws IoError when a
/// sample lies outside the mesh.
[[nodiscard]] std::vector<ProfileSample> sample_profile(const Field& field, const Vec3& from,
                                                        const Vec3& to, int n);

/// Columns s,value.
void write_csv_profile(const std::vector<ProfileSample>& profile, const std::filesystem::path& path);
void write_csv_profile(const Field& field, const Vec3& from, const Vec3& to, int n,
                       const std::filesystem::path& path);
/// (s, value) pairs of a file written by write_csv_profile.
[[nodiscard]] std::vector<std::pair<double, double>> read_csv_profile(
    const std::filesystem::path& path);

/// Comma-separated table with a header row.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> row);
  [[nodiscard]] std::string str() const;
  void write(const std::filesystem::path& path) const;
};

/// Shortest text that reads back to the same double.
[[nodiscard]] std::string fmt(double v);
[[nodiscard]] std::string fmt(int v);
[[nodiscard]] std::string fmt(std::size_t v);
[[nodiscard]] std::string fmt(bool v);

}  // namespace ccg::harness

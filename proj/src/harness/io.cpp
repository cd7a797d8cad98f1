#include "ccg/harness/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace ccg::harness {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

int vtk_cell_type(int dim) {
  switch (dim) {
    case 1:
      return 3;
    case 2:
      return 5;
    default:
      return 10;
  }
}

}  // namespace

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string fmt(int v) { return std::to_string(v); }
std::string fmt(std::size_t v) { return std::to_string(v); }
std::string fmt(bool v) { return v ? "true" : "false"; }

void write_vtk(const Mesh& mesh, const std::vector<std::pair<std::string, const Field*>>& fields,
               const std::filesystem::path& path) {
  for (const auto& [name, field] : fields) {
    if (&field->space().mesh() != &mesh) throw IoError("field '" + name + "' lives on another mesh");
    if (name.empty() || name.find(' ') != std::string::npos) {
      throw IoError("VTK field names must be non-empty without spaces");
    }
  }
  const int nc = mesh.num_cells();
  const int nv = mesh.dim() + 1;
  std::ofstream out = open_out(path);
  out << "# vtk DataFile Version 3.0\nccg\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << nc * nv << " double\n";
  for (int c = 0; c < nc; ++c) {
    for (int v : mesh.cell_vertices(c)) {
      const Vec3& x = mesh.vertex(v);
      out << fmt(x[0]) << ' ' << fmt(x[1]) << ' ' << fmt(x[2]) << '\n';
    }
  }
  out << "CELLS " << nc << ' ' << nc * (nv + 1) << '\n';
  for (int c = 0; c < nc; ++c) {
    out << nv;
    for (int k = 0; k < nv; ++k) out << ' ' << c * nv + k;
    out << '\n';
  }
  out << "CELL_TYPES " << nc << '\n';
  const int type = vtk_cell_type(mesh.dim());
  for (int c = 0; c < nc; ++c) out << type << '\n';
  if (!fields.empty()) {
    out << "CELL_DATA " << nc << '\n';
    for (const auto& [name, field] : fields) {
      out << "SCALARS " << name << "_cell double 1\nLOOKUP_TABLE default\n";
      for (int c = 0; c < nc; ++c) out << fmt(field->cell_average(c)) << '\n';
    }
    out << "POINT_DATA " << nc * nv << '\n';
    for (const auto& [name, field] : fields) {
      out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
      for (int c = 0; c < nc; ++c) {
        for (int v : mesh.cell_vertices(c)) out << fmt(field->value(c, mesh.vertex(v))) << '\n';
      }
    }
  }
  finish(out, path);
}

std::vector<ProfileSample> sample_profile(const Field& field, const Vec3& from, const Vec3& to,
                                          int n) {
  if (n < 2) throw std::invalid_argument("a profile needs at least two samples");
  const Mesh& mesh = field.space().mesh();
  const double length = (to - from).norm();
  std::vector<ProfileSample> out(n);
  for (int i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / (n - 1);
    ProfileSample& p = out[i];
    p.x = from + t * (to - from);
    p.s = t * length;
    const int cell = mesh.locate(p.x, 1e-10);
    if (cell < 0) {
      std::ostringstream msg;
      msg << "profile point (" << p.x.transpose() << ") is outside the mesh";
      throw IoError(msg.str());
    }
    p.value = field.value(cell, p.x);
  }
  return out;
}

void write_csv_profile(const std::vector<ProfileSample>& profile, const std::filesystem::path& path) {
  std::ofstream out = open_out(path);
  out << "s,value\n";
  for (const auto& p : profile) out << fmt(p.s) << ',' << fmt(p.value) << '\n';
  finish(out, path);
}

void write_csv_profile(const Field& field, const Vec3& from, const Vec3& to, int n,
                       const std::filesystem::path& path) {
  write_csv_profile(sample_profile(field, from, to, n), path);
}

std::vector<std::pair<double, double>> read_csv_profile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != "s,value") {
    throw IoError(path.string() + ": expected header 's,value'");
  }
  std::vector<std::pair<double, double>> out;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto comma = line.find(',');
    double s = 0.0;
    double v = 0.0;
    const char* end = line.data() + line.size();
    const auto r1 = std::from_chars(line.data(), line.data() + (comma == std::string::npos ? 0 : comma), s);
    const auto r2 = comma == std::string::npos
                        ? std::from_chars_result{nullptr, std::errc::invalid_argument}
                        : std::from_chars(line.data() + comma + 1, end, v);
    if (r1.ec != std::errc() || r2.ec != std::errc() || r2.ptr != end) {
      throw IoError(path.string() + ":" + std::to_string(lineno) + ": malformed row");
    }
    out.emplace_back(s, v);
  }
  return out;
}

void Table::add(std::vector<std::string> row) {
  if (row.size() != header.size()) {
    throw std::invalid_argument("table row has " + std::to_string(row.size()) + " columns, header " +
                                std::to_string(header.size()));
  }
  rows.push_back(std::move(row));
}

std::string Table::str() const {
  std::ostringstream out;
  auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
    out << '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
  return out.str();
}

void Table::write(const std::filesystem::path& path) const {
  std::ofstream out = open_out(path);
  out << str();
  finish(out, path);
}

}  // namespace ccg::harness

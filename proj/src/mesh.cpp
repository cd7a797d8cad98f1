#include "ccg/mesh.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>

namespace ccg {

namespace {

using SmallMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 3, 3>;

struct FacetKey {
  std::array<int, 3> v;
  bool operator==(const FacetKey&) const = default;
};

struct FacetHash {
  std::size_t operator()(const FacetKey& k) const {
    std::size_t h = 1469598103934665603ull;
    for (int x : k.v) {
      h ^= static_cast<std::size_t>(x) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return h;
  }
};

double factorial(int d) { return d == 1 ? 1.0 : d == 2 ? 2.0 : 6.0; }

std::string facet_name(const FacetKey& k, int dim) {
  std::string s = "{";
  for (int i = 0; i < dim; ++i) {
    if (i) s += ",";
    s += std::to_string(k.v[i]);
  }
  return s + "}";
}

}  // namespace

Mesh::Mesh(int dim, std::vector<Vec3> vertices,
           std::vector<std::array<int, 4>> cells)
    : dim_(dim), vertices_(std::move(vertices)), cells_(std::move(cells)) {
  if (dim_ < 1 || dim_ > 3) {
    throw std::invalid_argument("mesh dimension must be 1, 2 or 3, got " +
                                std::to_string(dim_));
  }
  if (cells_.empty()) throw TopologyError("mesh has no cells");
  const int nv = num_vertices();
  std::set<std::array<int, 4>> seen;
  for (int c = 0; c < num_cells(); ++c) {
    auto sorted = cells_[c];
    for (int i = dim_ + 1; i < 4; ++i) sorted[i] = -1;
    for (int i = 0; i <= dim_; ++i) {
      if (cells_[c][i] < 0 || cells_[c][i] >= nv) {
        throw TopologyError("cell " + std::to_string(c) +
                            " references vertex " + std::to_string(cells_[c][i]) +
                            " out of range");
      }
    }
    std::sort(sorted.begin(), sorted.begin() + dim_ + 1);
    if (std::adjacent_find(sorted.begin(), sorted.begin() + dim_ + 1) !=
        sorted.begin() + dim_ + 1) {
      throw TopologyError("cell " + std::to_string(c) + " repeats a vertex");
    }
    if (!seen.insert(sorted).second) {
      throw TopologyError("duplicate cell " + std::to_string(c));
    }
  }
  build_geometry();
  build_faces();
  build_locator();
}

void Mesh::build_geometry() {
  const int nc = num_cells();
  measure_.resize(nc);
  diameter_.resize(nc);
  centroid_.resize(nc);
  bary_grad_.resize(nc);
  for (int c = 0; c < nc; ++c) {
    const auto vs = cell_vertices(c);
    SmallMat jac(dim_, dim_);
    for (int j = 0; j < dim_; ++j) {
      const Vec3 e = vertices_[vs[j + 1]] - vertices_[vs[0]];
      for (int i = 0; i < dim_; ++i) jac(i, j) = e[i];
    }
    const double det = jac.determinant();
    measure_[c] = std::abs(det) / factorial(dim_);
    if (!(measure_[c] > 0.0)) {
      throw TopologyError("cell " + std::to_string(c) + " has zero measure");
    }
    const SmallMat inv = jac.inverse();
    Vec3 sum = Vec3::Zero();
    for (int k = 1; k <= dim_; ++k) {
      Vec3 g = Vec3::Zero();
      for (int i = 0; i < dim_; ++i) g[i] = inv(k - 1, i);
      bary_grad_[c][k] = g;
      sum += g;
    }
    bary_grad_[c][0] = -sum;
    Vec3 x = Vec3::Zero();
    double diam = 0.0;
    for (int a = 0; a <= dim_; ++a) {
      x += vertices_[vs[a]];
      for (int b = a + 1; b <= dim_; ++b) {
        diam = std::max(diam, (vertices_[vs[a]] - vertices_[vs[b]]).norm());
      }
    }
    centroid_[c] = x / (dim_ + 1);
    diameter_[c] = diam;
  }
}

void Mesh::build_faces() {
  const int nc = num_cells();
  cell_faces_.assign(nc, {-1, -1, -1, -1});
  std::unordered_map<FacetKey, int, FacetHash> lookup;
  lookup.reserve(static_cast<std::size_t>(nc) * (dim_ + 1));
  for (int c = 0; c < nc; ++c) {
    const auto vs = cell_vertices(c);
    for (int i = 0; i <= dim_; ++i) {
      FacetKey key{{-1, -1, -1}};
      int m = 0;
      for (int j = 0; j <= dim_; ++j) {
        if (j != i) key.v[m++] = vs[j];
      }
      std::sort(key.v.begin(), key.v.begin() + dim_);
      auto [it, inserted] = lookup.try_emplace(key, num_faces());
      if (inserted) {
        Face f;
        f.vertices = key.v;
        f.cells = {c, -1};
        const Vec3& opposite = vertices_[vs[i]];
        const Vec3& a = vertices_[key.v[0]];
        Vec3 n = Vec3::Zero();
        if (dim_ == 1) {
          f.measure = 1.0;
          f.barycenter = a;
          n[0] = 1.0;
        } else if (dim_ == 2) {
          const Vec3& b = vertices_[key.v[1]];
          const Vec3 t = b - a;
          f.measure = t.norm();
          f.barycenter = 0.5 * (a + b);
          n = Vec3(t[1], -t[0], 0.0) / f.measure;
        } else {
          const Vec3& b = vertices_[key.v[1]];
          const Vec3& d = vertices_[key.v[2]];
          n = (b - a).cross(d - a);
          f.measure = 0.5 * n.norm();
          f.barycenter = (a + b + d) / 3.0;
          n /= n.norm();
        }
        if (n.dot(opposite - a) > 0.0) n = -n;
        f.normal = n;
        faces_.push_back(f);
      } else {
        Face& f = faces_[it->second];
        if (f.cells[1] >= 0) {
          throw TopologyError("face " + facet_name(key, dim_) +
                              " is shared by more than two cells (cells " +
                              std::to_string(f.cells[0]) + ", " +
                              std::to_string(f.cells[1]) + ", " +
                              std::to_string(c) + ")");
        }
        // cells are visited in ascending order, so f.cells[0] < c and the
        // stored normal (outward for f.cells[0]) already has the right sign
        f.cells[1] = c;
      }
      cell_faces_[c][i] = it->second;
    }
  }
  num_boundary_faces_ = static_cast<int>(
      std::count_if(faces_.begin(), faces_.end(), [](const Face& f) { return f.boundary(); }));
}

void Mesh::build_locator() {
  locator_box_ = bounding_box();
  const double per_axis = std::pow(static_cast<double>(num_cells()), 1.0 / dim_);
  const int n = std::max(1, static_cast<int>(std::ceil(per_axis / 2.0)));
  locator_dims_ = {1, 1, 1};
  for (int i = 0; i < dim_; ++i) locator_dims_[i] = n;
  locator_buckets_.assign(static_cast<std::size_t>(locator_dims_[0]) * locator_dims_[1] *
                              locator_dims_[2],
                          {});
  auto bucket_index = [&](const Vec3& x, int axis) {
    const double span = locator_box_.hi[axis] - locator_box_.lo[axis];
    const double t = span > 0 ? (x[axis] - locator_box_.lo[axis]) / span : 0.0;
    return std::clamp(static_cast<int>(std::floor(t * locator_dims_[axis])), 0,
                      locator_dims_[axis] - 1);
  };
  for (int c = 0; c < num_cells(); ++c) {
    Vec3 lo = vertices_[cells_[c][0]];
    Vec3 hi = lo;
    for (int v : cell_vertices(c)) {
      lo = lo.cwiseMin(vertices_[v]);
      hi = hi.cwiseMax(vertices_[v]);
    }
    std::array<int, 3> a{0, 0, 0};
    std::array<int, 3> b{0, 0, 0};
    for (int i = 0; i < dim_; ++i) {
      a[i] = bucket_index(lo, i);
      b[i] = bucket_index(hi, i);
    }
    for (int k = a[2]; k <= b[2]; ++k) {
      for (int j = a[1]; j <= b[1]; ++j) {
        for (int i = a[0]; i <= b[0]; ++i) {
          locator_buckets_[(static_cast<std::size_t>(k) * locator_dims_[1] + j) *
                               locator_dims_[0] +
                           i]
              .push_back(c);
        }
      }
    }
  }
}

int Mesh::neighbor(int cell, int local) const {
  const Face& f = faces_[cell_faces_[cell][local]];
  return f.cells[0] == cell ? f.cells[1] : f.cells[0];
}

std::array<double, 4> Mesh::barycentric(int cell, const Vec3& x) const {
  std::array<double, 4> lam{0.0, 0.0, 0.0, 0.0};
  const Vec3 dx = x - vertices_[cells_[cell][0]];
  double rest = 1.0;
  for (int k = 1; k <= dim_; ++k) {
    lam[k] = bary_grad_[cell][k].dot(dx);
    rest -= lam[k];
  }
  lam[0] = rest;
  return lam;
}

Box Mesh::bounding_box() const {
  Box b{vertices_.front(), vertices_.front()};
  for (const auto& v : vertices_) {
    b.lo = b.lo.cwiseMin(v);
    b.hi = b.hi.cwiseMax(v);
  }
  return b;
}

double Mesh::max_diameter() const {
  return *std::max_element(diameter_.begin(), diameter_.end());
}

int Mesh::locate(const Vec3& x, double tol) const {
  std::array<int, 3> idx{0, 0, 0};
  for (int i = 0; i < dim_; ++i) {
    const double span = locator_box_.hi[i] - locator_box_.lo[i];
    const double t = span > 0 ? (x[i] - locator_box_.lo[i]) / span : 0.0;
    if (t < -tol || t > 1.0 + tol) return -1;
    idx[i] = std::clamp(static_cast<int>(std::floor(t * locator_dims_[i])), 0,
                        locator_dims_[i] - 1);
  }
  const auto& bucket =
      locator_buckets_[(static_cast<std::size_t>(idx[2]) * locator_dims_[1] + idx[1]) *
                           locator_dims_[0] +
                       idx[0]];
  for (int c : bucket) {
    const auto lam = barycentric(c, x);
    bool inside = true;
    for (int k = 0; k <= dim_; ++k) inside = inside && lam[k] >= -tol;
    if (inside) return c;
  }
  return -1;
}

Mesh generate_structured(int dim, int n, const Box& box) {
  if (dim < 1 || dim > 3) {
    throw std::invalid_argument("structured mesh dimension must be 1, 2 or 3, got " +
                                std::to_string(dim));
  }
  if (n < 1) throw std::invalid_argument("n_per_axis must be >= 1");
  const int m = n + 1;
  auto coord = [&](int axis, int i) {
    return box.lo[axis] + (box.hi[axis] - box.lo[axis]) * static_cast<double>(i) / n;
  };
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 4>> cells;
  if (dim == 1) {
    for (int i = 0; i < m; ++i) vertices.emplace_back(coord(0, i), 0.0, 0.0);
    for (int i = 0; i < n; ++i) cells.push_back({i, i + 1, -1, -1});
  } else if (dim == 2) {
    for (int j = 0; j < m; ++j)
      for (int i = 0; i < m; ++i) vertices.emplace_back(coord(0, i), coord(1, j), 0.0);
    auto id = [m](int i, int j) { return j * m + i; };
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        cells.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1), -1});
        cells.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1), -1});
      }
    }
  } else {
    for (int k = 0; k < m; ++k)
      for (int j = 0; j < m; ++j)
        for (int i = 0; i < m; ++i)
          vertices.emplace_back(coord(0, i), coord(1, j), coord(2, k));
    auto id = [m](int i, int j, int k) { return (k * m + j) * m + i; };
    std::array<int, 3> perm{0, 1, 2};
    std::vector<std::array<int, 3>> perms;
    do {
      perms.push_back(perm);
    } while (std::next_permutation(perm.begin(), perm.end()));
    for (int k = 0; k < n; ++k) {
      for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
          for (const auto& p : perms) {
            std::array<int, 3> at{i, j, k};
            std::array<int, 4> tet{};
            tet[0] = id(at[0], at[1], at[2]);
            for (int s = 0; s < 3; ++s) {
              ++at[p[s]];
              tet[s + 1] = id(at[0], at[1], at[2]);
            }
            cells.push_back(tet);
          }
        }
      }
    }
  }
  return Mesh(dim, std::move(vertices), std::move(cells));
}

Mesh parse_mesh(const std::string& text) {
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  // (line number, tokens) for each non-empty record
  std::vector<std::pair<int, std::vector<std::string>>> records;
  while (std::getline(in, raw)) {
    ++line_no;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    std::istringstream ls(raw);
    std::vector<std::string> tokens;
    for (std::string t; ls >> t;) tokens.push_back(t);
    if (!tokens.empty()) records.emplace_back(line_no, std::move(tokens));
  }
  if (records.empty()) throw ParseError("missing header `dim nv nc`", line_no);

  auto to_int = [](const std::string& s, int line) {
    std::size_t pos = 0;
    int v = 0;
    try {
      v = std::stoi(s, &pos);
    } catch (const std::exception&) {
      throw ParseError("expected integer, got `" + s + "`", line);
    }
    if (pos != s.size()) throw ParseError("expected integer, got `" + s + "`", line);
    return v;
  };
  auto to_double = [](const std::string& s, int line) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &pos);
    } catch (const std::exception&) {
      throw ParseError("expected number, got `" + s + "`", line);
    }
    if (pos != s.size()) throw ParseError("expected number, got `" + s + "`", line);
    return v;
  };

  const auto& [hline, header] = records.front();
  if (header.size() != 3) throw ParseError("header must be `dim nv nc`", hline);
  const int dim = to_int(header[0], hline);
  const int nv = to_int(header[1], hline);
  const int nc = to_int(header[2], hline);
  if (dim < 1 || dim > 3) throw ParseError("dim must be 1, 2 or 3", hline);
  if (nv < dim + 1 || nc < 1) throw ParseError("too few vertices or cells", hline);
  const std::size_t expected = 1 + static_cast<std::size_t>(nv) + nc;
  if (records.size() < expected) {
    throw ParseError("unexpected end of file: expected " + std::to_string(nv) +
                         " vertex and " + std::to_string(nc) + " cell lines",
                     line_no);
  }
  if (records.size() > expected) {
    throw ParseError("trailing data after last cell", records[expected].first);
  }
  std::vector<Vec3> vertices(nv, Vec3::Zero());
  for (int v = 0; v < nv; ++v) {
    const auto& [ln, tok] = records[1 + v];
    if (static_cast<int>(tok.size()) != dim) {
      throw ParseError("vertex line needs " + std::to_string(dim) + " coordinates", ln);
    }
    for (int i = 0; i < dim; ++i) vertices[v][i] = to_double(tok[i], ln);
  }
  std::vector<std::array<int, 4>> cells(nc, {-1, -1, -1, -1});
  for (int c = 0; c < nc; ++c) {
    const auto& [ln, tok] = records[1 + nv + c];
    if (static_cast<int>(tok.size()) != dim + 1) {
      throw ParseError("cell line needs " + std::to_string(dim + 1) + " vertex ids", ln);
    }
    for (int i = 0; i <= dim; ++i) {
      const int id = to_int(tok[i], ln);
      if (id < 0 || id >= nv) throw ParseError("vertex id out of range", ln);
      cells[c][i] = id;
    }
  }
  return Mesh(dim, std::move(vertices), std::move(cells));
}

Mesh load_mesh(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open mesh file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_mesh(buffer.str());
}

void write_mesh(const Mesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write mesh file " + path.string());
  out.precision(17);
  out << mesh.dim() << ' ' << mesh.num_vertices() << ' ' << mesh.num_cells() << '\n';
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    for (int i = 0; i < mesh.dim(); ++i) out << (i ? " " : "") << mesh.vertex(v)[i];
    out << '\n';
  }
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const auto vs = mesh.cell_vertices(c);
    for (std::size_t i = 0; i < vs.size(); ++i) out << (i ? " " : "") << vs[i];
    out << '\n';
  }
}

namespace {

// Barycentric coordinates of x in the simplex of the given points; returns
// false when the simplex fails the degeneracy floor.
bool simplex_weights(const Mesh& mesh, std::span<const int> cells, const Vec3& x,
                     double floor, std::array<double, 4>& lam) {
  const int d = mesh.dim();
  SmallMat edges(d, d);
  double mean_h = 0.0;
  for (int c : cells) mean_h += mesh.cell_diameter(c);
  mean_h /= static_cast<double>(cells.size());
  const Vec3& x0 = mesh.centroid(cells[0]);
  for (int j = 0; j < d; ++j) {
    const Vec3 e = mesh.centroid(cells[j + 1]) - x0;
    for (int i = 0; i < d; ++i) edges(i, j) = e[i];
  }
  const double det = edges.determinant();
  if (!(std::abs(det) >= floor * std::pow(mean_h, d))) return false;
  Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 3, 1> rhs(d);
  for (int i = 0; i < d; ++i) rhs[i] = x[i] - x0[i];
  const auto mu = edges.partialPivLu().solve(rhs).eval();
  lam = {0.0, 0.0, 0.0, 0.0};
  double rest = 1.0;
  for (int j = 0; j < d; ++j) {
    lam[j + 1] = mu[j];
    rest -= mu[j];
  }
  lam[0] = rest;
  return true;
}

}  // namespace

std::vector<FaceStencil> select_face_stencils(const Mesh& mesh,
                                              const StencilOptions& options) {
  const int d = mesh.dim();
  std::vector<FaceStencil> stencils(mesh.num_faces());
  for (int f = 0; f < mesh.num_faces(); ++f) {
    const Face& face = mesh.face(f);
    FaceStencil& s = stencils[f];
    s.face = f;
    if (face.boundary()) {
      s.size = 1;
      s.cells[0] = face.cells[0];
      s.weights[0] = 1.0;
      continue;
    }
    const int e1 = face.cells[0];
    const int e2 = face.cells[1];
    std::vector<int> candidates;
    for (int e : {e1, e2}) {
      for (int local = 0; local <= d; ++local) {
        const int nb = mesh.neighbor(e, local);
        if (nb >= 0 && nb != e1 && nb != e2) candidates.push_back(nb);
      }
    }
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    const double lo = -options.max_extrapolation;
    const double hi = 1.0 + options.max_extrapolation;
    auto try_set = [&](std::array<int, 4> cells) {
      std::array<double, 4> lam{};
      if (!simplex_weights(mesh, {cells.data(), static_cast<std::size_t>(d + 1)},
                           face.barycenter, options.degeneracy_floor, lam)) {
        return false;
      }
      for (int k = 0; k <= d; ++k) {
        if (lam[k] < lo || lam[k] > hi) return false;
      }
      s.size = d + 1;
      s.cells = cells;
      s.weights = lam;
      return true;
    };

    bool found = false;
    if (d == 1) {
      found = try_set({e1, e2, -1, -1});
    }
    // Corner faces of structured 3D meshes only see coplanar first-ring
    // centroids, so widen the pool ring by ring.
    for (int ring = 0; ring < 3 && !found && d > 1; ++ring) {
      if (ring > 0) {
        std::vector<int> grown = candidates;
        for (int c : candidates) {
          for (int local = 0; local <= d; ++local) {
            const int nb = mesh.neighbor(c, local);
            if (nb >= 0 && nb != e1 && nb != e2) grown.push_back(nb);
          }
        }
        std::sort(grown.begin(), grown.end());
        grown.erase(std::unique(grown.begin(), grown.end()), grown.end());
        if (grown.size() == candidates.size()) break;
        candidates = std::move(grown);
      }
      if (d == 2) {
        for (std::size_t a = 0; a < candidates.size() && !found; ++a) {
          found = try_set({e1, e2, candidates[a], -1});
        }
      } else {
        for (std::size_t a = 0; a < candidates.size() && !found; ++a) {
          for (std::size_t b = a + 1; b < candidates.size() && !found; ++b) {
            found = try_set({e1, e2, candidates[a], candidates[b]});
          }
        }
      }
    }
    if (!found) {
      throw AdmissibilityError("no admissible trace stencil for interior face " +
                                   std::to_string(f),
                               f);
    }
  }
  return stencils;
}


}  // namespace ccg

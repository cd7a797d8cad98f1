#include "ccg/harness/config.hpp"

#include <boost/property_tree/ini_parser.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace ccg::harness {

namespace pt = boost::property_tree;

Mesh MeshSource::build() const {
  if (!file.empty()) return load_mesh(file);
  return generate_structured(dim, n);
}

std::string MeshSource::label() const {
  if (!file.empty()) return file.stem().string();
  return "structured" + std::to_string(dim) + "d_n" + std::to_string(n);
}

std::shared_ptr<const FeSpace> make_space(const std::string& method,
                                          std::shared_ptr<const Mesh> mesh,
                                          BoundaryTrace trace) {
  if (method == "ccg") return std::make_shared<CcgSpace>(std::move(mesh), trace);
  if (method.size() == 3 && method.rfind("dg", 0) == 0 && method[2] >= '1' && method[2] <= '3') {
    return std::make_shared<DgSpace>(std::move(mesh), method[2] - '0');
  }
  throw ConfigError("unknown method '" + method + "' (expected ccg, dg1, dg2 or dg3)");
}

namespace {

void check_method(const std::string& m) {
  if (m == "ccg" || m == "dg1" || m == "dg2" || m == "dg3") return;
  throw ConfigError("unknown method '" + m + "'");
}

template <class T>
std::vector<T> parse_list(const std::string& text, const std::string& key) {
  std::istringstream in(text);
  std::vector<T> out;
  T v;
  while (in >> v) out.push_back(v);
  if (!in.eof()) throw ConfigError("cannot parse list for '" + key + "': " + text);
  return out;
}

Vec3 parse_point(const std::string& text, const std::string& key) {
  const auto v = parse_list<double>(text, key);
  if (v.size() < 2 || v.size() > 3) throw ConfigError("'" + key + "' needs 2 or 3 coordinates");
  Vec3 p = Vec3::Zero();
  for (std::size_t i = 0; i < v.size(); ++i) p[static_cast<int>(i)] = v[i];
  return p;
}

/// "x0 y0 x1 y1" or "x0 y0 z0 x1 y1 z1"; a 2D box spans z in [0, 1].
Box parse_box(const std::string& text, const std::string& key) {
  const auto v = parse_list<double>(text, key);
  Box b;
  if (v.size() == 4) {
    b.lo = Vec3(v[0], v[1], 0.0);
    b.hi = Vec3(v[2], v[3], 1.0);
  } else if (v.size() == 6) {
    b.lo = Vec3(v[0], v[1], v[2]);
    b.hi = Vec3(v[3], v[4], v[5]);
  } else {
    throw ConfigError("'" + key + "' needs 4 or 6 numbers");
  }
  for (int i = 0; i < 3; ++i) {
    if (!(b.hi[i] > b.lo[i])) throw ConfigError("'" + key + "' has an empty extent");
  }
  return b;
}

bool parse_bool(const std::string& s, const std::string& key) {
  if (s == "true" || s == "yes" || s == "1" || s == "on") return true;
  if (s == "false" || s == "no" || s == "0" || s == "off") return false;
  throw ConfigError("'" + key + "' is not a boolean: " + s);
}

/// Reads typed values from one section and rejects keys it does not know.
class Section {
 public:
  Section(const pt::ptree& root, std::string name, std::set<std::string> allowed)
      : name_(std::move(name)) {
    const auto child = root.get_child_optional(name_);
    if (!child) return;
    node_ = &*child;
    for (const auto& [key, _] : *node_) {
      if (!allowed.count(key)) throw ConfigError("unknown key [" + name_ + "] " + key);
    }
  }

  [[nodiscard]] bool has(const std::string& key) const {
    return node_ && node_->get_child_optional(key).has_value();
  }

  [[nodiscard]] std::string str(const std::string& key) const {
    return node_->get<std::string>(key);
  }

  void get(const std::string& key, double& out) const {
    if (!has(key)) return;
    try {
      std::size_t pos = 0;
      const std::string s = str(key);
      out = std::stod(s, &pos);
      if (pos != s.size()) throw std::invalid_argument(s);
    } catch (const std::exception&) {
      throw ConfigError("[" + name_ + "] " + key + " is not a number: " + str(key));
    }
  }

  void get(const std::string& key, int& out) const {
    if (!has(key)) return;
    try {
      std::size_t pos = 0;
      const std::string s = str(key);
      out = std::stoi(s, &pos);
      if (pos != s.size()) throw std::invalid_argument(s);
    } catch (const std::exception&) {
      throw ConfigError("[" + name_ + "] " + key + " is not an integer: " + str(key));
    }
  }

  void get(const std::string& key, std::string& out) const {
    if (has(key)) out = str(key);
  }

  void get(const std::string& key, bool& out) const {
    if (has(key)) out = parse_bool(str(key), key);
  }

  [[nodiscard]] std::string qualified(const std::string& key) const { return name_ + "." + key; }

 private:
  std::string name_;
  const pt::ptree* node_ = nullptr;
};

}  // namespace

TimeScheme parse_scheme(const std::string& s) {
  if (s == "be" || s == "BE" || s == "backward_euler") return TimeScheme::backward_euler;
  if (s == "cn" || s == "CN" || s == "crank_nicolson") return TimeScheme::crank_nicolson;
  throw ConfigError("unknown time scheme '" + s + "' (expected be or cn)");
}

std::string scheme_name(TimeScheme s) {
  return s == TimeScheme::backward_euler ? "be" : "cn";
}

Penalty parse_penalty(const std::string& s) {
  if (s == "formula") return Penalty::formula();
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return Penalty::constant(v);
  } catch (const std::exception&) {
    throw ConfigError("penalty must be a number or 'formula', got '" + s + "'");
  }
}

ViscosityModel SimulationConfig::viscosity_model() const {
  if (viscosity == "constant") return ViscosityModel::constant(mu);
  if (viscosity == "power") return ViscosityModel::power(mu0, alpha, beta);
  if (viscosity == "quarter_mix") return ViscosityModel::quarter_mix(mu_s, mu_o);
  throw ConfigError("unknown viscosity model '" + viscosity + "'");
}

void SimulationConfig::validate() const {
  if (mesh.file.empty()) {
    if (mesh.dim < 1 || mesh.dim > 3) throw ConfigError("mesh dimension must be 1, 2 or 3");
    if (mesh.n < 1) throw ConfigError("mesh needs at least one interval per axis");
  } else if (!std::filesystem::exists(mesh.file)) {
    throw ConfigError("mesh file not found: " + mesh.file.string());
  }
  check_method(method);
  if (!pressure_method.empty()) check_method(pressure_method);
  if (permeability == "raster") {
    if (raster_file.empty() || !std::filesystem::exists(raster_file)) {
      throw ConfigError("raster permeability file not found: " + raster_file.string());
    }
  } else if (permeability != "uniform" && permeability != "lens") {
    throw ConfigError("unknown permeability '" + permeability + "'");
  }
  if (!(kappa > 0.0) || !(lens_kappa > 0.0)) throw ConfigError("permeability must be positive");
  (void)viscosity_model();
  if (!(dispersion.d_m > 0.0) || dispersion.a_l < 0.0 || dispersion.a_t < 0.0) {
    throw ConfigError("dispersion needs d_m > 0 and nonnegative dispersivities");
  }
  if (!(porosity > 0.0)) throw ConfigError("porosity must be positive");
  for (const Penalty* p : {&flow_penalty, &transport_penalty}) {
    if (p->rule == Penalty::Rule::constant && !(p->sigma > 0.0)) {
      throw ConfigError("penalties must be positive");
    }
  }
  try {
    (void)time.steps();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("time grid: ") + e.what());
  }
  for (double t : snapshots) {
    if (t < 0.0 || t > time.t_end + 1e-12) {
      throw ConfigError("snapshot time " + std::to_string(t) + " outside [0, t_end]");
    }
  }
  if (profile_time < 0.0 || profile_time > time.t_end + 1e-12) {
    throw ConfigError("profile time outside [0, t_end]");
  }
  if (profile_samples < 2) throw ConfigError("profile needs at least two samples");
  if (threads < 1) throw ConfigError("threads must be at least 1");
}

void MmsConfig::validate() const {
  if (meshes.empty()) throw ConfigError("mms needs at least one mesh");
  for (int n : meshes) {
    if (n < 1) throw ConfigError("mms mesh sizes must be positive");
  }
  for (const auto& m : methods) check_method(m);
  if (!(sigma > 0.0)) throw ConfigError("mms penalty must be positive");
  if (!(dt > 0.0) || t_end < 0.0) throw ConfigError("mms time grid invalid");
  if (!(dispersion.d_m > 0.0)) throw ConfigError("mms needs d_m > 0");
}

void NnzConfig::validate() const {
  for (const auto& m : methods_2d) check_method(m);
  for (const auto& m : methods_3d) check_method(m);
  for (const auto& f : files_2d) {
    if (!std::filesystem::exists(f)) throw ConfigError("mesh file not found: " + f.string());
  }
  if (!(sigma > 0.0)) throw ConfigError("penalty must be positive");
}

void Matrix1dConfig::validate() const {
  for (int n : sizes) {
    if (n < 7) throw ConfigError("matrix-1d sizes must be at least 7");
  }
}

ConfigFile ConfigFile::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path.parent_path());
}

ConfigFile ConfigFile::parse(const std::string& text, std::filesystem::path base) {
  ConfigFile cfg;
  cfg.base_ = std::move(base);
  std::istringstream in(text);
  try {
    pt::read_ini(in, cfg.tree_);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("config line " + std::to_string(e.line()) + ": " + e.message());
  }
  return cfg;
}

std::filesystem::path ConfigFile::resolve(const std::string& p) const {
  std::filesystem::path path(p);
  if (path.is_absolute() || std::filesystem::exists(path) || base_.empty()) return path;
  const auto alt = base_ / path;
  return std::filesystem::exists(alt) ? alt : path;
}

SimulationConfig ConfigFile::simulation() const {
  SimulationConfig c;
  const Section mesh(tree_, "mesh", {"dim", "n", "file"});
  mesh.get("dim", c.mesh.dim);
  mesh.get("n", c.mesh.n);
  if (mesh.has("file")) c.mesh.file = resolve(mesh.str("file"));

  const Section space(tree_, "space", {"method", "pressure_method"});
  space.get("method", c.method);
  space.get("pressure_method", c.pressure_method);

  const Section phys(tree_, "physics",
                     {"permeability", "kappa", "lens_kappa", "lens_box", "raster_file",
                      "raster_log10", "viscosity", "mu", "mu0", "alpha", "beta", "mu_s", "mu_o",
                      "d_m", "a_l", "a_t", "porosity"});
  phys.get("permeability", c.permeability);
  phys.get("kappa", c.kappa);
  phys.get("lens_kappa", c.lens_kappa);
  if (phys.has("lens_box")) c.lens_box = parse_box(phys.str("lens_box"), "lens_box");
  if (phys.has("raster_file")) c.raster_file = resolve(phys.str("raster_file"));
  phys.get("raster_log10", c.raster_log10);
  phys.get("viscosity", c.viscosity);
  phys.get("mu", c.mu);
  phys.get("mu0", c.mu0);
  phys.get("alpha", c.alpha);
  phys.get("beta", c.beta);
  phys.get("mu_s", c.mu_s);
  phys.get("mu_o", c.mu_o);
  phys.get("d_m", c.dispersion.d_m);
  phys.get("a_l", c.dispersion.a_l);
  phys.get("a_t", c.dispersion.a_t);
  phys.get("porosity", c.porosity);

  const Section wells(tree_, "wells", {"injector", "producer", "rate", "injected_concentration"});
  if (wells.has("injector")) c.wells.injector.support = parse_box(wells.str("injector"), "injector");
  if (wells.has("producer")) c.wells.producer.support = parse_box(wells.str("producer"), "producer");
  if (wells.has("rate")) {
    double rate = 0.0;
    wells.get("rate", rate);
    c.wells.injector.rate = rate;
    c.wells.producer.rate = rate;
  }
  wells.get("injected_concentration", c.wells.injected_concentration);

  const Section flow(tree_, "flow", {"epsilon", "penalty"});
  flow.get("epsilon", c.flow_epsilon);
  if (flow.has("penalty")) c.flow_penalty = parse_penalty(flow.str("penalty"));

  const Section tr(tree_, "transport", {"epsilon", "penalty", "upwind"});
  tr.get("epsilon", c.transport_epsilon);
  if (tr.has("penalty")) c.transport_penalty = parse_penalty(tr.str("penalty"));
  tr.get("upwind", c.upwind);

  const Section time(tree_, "time", {"t_end", "dt", "scheme"});
  time.get("t_end", c.time.t_end);
  time.get("dt", c.time.dt);
  if (time.has("scheme")) c.time.scheme = parse_scheme(time.str("scheme"));

  const Section out(tree_, "output",
                    {"snapshots", "profile_time", "profile_from", "profile_to", "profile_samples",
                     "vtk", "breakthrough_horizon"});
  if (out.has("snapshots")) c.snapshots = parse_list<double>(out.str("snapshots"), "snapshots");
  out.get("profile_time", c.profile_time);
  if (out.has("profile_from")) c.profile_from = parse_point(out.str("profile_from"), "profile_from");
  if (out.has("profile_to")) c.profile_to = parse_point(out.str("profile_to"), "profile_to");
  out.get("profile_samples", c.profile_samples);
  out.get("vtk", c.write_vtk);
  out.get("breakthrough_horizon", c.breakthrough_horizon);

  const Section run(tree_, "run", {"threads"});
  run.get("threads", c.threads);
  return c;
}

MmsConfig ConfigFile::mms() const {
  MmsConfig c;
  const Section s(tree_, "mms",
                  {"meshes", "methods", "epsilon", "sigma", "t_end", "dt", "scheme", "d_m", "a_l",
                   "a_t", "mu0", "alpha", "beta", "threads"});
  if (s.has("meshes")) c.meshes = parse_list<int>(s.str("meshes"), "meshes");
  if (s.has("methods")) c.methods = parse_list<std::string>(s.str("methods"), "methods");
  s.get("epsilon", c.epsilon);
  s.get("sigma", c.sigma);
  s.get("t_end", c.t_end);
  s.get("dt", c.dt);
  if (s.has("scheme")) c.scheme = parse_scheme(s.str("scheme"));
  s.get("d_m", c.dispersion.d_m);
  s.get("a_l", c.dispersion.a_l);
  s.get("a_t", c.dispersion.a_t);
  s.get("mu0", c.mu0);
  s.get("alpha", c.alpha);
  s.get("beta", c.beta);
  s.get("threads", c.threads);
  return c;
}

NnzConfig ConfigFile::nnz() const {
  NnzConfig c;
  const Section s(tree_, "nnz",
                  {"structured_2d", "files_2d", "structured_3d", "methods_2d", "methods_3d",
                   "sigma"});
  if (s.has("structured_2d")) c.structured_2d = parse_list<int>(s.str("structured_2d"), "structured_2d");
  if (s.has("structured_3d")) c.structured_3d = parse_list<int>(s.str("structured_3d"), "structured_3d");
  if (s.has("files_2d")) {
    c.files_2d.clear();
    for (const auto& f : parse_list<std::string>(s.str("files_2d"), "files_2d")) {
      c.files_2d.push_back(resolve(f));
    }
  }
  if (s.has("methods_2d")) c.methods_2d = parse_list<std::string>(s.str("methods_2d"), "methods_2d");
  if (s.has("methods_3d")) c.methods_3d = parse_list<std::string>(s.str("methods_3d"), "methods_3d");
  s.get("sigma", c.sigma);
  return c;
}

Matrix1dConfig ConfigFile::matrix1d() const {
  Matrix1dConfig c;
  const Section s(tree_, "matrix1d", {"epsilons", "sigmas", "sizes"});
  if (s.has("epsilons")) c.epsilons = parse_list<double>(s.str("epsilons"), "epsilons");
  if (s.has("sigmas")) c.sigmas = parse_list<double>(s.str("sigmas"), "sigmas");
  if (s.has("sizes")) c.sizes = parse_list<int>(s.str("sizes"), "sizes");
  return c;
}

}  // namespace ccg::harness

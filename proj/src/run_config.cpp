#include "chrono_duhamel/run_config.hpp"

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <random>
#include <optional>
#include <set>
#include <sstream>

namespace chrono_duhamel {

namespace pt = boost::property_tree;

ConfigError::ConfigError(const std::string& file, int line, const std::string& field, const std::string& message)
    : std::runtime_error(line > 0 ? fmt::format("{}:{}: {}: {}", file, line, field, message)
                                  : fmt::format("{}: {}: {}", file, field, message)),
      line_(line),
      field_(field) {}

namespace {

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"grid", {"M", "Lx"}},
      {"equation", {"kind", "mass"}},
      {"nonlinearity", {"coeffs"}},
      {"data", {"profile", "amplitude", "mode", "chi_amplitude", "gaussian_width"}},
      {"times", {"t1", "t2", "steps", "snapshot_every"}},
      {"functional", {"kind", "node", "tau", "weights", "file"}},
      {"caps", {"P", "K"}},
      {"norms", {"s", "m_ref"}},
      {"certify", {"R", "floor", "majorant", "X_coeffs", "majorant_samples"}},
      {"tolerances", {"flow_rel_tol", "tree_order", "tree_panels", "invariance_substeps", "drift_threshold"}},
      {"run", {"seed", "out"}},
  };
  return keys;
}

// line of "key" inside "[section]" in the raw file, 0 if absent
int find_line(const std::string& path, const std::string& section, const std::string& key) {
  std::ifstream in(path);
  std::string line, current;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    std::string t = boost::trim_copy(line);
    if (t.empty() || t[0] == ';' || t[0] == '#') continue;
    if (t.front() == '[' && t.back() == ']') {
      current = boost::trim_copy(t.substr(1, t.size() - 2));
      if (key.empty() && current == section) return n;
      continue;
    }
    const auto eq = t.find('=');
    if (eq != std::string::npos && current == section && boost::trim_copy(t.substr(0, eq)) == key) return n;
  }
  return 0;
}

class Reader {
 public:
  Reader(const std::string& path, const pt::ptree& tree) : path_(path), tree_(tree) {}

  [[noreturn]] void fail(const std::string& section, const std::string& key, const std::string& msg) const {
    throw ConfigError(path_, find_line(path_, section, key), section + "." + key, msg);
  }

  std::optional<std::string> raw(const std::string& section, const std::string& key) const {
    auto sec = tree_.get_child_optional(section);
    if (!sec) return std::nullopt;
    auto v = sec->get_optional<std::string>(pt::ptree::path_type(key, '\0'));
    if (!v) return std::nullopt;
    return boost::trim_copy(*v);
  }

  void get(const std::string& section, const std::string& key, double& out) const {
    if (auto v = raw(section, key)) {
      try {
        std::size_t pos = 0;
        const double d = std::stod(*v, &pos);
        if (pos != v->size() || !std::isfinite(d)) throw std::invalid_argument("");
        out = d;
      } catch (const std::exception&) {
        fail(section, key, "expected a finite real number, got '" + *v + "'");
      }
    }
  }

  void get(const std::string& section, const std::string& key, int& out) const {
    if (auto v = raw(section, key)) {
      try {
        std::size_t pos = 0;
        const long d = std::stol(*v, &pos);
        if (pos != v->size()) throw std::invalid_argument("");
        out = static_cast<int>(d);
      } catch (const std::exception&) {
        fail(section, key, "expected an integer, got '" + *v + "'");
      }
    }
  }

  void get(const std::string& section, const std::string& key, std::uint64_t& out) const {
    if (auto v = raw(section, key)) {
      try {
        std::size_t pos = 0;
        const unsigned long long d = std::stoull(*v, &pos);
        if (pos != v->size() || (*v)[0] == '-') throw std::invalid_argument("");
        out = d;
      } catch (const std::exception&) {
        fail(section, key, "expected an unsigned integer, got '" + *v + "'");
      }
    }
  }

  void get(const std::string& section, const std::string& key, std::string& out) const {
    if (auto v = raw(section, key)) out = *v;
  }

  std::vector<double> list(const std::string& section, const std::string& key) const {
    std::vector<double> out;
    auto v = raw(section, key);
    if (!v || v->empty()) return out;
    std::vector<std::string> parts;
    boost::split(parts, *v, boost::is_any_of(", \t"), boost::token_compress_on);
    for (const auto& p : parts) {
      if (p.empty()) continue;
      try {
        std::size_t pos = 0;
        out.push_back(std::stod(p, &pos));
        if (pos != p.size()) throw std::invalid_argument("");
      } catch (const std::exception&) {
        fail(section, key, "bad list element '" + p + "'");
      }
    }
    return out;
  }

 private:
  std::string path_;
  const pt::ptree& tree_;
};

std::string fmt_double(double v) { return fmt::format("{:.17g}", v); }

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt_double(v[i]);
  return s;
}

}  // namespace

Model RunConfig::model() const {
  Model m;
  m.grid = Grid(M, Lx);
  m.disp = DispersionRelation{kind, mass};
  m.nonlin = nonlin;
  return m;
}

CauchyData RunConfig::initial_data() const {
  const Grid grid(M, Lx);
  const DispersionRelation disp{kind, mass};
  CauchyData d = CauchyData::zero(grid, disp, t1);
  const double k = 2.0 * std::numbers::pi / Lx * mode;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int j = 0; j < M; ++j) {
    const double x = grid.x(j);
    double v = 0.0;
    if (profile == "cos") v = std::cos(k * x);
    else if (profile == "sin") v = std::sin(k * x);
    else if (profile == "gaussian") {
      const double c = 0.5 * Lx;
      v = std::exp(-(x - c) * (x - c) / (2.0 * gaussian_width * gaussian_width));
    } else if (profile == "random") v = gauss(rng);
    d.psi[j] = amplitude * v;
    if (disp.second_order()) d.chi[j] = chi_amplitude * (profile == "random" ? gauss(rng) : std::sin(k * x));
  }
  return d;
}

std::vector<std::string> RunConfig::resolved_lines() const {
  std::vector<std::string> l;
  auto add = [&](const std::string& sec, const std::string& key, const std::string& val) {
    l.push_back(fmt::format("[{}] {} = {}", sec, key, val));
  };
  add("grid", "M", std::to_string(M));
  add("grid", "Lx", fmt_double(Lx));
  add("equation", "kind", to_string(kind));
  add("equation", "mass", fmt_double(mass));
  std::string nl;
  for (const auto& [k, v] : nonlin.coeffs) nl += (nl.empty() ? "" : ",") + fmt::format("{}:{}", k, fmt_double(v));
  add("nonlinearity", "coeffs", nl);
  add("data", "profile", profile);
  add("data", "amplitude", fmt_double(amplitude));
  add("data", "mode", std::to_string(mode));
  add("data", "chi_amplitude", fmt_double(chi_amplitude));
  add("data", "gaussian_width", fmt_double(gaussian_width));
  add("times", "t1", fmt_double(t1));
  add("times", "t2", fmt_double(t2));
  add("times", "steps", std::to_string(steps));
  add("times", "snapshot_every", std::to_string(snapshot_every));
  const char* fk = functional == FunctionalKind::point_eval ? "point_eval"
                   : functional == FunctionalKind::linear_weights ? "linear_weights" : "tensor_file";
  add("functional", "kind", fk);
  add("functional", "node", std::to_string(node));
  add("functional", "tau", fmt_double(tau));
  add("functional", "weights", join(weights));
  add("functional", "file", tensor_file);
  add("caps", "P", std::to_string(P));
  add("caps", "K", std::to_string(K));
  add("norms", "s", fmt_double(s));
  add("norms", "m_ref", fmt_double(m_ref));
  add("certify", "R", fmt_double(R));
  add("certify", "floor", fmt_double(floor));
  add("certify", "majorant", majorant == MajorantSource::measured ? "measured" : "preset");
  add("certify", "X_coeffs", join(X_coeffs));
  add("certify", "majorant_samples", std::to_string(majorant_samples));
  add("tolerances", "flow_rel_tol", fmt_double(flow_rel_tol));
  add("tolerances", "tree_order", std::to_string(tree_order));
  add("tolerances", "tree_panels", std::to_string(tree_panels));
  add("tolerances", "invariance_substeps", std::to_string(invariance_substeps));
  add("tolerances", "drift_threshold", fmt_double(drift_threshold));
  add("run", "seed", std::to_string(seed));
  return l;
}

RunConfig load_config(const std::string& path) {
  if (!std::filesystem::exists(path)) throw ConfigError(path, 0, "config", "file not found");
  pt::ptree tree;
  try {
    pt::ini_parser::read_ini(path, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(path, static_cast<int>(e.line()), "syntax", e.message());
  }
  const auto& known = known_keys();
  for (const auto& [section, child] : tree) {
    auto it = known.find(section);
    if (it == known.end()) throw ConfigError(path, find_line(path, section, ""), section, "unknown section");
    if (!child.data().empty() && child.empty())
      throw ConfigError(path, 0, section, "key outside of any section");
    for (const auto& [key, value] : child)
      if (!it->second.count(key)) throw ConfigError(path, find_line(path, section, key), section + "." + key, "unknown key");
  }

  Reader r(path, tree);
  RunConfig c;
  c.source_path = path;
  r.get("grid", "M", c.M);
  r.get("grid", "Lx", c.Lx);
  if (c.M < 4 || (c.M & (c.M - 1)) != 0) r.fail("grid", "M", "must be a power of two >= 4");
  if (!(c.Lx > 0)) r.fail("grid", "Lx", "must be positive");

  std::string kind = to_string(c.kind);
  r.get("equation", "kind", kind);
  try {
    c.kind = equation_kind_from_string(kind);
  } catch (const std::invalid_argument&) {
    r.fail("equation", "kind", "expected klein_gordon or schrodinger, got '" + kind + "'");
  }
  r.get("equation", "mass", c.mass);
  if (c.mass < 0) r.fail("equation", "mass", "must be nonnegative");

  if (auto v = r.raw("nonlinearity", "coeffs")) {
    c.nonlin.coeffs.clear();
    std::vector<std::string> parts;
    boost::split(parts, *v, boost::is_any_of(","), boost::token_compress_on);
    for (auto p : parts) {
      boost::trim(p);
      if (p.empty()) continue;
      const auto colon = p.find(':');
      try {
        if (colon == std::string::npos) throw std::invalid_argument("");
        const int k = std::stoi(p.substr(0, colon));
        const double val = std::stod(p.substr(colon + 1));
        if (k < 0 || k > 16) throw std::invalid_argument("");
        c.nonlin.coeffs[k] = val;
      } catch (const std::exception&) {
        r.fail("nonlinearity", "coeffs", "expected 'degree:value' pairs, got '" + p + "'");
      }
    }
  }

  r.get("data", "profile", c.profile);
  static const std::set<std::string> profiles = {"cos", "sin", "gaussian", "random", "zero"};
  if (!profiles.count(c.profile)) r.fail("data", "profile", "expected cos, sin, gaussian, random or zero");
  r.get("data", "amplitude", c.amplitude);
  r.get("data", "mode", c.mode);
  r.get("data", "chi_amplitude", c.chi_amplitude);
  r.get("data", "gaussian_width", c.gaussian_width);
  if (!(c.gaussian_width > 0)) r.fail("data", "gaussian_width", "must be positive");

  r.get("times", "t1", c.t1);
  r.get("times", "t2", c.t2);
  r.get("times", "steps", c.steps);
  r.get("times", "snapshot_every", c.snapshot_every);
  if (c.steps < 1) r.fail("times", "steps", "must be >= 1");
  if (c.snapshot_every < 0) r.fail("times", "snapshot_every", "must be >= 0");

  std::string fk = "point_eval";
  r.get("functional", "kind", fk);
  if (fk == "point_eval") c.functional = FunctionalKind::point_eval;
  else if (fk == "linear_weights") c.functional = FunctionalKind::linear_weights;
  else if (fk == "tensor_file") c.functional = FunctionalKind::tensor_file;
  else r.fail("functional", "kind", "expected point_eval, linear_weights or tensor_file");
  r.get("functional", "node", c.node);
  if (c.node < 0 || c.node >= c.M) r.fail("functional", "node", "outside the grid");
  c.tau = c.t1;
  if (r.raw("functional", "tau")) {
    r.get("functional", "tau", c.tau);
    c.tau_set = true;
  }
  c.weights = r.list("functional", "weights");
  if (c.functional == FunctionalKind::linear_weights && static_cast<int>(c.weights.size()) != 2 * c.M)
    r.fail("functional", "weights", fmt::format("expected {} weights (chart dimension)", 2 * c.M));
  r.get("functional", "file", c.tensor_file);
  if (c.functional == FunctionalKind::tensor_file) {
    std::filesystem::path p(c.tensor_file);
    if (p.is_relative()) p = std::filesystem::path(path).parent_path() / p;
    if (!std::filesystem::exists(p)) r.fail("functional", "file", "tensor file not found: " + p.string());
    c.tensor_file = p.string();
  }

  r.get("caps", "P", c.P);
  r.get("caps", "K", c.K);
  if (c.P < 1 || c.P > 7) r.fail("caps", "P", "must be in [1, 7]");
  if (c.K < 0 || c.K > 4) r.fail("caps", "K", "must be in [0, 4]");

  r.get("norms", "s", c.s);
  r.get("norms", "m_ref", c.m_ref);
  if (!(c.m_ref > 0)) r.fail("norms", "m_ref", "must be positive");

  r.get("certify", "R", c.R);
  r.get("certify", "floor", c.floor);
  if (!(c.R > 0)) r.fail("certify", "R", "must be positive");
  if (!(c.floor > 0) || !(c.floor < c.R)) r.fail("certify", "floor", "must lie in (0, R)");
  std::string ms = "measured";
  r.get("certify", "majorant", ms);
  if (ms == "measured") c.majorant = MajorantSource::measured;
  else if (ms == "preset") c.majorant = MajorantSource::preset;
  else r.fail("certify", "majorant", "expected measured or preset");
  c.X_coeffs = r.list("certify", "X_coeffs");
  for (double x : c.X_coeffs)
    if (x < 0) r.fail("certify", "X_coeffs", "coefficients must be nonnegative");
  if (c.majorant == MajorantSource::preset && c.X_coeffs.empty())
    r.fail("certify", "X_coeffs", "required when majorant = preset");
  r.get("certify", "majorant_samples", c.majorant_samples);
  if (c.majorant_samples < 1) r.fail("certify", "majorant_samples", "must be >= 1");

  r.get("tolerances", "flow_rel_tol", c.flow_rel_tol);
  r.get("tolerances", "tree_order", c.tree_order);
  r.get("tolerances", "tree_panels", c.tree_panels);
  r.get("tolerances", "invariance_substeps", c.invariance_substeps);
  r.get("tolerances", "drift_threshold", c.drift_threshold);
  if (!(c.flow_rel_tol > 0)) r.fail("tolerances", "flow_rel_tol", "must be positive");
  if (c.tree_order < 1 || c.tree_order > 64) r.fail("tolerances", "tree_order", "must be in [1, 64]");
  if (c.tree_panels < 1) r.fail("tolerances", "tree_panels", "must be >= 1");
  if (c.invariance_substeps < 1) r.fail("tolerances", "invariance_substeps", "must be >= 1");

  r.get("run", "seed", c.seed);
  r.get("run", "out", c.out_dir);
  return c;
}

}  // namespace chrono_duhamel

#include "nlpf/config.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <vector>

#include "nlpf/errors.hpp"

namespace nlpf {
namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

[[noreturn]] void fail(int line, const std::string& msg) {
  throw ParseError("line " + std::to_string(line) + ": " + msg);
}

double want_double(int line, const std::string& key, const std::string& val) {
  const char* s = val.c_str();
  char* end = nullptr;
  const double v = std::strtod(s, &end);
  if (end == s || *end != '\0')
    fail(line, key + " expects a number, got '" + val + "'");
  return v;
}

int want_int(int line, const std::string& key, const std::string& val) {
  const char* s = val.c_str();
  char* end = nullptr;
  const long v = std::strtol(s, &end, 10);
  if (end == s || *end != '\0')
    fail(line, key + " expects an integer, got '" + val + "'");
  if (v < -1000000000L || v > 1000000000L) fail(line, key + " out of range");
  return static_cast<int>(v);
}

const std::set<std::string> kSections = {"mesh",  "kernel", "nonlinearity",
                                         "data",  "time",   "solver",
                                         "output"};
const std::set<std::string> kSourcePresets = {"const", "cosine", "affine",
                                              "sine_time"};
const std::set<std::string> kFieldPresets = {"const", "cosine", "affine"};

}  // namespace

ScenarioConfig default_config() { return ScenarioConfig{}; }

ScenarioConfig parse_config(const std::string& text) {
  ScenarioConfig c = default_config();
  bool pi_lip_set = false;

  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = raw;
    const size_t hash = s.find_first_of("#;");
    if (hash != std::string::npos) s = s.substr(0, hash);
    s = trim(s);
    if (s.empty()) continue;

    if (s.front() == '[') {
      if (s.back() != ']') fail(line, "unterminated section header");
      section = trim(s.substr(1, s.size() - 2));
      if (!kSections.count(section)) fail(line, "unknown section [" + section + "]");
      continue;
    }

    const size_t eq = s.find('=');
    if (eq == std::string::npos) fail(line, "expected key = value");
    const std::string key = trim(s.substr(0, eq));
    const std::string val = trim(s.substr(eq + 1));
    if (key.empty()) fail(line, "empty key");
    if (section.empty()) fail(line, "key '" + key + "' outside any section");

    auto unknown = [&]() -> void {
      throw UnknownKey("line " + std::to_string(line) + ": unknown key '" + key +
                       "' in section [" + section + "]");
    };
    auto preset_of = [&](DataPreset& p, const std::string& stem,
                         const std::set<std::string>& allowed) -> bool {
      if (key == stem) {
        if (!allowed.count(val)) fail(line, stem + " preset '" + val + "' not recognized");
        p.name = val;
        return true;
      }
      if (key == stem + "_amp") { p.amp = want_double(line, key, val); return true; }
      if (key == stem + "_slope") { p.slope = want_double(line, key, val); return true; }
      if (key == stem + "_freq") { p.freq = want_double(line, key, val); return true; }
      return false;
    };

    if (section == "mesh") {
      if (key == "dimension") {
        c.dimension = want_int(line, key, val);
        if (c.dimension != 1 && c.dimension != 2) fail(line, "dimension must be 1 or 2");
      } else if (key == "nodes") {
        c.nodes = want_int(line, key, val);
        if (c.nodes < 3) fail(line, "nodes must be >= 3");
      } else if (key == "nodes_y") {
        c.nodes_y = want_int(line, key, val);
        if (c.nodes_y < 3) fail(line, "nodes_y must be >= 3");
      } else if (key == "extent") {
        c.extent = want_double(line, key, val);
        if (!(c.extent > 0.0)) fail(line, "extent must be positive");
      } else if (key == "extent_y") {
        c.extent_y = want_double(line, key, val);
        if (!(c.extent_y > 0.0)) fail(line, "extent_y must be positive");
      } else unknown();
    } else if (section == "kernel") {
      if (key == "name") {
        if (val != "zero" && val != "constant" && val != "gaussian" &&
            val != "custom-table")
          fail(line, "kernel name '" + val + "' not recognized");
        c.kernel_name = val;
      } else if (key == "width") {
        c.kernel_width = want_double(line, key, val);
        if (!(c.kernel_width > 0.0)) fail(line, "width must be positive");
      } else if (key == "value") {
        c.kernel_value = want_double(line, key, val);
      } else if (key == "table_file") {
        c.kernel_table_file = val;
      } else if (key == "strategy") {
        if (val != "fast" && val != "direct")
          fail(line, "strategy must be fast or direct");
        c.kernel_strategy = val;
      } else unknown();
    } else if (section == "nonlinearity") {
      if (key == "beta") {
        if (val != "cubic" && val != "piecewise")
          fail(line, "beta preset '" + val + "' not recognized");
        c.beta_name = val;
      } else if (key == "beta_scale") {
        c.beta_scale = want_double(line, key, val);
        if (c.beta_scale < 0.0) fail(line, "beta_scale must be >= 0");
      } else if (key == "beta_knee") {
        c.beta_knee = want_double(line, key, val);
        if (!(c.beta_knee >= 0.0)) fail(line, "beta_knee must be >= 0");
      } else if (key == "beta_slope") {
        c.beta_slope = want_double(line, key, val);
        if (c.beta_slope < 0.0) fail(line, "beta_slope must be >= 0");
      } else if (key == "pi_slope") {
        c.pi_slope = want_double(line, key, val);
      } else if (key == "pi_lipschitz") {
        c.pi_lipschitz = want_double(line, key, val);
        if (c.pi_lipschitz < 0.0) fail(line, "pi_lipschitz must be >= 0");
        pi_lip_set = true;
      } else unknown();
    } else if (section == "data") {
      if (preset_of(c.f, "f", kSourcePresets)) continue;
      if (preset_of(c.g, "g", kSourcePresets)) continue;
      if (preset_of(c.theta0, "theta0", kFieldPresets)) continue;
      if (preset_of(c.phi0, "phi0", kFieldPresets)) continue;
      if (preset_of(c.v0, "v0", kFieldPresets)) continue;
      unknown();
    } else if (section == "time") {
      if (key == "T") {
        c.T = want_double(line, key, val);
        if (!(c.T > 0.0)) fail(line, "T must be positive");
      } else if (key == "N") {
        c.N = want_int(line, key, val);
        if (c.N < 1) fail(line, "N must be >= 1");
      } else if (key == "ladder") {
        parse_ladder(val);  // reject malformed ranges at parse time
        c.ladder = val;
      } else unknown();
    } else if (section == "solver") {
      auto pos_double = [&](double& slot) {
        slot = want_double(line, key, val);
        if (!(slot > 0.0)) fail(line, key + " must be positive");
      };
      if (key == "fp_tol") pos_double(c.fp_tol);
      else if (key == "fp_max_iter") {
        c.fp_max_iter = want_int(line, key, val);
        if (c.fp_max_iter < 1) fail(line, "fp_max_iter must be >= 1");
      } else if (key == "elliptic_tol") pos_double(c.elliptic_tol);
      else if (key == "elliptic_max_iter") {
        c.elliptic_max_iter = want_int(line, key, val);
        if (c.elliptic_max_iter < 1) fail(line, "elliptic_max_iter must be >= 1");
      } else if (key == "scalar_tol") pos_double(c.scalar_tol);
      else if (key == "theta_min") {
        c.theta_min = want_double(line, key, val);
        if (c.theta_min < 0.0) fail(line, "theta_min must be >= 0");
      } else if (key == "residual_factor") pos_double(c.residual_factor);
      else if (key == "samples_per_step") {
        c.samples_per_step = want_int(line, key, val);
        if (c.samples_per_step < 8) fail(line, "samples_per_step must be >= 8");
      } else unknown();
    } else if (section == "output") {
      if (key == "directory") c.directory = val;
      else if (key == "save_stride") {
        c.save_stride = want_int(line, key, val);
        if (c.save_stride < 1) fail(line, "save_stride must be >= 1");
      } else unknown();
    }
  }

  if (!pi_lip_set) c.pi_lipschitz = std::abs(c.pi_slope);
  return c;
}

std::string serialize_config(const ScenarioConfig& c) {
  std::ostringstream out;
  auto preset = [&](const char* stem, const DataPreset& p) {
    out << stem << " = " << p.name << "\n"
        << stem << "_amp = " << fmt(p.amp) << "\n"
        << stem << "_slope = " << fmt(p.slope) << "\n"
        << stem << "_freq = " << fmt(p.freq) << "\n";
  };
  out << "[mesh]\n"
      << "dimension = " << c.dimension << "\n"
      << "nodes = " << c.nodes << "\n"
      << "nodes_y = " << c.nodes_y << "\n"
      << "extent = " << fmt(c.extent) << "\n"
      << "extent_y = " << fmt(c.extent_y) << "\n\n";
  out << "[kernel]\n"
      << "name = " << c.kernel_name << "\n"
      << "width = " << fmt(c.kernel_width) << "\n"
      << "value = " << fmt(c.kernel_value) << "\n";
  if (!c.kernel_table_file.empty())
    out << "table_file = " << c.kernel_table_file << "\n";
  out << "strategy = " << c.kernel_strategy << "\n\n";
  out << "[nonlinearity]\n"
      << "beta = " << c.beta_name << "\n"
      << "beta_scale = " << fmt(c.beta_scale) << "\n"
      << "beta_knee = " << fmt(c.beta_knee) << "\n"
      << "beta_slope = " << fmt(c.beta_slope) << "\n"
      << "pi_slope = " << fmt(c.pi_slope) << "\n"
      << "pi_lipschitz = " << fmt(c.pi_lipschitz) << "\n\n";
  out << "[data]\n";
  preset("f", c.f);
  preset("g", c.g);
  preset("theta0", c.theta0);
  preset("phi0", c.phi0);
  preset("v0", c.v0);
  out << "\n[time]\n"
      << "T = " << fmt(c.T) << "\n"
      << "N = " << c.N << "\n";
  if (!c.ladder.empty()) out << "ladder = " << c.ladder << "\n";
  out << "\n[solver]\n"
      << "fp_tol = " << fmt(c.fp_tol) << "\n"
      << "fp_max_iter = " << c.fp_max_iter << "\n"
      << "elliptic_tol = " << fmt(c.elliptic_tol) << "\n"
      << "elliptic_max_iter = " << c.elliptic_max_iter << "\n"
      << "scalar_tol = " << fmt(c.scalar_tol) << "\n"
      << "theta_min = " << fmt(c.theta_min) << "\n"
      << "residual_factor = " << fmt(c.residual_factor) << "\n"
      << "samples_per_step = " << c.samples_per_step << "\n\n";
  out << "[output]\n"
      << "directory = " << c.directory << "\n"
      << "save_stride = " << c.save_stride << "\n";
  return out.str();
}

std::pair<int, int> parse_ladder(const std::string& s) {
  const size_t dots = s.find("..");
  if (dots == std::string::npos)
    throw ParseError("ladder '" + s + "' must look like lo..hi");
  int lo = 0, hi = 0;
  try {
    size_t used = 0;
    lo = std::stoi(trim(s.substr(0, dots)), &used);
    if (used != trim(s.substr(0, dots)).size()) throw std::invalid_argument("");
    hi = std::stoi(trim(s.substr(dots + 2)), &used);
    if (used != trim(s.substr(dots + 2)).size()) throw std::invalid_argument("");
  } catch (const std::exception&) {
    throw ParseError("ladder '" + s + "' must contain two integers");
  }
  if (lo < 1 || hi < lo || hi > 24)
    throw ParseError("ladder bounds must satisfy 1 <= lo <= hi <= 24");
  return {lo, hi};
}

namespace {

SpaceTimeFn make_source(const DataPreset& p, int dim) {
  const double amp = p.amp, slope = p.slope, freq = p.freq;
  if (p.name == "const")
    return [amp](double, double, double) { return amp; };
  if (p.name == "cosine") {
    if (dim == 2)
      return [amp](double x, double y, double) {
        return amp * std::cos(M_PI * x) * std::cos(M_PI * y);
      };
    return [amp](double x, double, double) { return amp * std::cos(M_PI * x); };
  }
  if (p.name == "affine")
    return [amp, slope](double x, double, double) { return amp + slope * x; };
  return [amp, freq](double, double, double t) {
    return amp * std::sin(2.0 * M_PI * freq * t);
  };
}

Eigen::VectorXd eval_at_nodes(const SpaceTimeFn& fn, const SpatialMesh& m) {
  Eigen::VectorXd out(m.node_count());
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    const double y = (m.dim == 2) ? m.ys(i) : 0.0;
    out(i) = fn(m.xs(i), y, 0.0);
  }
  return out;
}

}  // namespace

ProblemSpec build_problem(const ScenarioConfig& c) {
  ProblemSpec p;
  std::shared_ptr<const SpatialMesh> mesh;
  if (c.dimension == 1)
    mesh = std::make_shared<const SpatialMesh>(make_mesh_1d(c.nodes, c.extent));
  else
    mesh = std::make_shared<const SpatialMesh>(
        make_mesh_2d(c.nodes, c.nodes_y, c.extent, c.extent_y));
  p.mesh = mesh;

  if (c.kernel_name == "custom-table") {
    std::ifstream in(c.kernel_table_file);
    if (!in) throw DataError("cannot open kernel table file '" + c.kernel_table_file + "'");
    std::vector<double> vals;
    double v;
    while (in >> v) vals.push_back(v);
    Eigen::VectorXd samples(static_cast<Eigen::Index>(vals.size()));
    for (size_t i = 0; i < vals.size(); ++i) samples(static_cast<Eigen::Index>(i)) = vals[i];
    p.kernel = build_kernel_from_samples(samples, mesh);
  } else {
    KernelFn J;
    if (c.kernel_name == "zero") {
      J = [](double, double) { return 0.0; };
    } else if (c.kernel_name == "constant") {
      const double val = c.kernel_value;
      J = [val](double, double) { return val; };
    } else {
      const double sig = c.kernel_width;
      if (c.dimension == 2) {
        const double norm = 1.0 / (2.0 * M_PI * sig * sig);
        J = [norm, sig](double dx, double dy) {
          return norm * std::exp(-(dx * dx + dy * dy) / (2.0 * sig * sig));
        };
      } else {
        const double norm = 1.0 / (sig * std::sqrt(2.0 * M_PI));
        J = [norm, sig](double dx, double) {
          return norm * std::exp(-dx * dx / (2.0 * sig * sig));
        };
      }
    }
    p.kernel = build_kernel(J, mesh);
  }
  p.kernel.strategy =
      (c.kernel_strategy == "direct") ? ConvStrategy::direct : ConvStrategy::fast;

  p.nonlin = (c.beta_name == "piecewise")
                 ? deadzone_nonlinearity(c.beta_knee, c.beta_slope, c.pi_slope)
                 : cubic_nonlinearity(c.beta_scale, c.pi_slope);
  p.nonlin.pi_lipschitz = c.pi_lipschitz;

  p.f = make_source(c.f, c.dimension);
  p.g = make_source(c.g, c.dimension);
  p.theta0 = eval_at_nodes(make_source(c.theta0, c.dimension), *mesh);
  p.phi0 = eval_at_nodes(make_source(c.phi0, c.dimension), *mesh);
  p.v0 = eval_at_nodes(make_source(c.v0, c.dimension), *mesh);

  p.T = c.T;
  p.theta_min = c.theta_min;
  return p;
}

StepperOptions stepper_options(const ScenarioConfig& c) {
  StepperOptions o;
  o.fp_tol = c.fp_tol;
  o.fp_max_iter = c.fp_max_iter;
  o.elliptic_tol = c.elliptic_tol;
  o.elliptic_max_iter = c.elliptic_max_iter;
  o.scalar_tol = c.scalar_tol;
  o.theta_min = c.theta_min;
  o.residual_factor = c.residual_factor;
  o.samples_per_step = c.samples_per_step;
  return o;
}

}  // namespace nlpf

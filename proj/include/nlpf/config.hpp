#pragma once

// Scenario configuration: sectioned key = value text files, one scenario per
// file. Every key has a default; parse_config(serialize_config(c)) returns c
// exactly. Numeric values serialize with 17 significant digits.

#include <string>
#include <utility>

#include "nlpf/problem.hpp"
#include "nlpf/stepper.hpp"

namespace nlpf {

// Analytic data preset: name in {const, cosine, affine, sine_time}, the last
// valid only for the time-dependent sources f and g.
//   const     value = amp
//   cosine    amp * cos(pi x)            (times cos(pi y) in 2d)
//   affine    amp + slope * x
//   sine_time amp * sin(2 pi freq t)
struct DataPreset {
  std::string name = "const";
  double amp = 0.0;
  double slope = 0.0;
  double freq = 1.0;

  bool operator==(const DataPreset&) const = default;
};

struct ScenarioConfig {
  // [mesh]
  int dimension = 1;
  int nodes = 128;       // x axis
  int nodes_y = 128;
  double extent = 1.0;   // x axis
  double extent_y = 1.0;

  // [kernel]  name in {zero, constant, gaussian, custom-table}
  std::string kernel_name = "gaussian";
  double kernel_width = 0.1;
  double kernel_value = 1.0;       // constant kernel height
  std::string kernel_table_file;   // custom-table sample file
  std::string kernel_strategy = "fast";  // or "direct"

  // [nonlinearity]  beta in {cubic, piecewise}
  std::string beta_name = "cubic";
  double beta_scale = 1.0;
  double beta_knee = 1.0;   // piecewise: flat inside [-knee, knee]
  double beta_slope = 1.0;  // piecewise: slope outside
  double pi_slope = -1.0;
  double pi_lipschitz = 1.0;

  // [data]
  DataPreset f{"const", 0.0, 0.0, 1.0};
  DataPreset g{"const", -1.0, 0.0, 1.0};
  DataPreset theta0{"const", 1.0, 0.0, 1.0};
  DataPreset phi0{"cosine", 0.5, 0.0, 1.0};
  DataPreset v0{"const", 0.0, 0.0, 1.0};

  // [time]
  double T = 1.0;
  int N = 64;
  std::string ladder;  // "lo..hi" exponent range, empty = none

  // [solver]
  double fp_tol = 1e-10;
  int fp_max_iter = 200;
  double elliptic_tol = 1e-10;
  int elliptic_max_iter = 100;
  double scalar_tol = 1e-12;
  double theta_min = 1e-8;
  double residual_factor = 100.0;
  int samples_per_step = 64;

  // [output]
  std::string directory = "out";
  int save_stride = 1;

  bool operator==(const ScenarioConfig&) const = default;
};

// Throws ParseError (with 1-based line number) on malformed lines, bad
// numbers, or out-of-range values; UnknownKey names the offending key.
ScenarioConfig parse_config(const std::string& text);

std::string serialize_config(const ScenarioConfig& c);

ScenarioConfig default_config();

// "5..10" -> {5, 10}. Throws ParseError.
std::pair<int, int> parse_ladder(const std::string& s);

// Materializes mesh, kernel, nonlinearity, and data callables. Kernel table
// files are resolved relative to the working directory.
ProblemSpec build_problem(const ScenarioConfig& c);

StepperOptions stepper_options(const ScenarioConfig& c);

}  // namespace nlpf

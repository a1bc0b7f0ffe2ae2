// Batch driver: scenario in, CSVs and PASS/FAIL lines out.
//
// Exit codes: 0 success, 2 configuration or validation failure, 3 step-size
// or solver failure, 4 identity-check failure. No other codes are emitted.

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "nlpf/config.hpp"
#include "nlpf/csv.hpp"
#include "nlpf/diagnostics.hpp"
#include "nlpf/errors.hpp"
#include "nlpf/norms.hpp"
#include "nlpf/rate.hpp"
#include "nlpf/stepper.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitSolver = 3;
constexpr int kExitCheck = 4;

struct Options {
  std::string config_path;
  std::string out_dir;
  std::string ladder;
  long seed = 1;
  bool find_h = false;
};

nlpf::ScenarioConfig load_config(const Options& opt) {
  nlpf::ScenarioConfig cfg;
  if (!opt.config_path.empty()) {
    std::ifstream in(opt.config_path);
    if (!in) throw nlpf::DataError("cannot open config '" + opt.config_path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    cfg = nlpf::parse_config(buf.str());
  }
  if (!opt.out_dir.empty()) cfg.directory = opt.out_dir;
  if (!opt.ladder.empty()) cfg.ladder = opt.ladder;
  return cfg;
}

// Returns false when the problem fails admissibility; prints the violations.
bool gate_validation(const nlpf::ProblemSpec& p) {
  const auto rep = nlpf::validate_problem(p);
  for (const auto& v : rep.violations) std::cerr << "validation: " << v << "\n";
  return rep.ok();
}

bool is_solver_error(const nlpf::Error& e) {
  return dynamic_cast<const nlpf::StepTooLarge*>(&e) ||
         dynamic_cast<const nlpf::NegativityLoss*>(&e) ||
         dynamic_cast<const nlpf::NoConvergence*>(&e) ||
         dynamic_cast<const nlpf::BracketFailure*>(&e);
}

bool step_count_admissible(const nlpf::ProblemSpec& p, int N,
                           const nlpf::StepperOptions& opts) {
  try {
    nlpf::run(p, N, opts);
    return true;
  } catch (const nlpf::Error&) {
    return false;
  }
}

// Smallest admissible step count near the doubling boundary; -1 if none
// found up to the cap. Bisection assumes failure below, success above.
int find_min_admissible_steps(const nlpf::ProblemSpec& p, int start,
                              const nlpf::StepperOptions& opts) {
  constexpr int kCap = 1 << 22;
  int lo = 0, hi = -1;
  if (step_count_admissible(p, start, opts)) {
    hi = start;
    int probe = start / 2;
    while (probe >= 1 && step_count_admissible(p, probe, opts)) {
      hi = probe;
      probe /= 2;
    }
    lo = probe;  // 0 means every probed count worked down to N = 1
  } else {
    lo = start;
    int probe = start * 2;
    while (probe <= kCap && !step_count_admissible(p, probe, opts)) {
      lo = probe;
      probe *= 2;
    }
    if (probe > kCap) return -1;
    hi = probe;
  }
  while (hi - lo > 1) {
    const int mid = lo + (hi - lo) / 2;
    if (mid == 0) break;
    if (step_count_admissible(p, mid, opts)) hi = mid; else lo = mid;
  }
  return hi;
}

void report_find_h(const nlpf::ProblemSpec& p, int start,
                   const nlpf::StepperOptions& opts) {
  const int nmin = find_min_admissible_steps(p, start, opts);
  if (nmin < 0) {
    std::cout << "find-h: no admissible step count up to 2^22\n";
    return;
  }
  std::cout << "find-h: largest admissible h = " << nlpf::fmt_g17(p.T / nmin)
            << " (N = " << nmin << ")\n";
}

int cmd_run(const Options& opt) {
  const auto cfg = load_config(opt);
  const auto problem = nlpf::build_problem(cfg);
  if (!gate_validation(problem)) return kExitValidation;
  const auto opts = nlpf::stepper_options(cfg);

  nlpf::DiscreteTrajectory traj;
  try {
    traj = nlpf::run(problem, cfg.N, opts);
  } catch (const nlpf::Error& e) {
    if (!is_solver_error(e)) throw;
    std::cerr << "run: " << e.what() << "\n";
    if (opt.find_h) report_find_h(problem, cfg.N, opts);
    return kExitSolver;
  }

  std::filesystem::create_directories(cfg.directory);
  nlpf::write_trajectory_csv(cfg.directory + "/trajectory.csv", traj,
                             cfg.save_stride);
  const nlpf::RieszMap riesz(problem.mesh);
  nlpf::write_estimates_csv(cfg.directory + "/estimates.csv",
                            nlpf::monitor(traj, problem.nonlin, riesz));

  double max_q = 0.0;
  int max_iters = 0;
  for (const auto& st : traj.stats) {
    max_iters = std::max(max_iters, st.iterations);
    for (double q : st.ratios) max_q = std::max(max_q, q);
  }
  std::cout << "run: " << cfg.N << " steps, h = " << nlpf::fmt_g17(traj.grid.h())
            << ", max fixed-point iterations " << max_iters
            << ", max contraction ratio " << nlpf::fmt_g17(max_q) << "\n"
            << "run: wrote " << cfg.directory << "/trajectory.csv and "
            << cfg.directory << "/estimates.csv\n";
  return 0;
}

int cmd_rates(const Options& opt) {
  auto cfg = load_config(opt);
  if (cfg.ladder.empty()) cfg.ladder = "5..10";
  const auto [lo, hi] = nlpf::parse_ladder(cfg.ladder);
  const auto problem = nlpf::build_problem(cfg);
  if (!gate_validation(problem)) return kExitValidation;
  const auto opts = nlpf::stepper_options(cfg);

  nlpf::RateReport rep;
  try {
    rep = nlpf::run_ladder(problem, lo, hi, opts);
  } catch (const nlpf::Error& e) {
    if (!is_solver_error(e)) throw;
    std::cerr << "rates: " << e.what() << "\n";
    if (opt.find_h) report_find_h(problem, cfg.N, opts);
    return kExitSolver;
  }

  std::filesystem::create_directories(cfg.directory);
  nlpf::write_rates_csv(cfg.directory + "/rates.csv", rep);
  for (const auto& r : rep.rows)
    std::cout << "rates: h = " << nlpf::fmt_g17(r.h)
              << "  E = " << nlpf::fmt_g17(r.E_total)
              << "  (E_u " << nlpf::fmt_g17(r.E_u) << ", E_phi "
              << nlpf::fmt_g17(r.E_phi) << ", E_v " << nlpf::fmt_g17(r.E_v)
              << ")\n";
  std::cout << "rates: p = " << nlpf::fmt_g17(rep.p)
            << ", M = " << nlpf::fmt_g17(rep.M)
            << ", envelope = " << nlpf::fmt_g17(rep.envelope)
            << ", lower-half envelope ratio = "
            << nlpf::fmt_g17(rep.lower_half_envelope_ratio) << "\n"
            << "rates: wrote " << cfg.directory << "/rates.csv\n";
  return 0;
}

int cmd_check(const Options& opt) {
  const auto cfg = load_config(opt);
  const auto problem = nlpf::build_problem(cfg);
  if (!gate_validation(problem)) return kExitValidation;
  const auto opts = nlpf::stepper_options(cfg);

  nlpf::DiscreteTrajectory traj;
  try {
    traj = nlpf::run(problem, cfg.N, opts);
  } catch (const nlpf::Error& e) {
    if (!is_solver_error(e)) throw;
    std::cerr << "check: " << e.what() << "\n";
    if (opt.find_h) report_find_h(problem, cfg.N, opts);
    return kExitSolver;
  }

  const auto op = nlpf::assemble_robin(problem.mesh);
  const nlpf::RieszMap riesz(problem.mesh);
  auto results = nlpf::check_identities(traj, problem.nonlin, op, riesz);

  // Seeded random-field probes: trace-form norm equivalence and the two
  // convolution routes (transform vs direct sum, plus self-adjointness).
  {
    const auto& m = *problem.mesh;
    std::mt19937 rng(static_cast<unsigned>(opt.seed));
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    auto draw = [&]() {
      Eigen::VectorXd w(m.node_count());
      for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = dist(rng);
      return w;
    };

    double equiv_c = 1.0;
    double conv_gap = 0.0, adj_gap = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      const Eigen::VectorXd w = draw();
      const double h1_sq = std::pow(nlpf::h1_norm(m, w), 2);
      Eigen::VectorXd wb(m.boundary_count());
      for (Eigen::Index b = 0; b < wb.size(); ++b)
        wb(b) = w(m.boundary[static_cast<size_t>(b)]);
      const double trace_sq = nlpf::grad_l2_sq(m, w) +
                              std::pow(nlpf::boundary_l2_norm(m, wb), 2);
      equiv_c = std::max({equiv_c, h1_sq / trace_sq, trace_sq / h1_sq});

      const Eigen::VectorXd a = draw();
      const Eigen::VectorXd fast = nlpf::convolve(problem.kernel, a);
      const Eigen::VectorXd direct = nlpf::convolve_direct(problem.kernel, a);
      const double scale = std::max(1e-300, direct.cwiseAbs().maxCoeff());
      conv_gap = std::max(conv_gap, (fast - direct).cwiseAbs().maxCoeff() / scale);

      const double lhs = nlpf::convolve_direct(problem.kernel, w)
                             .dot(m.quad_w.cwiseProduct(a));
      const double rhs = nlpf::convolve_direct(problem.kernel, a)
                             .dot(m.quad_w.cwiseProduct(w));
      adj_gap = std::max(adj_gap, std::abs(lhs - rhs) /
                                      std::max({std::abs(lhs), std::abs(rhs), 1.0}));
    }
    results.push_back({"norm equivalence constant", equiv_c < 100.0, equiv_c,
                       100.0, "H1 vs gradient-plus-trace, 100 random fields"});
    results.push_back({"convolution route agreement", conv_gap <= 1e-12, conv_gap,
                       1e-12, "transform vs direct sum, 100 random fields"});
    results.push_back({"convolution self-adjointness", adj_gap <= 1e-12, adj_gap,
                       1e-12, "quadrature pairing, 100 random fields"});
  }

  int failures = 0;
  for (const auto& r : results) {
    if (!r.passed) ++failures;
    std::cout << (r.passed ? "PASS  " : "FAIL  ") << r.name
              << "  (value = " << nlpf::fmt_g17(r.value)
              << ", bound = " << nlpf::fmt_g17(r.threshold) << ")\n";
  }
  std::cout << "check: " << (results.size() - failures) << "/" << results.size()
            << " checks passed\n";
  return failures == 0 ? 0 : kExitCheck;
}

int cmd_find_h(const Options& opt) {
  const auto cfg = load_config(opt);
  const auto problem = nlpf::build_problem(cfg);
  if (!gate_validation(problem)) return kExitValidation;
  const auto opts = nlpf::stepper_options(cfg);
  const int nmin = find_min_admissible_steps(problem, cfg.N, opts);
  if (nmin < 0) {
    std::cout << "find-h: no admissible step count up to 2^22\n";
    return kExitSolver;
  }
  std::cout << "find-h: largest admissible h = " << nlpf::fmt_g17(problem.T / nmin)
            << " (N = " << nmin << ")\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nonlocal phase-field scheme driver"};
  app.require_subcommand(1);

  Options opt;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config_path, "scenario file (defaults apply if omitted)");
    sub->add_option("--out", opt.out_dir, "output directory override");
    sub->add_option("--seed", opt.seed, "seed for randomized probes");
  };

  auto* c_run = app.add_subcommand("run", "integrate one trajectory and write CSVs");
  add_common(c_run);
  c_run->add_flag("--find-h", opt.find_h, "on step failure, search the largest admissible h");

  auto* c_rates = app.add_subcommand("rates", "pairwise Cauchy ladder and rate fit");
  add_common(c_rates);
  c_rates->add_option("--ladder", opt.ladder, "exponent range lo..hi, h = T/2^k");
  c_rates->add_flag("--find-h", opt.find_h, "on step failure, search the largest admissible h");

  auto* c_check = app.add_subcommand("check", "run one trajectory and assert the discrete identities");
  add_common(c_check);
  c_check->add_flag("--find-h", opt.find_h, "on step failure, search the largest admissible h");

  auto* c_findh = app.add_subcommand("find-h", "largest admissible step by doubling and bisection");
  add_common(c_findh);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (c_run->parsed()) return cmd_run(opt);
    if (c_rates->parsed()) return cmd_rates(opt);
    if (c_check->parsed()) return cmd_check(opt);
    if (c_findh->parsed()) return cmd_find_h(opt);
  } catch (const nlpf::StepTooLarge& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSolver;
  } catch (const nlpf::NegativityLoss& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSolver;
  } catch (const nlpf::NoConvergence& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSolver;
  } catch (const nlpf::BracketFailure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSolver;
  } catch (const nlpf::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return 0;
}

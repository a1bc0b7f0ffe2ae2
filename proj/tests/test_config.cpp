// Scenario text format: parsing, serialization round trips, ladder ranges,
// and materialization into a runnable problem.

#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <random>
#include <string>

#include "helpers.hpp"
#include "nlpf/config.hpp"
#include "nlpf/errors.hpp"

using namespace nlpf;
using testutil::contains;
using testutil::message_of;

TEST_CASE("parsing: defaults, sections, comments, whitespace") {
  CHECK(parse_config("") == default_config());
  CHECK(parse_config("\n  \n# only a comment\n; and another\n") ==
        default_config());

  const std::string text =
      "# scenario header comment\n"
      "[mesh]\n"
      "nodes = 65   ; trailing comment\n"
      "  extent=2.0\n"
      "\n"
      "[time]\n"
      "T = 0.5\n"
      "N = 32\n"
      "ladder = 3..6\n"
      "[nonlinearity]\n"
      "pi_slope = -0.25\n";
  const ScenarioConfig c = parse_config(text);
  CHECK(c.nodes == 65);
  CHECK(c.extent == 2.0);
  CHECK(c.T == 0.5);
  CHECK(c.N == 32);
  CHECK(c.ladder == "3..6");
  CHECK(c.pi_slope == -0.25);
  // pi_lipschitz follows the slope magnitude unless set explicitly
  CHECK(c.pi_lipschitz == 0.25);
  const ScenarioConfig c2 =
      parse_config("[nonlinearity]\npi_slope = -0.25\npi_lipschitz = 3\n");
  CHECK(c2.pi_lipschitz == 3.0);
  // untouched sections keep their defaults
  CHECK(c.kernel_name == default_config().kernel_name);
  CHECK(c.f == default_config().f);
}

TEST_CASE("parsing: every malformed line is reported with its number") {
  const std::string m1 = message_of<ParseError>(
      [] { (void)parse_config("[time]\nN = 0\n"); });
  CHECK(contains(m1, "line 2"));
  CHECK(contains(m1, "N must be >= 1"));

  const std::string m2 = message_of<ParseError>(
      [] { (void)parse_config("[mesh]\n\nnodes = many\n"); });
  CHECK(contains(m2, "line 3"));
  CHECK(contains(m2, "expects an integer"));

  const std::string m3 = message_of<UnknownKey>(
      [] { (void)parse_config("[mesh]\nfoo = 1\n"); });
  CHECK(m3 == "line 2: unknown key 'foo' in section [mesh]");

  const std::string m4 = message_of<ParseError>(
      [] { (void)parse_config("[stuff]\n"); });
  CHECK(contains(m4, "unknown section [stuff]"));

  const std::string m5 = message_of<ParseError>(
      [] { (void)parse_config("nodes = 5\n"); });
  CHECK(contains(m5, "outside any section"));

  CHECK_THROWS_AS((void)parse_config("[mesh\n"), ParseError);
  CHECK_THROWS_AS((void)parse_config("[mesh]\njust words\n"), ParseError);
  CHECK_THROWS_AS((void)parse_config("[time]\nT = -1\n"), ParseError);
  CHECK_THROWS_AS((void)parse_config("[solver]\nsamples_per_step = 4\n"),
                  ParseError);
  CHECK_THROWS_AS((void)parse_config("[data]\ntheta0 = sine_time\n"),
                  ParseError);
}

TEST_CASE("serialization round-trips randomized configurations exactly") {
  CHECK(parse_config(serialize_config(default_config())) == default_config());

  std::mt19937 rng(99);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  auto pick = [&](std::initializer_list<const char*> xs) {
    auto it = xs.begin();
    std::advance(it, static_cast<long>(unif(rng) * static_cast<double>(xs.size())) %
                         static_cast<long>(xs.size()));
    return std::string(*it);
  };
  auto rnd = [&](double lo, double hi) {
    // a full-precision mantissa, so the 17-digit round trip is stressed
    return lo + (hi - lo) * unif(rng);
  };

  for (int trial = 0; trial < 50; ++trial) {
    ScenarioConfig c;
    c.dimension = (unif(rng) < 0.3) ? 2 : 1;
    c.nodes = 3 + static_cast<int>(unif(rng) * 200);
    c.nodes_y = 3 + static_cast<int>(unif(rng) * 50);
    c.extent = rnd(0.1, 5.0);
    c.extent_y = rnd(0.1, 5.0);
    c.kernel_name = pick({"zero", "constant", "gaussian", "custom-table"});
    if (c.kernel_name == "custom-table") c.kernel_table_file = "lattice.txt";
    c.kernel_width = rnd(0.01, 1.0);
    c.kernel_value = rnd(-2.0, 2.0);
    c.kernel_strategy = pick({"fast", "direct"});
    c.beta_name = pick({"cubic", "piecewise"});
    c.beta_scale = rnd(0.0, 3.0);
    c.beta_knee = rnd(0.0, 2.0);
    c.beta_slope = rnd(0.0, 2.0);
    c.pi_slope = rnd(-2.0, 2.0);
    c.pi_lipschitz = std::abs(c.pi_slope) + rnd(0.0, 1.0);
    for (DataPreset* p : {&c.f, &c.g}) {
      p->name = pick({"const", "cosine", "affine", "sine_time"});
      p->amp = rnd(-1.0, 1.0);
      p->slope = rnd(-1.0, 1.0);
      p->freq = rnd(0.5, 4.0);
    }
    for (DataPreset* p : {&c.theta0, &c.phi0, &c.v0}) {
      p->name = pick({"const", "cosine", "affine"});
      p->amp = rnd(-1.0, 1.0);
      p->slope = rnd(-1.0, 1.0);
      p->freq = rnd(0.5, 4.0);
    }
    c.T = rnd(0.1, 4.0);
    c.N = 1 + static_cast<int>(unif(rng) * 500);
    c.ladder = (unif(rng) < 0.5) ? "" : "2..6";
    c.fp_tol = rnd(1e-12, 1e-8);
    c.fp_max_iter = 1 + static_cast<int>(unif(rng) * 300);
    c.elliptic_tol = rnd(1e-12, 1e-8);
    c.elliptic_max_iter = 1 + static_cast<int>(unif(rng) * 200);
    c.scalar_tol = rnd(1e-14, 1e-10);
    c.theta_min = rnd(0.0, 1e-6);
    c.residual_factor = rnd(1.0, 1000.0);
    c.samples_per_step = 8 + static_cast<int>(unif(rng) * 100);
    c.directory = pick({"out", "results", "scratch"});
    c.save_stride = 1 + static_cast<int>(unif(rng) * 10);

    const ScenarioConfig back = parse_config(serialize_config(c));
    CHECK(back == c);
  }
}

TEST_CASE("ladder ranges: happy path and rejections") {
  CHECK(parse_ladder("5..10") == std::pair<int, int>{5, 10});
  CHECK(parse_ladder(" 2 .. 4 ") == std::pair<int, int>{2, 4});
  CHECK(parse_ladder("7..7") == std::pair<int, int>{7, 7});

  CHECK_THROWS_AS((void)parse_ladder("5"), ParseError);
  CHECK_THROWS_AS((void)parse_ladder("abc..5"), ParseError);
  CHECK_THROWS_AS((void)parse_ladder("5..x"), ParseError);
  CHECK_THROWS_AS((void)parse_ladder("10..5"), ParseError);
  CHECK_THROWS_AS((void)parse_ladder("0..3"), ParseError);
  CHECK_THROWS_AS((void)parse_ladder("3..25"), ParseError);
}

TEST_CASE("materialization: defaults validate, data knobs reach the problem") {
  const ProblemSpec p = build_problem(default_config());
  CHECK(p.mesh->node_count() == 128);
  CHECK(validate_problem(p).ok());

  // a positive boundary amplitude must surface as the named violation
  ScenarioConfig bad = default_config();
  bad.g.amp = 1.0;
  const auto rep = validate_problem(build_problem(bad));
  REQUIRE(!rep.ok());
  bool found = false;
  for (const auto& v : rep.violations)
    found = found || contains(v, "boundary sign violation A4");
  CHECK(found);

  ScenarioConfig zc = default_config();
  zc.kernel_name = "zero";
  CHECK(build_problem(zc).kernel.S == 0.0);

  ScenarioConfig cc = default_config();
  cc.kernel_name = "constant";
  cc.kernel_value = 2.0;
  cc.nodes = 33;
  const ProblemSpec pc = build_problem(cc);
  CHECK(pc.kernel.S == doctest::Approx(2.0).epsilon(1e-12));

  ScenarioConfig st = default_config();
  st.f = DataPreset{"sine_time", 0.3, 0.0, 2.0};
  const ProblemSpec ps = build_problem(st);
  CHECK(std::abs(ps.f(0.4, 0.0, 0.125) - 0.3) <= 1e-15);
  CHECK(std::abs(ps.f(0.4, 0.0, 0.0625) - 0.3 * std::sin(M_PI / 4.0)) <= 1e-15);

  ScenarioConfig two = default_config();
  two.dimension = 2;
  two.nodes = 9;
  two.nodes_y = 7;
  const ProblemSpec p2 = build_problem(two);
  CHECK(p2.mesh->dim == 2);
  CHECK(p2.mesh->node_count() == 63);
}

TEST_CASE("materialization: kernel tables come from files") {
  ScenarioConfig c = default_config();
  c.dimension = 1;
  c.nodes = 9;
  c.kernel_name = "custom-table";
  c.kernel_table_file = "/tmp/nlpf_test_lattice.txt";

  {
    std::ofstream out(c.kernel_table_file);
    // 17 lattice values (2 * 9 - 1), even around the center
    for (int k = -8; k <= 8; ++k) out << 1.0 / (1.0 + k * k) << "\n";
  }
  const ProblemSpec p = build_problem(c);
  CHECK(p.kernel.S > 0.0);
  CHECK(p.kernel.samples.size() == 17);
  std::remove(c.kernel_table_file.c_str());

  c.kernel_table_file = "/tmp/nlpf_no_such_file.txt";
  const std::string msg =
      message_of<DataError>([&] { (void)build_problem(c); });
  CHECK(contains(msg, "cannot open kernel table file"));
}

TEST_CASE("solver options copy through from the scenario") {
  ScenarioConfig c = default_config();
  c.fp_tol = 2e-9;
  c.fp_max_iter = 77;
  c.elliptic_tol = 3e-9;
  c.elliptic_max_iter = 55;
  c.scalar_tol = 4e-13;
  c.theta_min = 5e-7;
  c.residual_factor = 42.0;
  c.samples_per_step = 16;
  const StepperOptions o = stepper_options(c);
  CHECK(o.fp_tol == 2e-9);
  CHECK(o.fp_max_iter == 77);
  CHECK(o.elliptic_tol == 3e-9);
  CHECK(o.elliptic_max_iter == 55);
  CHECK(o.scalar_tol == 4e-13);
  CHECK(o.theta_min == 5e-7);
  CHECK(o.residual_factor == 42.0);
  CHECK(o.samples_per_step == 16);
}

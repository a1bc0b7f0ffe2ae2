// Python face of the solver: scenario text in, numpy arrays and plain dicts
// out. The scenario grammar is the same sectioned key = value format the
// command-line driver reads, so a config file and a Python string are
// interchangeable.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "nlpf/config.hpp"
#include "nlpf/diagnostics.hpp"
#include "nlpf/elliptic.hpp"
#include "nlpf/errors.hpp"
#include "nlpf/kernel.hpp"
#include "nlpf/rate.hpp"
#include "nlpf/stepper.hpp"

namespace py = pybind11;
using namespace nlpf;

namespace {

ScenarioConfig config_from(const std::string& text) {
  return parse_config(text);
}

py::dict run_scenario(const std::string& text, int steps) {
  const ScenarioConfig cfg = config_from(text);
  const ProblemSpec p = build_problem(cfg);
  const int N = steps > 0 ? steps : cfg.N;
  const DiscreteTrajectory traj = run(p, N, stepper_options(cfg));

  const Eigen::Index nodes = p.mesh->node_count();
  const Eigen::Index levels = static_cast<Eigen::Index>(traj.states.size());
  Eigen::MatrixXd u(levels, nodes), theta(levels, nodes), phi(levels, nodes),
      v(levels, nodes), z(levels - 1, nodes);
  Eigen::VectorXd t(levels);
  for (Eigen::Index k = 0; k < levels; ++k) {
    const FieldState& s = traj.states[static_cast<size_t>(k)];
    t(k) = static_cast<double>(k) * traj.grid.h();
    u.row(k) = s.u.transpose();
    theta.row(k) = s.theta.transpose();
    phi.row(k) = s.phi.transpose();
    v.row(k) = s.v.transpose();
    if (k >= 1) z.row(k - 1) = s.z.transpose();
  }

  int max_iters = 0;
  double max_q = 0.0;
  for (const auto& st : traj.stats) {
    max_iters = std::max(max_iters, st.iterations);
    for (double q : st.ratios) max_q = std::max(max_q, q);
  }

  py::dict out;
  out["t"] = t;
  out["x"] = p.mesh->xs;
  if (p.mesh->dim == 2) out["y"] = p.mesh->ys;
  out["u"] = u;
  out["theta"] = theta;
  out["phi"] = phi;
  out["v"] = v;
  out["z"] = z;
  out["h"] = traj.grid.h();
  out["max_iterations"] = max_iters;
  out["max_contraction_ratio"] = max_q;
  return out;
}

py::list check_scenario(const std::string& text) {
  const ScenarioConfig cfg = config_from(text);
  const ProblemSpec p = build_problem(cfg);
  const DiscreteTrajectory traj = run(p, cfg.N, stepper_options(cfg));
  const RobinOperator op = assemble_robin(p.mesh);
  const RieszMap riesz(p.mesh);
  py::list out;
  for (const CheckResult& r : check_identities(traj, p.nonlin, op, riesz)) {
    py::dict d;
    d["name"] = r.name;
    d["passed"] = r.passed;
    d["value"] = r.value;
    d["threshold"] = r.threshold;
    d["detail"] = r.detail;
    out.append(d);
  }
  return out;
}

py::dict rates_scenario(const std::string& text, const std::string& ladder) {
  ScenarioConfig cfg = config_from(text);
  if (!ladder.empty()) cfg.ladder = ladder;
  if (cfg.ladder.empty()) cfg.ladder = "5..10";
  const auto [lo, hi] = parse_ladder(cfg.ladder);
  const RateReport rep =
      run_ladder(build_problem(cfg), lo, hi, stepper_options(cfg));

  const Eigen::Index n = static_cast<Eigen::Index>(rep.rows.size());
  Eigen::VectorXd h(n), tau(n), e_u(n), e_phi(n), e_v(n), e_total(n),
      f_gap(n), g_gap(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const RateRow& r = rep.rows[static_cast<size_t>(i)];
    h(i) = r.h;
    tau(i) = r.tau;
    e_u(i) = r.E_u;
    e_phi(i) = r.E_phi;
    e_v(i) = r.E_v;
    e_total(i) = r.E_total;
    f_gap(i) = r.f_gap;
    g_gap(i) = r.g_gap;
  }
  py::dict out;
  out["h"] = h;
  out["tau"] = tau;
  out["E_u"] = e_u;
  out["E_phi"] = e_phi;
  out["E_v"] = e_v;
  out["E_total"] = e_total;
  out["f_gap"] = f_gap;
  out["g_gap"] = g_gap;
  out["p"] = rep.p;
  out["M"] = rep.M;
  out["envelope"] = rep.envelope;
  out["row_envelopes"] = rep.row_envelopes;
  out["lower_half_envelope_ratio"] = rep.lower_half_envelope_ratio;
  out["ratios"] = rep.ratios;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "nonlocal phase-field scheme: scenario runs, identity checks, "
            "and step-refinement studies";

  py::register_exception_translator([](std::exception_ptr ep) {
    try {
      if (ep) std::rethrow_exception(ep);
    } catch (const ParseError& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    } catch (const UnknownKey& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    } catch (const DomainError& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    } catch (const MeshError& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    } catch (const KernelError& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    } catch (const ShapeError& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    } catch (const DataError& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    } catch (const RangeError& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    } catch (const GridError& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    }
    // solver breakdowns keep the default RuntimeError mapping
  });

  m.def("default_config_text", [] { return serialize_config(default_config()); },
        "Serialized form of the built-in default scenario.");

  m.def("canonicalize",
        [](const std::string& text) {
          return serialize_config(config_from(text));
        },
        py::arg("text"),
        "Parse scenario text and reserialize it in canonical form.");

  m.def("validate",
        [](const std::string& text) {
          return validate_problem(build_problem(config_from(text))).violations;
        },
        py::arg("text"),
        "Admissibility violations of the scenario; empty means accepted.");

  m.def("run", &run_scenario, py::arg("text"), py::arg("steps") = 0,
        "Integrate the scenario and return the trajectory as arrays keyed "
        "t, x, u, theta, phi, v, z plus solver statistics. A positive "
        "steps argument overrides the configured step count.");

  m.def("check", &check_scenario, py::arg("text"),
        "Run the scenario and evaluate the named discrete identities; "
        "returns one dict per check.");

  m.def("rates", &rates_scenario, py::arg("text"), py::arg("ladder") = "",
        "Step-refinement ladder: pairwise Cauchy gaps, fitted slope p, "
        "prefactor M, and envelope constants. The ladder argument "
        "overrides the scenario's own range.");

  m.def("convolve",
        [](const std::string& text, const Eigen::VectorXd& field) {
          const ProblemSpec p = build_problem(config_from(text));
          return convolve(p.kernel, field);
        },
        py::arg("text"), py::arg("field"),
        "Apply the scenario's interaction kernel to a nodal field.");

  m.def("dual_norm",
        [](const std::string& text, const Eigen::VectorXd& field) {
          const ProblemSpec p = build_problem(config_from(text));
          return RieszMap(p.mesh).dual_norm(field);
        },
        py::arg("text"), py::arg("field"),
        "Dual (H1-star) norm of a nodal field on the scenario's mesh.");
}

#include "nlpf/rate.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <map>
#include <numeric>

#include "nlpf/errors.hpp"
#include "nlpf/norms.hpp"

namespace nlpf {

std::vector<Eigen::VectorXd> one_star(const std::vector<Eigen::VectorXd>& samples,
                                      double dt, PiecewiseKind kind) {
  if (samples.empty()) throw GridError("running integral needs samples");
  if (!(dt > 0.0)) throw GridError("running integral needs a positive spacing");
  const Eigen::Index nn = samples.front().size();
  for (const auto& s : samples)
    if (s.size() != nn) throw ShapeError("samples differ in size");

  std::vector<Eigen::VectorXd> out(samples.size());
  out[0] = Eigen::VectorXd::Zero(nn);
  for (size_t j = 1; j < samples.size(); ++j) {
    if (kind == PiecewiseKind::constant)
      out[j] = out[j - 1] + dt * samples[j];
    else
      out[j] = out[j - 1] + 0.5 * dt * (samples[j - 1] + samples[j]);
  }
  return out;
}

namespace {

bool same_mesh(const SpatialMesh& a, const SpatialMesh& b) {
  return a.dim == b.dim && a.shape == b.shape &&
         std::abs(a.spacing[0] - b.spacing[0]) <= 1e-15 &&
         std::abs(a.spacing[1] - b.spacing[1]) <= 1e-15;
}

// Hat value of a stored field at fine index j of Nf, with exact integer
// level/fraction split: j/Nf in units of the trajectory's own step.
Eigen::VectorXd hat_at(const DiscreteTrajectory& tr, HatField f, long long j,
                       long long Nf) {
  const long long num = j * tr.grid.N;
  long long n = num / Nf;
  const long long rem = num % Nf;
  if (n >= tr.grid.N) { n = tr.grid.N; }
  auto pick = [&](long long k) -> const Eigen::VectorXd& {
    const auto& st = tr.states[static_cast<size_t>(k)];
    switch (f) {
      case HatField::theta: return st.theta;
      case HatField::phi: return st.phi;
      default: return st.v;
    }
  };
  if (rem == 0) return pick(n);
  const double lam = static_cast<double>(rem) / static_cast<double>(Nf);
  return (1.0 - lam) * pick(n) + lam * pick(n + 1);
}

// Bar level covering fine cell j (right endpoint convention): level index is
// ceil(j * N / Nf) computed in integers.
long long bar_index(const DiscreteTrajectory& tr, long long j, long long Nf) {
  return (j * tr.grid.N + Nf - 1) / Nf;
}

}  // namespace

RateRow cauchy_pair_from(const DiscreteTrajectory& a, const DiscreteTrajectory& b) {
  if (!a.mesh || !b.mesh || !same_mesh(*a.mesh, *b.mesh))
    throw GridError("trajectory pair must share a mesh");
  if (std::abs(a.grid.T - b.grid.T) > 1e-12 * std::max(1.0, a.grid.T))
    throw GridError("trajectory pair must share the horizon");
  const auto& m = *a.mesh;

  const long long Nf = std::lcm<long long>(a.grid.N, b.grid.N);
  if (Nf > 10'000'000) throw GridError("common refinement of the step grids is too large");
  const double dt = a.grid.T / static_cast<double>(Nf);

  RateRow row;
  row.h = a.grid.h();
  row.tau = b.grid.h();

  // E_u: running integral of the bar-field difference, then sup of H1.
  std::vector<Eigen::VectorXd> du(static_cast<size_t>(Nf) + 1);
  du[0] = Eigen::VectorXd::Zero(m.node_count());
  for (long long j = 1; j <= Nf; ++j)
    du[static_cast<size_t>(j)] =
        a.states[static_cast<size_t>(bar_index(a, j, Nf))].u -
        b.states[static_cast<size_t>(bar_index(b, j, Nf))].u;
  const auto cum = one_star(du, dt, PiecewiseKind::constant);
  for (const auto& c : cum) row.E_u = std::max(row.E_u, h1_norm(m, c));

  // E_phi, E_v: hat differences are piecewise linear on the fine grid, and
  // the L2 norm is convex along each cell, so fine-node sampling is exact.
  for (long long j = 0; j <= Nf; ++j) {
    row.E_phi = std::max(row.E_phi, l2_norm(m, hat_at(a, HatField::phi, j, Nf) -
                                                 hat_at(b, HatField::phi, j, Nf)));
    row.E_v = std::max(row.E_v, l2_norm(m, hat_at(a, HatField::v, j, Nf) -
                                             hat_at(b, HatField::v, j, Nf)));
  }
  row.E_total = row.E_u + row.E_phi + row.E_v;

  // Data discrepancies in L2(0,T; L2), exact on the fine grid.
  double fg = 0.0, gg = 0.0;
  for (long long j = 1; j <= Nf; ++j) {
    const auto& fa = a.data[static_cast<size_t>(bar_index(a, j, Nf)) - 1];
    const auto& fb = b.data[static_cast<size_t>(bar_index(b, j, Nf)) - 1];
    fg += dt * std::pow(l2_norm(m, fa.f - fb.f), 2);
    gg += dt * std::pow(boundary_l2_norm(m, fa.g - fb.g), 2);
  }
  row.f_gap = std::sqrt(fg);
  row.g_gap = std::sqrt(gg);
  return row;
}

RateRow cauchy_pair(const ProblemSpec& p, int N_coarse, int N_fine,
                    const StepperOptions& opts) {
  const DiscreteTrajectory a = run(p, N_coarse, opts);
  const DiscreteTrajectory b = run(p, N_fine, opts);
  return cauchy_pair_from(a, b);
}

FitResult fit_rate(const std::vector<std::pair<double, double>>& rows) {
  if (rows.size() < 3) throw DegenerateFit("rate fit needs at least 3 rows");
  double sx = 0, sy = 0;
  for (const auto& [h, E] : rows) {
    if (!(h > 0.0)) throw DegenerateFit("rate fit needs positive h");
    if (!(E > 0.0)) throw DegenerateFit("rate fit needs positive E; drop coinciding rows");
    sx += std::log(h);
    sy += std::log(E);
  }
  const double n = static_cast<double>(rows.size());
  const double mx = sx / n, my = sy / n;

  // centered sums: the uncentered form cancels catastrophically and can
  // leave a spurious positive denominator when every h coincides
  double den = 0, num = 0;
  bool distinct = false;
  for (const auto& [h, E] : rows) {
    if (h != rows.front().first) distinct = true;
    const double dx = std::log(h) - mx;
    den += dx * dx;
    num += dx * (std::log(E) - my);
  }
  if (!distinct || !(den > 0.0))
    throw DegenerateFit("rate fit needs at least two distinct h");

  FitResult fit;
  fit.p = num / den;
  fit.M = std::exp(my - fit.p * mx);

  std::vector<std::pair<double, double>> sorted(rows);
  std::sort(sorted.begin(), sorted.end(),
            [](const auto& l, const auto& r) { return l.first > r.first; });
  for (size_t i = 0; i + 1 < sorted.size(); ++i)
    fit.ratios.push_back(sorted[i].second / sorted[i + 1].second);
  return fit;
}

RateReport run_ladder(const ProblemSpec& p, int lo, int hi,
                      const StepperOptions& opts, bool reference_mode,
                      int reference_exp) {
  if (lo < 1 || hi < lo || hi > 24)
    throw GridError("ladder exponents must satisfy 1 <= lo <= hi <= 24");
  if (reference_mode && reference_exp <= hi)
    throw GridError("reference exponent must exceed the ladder top");

  std::vector<int> exps;
  for (int k = lo; k <= hi; ++k) exps.push_back(k);
  std::vector<int> need(exps);
  if (reference_mode)
    need.push_back(reference_exp);
  else
    need.push_back(hi + 1);  // pairwise rows reach down to tau = h/2

  // One trajectory per distinct step count, shared across rows.
  std::map<int, std::shared_future<DiscreteTrajectory>> runs;
  for (int k : need) {
    if (runs.count(k)) continue;
    runs.emplace(k, std::async(std::launch::async, [&p, &opts, k]() {
                   return run(p, 1 << k, opts);
                 }).share());
  }

  RateReport rep;
  rep.reference_mode = reference_mode;
  for (int k : exps) {
    const auto& coarse = runs.at(k).get();
    const auto& fine = runs.at(reference_mode ? reference_exp : k + 1).get();
    rep.rows.push_back(cauchy_pair_from(coarse, fine));
  }
  std::sort(rep.rows.begin(), rep.rows.end(),
            [](const RateRow& a, const RateRow& b) { return a.h > b.h; });

  std::vector<std::pair<double, double>> fit_rows;
  for (const auto& r : rep.rows) fit_rows.emplace_back(r.h, r.E_total);
  const FitResult fit = fit_rate(fit_rows);
  rep.p = fit.p;
  rep.M = fit.M;
  rep.ratios = fit.ratios;

  for (const auto& r : rep.rows)
    rep.row_envelopes.push_back(r.E_total / (std::sqrt(r.h) + std::sqrt(r.tau)));
  rep.envelope = *std::max_element(rep.row_envelopes.begin(), rep.row_envelopes.end());

  const size_t half = rep.row_envelopes.size() / 2;
  double emin = rep.row_envelopes[half], emax = rep.row_envelopes[half];
  for (size_t i = half; i < rep.row_envelopes.size(); ++i) {
    emin = std::min(emin, rep.row_envelopes[i]);
    emax = std::max(emax, rep.row_envelopes[i]);
  }
  rep.lower_half_envelope_ratio = emax / emin;
  return rep;
}

}  // namespace nlpf

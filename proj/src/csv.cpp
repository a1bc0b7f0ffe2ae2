#include "nlpf/csv.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "nlpf/errors.hpp"

namespace nlpf {

std::string fmt_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path + "'");
  return out;
}

}  // namespace

void write_trajectory_csv(const std::string& path, const DiscreteTrajectory& traj,
                          int stride) {
  if (stride < 1) throw DataError("save stride must be >= 1");
  auto out = open_out(path);
  const auto& m = *traj.mesh;
  const bool two_d = (m.dim == 2);

  out << (two_d ? "t,node,x,y,u,theta,phi,v,z\n" : "t,node,x,u,theta,phi,v,z\n");
  const int N = traj.grid.N;
  int k = 0;
  while (true) {
    const auto& st = traj.states[static_cast<size_t>(k)];
    const double t = k * traj.grid.h();
    for (Eigen::Index i = 0; i < m.node_count(); ++i) {
      out << fmt_g17(t) << ',' << i << ',' << fmt_g17(m.xs(i));
      if (two_d) out << ',' << fmt_g17(m.ys(i));
      out << ',' << fmt_g17(st.u(i)) << ',' << fmt_g17(st.theta(i)) << ','
          << fmt_g17(st.phi(i)) << ',' << fmt_g17(st.v(i)) << ','
          << (st.z.size() ? fmt_g17(st.z(i)) : "nan") << '\n';
    }
    if (k == N) break;
    k = std::min(k + stride, N);
  }
  if (!out) throw DataError("write failed for '" + path + "'");
}

void write_estimates_csv(const std::string& path,
                         const std::vector<EstimateRecord>& recs) {
  auto out = open_out(path);
  const auto& cols = estimate_columns();
  for (size_t i = 0; i < cols.size(); ++i)
    out << cols[i] << (i + 1 < cols.size() ? "," : "\n");
  for (const auto& r : recs) {
    out << r.step << ',' << fmt_g17(r.t) << ',' << fmt_g17(r.phi_l2_sq) << ','
        << fmt_g17(r.v_l2_sq) << ',' << fmt_g17(r.beta_potential_l1) << ','
        << fmt_g17(r.theta_l1) << ',' << fmt_g17(r.log_theta_l1) << ','
        << fmt_g17(r.cum_u_h1_sq) << ',' << fmt_g17(r.theta_l2_sq) << ','
        << fmt_g17(r.log_theta_h1_sq) << ',' << fmt_g17(r.theta_rate_dual_l2)
        << ',' << fmt_g17(r.u_cumsum_h2) << ',' << fmt_g17(r.phi_linf) << ','
        << fmt_g17(r.v_linf) << ',' << fmt_g17(r.beta_phi_linf) << ','
        << fmt_g17(r.z_l2l2) << '\n';
  }
  if (!out) throw DataError("write failed for '" + path + "'");
}

void write_rates_csv(const std::string& path, const RateReport& rep) {
  auto out = open_out(path);
  out << "h,tau,E_u,E_phi,E_v,E_total,f_gap,g_gap\n";
  for (const auto& r : rep.rows) {
    out << fmt_g17(r.h) << ',' << fmt_g17(r.tau) << ',' << fmt_g17(r.E_u) << ','
        << fmt_g17(r.E_phi) << ',' << fmt_g17(r.E_v) << ',' << fmt_g17(r.E_total)
        << ',' << fmt_g17(r.f_gap) << ',' << fmt_g17(r.g_gap) << '\n';
  }
  out << "# p = " << fmt_g17(rep.p) << ", M = " << fmt_g17(rep.M)
      << ", envelope = " << fmt_g17(rep.envelope) << '\n';
  if (!out) throw DataError("write failed for '" + path + "'");
}

}  // namespace nlpf

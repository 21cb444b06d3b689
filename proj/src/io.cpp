#include "qsearch/io.hpp"

#include "qsearch/tree.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

namespace qsearch {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double opt_value(const std::optional<double>& v) { return v ? *v : kNaN; }

}  // namespace

std::string format_g15(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", value);
  return buf;
}

void write_comment_header(std::ostream& out, const std::string& subcommand,
                          const std::vector<ConfigEntry>& config) {
  out << "# " << kToolName << ' ' << kToolVersion << ' ' << subcommand << '\n';
  for (const auto& [key, value] : config) out << "# " << key << '=' << value << '\n';
}

void write_trace_csv(std::ostream& out, const EvolutionTrace<double>& trace) {
  out << "t,re_amp,im_amp,prob\n";
  for (Index i = 0; i < trace.times.size(); ++i)
    out << format_g15(trace.times[i]) << ',' << format_g15(trace.amplitude[i].real()) << ','
        << format_g15(trace.amplitude[i].imag()) << ',' << format_g15(trace.probability[i])
        << '\n';
}

void write_sweep_csv(std::ostream& out, const GammaSweep& sweep) {
  out << "gamma,max_prob,t0,p0,efficiency\n";
  for (const SweepPoint& pt : sweep.points) {
    const double t0 = pt.peak ? pt.peak->time : kNaN;
    const double p0 = pt.peak ? pt.peak->probability : kNaN;
    out << format_g15(pt.gamma) << ',' << format_g15(pt.max_prob) << ',' << format_g15(t0) << ','
        << format_g15(p0) << ',' << format_g15(opt_value(pt.efficiency)) << '\n';
  }
}

void write_scaling_csv(std::ostream& out, const ScalingFit& fit) {
  out << "n,N,t0,p0,metric,local_slope\n";
  for (const ScalingPoint& pt : fit.points) {
    const double t0 = pt.peak ? pt.peak->time : kNaN;
    const double p0 = pt.peak ? pt.peak->probability : kNaN;
    out << pt.n << ',' << tree_size(pt.n) << ',' << format_g15(t0) << ',' << format_g15(p0)
        << ',' << format_g15(opt_value(pt.efficiency)) << ','
        << format_g15(opt_value(pt.local_slope)) << '\n';
  }
}

void write_classical_csv(std::ostream& out, const HittingTimes& times) {
  out << "k,t_k,weighted_t_k\n";
  for (int k = 1; k <= times.n; ++k)
    out << k << ',' << format_g15(times.per_level[static_cast<std::size_t>(k - 1)]) << ','
        << format_g15(times.weighted[static_cast<std::size_t>(k - 1)]) << '\n';
}

void write_centrality_csv(std::ostream& out, const CentralityTable& table) {
  out << "l,beta_pred,closeness_norm,kappa_hat,betweenness_norm\n";
  for (const CentralityRow& row : table.rows)
    out << row.level << ',' << format_g15(row.beta_pred) << ','
        << format_g15(row.closeness_norm) << ',' << format_g15(row.kappa) << ','
        << format_g15(row.betweenness_norm) << '\n';
}

}  // namespace qsearch

#include "ccare/report_io.h"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace ccare {
namespace {

std::string fixed8(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.8f", v);
  // Collapse "-0.00000000" so printed solutions match their sign-free zeros.
  if (std::string(buf) == "-0.00000000") return "0.00000000";
  return buf;
}

std::string sci(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6e", v);
  return buf;
}

std::string shift_label(const ShiftVector& rho) {
  std::string s;
  for (int i = 0; i < rho.size(); ++i) {
    if (i) s += ' ';
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", rho[i]);
    s += buf;
  }
  return s;
}

}  // namespace

std::string trace_csv(const SolveReport& rep) {
  std::ostringstream os;
  os << "sweep,delta,residual,mode,eig_min,eig_max,closed_loop_abscissa,"
        "monotone_up,monotone_down\n";
  for (const SweepRecord& r : rep.trace.records) {
    for (size_t i = 0; i < r.X.size(); ++i) {
      os << r.sweep << ',' << sci(r.delta) << ',' << sci(r.residual) << ','
         << (i + 1) << ',' << sci(r.eigvals[i].front()) << ','
         << sci(r.eigvals[i].back()) << ',' << sci(r.closed_loop_abscissa[i])
         << ',' << (r.monotone_up[i] ? 1 : 0) << ','
         << (r.monotone_down[i] ? 1 : 0) << '\n';
    }
  }
  return os.str();
}

std::string report_text(const SolveReport& rep) {
  std::ostringstream os;
  os << "variant: " << to_string(rep.variant) << '\n';
  os << "converged: " << (rep.converged ? "true" : "false") << '\n';
  os << "iterations: " << rep.iterations << '\n';
  os << "shifts:";
  for (double r : rep.shifts_used.values()) os << ' ' << fixed8(r);
  os << '\n';
  os << "final_residual: " << sci(rep.final_residual) << '\n';
  os << "monotone_direction: " << to_string(rep.monotone_direction) << '\n';
  if (!rep.annotation.empty()) os << "annotation: " << rep.annotation << '\n';
  for (const std::string& w : rep.warnings) os << "warning: " << w << '\n';
  for (size_t i = 0; i < rep.solution.size(); ++i) {
    os << "X[" << (i + 1) << "]:\n";
    const Matrix& x = rep.solution[i].mat();
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
      os << ' ';
      for (Eigen::Index c = 0; c < x.cols(); ++c) os << ' ' << fixed8(x(r, c));
      os << '\n';
    }
  }
  return os.str();
}

std::string ordering_csv(const CompareResult& cmp) {
  std::ostringstream os;
  os << "sweep,mode,relation\n";
  for (const PairComparison& c : cmp.comparisons) {
    os << c.sweep << ',' << (c.mode + 1) << ',' << to_string(c.order.relation)
       << '\n';
  }
  return os.str();
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream os;
  os << "rho,variant,iterations,residual,converged\n";
  for (const SweepRow& r : rows) {
    os << shift_label(r.shift) << ',' << to_string(r.variant) << ','
       << r.iterations << ',' << (r.error ? "nan" : sci(r.final_residual))
       << ',' << (r.error ? "error" : (r.converged ? "true" : "false"))
       << '\n';
  }
  return os.str();
}

void write_file_atomic(const std::filesystem::path& path,
                       const std::string& contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    }
    out << contents;
    if (!out.flush()) {
      throw std::runtime_error("failed writing " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace ccare

#include "vharv/csv.hpp"

#include <cstdio>
#include <fstream>

#include "vharv/errors.hpp"

namespace vharv {

namespace {

// 17 significant digits round-trip a double exactly.
void append_num(std::string& line, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  line += buf;
}

}  // namespace

void write_trajectory_csv(const std::string& path, const SimulationResult& r) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path);
  out << "t,x,xdot,a,iq_star,iq,id,vd,vq,pgen,pbar\n";
  std::string line;
  for (std::size_t k = 0; k < r.t.size(); ++k) {
    line.clear();
    const double cols[] = {r.t[k],  r.x[k],  r.xdot[k], r.a[k],    r.iq_star[k],
                           r.iq[k], r.id[k], r.vd[k],   r.vq[k],   r.pgen[k],
                           r.pbar[k]};
    for (std::size_t c = 0; c < 11; ++c) {
      if (c) line += ',';
      append_num(line, cols[c]);
    }
    line += '\n';
    out << line;
  }
}

void write_sweep_csv(const std::string& path, const SweepResult& r) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path);
  out << "sigma_a,xdot_m,gamma,pgen_bar,sat_frac,weaken_frac,ok,error\n";
  std::string line;
  for (const auto& c : r.cells) {
    line.clear();
    const double nan = std::nan("");
    const double cols[] = {c.sigma_a,
                           c.xdot_m,
                           c.ok ? c.gamma : nan,
                           c.ok ? c.p_gen_bar : nan,
                           c.ok ? c.sat_fraction : nan,
                           c.ok ? c.weaken_fraction : nan};
    for (std::size_t i = 0; i < 6; ++i) {
      if (i) line += ',';
      append_num(line, cols[i]);
    }
    line += ',';
    line += c.ok ? "1" : "0";
    line += ',';
    if (!c.ok) {
      std::string msg = c.error;
      for (auto& ch : msg)
        if (ch == ',' || ch == '\n') ch = ';';
      line += '"' + msg + '"';
    }
    line += '\n';
    out << line;
  }
}

}  // namespace vharv

#pragma once

#include <cstdio>
#include <fstream>
#include <string>

#include "frontlab/front_solver.hpp"

namespace frontlab {

/// Full-precision number formatting (17 significant digits) for CSV output.
inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return std::string(buf);
}

inline void write_trajectory_csv(const std::string& path, const Trajectory& traj) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "t,g,h,umax,mass,stefan_functional\n";
  for (const auto& r : traj.rows)
    out << fmt17(r.t) << ',' << fmt17(r.g) << ',' << fmt17(r.h) << ','
        << fmt17(r.umax) << ',' << fmt17(r.mass) << ','
        << fmt17(r.stefan_functional) << '\n';
}

/// Snapshot format: one header line `t=<v> g=<v> h=<v> N=<v>`, then xi,u rows.
inline void write_snapshot(const std::string& path, const FrontState& s) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  const int n = s.intervals();
  out << "t=" << fmt17(s.t) << " g=" << fmt17(s.g) << " h=" << fmt17(s.h)
      << " N=" << n << '\n';
  out << "xi,u\n";
  for (int j = 0; j <= n; ++j) out << fmt17(s.xi(j)) << ',' << fmt17(s.w[j]) << '\n';
}

}  // namespace frontlab

#pragma once

// Curve table: one row per grid point, every value in round-trip precision.

#include <string>

#include "optolg/io/config.hpp"
#include "optolg/leggett_garg.hpp"

namespace optolg::io {

inline constexpr const char *kCsvHeader = "tau,tau_scaled,c_t1_0,c_t12_t1,c_t12_0,L,bound";

inline std::string to_csv(const LGCurve &curve) {
  std::string out = kCsvHeader;
  out += '\n';
  for (const auto &p : curve.points) {
    for (double v : {p.tau, p.tau_scaled, p.c_t1_0, p.c_t12_t1, p.c_t12_0, p.l_value}) {
      out += format_double(v);
      out += ',';
    }
    out += format_double(p.bound);
    out += '\n';
  }
  return out;
}

} // namespace optolg::io

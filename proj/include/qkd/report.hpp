#pragma once

#include <string>
#include <vector>

#include "qkd/analysis.hpp"

namespace qkd {

// Numbers are emitted with 9 significant digits so every CSV field
// round-trips parse -> format to the identical string.
std::string format_sig9(double v);

// Fixed header `p_o,mu_r,rk_bb84,rk_iwy,rk_blt,rk_blt_plus`, LF line endings.
std::string sweep_csv(const std::vector<SweepRow>& rows);

// Self-contained line chart: one polyline per scheme, axes, tick labels and
// a legend.
std::string sweep_svg(const std::vector<SweepRow>& rows);

}  // namespace qkd

#pragma once
#include <string>

#include "magctrl/derivation.hpp"

namespace magctrl {

struct SaturateCaps {
  int max_freq = kTrigFreqCap;  // |k|_inf cap on every produced frequency
  int max_depth = 6;            // nesting cap on the certificate tree
};

struct SaturateResult {
  bool ok = false;
  DerivPtr derivation;  // executable tree with value(D) + offset == target
  double offset = 0.0;  // realized as a global phase
  int depth = 0;
  std::string message;  // failure diagnostics
};

// Express a trigonometric target over the torus control phases
// B = (sin<b_1,x>, cos<b_1,x>, ...) using spans, the drift direction
// -|grad phi|^2 (nonnegative weights only), and kick phases built from
// already-certified elements. The returned tree is verified symbolically
// against the target before being reported ok.
SaturateResult saturate_trig(const TrigPoly& target,
                             const std::vector<std::array<int, 3>>& base_freqs,
                             SaturateCaps caps = {});

// Express a Hermite-type target over the line control phases
// B = (x_1, ..., x_d, G) using spans and chains of -d_ax applied to G.
SaturateResult saturate_hermite(const GaussHermite& target, SaturateCaps caps = {});

// base value lists matching the conventions above
std::vector<TrigPoly> trig_base_values(int d, const std::vector<std::array<int, 3>>& base_freqs);
std::vector<GaussHermite> hermite_base_values(int d);

}  // namespace magctrl

#pragma once
#include <memory>
#include <vector>

#include <json.hpp>

#include "magctrl/hermite.hpp"
#include "magctrl/trigpoly.hpp"

namespace magctrl {

// Certificate tree for a reachable phase. Semantics over a base list (B_i):
//   Base(i)          -> B_i
//   Span(c, D_1..)   -> sum_j c_j value(D_j)
//   GradSq(D)        -> -|grad value(D)|^2
//   Partial(ax, D)   -> -d_ax value(D)
// A tree is executable when, along the spine of Span nodes from the root,
// every GradSq child carries a nonnegative coefficient; below a GradSq or
// Partial node the subtree only describes a kick phase and is unconstrained.
struct Derivation;
using DerivPtr = std::shared_ptr<const Derivation>;

struct Derivation {
  enum class Kind { Base, Span, GradSq, Partial };
  Kind kind = Kind::Base;
  int index = -1;                 // Base
  std::vector<double> coeffs;     // Span
  std::vector<DerivPtr> children; // Span (all), GradSq/Partial (one)
  int axis = -1;                  // Partial

  static DerivPtr base(int index);
  static DerivPtr span(std::vector<double> coeffs, std::vector<DerivPtr> children);
  static DerivPtr grad_sq(DerivPtr child);
  static DerivPtr partial(int axis, DerivPtr child);
};

int depth(const DerivPtr& node);
bool executable(const DerivPtr& node);

TrigPoly evaluate_trig(const DerivPtr& node, const std::vector<TrigPoly>& base);
// GradSq is rejected here: it leaves the Gaussian-Hermite class.
GaussHermite evaluate_hermite(const DerivPtr& node, const std::vector<GaussHermite>& base);

nlohmann::json derivation_to_json(const DerivPtr& node);
DerivPtr derivation_from_json(const nlohmann::json& j);

}  // namespace magctrl

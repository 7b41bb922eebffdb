#include "magctrl/derivation.hpp"

#include <stdexcept>

namespace magctrl {

DerivPtr Derivation::base(int index) {
  auto n = std::make_shared<Derivation>();
  n->kind = Kind::Base;
  n->index = index;
  return n;
}

DerivPtr Derivation::span(std::vector<double> coeffs, std::vector<DerivPtr> children) {
  if (coeffs.size() != children.size())
    throw std::invalid_argument("derivation: span arity mismatch");
  auto n = std::make_shared<Derivation>();
  n->kind = Kind::Span;
  n->coeffs = std::move(coeffs);
  n->children = std::move(children);
  return n;
}

DerivPtr Derivation::grad_sq(DerivPtr child) {
  auto n = std::make_shared<Derivation>();
  n->kind = Kind::GradSq;
  n->children.push_back(std::move(child));
  return n;
}

DerivPtr Derivation::partial(int axis, DerivPtr child) {
  auto n = std::make_shared<Derivation>();
  n->kind = Kind::Partial;
  n->axis = axis;
  n->children.push_back(std::move(child));
  return n;
}

int depth(const DerivPtr& node) {
  switch (node->kind) {
    case Derivation::Kind::Base:
      return 0;
    case Derivation::Kind::Span: {
      int m = 0;
      for (const auto& c : node->children) m = std::max(m, depth(c));
      return m;
    }
    case Derivation::Kind::GradSq:
    case Derivation::Kind::Partial:
      return 1 + depth(node->children[0]);
  }
  return 0;
}

namespace {

bool exec_walk(const DerivPtr& node, bool on_spine) {
  switch (node->kind) {
    case Derivation::Kind::Base:
      return true;
    case Derivation::Kind::Span:
      for (std::size_t i = 0; i < node->children.size(); ++i) {
        const auto& ch = node->children[i];
        if (on_spine && ch->kind == Derivation::Kind::GradSq && node->coeffs[i] < 0.0)
          return false;
        if (!exec_walk(ch, on_spine)) return false;
      }
      return true;
    case Derivation::Kind::GradSq:
    case Derivation::Kind::Partial:
      // below this point the tree only describes kick phases
      return exec_walk(node->children[0], false);
  }
  return true;
}

}  // namespace

bool executable(const DerivPtr& node) { return exec_walk(node, true); }

TrigPoly evaluate_trig(const DerivPtr& node, const std::vector<TrigPoly>& base) {
  switch (node->kind) {
    case Derivation::Kind::Base:
      if (node->index < 0 || node->index >= static_cast<int>(base.size()))
        throw std::invalid_argument("derivation: base index out of range");
      return base[static_cast<std::size_t>(node->index)];
    case Derivation::Kind::Span: {
      TrigPoly sum(base.empty() ? 1 : base[0].d);
      for (std::size_t i = 0; i < node->children.size(); ++i)
        sum = sum + evaluate_trig(node->children[i], base) * node->coeffs[i];
      return sum;
    }
    case Derivation::Kind::GradSq:
      return grad_square(evaluate_trig(node->children[0], base)) * -1.0;
    case Derivation::Kind::Partial:
      return evaluate_trig(node->children[0], base).deriv(node->axis) * -1.0;
  }
  throw std::logic_error("derivation: bad node");
}

GaussHermite evaluate_hermite(const DerivPtr& node, const std::vector<GaussHermite>& base) {
  switch (node->kind) {
    case Derivation::Kind::Base:
      if (node->index < 0 || node->index >= static_cast<int>(base.size()))
        throw std::invalid_argument("derivation: base index out of range");
      return base[static_cast<std::size_t>(node->index)];
    case Derivation::Kind::Span: {
      GaussHermite sum(base.empty() ? 1 : base[0].d);
      for (std::size_t i = 0; i < node->children.size(); ++i)
        sum = sum + evaluate_hermite(node->children[i], base) * node->coeffs[i];
      return sum;
    }
    case Derivation::Kind::GradSq:
      throw std::invalid_argument("derivation: |grad .|^2 leaves the Hermite class");
    case Derivation::Kind::Partial:
      return d_partial(evaluate_hermite(node->children[0], base), node->axis) * -1.0;
  }
  throw std::logic_error("derivation: bad node");
}

nlohmann::json derivation_to_json(const DerivPtr& node) {
  nlohmann::json j;
  switch (node->kind) {
    case Derivation::Kind::Base:
      j["kind"] = "base";
      j["index"] = node->index;
      break;
    case Derivation::Kind::Span: {
      j["kind"] = "span";
      j["coeffs"] = node->coeffs;
      nlohmann::json ch = nlohmann::json::array();
      for (const auto& c : node->children) ch.push_back(derivation_to_json(c));
      j["children"] = std::move(ch);
      break;
    }
    case Derivation::Kind::GradSq:
      j["kind"] = "gradsq";
      j["child"] = derivation_to_json(node->children[0]);
      break;
    case Derivation::Kind::Partial:
      j["kind"] = "partial";
      j["axis"] = node->axis;
      j["child"] = derivation_to_json(node->children[0]);
      break;
  }
  return j;
}

DerivPtr derivation_from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind");
  if (kind == "base") return Derivation::base(j.at("index").get<int>());
  if (kind == "span") {
    std::vector<DerivPtr> children;
    for (const auto& c : j.at("children")) children.push_back(derivation_from_json(c));
    return Derivation::span(j.at("coeffs").get<std::vector<double>>(), std::move(children));
  }
  if (kind == "gradsq") return Derivation::grad_sq(derivation_from_json(j.at("child")));
  if (kind == "partial")
    return Derivation::partial(j.at("axis").get<int>(), derivation_from_json(j.at("child")));
  throw std::invalid_argument("derivation: unknown node kind " + kind);
}

}  // namespace magctrl

#include "magctrl/saturate.hpp"

#include <cmath>
#include <map>
#include <sstream>

namespace magctrl {

std::vector<TrigPoly> trig_base_values(int d, const std::vector<std::array<int, 3>>& base_freqs) {
  std::vector<TrigPoly> base;
  for (const auto& b : base_freqs) {
    TrigPoly s(d), c(d);
    s.add_term(b, 1.0, 0.0);
    c.add_term(b, 0.0, 1.0);
    base.push_back(s);
    base.push_back(c);
  }
  return base;
}

std::vector<GaussHermite> hermite_base_values(int d) {
  std::vector<GaussHermite> base;
  for (int a = 0; a < d; ++a) {
    GaussHermite x(d);
    x.lin[static_cast<std::size_t>(a)] = 1.0;
    base.push_back(x);
  }
  GaussHermite g(d);
  g.p.add({0, 0, 0}, 1.0);
  base.push_back(g);
  return base;
}

namespace {

struct Elem {
  FreqKey k;
  bool is_sin = false;
};

using Combo = std::vector<std::pair<double, Elem>>;

struct FlatCert {
  std::vector<double> base;                  // over the 2d control phases
  std::vector<std::pair<double, Combo>> gs;  // weight >= 0, kick-phase combo
  double konst = 0.0;
  int dep = 0;
};

struct Entry {
  // [is_sin][sign]: certificates for +elem and -elem
  FlatCert cert[2][2];
  bool have = false;
  int dep = 0;
};

class TrigSaturator {
 public:
  TrigSaturator(int d, const std::vector<std::array<int, 3>>& base_freqs, SaturateCaps caps)
      : d_(d), caps_(caps), base_freqs_(base_freqs),
        base_vals_(trig_base_values(d, base_freqs)) {}

  SaturateResult run(const TrigPoly& target) {
    SaturateResult res;
    target_max_ = 1;
    for (const auto& [key, sc] : target.terms) target_max_ = std::max(target_max_, key.max_abs());
    cand_cap_ = std::min(caps_.max_freq, std::max(2, 2 * target_max_));
    if (target.max_freq() > caps_.max_freq) {
      res.message = "target frequency beyond cap";
      return res;
    }

    seed_base();
    closure(target);

    // membership: accumulate the matched certificates
    FlatCert total;
    total.base.assign(base_vals_.size(), 0.0);
    for (const auto& [key, sc] : target.terms) {
      if (key.zero()) continue;
      auto it = table_.find(key);
      if (it == table_.end() || !it->second.have) {
        std::ostringstream os;
        os << "frequency (" << key.k[0] << "," << key.k[1] << "," << key.k[2]
           << ") not reached within depth " << caps_.max_depth;
        res.message = os.str();
        return res;
      }
      if (sc.first != 0.0)
        merge_scaled(total, it->second.cert[1][sc.first < 0.0 ? 1 : 0], std::abs(sc.first));
      if (sc.second != 0.0)
        merge_scaled(total, it->second.cert[0][sc.second < 0.0 ? 1 : 0], std::abs(sc.second));
    }

    // verify the flat certificate symbolically before building the tree
    TrigPoly val = cert_value(total);
    TrigPoly diff = target - val;
    const double off = diff.constant();
    diff.add_const(-off);
    diff.prune(1e-9 * std::max(1.0, target.max_abs_coeff()));
    if (!diff.empty()) {
      res.message = "internal: certificate value mismatch";
      return res;
    }

    res.derivation = cert_to_tree(total);
    res.offset = off + total.konst;  // tree value excludes the constants
    res.depth = depth(res.derivation);
    if (res.depth > caps_.max_depth) {
      res.message = "certificate depth exceeds cap";
      return res;
    }
    if (!executable(res.derivation)) {
      res.message = "internal: non-executable certificate";
      return res;
    }
    // final independent check through the tree semantics
    TrigPoly tree_val = evaluate_trig(res.derivation, base_vals_);
    TrigPoly rem = target - tree_val;
    rem.add_const(-res.offset);
    rem.prune(1e-9 * std::max(1.0, target.max_abs_coeff()));
    if (!rem.empty()) {
      res.message = "internal: tree value mismatch";
      res.derivation = nullptr;
      return res;
    }
    res.ok = true;
    return res;
  }

 private:
  int d_;
  SaturateCaps caps_;
  std::vector<std::array<int, 3>> base_freqs_;
  std::vector<TrigPoly> base_vals_;
  std::map<FreqKey, Entry> table_;
  std::map<std::tuple<FreqKey, int, int>, DerivPtr> tree_memo_;
  int target_max_ = 1, cand_cap_ = 2;

  TrigPoly elem_value(const Elem& e) const {
    TrigPoly p(d_);
    p.add_term(e.k.k, e.is_sin ? 1.0 : 0.0, e.is_sin ? 0.0 : 1.0);
    return p;
  }

  TrigPoly combo_value(const Combo& c) const {
    TrigPoly p(d_);
    for (const auto& [w, e] : c) p = p + elem_value(e) * w;
    return p;
  }

  TrigPoly cert_value(const FlatCert& cert) const {
    TrigPoly p(d_);
    for (std::size_t j = 0; j < cert.base.size(); ++j)
      if (cert.base[j] != 0.0) p = p + base_vals_[j] * cert.base[j];
    for (const auto& [w, combo] : cert.gs)
      p = p + grad_square(combo_value(combo)) * -w;
    p.add_const(cert.konst);
    return p;
  }

  void merge_scaled(FlatCert& dst, const FlatCert& src, double w) {
    if (w < 0.0) throw std::logic_error("saturate: negative certificate weight");
    if (w == 0.0) return;
    for (std::size_t j = 0; j < src.base.size(); ++j) dst.base[j] += w * src.base[j];
    for (const auto& [gw, combo] : src.gs) dst.gs.emplace_back(w * gw, combo);
    dst.konst += w * src.konst;
    dst.dep = std::max(dst.dep, src.dep);
  }

  int combo_dep(const Combo& c) const {
    int m = 0;
    for (const auto& [w, e] : c) {
      auto it = table_.find(e.k);
      if (it == table_.end()) throw std::logic_error("saturate: combo references unknown element");
      m = std::max(m, it->second.dep);
    }
    return m;
  }

  // Fills konst so that cert_value(cert) == want, and checks the remainder
  // vanishes identically; any sign slip in the construction trips this.
  bool solve_and_check(FlatCert& cert, const TrigPoly& want) {
    cert.konst = 0.0;
    TrigPoly diff = want - cert_value(cert);
    cert.konst = diff.constant();
    diff.add_const(-cert.konst);
    diff.prune(1e-9);
    if (!diff.empty()) throw std::logic_error("saturate: certificate construction mismatch");
    int m = 0;
    for (const auto& [w, combo] : cert.gs) m = std::max(m, 1 + combo_dep(combo));
    cert.dep = m;
    return true;
  }

  void seed_base() {
    for (std::size_t j = 0; j < base_freqs_.size(); ++j) {
      bool flipped = false;
      const FreqKey key = canonical_freq(base_freqs_[j], flipped);
      Entry& e = table_[key];
      for (int part = 0; part < 2; ++part)
        for (int sign = 0; sign < 2; ++sign) {
          FlatCert c;
          c.base.assign(base_vals_.size(), 0.0);
          const double v = sign == 0 ? 1.0 : -1.0;
          // flipped base frequency negates the sine element
          const double sflip = flipped && part == 1 ? -1.0 : 1.0;
          c.base[2 * j + (part == 1 ? 0 : 1)] = v * sflip;
          c.dep = 0;
          e.cert[part][sign] = std::move(c);
        }
      e.have = true;
      e.dep = 0;
    }
  }

  bool known(const FreqKey& k) const {
    auto it = table_.find(k);
    return it != table_.end() && it->second.have;
  }

  // certificates for +/- sin and cos at 2k from the elements at k
  void build_double(const FreqKey& k, int pass) {
    const Entry& src = table_.at(k);
    if (src.dep > pass - 1) return;
    std::array<int, 3> k2{};
    for (int a = 0; a < 3; ++a) k2[static_cast<std::size_t>(a)] = 2 * k.k[static_cast<std::size_t>(a)];
    bool flipped = false;
    const FreqKey key2 = canonical_freq(k2, flipped);
    if (key2.max_abs() > cand_cap_ || known(key2)) return;

    const double n2 = k.norm2();
    const Elem sk{k, true}, ck{k, false};
    auto mk = [&](std::initializer_list<std::pair<double, Elem>> combo, double w,
                  const TrigPoly& want) {
      FlatCert c;
      c.base.assign(base_vals_.size(), 0.0);
      c.gs.emplace_back(w, Combo(combo));
      solve_and_check(c, want);
      return c;
    };
    TrigPoly c2p(d_), c2m(d_), s2p(d_), s2m(d_);
    c2p.add_term(k2, 0.0, 1.0);
    c2m.add_term(k2, 0.0, -1.0);
    s2p.add_term(k2, 1.0, 0.0);
    s2m.add_term(k2, -1.0, 0.0);

    FlatCert cp = mk({{1.0, ck}}, 2.0 / n2, c2p);
    FlatCert cm = mk({{1.0, sk}}, 2.0 / n2, c2m);
    FlatCert sp = mk({{1.0, sk}, {1.0, ck}}, 1.0 / n2, s2p);
    FlatCert sm = mk({{1.0, sk}, {-1.0, ck}}, 1.0 / n2, s2m);

    Entry e;
    e.have = true;
    e.cert[0][0] = cp;
    e.cert[0][1] = cm;
    e.cert[1][0] = sp;
    e.cert[1][1] = sm;
    if (flipped) std::swap(e.cert[1][0], e.cert[1][1]);
    e.dep = std::max({cp.dep, cm.dep, sp.dep, sm.dep});
    table_[key2] = std::move(e);
  }

  // +|grad elem|^2 with nonnegative drift weights:
  //   |grad sin|^2 = |k|^2 - |grad cos|^2, and vice versa
  FlatCert plus_grad_sq(const Elem& e) const {
    FlatCert c;
    c.base.assign(base_vals_.size(), 0.0);
    const Elem other{e.k, !e.is_sin};
    c.gs.emplace_back(1.0, Combo{{1.0, other}});
    c.konst = e.k.norm2();
    return c;
  }

  // gamma * <grad u, grad v> as a valid certificate, any sign of gamma
  void add_pair(FlatCert& dst, double gamma, const Elem& u, const Elem& v) const {
    if (gamma == 0.0) return;
    const double w = std::abs(gamma) / 2.0;
    // +2<grad u, grad v> = -|grad(u - v)|^2 + |grad u|^2 + |grad v|^2
    // -2<grad u, grad v> = -|grad(u + v)|^2 + |grad u|^2 + |grad v|^2
    const double vsign = gamma > 0.0 ? -1.0 : 1.0;
    dst.gs.emplace_back(w, Combo{{1.0, u}, {vsign, v}});
    FlatCert pu = plus_grad_sq(u), pv = plus_grad_sq(v);
    for (const auto& [gw, combo] : pu.gs) dst.gs.emplace_back(w * gw, combo);
    for (const auto& [gw, combo] : pv.gs) dst.gs.emplace_back(w * gw, combo);
    dst.konst += w * (pu.konst + pv.konst);
  }

  void build_cross(const FreqKey& k, const FreqKey& l, int pass) {
    const Entry& ek = table_.at(k);
    const Entry& el = table_.at(l);
    if (std::max(ek.dep, el.dep) > pass - 1) return;
    double beta = 0.0;
    for (int a = 0; a < d_; ++a) beta += k.k[static_cast<std::size_t>(a)] * l.k[static_cast<std::size_t>(a)];
    if (beta == 0.0) return;

    const Elem sk{k, true}, ck{k, false}, sl{l, true}, cl{l, false};

    for (int which = 0; which < 2; ++which) {  // 0: k+l, 1: k-l
      std::array<int, 3> raw{};
      for (int a = 0; a < 3; ++a)
        raw[static_cast<std::size_t>(a)] =
            k.k[static_cast<std::size_t>(a)] + (which == 0 ? 1 : -1) * l.k[static_cast<std::size_t>(a)];
      bool flipped = false;
      const FreqKey key = canonical_freq(raw, flipped);
      if (key.zero() || key.max_abs() > cand_cap_ || known(key)) continue;

      // cos(k+l): (1/b)[<ss> - <cc>]  cos(k-l): (1/b)[<ss> + <cc>]
      // sin(k+l): -(1/b)[<sc> + <cs>] sin(k-l): (1/b)[<sc> - <cs>]
      const double ib = 1.0 / beta;
      auto build = [&](bool is_sin, double s) {
        FlatCert c;
        c.base.assign(base_vals_.size(), 0.0);
        if (!is_sin) {
          add_pair(c, s * ib, sk, sl);
          add_pair(c, (which == 0 ? -1.0 : 1.0) * s * ib, ck, cl);
        } else if (which == 0) {
          add_pair(c, -s * ib, sk, cl);
          add_pair(c, -s * ib, ck, sl);
        } else {
          add_pair(c, s * ib, sk, cl);
          add_pair(c, -s * ib, ck, sl);
        }
        TrigPoly want(d_);
        want.add_term(raw, is_sin ? s : 0.0, is_sin ? 0.0 : s);
        solve_and_check(c, want);
        return c;
      };

      Entry e;
      e.have = true;
      e.cert[0][0] = build(false, 1.0);
      e.cert[0][1] = build(false, -1.0);
      e.cert[1][0] = build(true, 1.0);
      e.cert[1][1] = build(true, -1.0);
      if (flipped) std::swap(e.cert[1][0], e.cert[1][1]);
      e.dep = 0;
      for (int part = 0; part < 2; ++part)
        for (int sign = 0; sign < 2; ++sign)
          e.dep = std::max(e.dep, e.cert[part][sign].dep);
      table_[key] = std::move(e);
    }
  }

  void closure(const TrigPoly& target) {
    for (int pass = 1; pass <= caps_.max_depth; ++pass) {
      // snapshot key list: this pass only builds from existing entries
      std::vector<FreqKey> keys;
      for (const auto& [key, e] : table_)
        if (e.have) keys.push_back(key);
      const std::size_t before = table_.size();
      for (const auto& k : keys) build_double(k, pass);
      for (std::size_t i = 0; i < keys.size(); ++i)
        for (std::size_t j = 0; j < keys.size(); ++j)
          if (i != j) build_cross(keys[i], keys[j], pass);
      bool done = true;
      for (const auto& [key, sc] : target.terms)
        if (!key.zero() && !known(key)) done = false;
      if (done || table_.size() == before) return;
    }
  }

  DerivPtr elem_tree(const FreqKey& k, int part, int sign) {
    const auto memo_key = std::make_tuple(k, part, sign);
    auto it = tree_memo_.find(memo_key);
    if (it != tree_memo_.end()) return it->second;
    DerivPtr t = cert_to_tree(table_.at(k).cert[part][sign]);
    tree_memo_.emplace(memo_key, t);
    return t;
  }

  DerivPtr combo_tree(const Combo& combo) {
    std::vector<double> coeffs;
    std::vector<DerivPtr> children;
    for (const auto& [w, e] : combo) {
      coeffs.push_back(w);
      children.push_back(elem_tree(e.k, e.is_sin ? 1 : 0, 0));
    }
    if (children.size() == 1 && coeffs[0] == 1.0) return children[0];
    return Derivation::span(std::move(coeffs), std::move(children));
  }

  DerivPtr cert_to_tree(const FlatCert& cert) {
    std::vector<double> coeffs;
    std::vector<DerivPtr> children;
    for (std::size_t j = 0; j < cert.base.size(); ++j)
      if (cert.base[j] != 0.0) {
        coeffs.push_back(cert.base[j]);
        children.push_back(Derivation::base(static_cast<int>(j)));
      }
    for (const auto& [w, combo] : cert.gs) {
      coeffs.push_back(w);
      children.push_back(Derivation::grad_sq(combo_tree(combo)));
    }
    if (children.size() == 1 && coeffs[0] == 1.0) return children[0];
    return Derivation::span(std::move(coeffs), std::move(children));
  }
};

}  // namespace

SaturateResult saturate_trig(const TrigPoly& target,
                             const std::vector<std::array<int, 3>>& base_freqs,
                             SaturateCaps caps) {
  TrigSaturator sat(target.d, base_freqs, caps);
  return sat.run(target);
}

SaturateResult saturate_hermite(const GaussHermite& target, SaturateCaps caps) {
  SaturateResult res;
  const int d = target.d;
  const auto base = hermite_base_values(d);

  std::vector<double> coeffs;
  std::vector<DerivPtr> children;
  for (int a = 0; a < d; ++a)
    if (target.lin[static_cast<std::size_t>(a)] != 0.0) {
      coeffs.push_back(target.lin[static_cast<std::size_t>(a)]);
      children.push_back(Derivation::base(a));
    }
  const auto modes = hermite_expand(target.p);
  for (const auto& [alpha, c] : modes) {
    if (c == 0.0) continue;
    const int order = alpha[0] + alpha[1] + alpha[2];
    if (order > caps.max_depth) {
      std::ostringstream os;
      os << "mode order " << order << " exceeds depth cap " << caps.max_depth;
      res.message = os.str();
      return res;
    }
    DerivPtr node = Derivation::base(d);  // G
    for (int a = 0; a < d; ++a)
      for (int r = 0; r < alpha[static_cast<std::size_t>(a)]; ++r)
        node = Derivation::partial(a, node);
    coeffs.push_back(c);
    children.push_back(node);
  }
  DerivPtr tree = children.size() == 1 && coeffs[0] == 1.0
                      ? children[0]
                      : Derivation::span(std::move(coeffs), std::move(children));
  GaussHermite val = evaluate_hermite(tree, base);
  GaussHermite want = target;
  want.constant = 0.0;
  double scale = std::abs(target.constant);
  for (const auto& [m, v] : target.p.c) scale = std::max(scale, std::abs(v));
  if (!val.same_shape(want, 1e-9 * std::max(1.0, scale))) {
    res.message = "internal: hermite certificate mismatch";
    return res;
  }
  res.derivation = tree;
  res.offset = target.constant;
  res.depth = depth(tree);
  res.ok = true;
  return res;
}

}  // namespace magctrl

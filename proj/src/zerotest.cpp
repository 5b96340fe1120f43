#include <cmath>
#include <random>

#include "sundman/zerotest.hpp"

namespace sundman {

const char* zero_tag_name(ZeroTag t) {
  switch (t) {
    case ZeroTag::ProvedZero: return "ProvedZero";
    case ZeroTag::NumericallyZero: return "NumericallyZero";
    case ZeroTag::NonZero: return "NonZero";
    case ZeroTag::Indeterminate: return "Indeterminate";
  }
  return "?";
}

namespace {

const Interval& interval_for(const Config& cfg, const std::string& name) {
  if (name == "x") return cfg.box_x;
  if (name == "y") return cfg.box_y;
  return cfg.box_y;  // auxiliary symbols share the y interval
}

// Scale of the cancellation being claimed: sum of per-term magnitudes over
// the top-level terms of the canonical form.
double local_scale(const Expr& canonical, const Binding& b) {
  if (canonical.kind() != Kind::Sum) {
    auto v = try_eval(canonical, b);
    return v ? std::fabs(*v) : 0.0;
  }
  double s = 0.0;
  for (const Expr& term : canonical.kids()) {
    auto v = try_eval(term, b);
    if (!v) return -1.0;
    s += std::fabs(*v);
  }
  return s;
}

}  // namespace

ZeroVerdict is_zero(const Expr& e, const Config& cfg) {
  ZeroVerdict out;
  out.seed = cfg.seed;
  Expr c = simplify(e);
  if (c.is_number()) {
    if (c.num() == 0) {
      out.tag = ZeroTag::ProvedZero;
      return out;
    }
    out.tag = ZeroTag::NonZero;
    out.witness = Binding{};
    out.witness_value = to_double(c.num());
    out.max_abs = std::fabs(out.witness_value);
    return out;
  }
  std::vector<std::string> symbols;
  c.collect_symbols(symbols);
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int valid = 0;
  bool dead_zone = false;
  for (int draw = 0; draw < cfg.max_draws && valid < cfg.samples; ++draw) {
    Binding b;
    for (const std::string& s : symbols) {
      const Interval& iv = interval_for(cfg, s);
      b.set(s, iv.lo + unit(rng) * iv.width());
    }
    auto v = try_eval(c, b);
    if (!v) continue;
    double scale = local_scale(c, b);
    if (scale < 0) continue;
    ++valid;
    double a = std::fabs(*v);
    if (a > out.max_abs) out.max_abs = a;
    if (a > cfg.reject_threshold) {
      out.tag = ZeroTag::NonZero;
      out.samples_used = valid;
      out.witness = b;
      out.witness_value = *v;
      return out;
    }
    if (a > cfg.eps_abs + cfg.eps_rel * scale) dead_zone = true;
  }
  out.samples_used = valid;
  if (valid < cfg.min_samples) {
    out.tag = ZeroTag::Indeterminate;
    return out;
  }
  out.tag = dead_zone ? ZeroTag::Indeterminate : ZeroTag::NumericallyZero;
  return out;
}

ConstVerdict is_constant(const Expr& e, const Config& cfg) {
  ConstVerdict out;
  Expr c = simplify(e);
  if (c.is_number()) {
    out.constant = true;
    out.tag = ZeroTag::ProvedZero;
    out.exact = true;
    out.exact_value = c.num();
    out.value = to_double(c.num());
    return out;
  }
  std::vector<std::string> symbols;
  c.collect_symbols(symbols);
  out.tag = ZeroTag::ProvedZero;
  for (const std::string& s : symbols) {
    ZeroVerdict zv = is_zero(diff(c, s), cfg);
    if (zv.tag == ZeroTag::NonZero) {
      out.constant = false;
      out.tag = ZeroTag::NonZero;
      out.witness = zv.witness;
      out.witness_value = zv.witness_value;
      return out;
    }
    if (zv.tag == ZeroTag::Indeterminate) {
      out.constant = false;
      out.tag = ZeroTag::Indeterminate;
      return out;
    }
    if (zv.tag == ZeroTag::NumericallyZero && out.tag == ZeroTag::ProvedZero)
      out.tag = ZeroTag::NumericallyZero;
  }
  out.constant = true;
  Binding center;
  for (const std::string& s : symbols) center.set(s, interval_for(cfg, s).mid());
  auto v = try_eval(c, center);
  if (v) {
    out.value = *v;
  } else {
    // Center happened to be invalid; fall back to a sampled point.
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int draw = 0; draw < cfg.max_draws; ++draw) {
      Binding b;
      for (const std::string& s : symbols) {
        const Interval& iv = interval_for(cfg, s);
        b.set(s, iv.lo + unit(rng) * iv.width());
      }
      auto w = try_eval(c, b);
      if (w) {
        out.value = *w;
        break;
      }
    }
  }
  return out;
}

}  // namespace sundman

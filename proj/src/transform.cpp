#include <cmath>
#include <limits>
#include <utility>

#include "sundman/errors.hpp"
#include "sundman/symcore.hpp"
#include "sundman/transform.hpp"

namespace sundman {

namespace {

Expr dx(const Expr& e) { return diff(e, "x"); }
Expr dy(const Expr& e) { return diff(e, "y"); }
Expr exp_e(const Expr& e) { return simplify(Expr::call(Fn::Exp, e)); }

struct GCtx {
  Expr l0, l1, l2;
  Expr l0x, l0y, l0xy, l1x, l2x, l2xx, l3, l3x, l4, l5, l6, l6y;
};

GCtx gctx(const QuadraticOde& ode, const Invariants& inv) {
  GCtx c;
  c.l0 = ode.lambda0;
  c.l1 = ode.lambda1;
  c.l2 = ode.lambda2;
  c.l0x = dx(c.l0);
  c.l0y = dy(c.l0);
  c.l0xy = dy(c.l0x);
  c.l1x = dx(c.l1);
  c.l2x = dx(c.l2);
  c.l2xx = dx(c.l2x);
  c.l3 = inv.lambda3;
  c.l3x = dx(c.l3);
  c.l4 = inv.lambda4;
  c.l5 = inv.lambda5;
  c.l6 = inv.lambda6;
  c.l6y = dy(c.l6);
  return c;
}

// The compatibility system every admissible G (with F_x = 0) satisfies,
// written denominator-free. Derived candidates are checked against all of it,
// not only the equations their case used.
std::vector<Expr> g_residuals(const GCtx& c, const Expr& g) {
  Expr gx = dx(g), gy = dy(g);
  Expr gxx = dx(gx), gxy = dy(gx), gyy = dy(gy);
  std::vector<Expr> out;
  out.push_back(sum_of({mul(g, gxx), mul(num(-2), pow(gx, 2)),
                        neg(product_of({gx, g, c.l1})), mul(c.l1x, pow(g, 2))}));
  out.push_back(sum_of({gxy, neg(mul(g, c.l3)), mul(gy, c.l1)}));
  out.push_back(sub(mul(num(2), mul(gx, c.l0)), mul(c.l0x, g)));
  out.push_back(sum_of({mul(gx, gy), product_of({gy, g, c.l1}),
                        neg(mul(pow(g, 2), add(c.l2x, c.l3)))}));
  out.push_back(sub(mul(gx, c.l3),
                    mul(g, sum_of({c.l2xx, mul(c.l2x, c.l1), c.l3x}))));
  out.push_back(sum_of(
      {mul(num(2), mul(gx, add(c.l0y, mul(c.l0, c.l2)))),
       mul(gy, add(c.l0x, mul(num(2), mul(c.l0, c.l1)))),
       neg(mul(g, sum_of({c.l0xy, mul(c.l0x, c.l2),
                          mul(num(4), mul(c.l2x, c.l0)),
                          mul(num(2), mul(c.l0, c.l3))})))}));
  out.push_back(sum_of(
      {mul(num(2), product_of({g, gyy, c.l0})),
       mul(num(-6), mul(pow(gy, 2), c.l0)),
       mul(num(2), product_of({gy, g,
                               add(mul(num(3), c.l0y),
                                   mul(num(2), mul(c.l0, c.l2)))})),
       neg(mul(pow(g, 2),
               sum_of({c.l4, mul(num(2), c.l5), neg(mul(c.l1, c.l3))})))}));
  return out;
}

bool accept_g(const GCtx& c, const Expr& g, const Config& cfg, bool exact_only) {
  if (is_zero(g, cfg).tag != ZeroTag::NonZero) return false;
  for (const Expr& r : g_residuals(c, g)) {
    ZeroVerdict v = is_zero(r, cfg);
    if (exact_only ? v.tag != ZeroTag::ProvedZero : !v.zeroish()) return false;
  }
  return true;
}

Rat rat_from_double(double v) {
  if (v == 0.0) return Rat(0);
  int e = 0;
  double m = std::frexp(v, &e);
  auto im = static_cast<long long>(std::ldexp(m, 53));
  e -= 53;
  Rat r{Int(im)};
  if (e > 0)
    r *= Rat(Int(1) << e);
  else if (e < 0)
    r /= Rat(Int(1) << (-e));
  return r;
}

// Nearest simple rational, for reference points and sampled ansatz
// parameters; falls back to nothing when no small fraction is close.
std::optional<Rat> snap_rational(double v, long max_den, double tol) {
  if (!std::isfinite(v) || std::fabs(v) > 64.0) return std::nullopt;
  long bp = 0, bq = 1;
  double best = std::numeric_limits<double>::infinity();
  for (long q = 1; q <= max_den; ++q) {
    long p = std::lround(v * static_cast<double>(q));
    double err = std::fabs(v - static_cast<double>(p) / static_cast<double>(q));
    if (err < best) {
      best = err;
      bp = p;
      bq = q;
    }
  }
  if (best <= tol * (1.0 + std::fabs(v))) return Rat(bp, bq);
  return std::nullopt;
}

Rat reference_abscissa(const Config& cfg) {
  double v = cfg.box_x.mid();
  if (auto r = snap_rational(v, 100, 1e-9)) {
    double w = cfg.box_x.width();
    double d = to_double(*r);
    if (d > cfg.box_x.lo + w / 8 && d < cfg.box_x.hi - w / 8) return *r;
  }
  return rat_from_double(v);
}

// Divides out the gcd of the numeric term coefficients (and a pure-number
// denominator) and makes the leading coefficient positive: y^3/3 -> y^3.
Expr clear_rational_content(const Expr& e) {
  auto [n, d] = as_fraction(e);
  Expr target = d.is_number() ? n : simplify(e);
  std::vector<Expr> terms;
  if (target.kind() == Kind::Sum)
    terms = target.kids();
  else
    terms = {target};
  Rat content(0);
  Rat first(1);
  bool first_set = false;
  for (const Expr& t : terms) {
    Rat coef(1);
    if (t.is_number())
      coef = t.num();
    else if (t.kind() == Kind::Product && t.kids()[0].is_number())
      coef = t.kids()[0].num();
    if (!first_set) {
      first = coef;
      first_set = true;
    }
    content = rat_gcd(content, coef);
  }
  if (content == 0) return simplify(e);
  if (first < 0) content = -content;
  return simplify(div(target, Expr::number(content)));
}

struct DerivedG {
  Expr g;
  const char* provenance;
};

// Evaluates all of `need` at a deterministic list of in-box points; first
// point where everything is finite wins.
std::optional<Binding> sample_point(const std::vector<Expr>& need, const Config& cfg) {
  const double fx[] = {0.5, 0.37, 0.81, 0.13, 0.61};
  const double fy_[] = {0.5, 0.81, 0.13, 0.61, 0.37};
  for (double ax : fx)
    for (double ay : fy_) {
      Binding b = Binding::xy(cfg.box_x.lo + ax * cfg.box_x.width(),
                              cfg.box_y.lo + ay * cfg.box_y.width());
      bool ok = true;
      for (const Expr& e : need)
        if (!try_eval(e, b)) {
          ok = false;
          break;
        }
      if (ok) return b;
    }
  return std::nullopt;
}

void push_unique(std::vector<Expr>& cands, Expr e) {
  for (const Expr& c : cands)
    if (c == e) return;
  cands.push_back(std::move(e));
}

// Ansatz H(y) in G = base * H: the parameter of y^m or exp(a y) is pinned by
// sampling the second-order G-equation (quadratic in the parameter) and the
// first-order ratio equation, then snapped to a small rational.
void add_ansatz_candidates(std::vector<Expr>& cands, const GCtx& c,
                           const Expr& base, const Config& cfg) {
  Expr y = sym("y");
  enum { PowY, ExpY };
  for (int family : {PowY, ExpY}) {
    auto make = [&](const Rat& v) {
      Expr h = family == PowY ? pow(y, Expr::number(v))
                              : exp_e(mul(Expr::number(v), y));
      return simplify(mul(base, h));
    };
    // three integer probes fit the quadratic exactly
    Expr g0 = make(Rat(0)), g1 = make(Rat(1)), g2 = make(Rat(2));
    Expr r0 = g_residuals(c, g0).back();
    Expr r1 = g_residuals(c, g1).back();
    Expr r2 = g_residuals(c, g2).back();
    auto b = sample_point({r0, r1, r2, g0, g1, g2}, cfg);
    if (!b) continue;
    auto at = [&](const Expr& r, const Expr& g) -> std::optional<double> {
      auto rv = try_eval(r, *b);
      auto gv = try_eval(g, *b);
      if (!rv || !gv || std::fabs(*gv) < 1e-12) return std::nullopt;
      return *rv / (*gv * *gv);
    };
    auto v0 = at(r0, g0), v1 = at(r1, g1), v2 = at(r2, g2);
    if (v0 && v1 && v2) {
      double qa = (*v2 - 2 * *v1 + *v0) / 2;
      double qb = *v1 - *v0 - qa;
      double qc = *v0;
      std::vector<double> roots;
      if (std::fabs(qa) < 1e-10) {
        if (std::fabs(qb) > 1e-10) roots.push_back(-qc / qb);
      } else {
        double disc = qb * qb - 4 * qa * qc;
        if (disc > -1e-9) {
          double s = std::sqrt(std::max(disc, 0.0));
          roots.push_back((-qb + s) / (2 * qa));
          roots.push_back((-qb - s) / (2 * qa));
        }
      }
      for (double r : roots)
        if (auto snapped = snap_rational(r, 24, 1e-4))
          if (*snapped != 0) push_unique(cands, make(*snapped));
    }
    // first-order fallback: G_y/G from the G_xG_y relation
    Expr den = add(div(dx(base), base), c.l1);
    Expr sexpr = div(add(c.l2x, c.l3), den);
    Expr sigma = simplify(sub(sexpr, div(dy(base), base)));
    if (auto sv = try_eval(sigma, *b)) {
      double target = family == PowY ? *sv * b->get("y").value_or(1.0) : *sv;
      if (auto snapped = snap_rational(target, 24, 1e-4))
        if (*snapped != 0) push_unique(cands, make(*snapped));
    }
  }
}

std::optional<DerivedG> derive_g_impl(const QuadraticOde& ode, const Invariants& inv,
                                      const std::string& case_label, const Config& cfg) {
  GCtx c = gctx(ode, inv);
  bool a_case = case_label == "A1" || case_label == "A2" || case_label == "A3";

  Expr p = num(0);
  if (a_case) {
    p = simplify(div(sum_of({c.l2xx, mul(c.l2x, c.l1), c.l3x}), c.l3));
  } else if (is_zero(c.l0, cfg).tag == ZeroTag::NonZero) {
    p = simplify(div(c.l0x, mul(num(2), c.l0)));
  }

  std::optional<Expr> P = p.is_zero_number() ? std::optional<Expr>(num(0))
                                             : antiderivative(p, "x");
  if (!P) return std::nullopt;

  // strategy (i): cases whose equations pin G_y/G directly
  std::optional<Expr> q;
  if (case_label == "A1")
    q = simplify(div(mul(c.l3, add(c.l2x, c.l3)), c.l5));
  else if (case_label == "B")
    q = simplify(div(sub(mul(c.l6y, c.l0), mul(c.l0y, c.l6)), mul(c.l0, c.l6)));
  if (q) {
    Expr compat = simplify(sub(dy(p), dx(*q)));
    if (is_zero(compat, cfg).zeroish()) {
      Expr qt = simplify(sub(*q, dy(*P)));
      if (!qt.depends_on("x")) {
        if (auto Q = antiderivative(qt, "y")) {
          Expr g = clear_rational_content(exp_e(add(*P, *Q)));
          if (accept_g(c, g, cfg, false)) return DerivedG{g, "derived-symbolic"};
        }
      }
    }
  }

  // strategy (ii): exp(int p dx) times a one-parameter factor in y
  Expr base = clear_rational_content(exp_e(*P));
  std::vector<Expr> cands{base};
  add_ansatz_candidates(cands, c, base, cfg);
  for (const Expr& g : cands)
    if (accept_g(c, g, cfg, true))
      return DerivedG{clear_rational_content(g), "derived-ansatz"};
  return std::nullopt;
}

}  // namespace

std::optional<Expr> derive_g(const QuadraticOde& ode, const Invariants& inv,
                             const std::string& case_label, const Config& cfg) {
  auto d = derive_g_impl(ode, inv, case_label, cfg);
  if (!d) return std::nullopt;
  return d->g;
}

std::optional<Expr> derive_f(const QuadraticOde& ode, const Expr& g, const Config& cfg) {
  // F_yy/F_y = G_y/G + lambda2 must be x-free for an x-free F to exist
  Expr ratio = simplify(add(div(dy(g), g), ode.lambda2));
  if (!is_zero(dx(ratio), cfg).zeroish()) return std::nullopt;

  Expr x0 = Expr::number(reference_abscissa(cfg));
  Expr l2_0 = simplify(substitute(ode.lambda2, "x", x0));
  auto A = antiderivative(l2_0, "y");
  if (!A) return std::nullopt;
  Expr fy = simplify(mul(substitute(g, "x", x0), exp_e(*A)));
  if (is_zero(fy, cfg).tag != ZeroTag::NonZero) return std::nullopt;
  auto F = antiderivative(fy, "y");
  if (!F) return std::nullopt;
  Expr f = clear_rational_content(*F);

  // a-posteriori: the F_yy relation must hold with the full, x-dependent G
  Expr fy2 = dy(f);
  Expr res = simplify(sub(mul(dy(fy2), g),
                          add(mul(dy(g), fy2), product_of({fy2, g, ode.lambda2}))));
  if (!is_zero(res, cfg).zeroish()) return std::nullopt;
  if (is_zero(simplify(mul(g, fy2)), cfg).tag != ZeroTag::NonZero) return std::nullopt;
  return f;
}

std::optional<SundmanTransform> derive_transform(const QuadraticOde& ode,
                                                 const CheckReport& rep,
                                                 const Config& cfg) {
  if (rep.verdict != Verdict::Linearizable) return std::nullopt;
  Invariants inv = derived_invariants(ode);
  auto dg = derive_g_impl(ode, inv, rep.case_label, cfg);
  if (!dg) return std::nullopt;
  auto f = derive_f(ode, dg->g, cfg);
  if (!f) return std::nullopt;
  return SundmanTransform{*f, dg->g, dg->provenance};
}

namespace {

std::pair<Expr, ConstVerdict> gate_constant(const Expr& e, const char* which,
                                            const Config& cfg) {
  ConstVerdict v = is_constant(e, cfg);
  if (!v.constant) {
    double wx = cfg.box_x.mid(), wy = cfg.box_y.mid(), val = v.witness_value;
    if (v.witness) {
      wx = v.witness->get("x").value_or(wx);
      wy = v.witness->get("y").value_or(wy);
    }
    throw NonConstantTarget(std::string(which) +
                                " varies over the sampling box; the candidate "
                                "does not reach a constant-coefficient target",
                            which, wx, wy, val);
  }
  Expr canon = v.exact ? Expr::number(v.exact_value) : e;
  return {canon, v};
}

}  // namespace

LinearTarget target_coeffs(const QuadraticOde& ode, const SundmanTransform& t,
                           const Config& cfg) {
  const Expr &F = t.F, &G = t.G;
  Expr gx = dx(G), gy = dy(G), fy = dy(F);
  const Expr &l0 = ode.lambda0, &l1 = ode.lambda1, &l2 = ode.lambda2;

  Expr alpha = simplify(div(
      add(neg(mul(gy, l0)), mul(G, add(dy(l0), mul(l0, l2)))), pow(G, 3)));
  LinearTarget out;
  auto [ac, acv] = gate_constant(alpha, "alpha", cfg);
  out.alpha = ac;
  out.alpha_c = acv;

  Expr beta = simplify(div(add(gx, mul(G, l1)), pow(G, 2)));
  auto [bc, bcv] = gate_constant(beta, "beta", cfg);
  out.beta = bc;
  out.beta_c = bcv;

  Expr gamma = simplify(div(
      add(neg(mul(fy, l0)), product_of({out.alpha, F, pow(G, 2)})), pow(G, 2)));
  auto [gc, gcv] = gate_constant(gamma, "gamma", cfg);
  out.gamma = gc;
  out.gamma_c = gcv;
  return out;
}

CandidateReport verify_candidate(const QuadraticOde& ode, const SundmanTransform& t,
                                 const Config& cfg) {
  CandidateReport rep;
  rep.seed = cfg.seed;
  const Expr &F = t.F, &G = t.G;
  Expr fx = dx(F), fy = dy(F);
  Expr fxx = dx(fx), fxy = dy(fx), fyy = dy(fy);
  Expr gx = dx(G), gy = dy(G);
  Expr K = simplify(mul(G, fy));

  rep.k_nonzero = is_zero(K, cfg);
  if (rep.k_nonzero.tag != ZeroTag::NonZero)
    rep.notes.push_back("K = G*F_y is not nonzero on the sampling box");
  if (is_zero(simplify(gy), cfg).zeroish()) {
    rep.point_transformation = true;
    rep.notes.push_back("G_y = 0: the map degenerates to a point transformation");
  }

  auto push = [&](const char* id, const char* raw, Expr residual) {
    ConditionResult r;
    r.id = id;
    r.raw_text = raw;
    r.cleared = simplify(std::move(residual));
    r.verdict = is_zero(r.cleared, cfg);
    rep.residuals.push_back(std::move(r));
  };

  push("residual-lambda2", "lambda2*K = F_yy*G - F_y*G_y",
       sub(mul(ode.lambda2, K), sub(mul(fyy, G), mul(fy, gy))));

  try {
    rep.target = target_coeffs(ode, t, cfg);
  } catch (const NonConstantTarget& e) {
    rep.notes.push_back(std::string("target: ") + e.what());
  }
  if (rep.target) {
    const Expr &alpha = rep.target->alpha, &beta = rep.target->beta,
               &gamma = rep.target->gamma;
    push("residual-lambda1",
         "lambda1*K = 2F_xy*G - F_x*G_y - F_y*G_x + F_y*beta*G^2",
         sub(mul(ode.lambda1, K),
             sum_of({mul(num(2), mul(fxy, G)), neg(mul(fx, gy)),
                     neg(mul(fy, gx)), product_of({fy, beta, pow(G, 2)})})));
    push("residual-lambda0",
         "lambda0*K = F_xx*G - F_x*G_x + F_x*beta*G^2 + alpha*F*G^3 - G^3*gamma",
         sub(mul(ode.lambda0, K),
             sum_of({mul(fxx, G), neg(mul(fx, gx)),
                     product_of({fx, beta, pow(G, 2)}),
                     product_of({alpha, F, pow(G, 3)}),
                     neg(mul(pow(G, 3), gamma))})));
  }

  bool residuals_ok = rep.residuals.size() == 3;
  for (const ConditionResult& r : rep.residuals)
    residuals_ok = residuals_ok && r.verdict.zeroish();
  rep.ok = residuals_ok && rep.k_nonzero.tag == ZeroTag::NonZero && rep.target.has_value();
  return rep;
}

LinearSolution linear_general_solution(const LinearTarget& target) {
  const Expr &a = target.alpha, &b = target.beta, &g = target.gamma;
  Expr t = sym("t"), c1 = sym("c1"), c2 = sym("c2");

  Expr particular;
  if (!a.is_zero_number())
    particular = simplify(div(g, a));
  else if (!b.is_zero_number())
    particular = simplify(mul(div(g, b), t));
  else
    particular = simplify(mul(div(g, num(2)), pow(t, 2)));

  Expr disc = simplify(sub(pow(b, 2), mul(num(4), a)));
  bool dzero = disc.is_zero_number();
  bool dneg = false;
  if (disc.is_number()) {
    dneg = disc.num() < 0;
  } else {
    Binding none;
    auto v = try_eval(disc, none);
    dneg = v && *v < 0;
    dzero = v && *v == 0;
  }

  LinearSolution sol;
  Expr hom = num(0);
  if (dzero) {
    sol.kind = LinearSolution::Roots::RealDouble;
    Expr r = simplify(div(neg(b), num(2)));
    hom = mul(add(c1, mul(c2, t)), exp_e(mul(r, t)));
  } else if (!dneg) {
    sol.kind = LinearSolution::Roots::RealDistinct;
    Expr s = simplify(pow(disc, Expr::number(Rat(1, 2))));
    Expr r1 = simplify(div(add(neg(b), s), num(2)));
    Expr r2 = simplify(div(sub(neg(b), s), num(2)));
    hom = add(mul(c1, exp_e(mul(r1, t))), mul(c2, exp_e(mul(r2, t))));
  } else {
    sol.kind = LinearSolution::Roots::ComplexPair;
    Expr w = simplify(div(pow(neg(disc), Expr::number(Rat(1, 2))), num(2)));
    Expr re = simplify(div(neg(b), num(2)));
    hom = mul(exp_e(mul(re, t)),
              add(mul(c1, Expr::call(Fn::Cos, mul(w, t))),
                  mul(c2, Expr::call(Fn::Sin, mul(w, t)))));
  }
  sol.u = simplify(add(hom, particular));
  sol.particular = particular;
  Expr ud = diff(sol.u, "t");
  Expr udd = diff(ud, "t");
  sol.residual = simplify(sub(sum_of({udd, mul(b, ud), mul(a, sol.u)}), g));
  return sol;
}

}  // namespace sundman

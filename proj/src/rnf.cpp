// Rational normal form: every expression is flattened into a cancelled
// fraction of multivariate polynomials whose indeterminates ("atoms") are
// symbols, exp/ln/sin/cos applications, surds, and irreducible powers.
// simplify() round-trips through this form, which makes it deterministic,
// idempotent, and exact on the rational/exponential fragment the rest of
// the engine relies on.

#include <algorithm>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "sundman/errors.hpp"
#include "sundman/expr.hpp"
#include "sundman/symcore.hpp"

namespace sundman {

std::string rat_to_string(const Rat& r) {
  if (is_integer(r)) return rat_num(r).str();
  return rat_num(r).str() + "/" + rat_den(r).str();
}

std::optional<Int> iroot(const Int& value, unsigned n) {
  if (n == 0) return std::nullopt;
  if (n == 1 || value == 0 || value == 1) return value;
  bool negative = value < 0;
  if (negative && n % 2 == 0) return std::nullopt;
  Int v = negative ? Int(-value) : value;
  // Binary search for r with r^n == v.
  Int lo = 1, hi = v;
  while (lo <= hi) {
    Int mid = (lo + hi) / 2;
    Int p = boost::multiprecision::pow(mid, n);
    if (p == v) return negative ? Int(-mid) : mid;
    if (p < v)
      lo = mid + 1;
    else
      hi = mid - 1;
  }
  return std::nullopt;
}

Rat rat_pow_int(const Rat& base, long expo) {
  if (expo == 0) return Rat(1);
  bool inv = expo < 0;
  unsigned long e = inv ? static_cast<unsigned long>(-expo) : static_cast<unsigned long>(expo);
  Rat acc(1), b = base;
  while (e) {
    if (e & 1) acc *= b;
    b *= b;
    e >>= 1;
  }
  if (inv) {
    if (acc == 0) throw DomainError("zero to a negative power");
    acc = Rat(1) / acc;
  }
  return acc;
}

std::optional<Rat> rat_pow_exact(const Rat& base, const Rat& expo) {
  if (is_integer(expo)) return rat_pow_int(base, to_long(expo));
  if (base == 0) {
    if (expo > 0) return Rat(0);
    return std::nullopt;
  }
  unsigned q = rat_den(expo).template convert_to<unsigned>();
  auto rn = iroot(rat_num(base), q);
  auto rd = iroot(rat_den(base), q);
  if (!rn || !rd) return std::nullopt;
  Rat root(*rn, *rd);
  return rat_pow_int(root, to_long(Rat(rat_num(expo))));
}

Rat rat_gcd(const Rat& a, const Rat& b) {
  Int n = boost::multiprecision::gcd(rat_num(a), rat_num(b));
  Int d = boost::multiprecision::lcm(rat_den(a), rat_den(b));
  if (n == 0) return Rat(0);
  return Rat(n, d);
}

namespace {

Rat rat_floor(const Rat& r) {
  Int p = rat_num(r), q = rat_den(r);
  Int m = ((p % q) + q) % q;
  return Rat((p - m) / q);
}

struct ExprLess {
  bool operator()(const Expr& a, const Expr& b) const { return Expr::cmp(a, b) < 0; }
};

using Mono = std::map<Expr, Rat, ExprLess>;  // base -> nonzero exponent

int mono_cmp(const Mono& a, const Mono& b) {
  auto ia = a.begin(), ib = b.begin();
  for (;;) {
    if (ia == a.end() && ib == b.end()) return 0;
    if (ia == a.end()) return -1;
    if (ib == b.end()) return 1;
    int c = Expr::cmp(ia->first, ib->first);
    if (c != 0) return c;
    if (ia->second != ib->second) return ia->second < ib->second ? -1 : 1;
    ++ia;
    ++ib;
  }
}

struct MonoLess {
  bool operator()(const Mono& a, const Mono& b) const { return mono_cmp(a, b) < 0; }
};

// Raw polynomial: exponents of any sign, atoms not yet merged or expanded.
using Poly = std::map<Mono, Rat, MonoLess>;

struct Frac {
  Poly num, den;  // den is a normalized nonzero polynomial
};

Poly poly_const(const Rat& c) {
  Poly p;
  if (c != 0) p.emplace(Mono{}, c);
  return p;
}

Poly poly_one() { return poly_const(Rat(1)); }

void poly_accum(Poly& p, const Mono& m, const Rat& c) {
  if (c == 0) return;
  auto [it, fresh] = p.emplace(m, c);
  if (!fresh) {
    it->second += c;
    if (it->second == 0) p.erase(it);
  }
}

Poly raw_add(const Poly& a, const Poly& b) {
  Poly r = a;
  for (const auto& [m, c] : b) poly_accum(r, m, c);
  return r;
}

Poly raw_neg(const Poly& a) {
  Poly r;
  for (const auto& [m, c] : a) r.emplace(m, Rat(-c));
  return r;
}

Poly raw_mul(const Poly& a, const Poly& b) {
  Poly r;
  for (const auto& [ma, ca] : a)
    for (const auto& [mb, cb] : b) {
      Mono m = ma;
      for (const auto& [base, e] : mb) {
        auto [it, fresh] = m.emplace(base, e);
        if (!fresh) {
          it->second += e;
          if (it->second == 0) m.erase(it);
        }
      }
      poly_accum(r, m, ca * cb);
    }
  return r;
}

Poly raw_scale(const Poly& a, const Rat& c) {
  Poly r;
  if (c == 0) return r;
  for (const auto& [m, k] : a) r.emplace(m, Rat(k * c));
  return r;
}

constexpr std::size_t kExpandCap = 20000;

Poly raw_pow_uint(const Poly& a, unsigned long n);
Poly to_raw(const Expr& e);
Frac normalize(Poly p);
Expr from_frac(const Frac& f);

Expr canonical_of_raw(const Poly& p) { return from_frac(normalize(p)); }

// exp(arg) as a raw polynomial: rational multiples of logarithms in the
// argument fold into power factors, the remainder stays under exp.
Poly exp_of(const Expr& canonical_arg);

Poly raw_pow(const Poly& a, const Rat& r);

// ln(arg) for canonical arg, splitting monomial content formally.
Poly ln_of(const Expr& canonical_arg) {
  if (canonical_arg.is_one()) return Poly{};
  if (canonical_arg.kind() == Kind::Call && canonical_arg.fn() == Fn::Exp)
    return to_raw(canonical_arg.kids()[0]);
  // Detect a single-monomial argument with positive rational coefficient.
  Rat coef(1);
  std::vector<std::pair<Expr, Rat>> factors;
  bool monomial = true;
  auto absorb = [&](const Expr& f) {
    if (f.is_number()) {
      coef *= f.num();
    } else if (f.kind() == Kind::Power && f.kids()[1].is_number()) {
      factors.emplace_back(f.kids()[0], f.kids()[1].num());
    } else if (f.kind() == Kind::Sum || f.kind() == Kind::Product) {
      monomial = false;
    } else {
      factors.emplace_back(f, Rat(1));
    }
  };
  if (canonical_arg.kind() == Kind::Product) {
    for (const Expr& k : canonical_arg.kids()) absorb(k);
  } else {
    absorb(canonical_arg);
  }
  if (!monomial || coef <= 0) {
    Mono m;
    m.emplace(Expr::call(Fn::Ln, canonical_arg), Rat(1));
    Poly p;
    p.emplace(std::move(m), Rat(1));
    return p;
  }
  Poly acc;
  for (const auto& [base, e] : factors) {
    if (base.kind() == Kind::Call && base.fn() == Fn::Exp) {
      acc = raw_add(acc, raw_scale(to_raw(base.kids()[0]), e));
    } else {
      Mono m;
      m.emplace(Expr::call(Fn::Ln, base), Rat(1));
      Poly p;
      p.emplace(std::move(m), e);
      acc = raw_add(acc, p);
    }
  }
  if (coef != 1) {
    Mono m;
    m.emplace(Expr::call(Fn::Ln, Expr::number(coef)), Rat(1));
    Poly p;
    p.emplace(std::move(m), Rat(1));
    acc = raw_add(acc, p);
  }
  return acc;
}

// Splits the canonical form into (sign, magnitude) by the sign of the
// leading coefficient, used to orient odd/even function arguments.
std::pair<int, Expr> split_sign(const Expr& canonical) {
  const Expr* probe = &canonical;
  if (canonical.kind() == Kind::Sum || canonical.kind() == Kind::Product) {
    // Leading rational coefficient sits first when present.
    probe = &canonical.kids()[0];
  }
  if (probe->is_number() && probe->num() < 0) {
    Poly p = raw_scale(to_raw(canonical), Rat(-1));
    return {-1, canonical_of_raw(p)};
  }
  return {1, canonical};
}

Poly atom_poly(Expr base, const Rat& expo) {
  Mono m;
  m.emplace(std::move(base), expo);
  Poly p;
  p.emplace(std::move(m), Rat(1));
  return p;
}

Poly exp_of(const Expr& canonical_arg) {
  Poly arg = to_raw(canonical_arg);
  Poly rest;
  Poly acc = poly_one();
  for (const auto& [m, c] : arg) {
    if (m.size() == 1 && m.begin()->second == 1 && m.begin()->first.kind() == Kind::Call &&
        m.begin()->first.fn() == Fn::Ln) {
      acc = raw_mul(acc, raw_pow(to_raw(m.begin()->first.kids()[0]), c));
    } else {
      poly_accum(rest, m, c);
    }
  }
  if (!rest.empty()) {
    Expr r = canonical_of_raw(rest);
    if (!r.is_zero_number()) acc = raw_mul(acc, atom_poly(Expr::call(Fn::Exp, r), Rat(1)));
  }
  return acc;
}

Poly raw_pow_uint(const Poly& a, unsigned long n) {
  Poly acc = poly_one();
  Poly b = a;
  while (n) {
    if (n & 1) acc = raw_mul(acc, b);
    b = n > 1 ? raw_mul(b, b) : b;
    n >>= 1;
  }
  return acc;
}

// Estimated term count of a^n, used to cap eager expansion.
bool expansion_too_big(std::size_t terms, unsigned long n) {
  double est = 1.0;
  for (unsigned long i = 0; i < n; ++i) {
    est *= static_cast<double>(terms);
    if (est > static_cast<double>(kExpandCap)) return true;
  }
  return false;
}

Poly raw_pow(const Poly& a, const Rat& r) {
  if (r == 0) return poly_one();
  if (a.empty()) {
    if (r > 0) return Poly{};
    throw DomainError("zero raised to a negative power");
  }
  if (is_integer(r)) {
    long n = to_long(r);
    if (n > 0) {
      if (!expansion_too_big(a.size(), static_cast<unsigned long>(n)))
        return raw_pow_uint(a, static_cast<unsigned long>(n));
    }
    if (a.size() == 1) {
      const auto& [m, c] = *a.begin();
      Mono inv;
      for (const auto& [base, e] : m) inv.emplace(base, Rat(e * r));
      Poly p;
      p.emplace(std::move(inv), rat_pow_int(c, n));
      return p;
    }
    Expr key = canonical_of_raw(a);
    if (key.is_number()) return poly_const(rat_pow_int(key.num(), n));
    return atom_poly(key, r);
  }
  // Fractional exponent: distribute over a single term, otherwise atomize.
  if (a.size() == 1) {
    const auto& [m, c] = *a.begin();
    Poly acc = poly_one();
    Mono residual;
    for (const auto& [base, e] : m) {
      if (base.kind() == Kind::Call && base.fn() == Fn::Exp) {
        Poly sarg = raw_scale(to_raw(base.kids()[0]), e * r);
        acc = raw_mul(acc, exp_of(canonical_of_raw(sarg)));
      } else {
        residual.emplace(base, Rat(e * r));
      }
    }
    if (!residual.empty()) {
      Poly p;
      p.emplace(std::move(residual), Rat(1));
      acc = raw_mul(acc, p);
    }
    if (c != 1) {
      if (auto exact = rat_pow_exact(c, r)) {
        acc = raw_scale(acc, *exact);
      } else {
        acc = raw_mul(acc, atom_poly(Expr::number(c), r));
      }
    }
    return acc;
  }
  Expr key = canonical_of_raw(a);
  if (key.is_number()) {
    if (auto exact = rat_pow_exact(key.num(), r)) return poly_const(*exact);
    return atom_poly(key, r);
  }
  return atom_poly(key, r);
}

Poly to_raw(const Expr& e) {
  switch (e.kind()) {
    case Kind::Number:
      return poly_const(e.num());
    case Kind::Symbol:
      return atom_poly(e, Rat(1));
    case Kind::Sum: {
      Poly acc;
      for (const Expr& k : e.kids()) acc = raw_add(acc, to_raw(k));
      return acc;
    }
    case Kind::Product: {
      Poly acc = poly_one();
      for (const Expr& k : e.kids()) acc = raw_mul(acc, to_raw(k));
      return acc;
    }
    case Kind::Power: {
      const Expr& b = e.kids()[0];
      const Expr& x = e.kids()[1];
      Poly xp = to_raw(x);
      Expr xc = canonical_of_raw(xp);
      if (xc.is_number()) return raw_pow(to_raw(b), xc.num());
      Poly bp = to_raw(b);
      Expr bc = canonical_of_raw(bp);
      if (bc.is_one()) return poly_one();
      return atom_poly(Expr::power(bc, xc), Rat(1));
    }
    case Kind::Call: {
      Expr arg = canonical_of_raw(to_raw(e.kids()[0]));
      switch (e.fn()) {
        case Fn::Exp:
          return exp_of(arg);
        case Fn::Ln:
          return ln_of(arg);
        case Fn::Sqrt:
          return raw_pow(to_raw(arg), Rat(1, 2));
        case Fn::Sin: {
          if (arg.is_zero_number()) return Poly{};
          auto [sgn, mag] = split_sign(arg);
          Poly p = atom_poly(Expr::call(Fn::Sin, mag), Rat(1));
          return sgn < 0 ? raw_neg(p) : p;
        }
        case Fn::Cos: {
          if (arg.is_zero_number()) return poly_one();
          auto [sgn, mag] = split_sign(arg);
          (void)sgn;
          return atom_poly(Expr::call(Fn::Cos, mag), Rat(1));
        }
      }
      return Poly{};
    }
  }
  return Poly{};
}

// ---- term cleanup ---------------------------------------------------------

// Rewrites one raw term until its monomial satisfies the clean-atom
// invariants: at most one exp atom carrying exponent 1, no integer powers of
// numbers or expandable sums, opaque powers folded. Returns a polynomial
// because expansions can spread a term out.
Poly clean_term(Mono m, Rat c) {
  if (c == 0) return Poly{};
  for (;;) {
    bool changed = false;
    // Number bases.
    for (auto it = m.begin(); it != m.end();) {
      if (it->first.is_number()) {
        const Rat& base = it->first.num();
        if (base == 1) {
          it = m.erase(it);
          changed = true;
          continue;
        }
        if (base == 0) {
          if (it->second > 0) return Poly{};
          throw DomainError("zero raised to a negative power");
        }
        if (auto exact = rat_pow_exact(base, it->second)) {
          c *= *exact;
          it = m.erase(it);
          changed = true;
          continue;
        }
      }
      ++it;
    }
    // exp atoms: merge and keep exponent 1.
    {
      std::vector<std::pair<Expr, Rat>> exps;
      for (auto it = m.begin(); it != m.end();) {
        if (it->first.kind() == Kind::Call && it->first.fn() == Fn::Exp) {
          exps.emplace_back(it->first, it->second);
          it = m.erase(it);
        } else {
          ++it;
        }
      }
      if (exps.size() == 1 && exps[0].second == 1) {
        // Already clean; put it back.
        m.emplace(exps[0].first, Rat(1));
      } else if (!exps.empty()) {
        Poly total;
        for (const auto& [atom, e] : exps)
          total = raw_add(total, raw_scale(to_raw(atom.kids()[0]), e));
        Poly factor = exp_of(canonical_of_raw(total));
        Poly rest;
        rest.emplace(std::move(m), c);
        Poly out;
        for (const auto& [fm, fc] : raw_mul(rest, factor)) {
          Poly piece = clean_term(fm, fc);
          out = raw_add(out, piece);
        }
        return out;
      }
    }
    // Sum bases with usable integer part; opaque powers.
    for (auto it = m.begin(); it != m.end(); ++it) {
      const Expr& base = it->first;
      const Rat& e = it->second;
      if (base.kind() == Kind::Sum && e >= 1) {
        Rat n = rat_floor(e);
        Rat f = e - n;
        Poly bp = to_raw(base);
        unsigned long un = static_cast<unsigned long>(to_long(n));
        if (!expansion_too_big(bp.size(), un)) {
          Mono rest_m = m;
          rest_m.erase(base);
          if (f != 0) rest_m.emplace(base, f);
          Poly rest;
          rest.emplace(std::move(rest_m), c);
          Poly out;
          for (const auto& [fm, fc] : raw_mul(rest, raw_pow_uint(bp, un))) {
            Poly piece = clean_term(fm, fc);
            out = raw_add(out, piece);
          }
          return out;
        }
        if (!is_integer(e)) {
          // Keep integer and fractional parts as one atom exponent; nothing
          // to do beyond the cap.
        }
      }
      if (base.kind() == Kind::Power && e != 1) {
        Expr folded = simplify(Expr::product({Expr::number(e), base.kids()[1]}));
        Mono rest_m = m;
        rest_m.erase(base);
        Poly rest;
        rest.emplace(std::move(rest_m), c);
        Poly factor;
        if (folded.is_number()) {
          factor = raw_pow(to_raw(base.kids()[0]), folded.num());
        } else {
          factor = atom_poly(Expr::power(base.kids()[0], folded), Rat(1));
        }
        Poly out;
        for (const auto& [fm, fc] : raw_mul(rest, factor)) {
          Poly piece = clean_term(fm, fc);
          out = raw_add(out, piece);
        }
        return out;
      }
    }
    if (!changed) break;
  }
  Poly p;
  p.emplace(std::move(m), c);
  return p;
}

Poly clean_poly(const Poly& p) {
  Poly out;
  for (const auto& [m, c] : p) out = raw_add(out, clean_term(m, c));
  return out;
}

// ---- polynomial gcd over integer-scaled exponents -------------------------

using ScaledPoly = std::map<std::map<Expr, long, ExprLess>, Rat>;

struct DenseView {
  std::vector<Poly> coef;  // coef[d] multiplies main^d
};

long exponent_of(const Mono& m, const Expr& atom) {
  auto it = m.find(atom);
  if (it == m.end()) return 0;
  return to_long(it->second);
}

DenseView decompose(const Poly& p, const Expr& atom) {
  DenseView v;
  for (const auto& [m, c] : p) {
    long d = exponent_of(m, atom);
    if (static_cast<std::size_t>(d) >= v.coef.size()) v.coef.resize(d + 1);
    Mono rest = m;
    rest.erase(atom);
    poly_accum(v.coef[d], rest, c);
  }
  while (!v.coef.empty() && v.coef.back().empty()) v.coef.pop_back();
  return v;
}

Poly recompose(const DenseView& v, const Expr& atom) {
  Poly p;
  for (std::size_t d = 0; d < v.coef.size(); ++d)
    for (const auto& [m, c] : v.coef[d]) {
      Mono full = m;
      if (d > 0) full.emplace(atom, Rat(static_cast<long>(d)));
      poly_accum(p, full, c);
    }
  return p;
}

Rat poly_content(const Poly& p) {
  Rat g(0);
  for (const auto& [m, c] : p) g = rat_gcd(g, c);
  if (g == 0) return Rat(1);
  // Sign of the leading (largest) monomial.
  if (p.rbegin()->second < 0) g = -g;
  return g;
}

Poly poly_divide_exact_rat(const Poly& p, const Rat& c) {
  Poly r;
  for (const auto& [m, k] : p) r.emplace(m, Rat(k / c));
  return r;
}

std::optional<Poly> poly_divide(const Poly& a, const Poly& b);

std::vector<Expr> poly_atoms(const Poly& a, const Poly& b) {
  std::vector<Expr> atoms;
  auto grab = [&](const Poly& p) {
    for (const auto& [m, c] : p) {
      (void)c;
      for (const auto& [base, e] : m) {
        (void)e;
        bool seen = false;
        for (const Expr& x : atoms)
          if (x == base) {
            seen = true;
            break;
          }
        if (!seen) atoms.push_back(base);
      }
    }
  };
  grab(a);
  grab(b);
  std::sort(atoms.begin(), atoms.end(), ExprLess{});
  return atoms;
}

std::optional<Poly> poly_divide(const Poly& a, const Poly& b) {
  if (b.empty()) return std::nullopt;
  if (a.empty()) return Poly{};
  if (b.size() == 1) {
    const auto& [bm, bc] = *b.begin();
    Poly q;
    for (const auto& [am, ac] : a) {
      Mono m = am;
      for (const auto& [base, e] : bm) {
        auto it = m.find(base);
        Rat ne = (it == m.end() ? Rat(0) : it->second) - e;
        if (ne < 0) return std::nullopt;  // not an exact polynomial quotient
        if (it != m.end()) m.erase(it);
        if (ne != 0) m.emplace(base, ne);
      }
      q.emplace(std::move(m), Rat(ac / bc));
    }
    return q;
  }
  std::vector<Expr> atoms = poly_atoms(a, b);
  // Main atom: first one b actually uses.
  const Expr* main = nullptr;
  for (const Expr& at : atoms) {
    for (const auto& [m, c] : b) {
      (void)c;
      if (m.count(at)) {
        main = &at;
        break;
      }
    }
    if (main) break;
  }
  if (!main) return std::nullopt;
  DenseView av = decompose(a, *main);
  DenseView bv = decompose(b, *main);
  long db = static_cast<long>(bv.coef.size()) - 1;
  DenseView q;
  while (!av.coef.empty()) {
    long da = static_cast<long>(av.coef.size()) - 1;
    if (da < db) return std::nullopt;
    auto qc = poly_divide(av.coef[da], bv.coef[db]);
    if (!qc) return std::nullopt;
    long shift = da - db;
    if (static_cast<std::size_t>(shift) >= q.coef.size()) q.coef.resize(shift + 1);
    q.coef[shift] = raw_add(q.coef[shift], *qc);
    // a -= qc * main^shift * b
    for (long j = 0; j <= db; ++j) {
      Poly prod = raw_mul(*qc, bv.coef[j]);
      long idx = j + shift;
      if (static_cast<std::size_t>(idx) >= av.coef.size()) av.coef.resize(idx + 1);
      av.coef[idx] = raw_add(av.coef[idx], raw_neg(prod));
    }
    while (!av.coef.empty() && av.coef.back().empty()) av.coef.pop_back();
    bool all_empty = true;
    for (const Poly& cp : av.coef)
      if (!cp.empty()) {
        all_empty = false;
        break;
      }
    if (all_empty) break;
  }
  for (const Poly& cp : av.coef)
    if (!cp.empty()) return std::nullopt;
  return recompose(q, *main);
}

Poly poly_gcd(Poly a, Poly b);

Poly poly_gcd_many(const std::vector<Poly>& ps) {
  Poly g;
  for (const Poly& p : ps) {
    g = g.empty() ? p : poly_gcd(g, p);
    if (g.size() == 1 && g.begin()->first.empty()) break;  // constant
  }
  return g;
}

// Pseudo-remainder of a by b in the given atom.
Poly pseudo_rem(Poly a, const Poly& b, const Expr& atom) {
  DenseView bv = decompose(b, atom);
  long db = static_cast<long>(bv.coef.size()) - 1;
  const Poly& lcb = bv.coef[db];
  for (;;) {
    DenseView av = decompose(a, atom);
    long da = static_cast<long>(av.coef.size()) - 1;
    if (av.coef.empty() || da < db) return a;
    const Poly lca = av.coef[da];
    // a = a*lcb - lca*main^(da-db)*b
    Poly a2 = raw_mul(a, lcb);
    Poly sub = raw_mul(lca, b);
    Mono shift;
    if (da - db > 0) shift.emplace(atom, Rat(da - db));
    Poly shifted;
    for (const auto& [m, c] : sub) {
      Mono mm = m;
      for (const auto& [base, e] : shift) {
        auto [it, fresh] = mm.emplace(base, e);
        if (!fresh) it->second += e;
      }
      poly_accum(shifted, mm, c);
    }
    a = raw_add(a2, raw_neg(shifted));
  }
}

Poly primitive_wrt(const Poly& p, const Expr& atom, Poly* content_out) {
  DenseView v = decompose(p, atom);
  std::vector<Poly> coefs;
  for (const Poly& c : v.coef)
    if (!c.empty()) coefs.push_back(c);
  Poly cont = poly_gcd_many(coefs);
  if (content_out) *content_out = cont;
  auto q = poly_divide(p, cont);
  return q ? *q : p;
}

bool poly_is_constant(const Poly& p) { return p.empty() || (p.size() == 1 && p.begin()->first.empty()); }

Poly poly_gcd(Poly a, Poly b) {
  if (a.empty()) return b;
  if (b.empty()) return a;
  Rat ca = poly_content(a), cb = poly_content(b);
  a = poly_divide_exact_rat(a, ca);
  b = poly_divide_exact_rat(b, cb);
  if (poly_is_constant(a) || poly_is_constant(b)) return poly_one();
  std::vector<Expr> atoms = poly_atoms(a, b);
  // Use the first atom present in both; if none, gcd is carried by contents.
  const Expr* main = nullptr;
  for (const Expr& at : atoms) {
    bool in_a = false, in_b = false;
    for (const auto& [m, c] : a) {
      (void)c;
      if (m.count(at)) {
        in_a = true;
        break;
      }
    }
    for (const auto& [m, c] : b) {
      (void)c;
      if (m.count(at)) {
        in_b = true;
        break;
      }
    }
    if (in_a && in_b) {
      main = &at;
      break;
    }
    if (in_a != in_b) {
      // One side is free of this atom: gcd divides that side's content
      // with respect to it on the other side.
      const Poly& holder = in_a ? a : b;
      const Poly& other = in_a ? b : a;
      Poly cont;
      primitive_wrt(holder, at, &cont);
      return poly_gcd(cont, other);
    }
  }
  if (!main) return poly_one();
  Poly cont_a, cont_b;
  Poly pa = primitive_wrt(a, *main, &cont_a);
  Poly pb = primitive_wrt(b, *main, &cont_b);
  Poly g_cont = poly_gcd(cont_a, cont_b);
  // Primitive PRS.
  std::size_t guard = 0;
  while (!pb.empty()) {
    if (++guard > 64) return poly_one();
    Poly r = pseudo_rem(pa, pb, *main);
    pa = std::move(pb);
    pb = r.empty() ? Poly{} : primitive_wrt(r, *main, nullptr);
    pb = pb.empty() ? pb : poly_divide_exact_rat(pb, poly_content(pb));
  }
  DenseView fin = decompose(pa, *main);
  Poly g_pp = fin.coef.size() > 1 ? poly_divide_exact_rat(pa, poly_content(pa)) : poly_one();
  Poly g = raw_mul(g_cont, g_pp);
  if (poly_is_constant(g)) return poly_one();
  if (!poly_divide(a, g) || !poly_divide(b, g)) return poly_one();
  return g;
}

// Scales fractional exponents up to integers per atom so the gcd machinery
// sees ordinary polynomials. Returns false when that is not possible.
bool integer_scale(const Poly& a, const Poly& b, Poly& sa, Poly& sb,
                   std::map<Expr, Int, ExprLess>& scale) {
  auto collect = [&](const Poly& p) {
    for (const auto& [m, c] : p) {
      (void)c;
      for (const auto& [base, e] : m) {
        Int d = rat_den(e);
        auto [it, fresh] = scale.emplace(base, d);
        if (!fresh) it->second = boost::multiprecision::lcm(it->second, d);
      }
    }
  };
  collect(a);
  collect(b);
  bool any = false;
  for (const auto& [base, d] : scale) {
    (void)base;
    if (d != 1) any = true;
    if (d > 64) return false;
  }
  auto apply = [&](const Poly& p) {
    Poly out;
    for (const auto& [m, c] : p) {
      Mono mm;
      for (const auto& [base, e] : m) mm.emplace(base, Rat(e * Rat(scale.at(base))));
      out.emplace(std::move(mm), c);
    }
    return out;
  };
  if (!any) {
    sa = a;
    sb = b;
  } else {
    sa = apply(a);
    sb = apply(b);
  }
  return true;
}

Poly unscale(const Poly& p, const std::map<Expr, Int, ExprLess>& scale, bool& ok) {
  Poly out;
  for (const auto& [m, c] : p) {
    Mono mm;
    for (const auto& [base, e] : m) {
      auto it = scale.find(base);
      Rat ne = it == scale.end() ? e : Rat(e / Rat(it->second));
      mm.emplace(base, ne);
    }
    out.emplace(std::move(mm), c);
  }
  ok = true;
  return out;
}

// ---- fraction normalization ------------------------------------------------

bool exponents_integral(const Poly& p) {
  for (const auto& [m, c] : p) {
    (void)c;
    for (const auto& [base, e] : m) {
      (void)base;
      if (!is_integer(e)) return false;
    }
  }
  return true;
}

Frac normalize(Poly raw) {
  Poly p = clean_poly(raw);
  // Extract negative exponents into the denominator.
  std::map<Expr, Rat, ExprLess> shift;
  for (const auto& [m, c] : p) {
    (void)c;
    for (const auto& [base, e] : m) {
      if (e < 0) {
        auto [it, fresh] = shift.emplace(base, Rat(-e));
        if (!fresh && -e > it->second) it->second = -e;
      }
    }
  }
  Poly num;
  Mono den_m;
  for (const auto& [base, s] : shift) den_m.emplace(base, s);
  if (den_m.empty()) {
    num = std::move(p);
  } else {
    for (const auto& [m, c] : p) {
      Mono mm = m;
      for (const auto& [base, s] : den_m) {
        auto [it, fresh] = mm.emplace(base, s);
        if (!fresh) {
          it->second += s;
          if (it->second == 0) mm.erase(base);
        }
      }
      poly_accum(num, mm, c);
    }
  }
  Poly den;
  den.emplace(std::move(den_m), Rat(1));
  den = clean_poly(den);  // may expand sum atoms moved below the bar
  num = clean_poly(num);

  Frac f;
  f.num = std::move(num);
  f.den = std::move(den);
  if (f.num.empty()) {
    f.den = poly_one();
    return f;
  }

  // Cancel common monomial content.
  {
    std::map<Expr, Rat, ExprLess> common;
    bool first = true;
    auto fold = [&](const Poly& p2) {
      for (const auto& [m, c] : p2) {
        (void)c;
        if (first) {
          for (const auto& [base, e] : m) common.emplace(base, e);
          first = false;
        } else {
          for (auto it = common.begin(); it != common.end();) {
            auto jt = m.find(it->first);
            if (jt == m.end()) {
              it = common.erase(it);
            } else {
              if (jt->second < it->second) it->second = jt->second;
              ++it;
            }
          }
        }
        if (common.empty()) break;
      }
    };
    fold(f.num);
    fold(f.den);
    if (!common.empty()) {
      auto strip = [&](Poly& p2) {
        Poly out;
        for (const auto& [m, c] : p2) {
          Mono mm = m;
          for (const auto& [base, e] : common) {
            auto it = mm.find(base);
            it->second -= e;
            if (it->second == 0) mm.erase(it);
          }
          out.emplace(std::move(mm), c);
        }
        p2 = std::move(out);
      };
      strip(f.num);
      strip(f.den);
    }
  }

  // Polynomial gcd cancellation.
  if (!poly_is_constant(f.den) && !poly_is_constant(f.num)) {
    std::map<Expr, Int, ExprLess> scale;
    Poly sa, sb;
    if (integer_scale(f.num, f.den, sa, sb, scale) && exponents_integral(sa) &&
        exponents_integral(sb)) {
      Poly g = poly_gcd(sa, sb);
      if (!poly_is_constant(g)) {
        auto qa = poly_divide(sa, g);
        auto qb = poly_divide(sb, g);
        if (qa && qb) {
          bool ok_a = false, ok_b = false;
          Poly ua = unscale(*qa, scale, ok_a);
          Poly ub = unscale(*qb, scale, ok_b);
          if (ok_a && ok_b) {
            f.num = std::move(ua);
            f.den = std::move(ub);
          }
        }
      }
    }
  }

  // Integer-primitive denominator with positive leading coefficient.
  Rat dc = poly_content(f.den);
  if (dc != 1) {
    f.den = poly_divide_exact_rat(f.den, dc);
    f.num = poly_divide_exact_rat(f.num, dc);
  }
  if (poly_is_constant(f.den)) {
    Rat c = f.den.empty() ? Rat(0) : f.den.begin()->second;
    if (c == 0) throw DomainError("division by zero in simplification");
    if (c != 1) {
      f.num = poly_divide_exact_rat(f.num, c);
      f.den = poly_one();
    }
  }
  return f;
}

// ---- emission ---------------------------------------------------------------

Expr mono_expr(const Mono& m, const Rat& c) {
  std::vector<Expr> factors;
  if (c != 1) factors.push_back(Expr::number(c));
  for (const auto& [base, e] : m) {
    if (e == 1)
      factors.push_back(base);
    else
      factors.push_back(Expr::power(base, Expr::number(e)));
  }
  if (factors.empty()) return Expr::number(Rat(1));
  return Expr::product(std::move(factors));
}

Expr poly_expr(const Poly& p) {
  if (p.empty()) return Expr::number(Rat(0));
  std::vector<Expr> terms;
  for (auto it = p.rbegin(); it != p.rend(); ++it) terms.push_back(mono_expr(it->first, it->second));
  return Expr::sum(std::move(terms));
}

Expr from_frac(const Frac& f) {
  if (f.num.empty()) return Expr::number(Rat(0));
  if (poly_is_constant(f.den)) return poly_expr(f.num);
  if (f.den.size() == 1) {
    // Fold the single-monomial denominator into negative exponents.
    const auto& [dm, dc] = *f.den.begin();
    Poly folded;
    for (const auto& [m, c] : f.num) {
      Mono mm = m;
      for (const auto& [base, e] : dm) {
        auto [it, fresh] = mm.emplace(base, Rat(-e));
        if (!fresh) {
          it->second -= e;
          if (it->second == 0) mm.erase(base);
        }
      }
      folded.emplace(std::move(mm), Rat(c / dc));
    }
    return poly_expr(folded);
  }
  Expr den_e = poly_expr(f.den);
  Expr inv = Expr::power(std::move(den_e), Expr::number(Rat(-1)));
  if (f.num.size() == 1) {
    const auto& [m, c] = *f.num.begin();
    Mono mm = m;
    std::vector<Expr> factors;
    if (c != 1) factors.push_back(Expr::number(c));
    for (const auto& [base, e] : mm)
      factors.push_back(e == 1 ? base : Expr::power(base, Expr::number(e)));
    factors.push_back(std::move(inv));
    return Expr::product(std::move(factors));
  }
  return Expr::product({poly_expr(f.num), std::move(inv)});
}

}  // namespace

Expr simplify(const Expr& e) { return from_frac(normalize(to_raw(e))); }

std::pair<Expr, Expr> as_fraction(const Expr& e) {
  Frac f = normalize(to_raw(e));
  return {poly_expr(f.num), poly_expr(f.den)};
}

namespace {

Expr substitute_raw(const Expr& e, std::string_view var, const Expr& replacement) {
  switch (e.kind()) {
    case Kind::Number:
      return e;
    case Kind::Symbol:
      return e.sym() == var ? replacement : e;
    case Kind::Sum:
    case Kind::Product: {
      std::vector<Expr> kids;
      kids.reserve(e.kids().size());
      for (const Expr& k : e.kids()) kids.push_back(substitute_raw(k, var, replacement));
      return e.kind() == Kind::Sum ? Expr::sum(std::move(kids)) : Expr::product(std::move(kids));
    }
    case Kind::Power:
      return Expr::power(substitute_raw(e.kids()[0], var, replacement),
                         substitute_raw(e.kids()[1], var, replacement));
    case Kind::Call:
      return Expr::call(e.fn(), substitute_raw(e.kids()[0], var, replacement));
  }
  return e;
}

}  // namespace

Expr substitute(const Expr& e, std::string_view var, const Expr& replacement) {
  return simplify(substitute_raw(e, var, replacement));
}

Expr add(const Expr& a, const Expr& b) { return simplify(Expr::sum({a, b})); }
Expr sub(const Expr& a, const Expr& b) {
  return simplify(Expr::sum({a, Expr::product({Expr::number(Rat(-1)), b})}));
}
Expr mul(const Expr& a, const Expr& b) { return simplify(Expr::product({a, b})); }
Expr div(const Expr& a, const Expr& b) {
  return simplify(Expr::product({a, Expr::power(b, Expr::number(Rat(-1)))}));
}
Expr neg(const Expr& a) { return simplify(Expr::product({Expr::number(Rat(-1)), a})); }
Expr pow(const Expr& base, const Expr& expo) { return simplify(Expr::power(base, expo)); }
Expr pow(const Expr& base, long expo) { return pow(base, Expr::number(Rat(expo))); }
Expr sum_of(std::vector<Expr> terms) { return simplify(Expr::sum(std::move(terms))); }
Expr product_of(std::vector<Expr> factors) { return simplify(Expr::product(std::move(factors))); }

}  // namespace sundman

#include <optional>
#include <vector>

#include "sundman/expr.hpp"
#include "sundman/symcore.hpp"

namespace sundman {

namespace {

// Splits a canonical term into c * v^k * exp(E_v) with c free of v and E_v
// the v-dependent additive part of the exponential argument (the v-free
// part is folded into c). Fails on any other v-dependent factor.
struct TermParts {
  Expr c = Expr::number(Rat(1));
  Rat k{0};
  bool has_exp = false;
  Expr exp_arg_v;  // v-dependent part of the exp argument
};

std::optional<TermParts> split_term(const Expr& term, std::string_view v) {
  TermParts parts;
  std::vector<Expr> c_factors;
  std::vector<Expr> factors;
  if (term.kind() == Kind::Product)
    factors = term.kids();
  else
    factors = {term};
  for (const Expr& f : factors) {
    if (!f.depends_on(v)) {
      c_factors.push_back(f);
      continue;
    }
    if (f.is_symbol(v)) {
      parts.k += 1;
      continue;
    }
    if (f.kind() == Kind::Power && f.kids()[0].is_symbol(v) && f.kids()[1].is_number()) {
      parts.k += f.kids()[1].num();
      continue;
    }
    if (f.kind() == Kind::Call && f.fn() == Fn::Exp) {
      if (parts.has_exp) return std::nullopt;
      std::vector<Expr> arg_terms;
      const Expr& arg = f.kids()[0];
      if (arg.kind() == Kind::Sum)
        arg_terms = arg.kids();
      else
        arg_terms = {arg};
      std::vector<Expr> dep, free;
      for (const Expr& t : arg_terms)
        (t.depends_on(v) ? dep : free).push_back(t);
      if (dep.empty()) return std::nullopt;  // cannot happen: f depends on v
      if (!free.empty()) c_factors.push_back(Expr::call(Fn::Exp, Expr::sum(std::move(free))));
      parts.has_exp = true;
      parts.exp_arg_v = simplify(Expr::sum(std::move(dep)));
      continue;
    }
    return std::nullopt;
  }
  parts.c = simplify(Expr::product(std::move(c_factors)));
  return parts;
}

// Matches a * v^m with a free of v; returns (a, m).
std::optional<std::pair<Expr, Rat>> match_power_term(const Expr& e, std::string_view v) {
  std::vector<Expr> factors;
  if (e.kind() == Kind::Product)
    factors = e.kids();
  else
    factors = {e};
  std::vector<Expr> a_factors;
  Rat m(0);
  for (const Expr& f : factors) {
    if (!f.depends_on(v)) {
      a_factors.push_back(f);
      continue;
    }
    if (f.is_symbol(v)) {
      m += 1;
      continue;
    }
    if (f.kind() == Kind::Power && f.kids()[0].is_symbol(v) && f.kids()[1].is_number()) {
      m += f.kids()[1].num();
      continue;
    }
    return std::nullopt;
  }
  if (m == 0) return std::nullopt;
  return std::make_pair(simplify(Expr::product(std::move(a_factors))), m);
}

std::optional<Expr> integrate_term(const Expr& term, std::string_view v) {
  Expr vsym = Expr::symbol(std::string(v));
  auto parts = split_term(term, v);
  if (!parts) return std::nullopt;
  if (!parts->has_exp) {
    if (parts->k == 0) return mul(parts->c, vsym);
    if (parts->k == -1) return mul(parts->c, Expr::call(Fn::Ln, vsym));
    Rat k1 = parts->k + 1;
    return mul(div(parts->c, Expr::number(k1)), pow(vsym, Expr::number(k1)));
  }
  auto pm = match_power_term(parts->exp_arg_v, v);
  if (!pm) return std::nullopt;
  const auto& [a, m] = *pm;
  if (m != parts->k + 1) return std::nullopt;
  // c * v^k * exp(a*v^(k+1)) -> c/(a*(k+1)) * exp(a*v^(k+1))
  Expr denom = mul(a, Expr::number(m));
  if (denom.is_zero_number()) return std::nullopt;
  return mul(div(parts->c, denom), Expr::call(Fn::Exp, parts->exp_arg_v));
}

}  // namespace

std::optional<Expr> antiderivative(const Expr& e, std::string_view var) {
  Expr c = simplify(e);
  std::vector<Expr> terms;
  if (c.kind() == Kind::Sum)
    terms = c.kids();
  else
    terms = {c};
  std::vector<Expr> parts;
  for (const Expr& t : terms) {
    auto p = integrate_term(t, var);
    if (!p) return std::nullopt;
    parts.push_back(*p);
  }
  Expr result = sum_of(std::move(parts));
  // Self-check: the rules above must reproduce the integrand exactly.
  Expr back = sub(diff(result, var), c);
  if (!back.is_zero_number()) return std::nullopt;
  return result;
}

}  // namespace sundman

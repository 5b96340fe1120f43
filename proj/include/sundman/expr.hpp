#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "sundman/rational.hpp"

namespace sundman {

enum class Kind : std::uint8_t { Number, Symbol, Sum, Product, Power, Call };
enum class Fn : std::uint8_t { Exp, Ln, Sin, Cos, Sqrt };

const char* fn_name(Fn f);

// Immutable shared expression tree. Copies are cheap handle copies.
//
// Canonical form (what simplify() produces and every public operation
// returns):
//   - Number: exact rational; decimals entered by the user are parsed
//     exactly, so no float leaf exists.
//   - Sum: >= 2 children, flattened, at most one Number child placed first,
//     remaining terms sorted by Expr::cmp; no zero terms.
//   - Product: >= 2 children, flattened, at most one Number coefficient
//     placed first, factors sorted; no factor equals 1; no two factors share
//     a base (combined through Power).
//   - Power: rational exponents never 0 or 1; integer powers of sums are
//     expanded; sqrt is represented as exponent 1/2.
//   - Call: exp/ln/sin/cos with canonical argument; exp(0), ln(1), sin(0),
//     cos(0) folded; exp(k*ln(u) + r) -> u^k * exp(r); ln of a monomial with
//     positive rational coefficient splits into a sum of logarithms. These
//     rewrites are formal (principal branch); the sampling box keeps numeric
//     work on the positive quadrant where they are valid.
//   - Rational subexpressions are a single cancelled fraction: numerator and
//     denominator polynomials over the atom basis with no common factor,
//     integer-primitive denominator with positive leading coefficient.
//     Single-monomial denominators fold into negative exponents (1/y is
//     Power(y, -1)).
class Expr {
 public:
  Expr();  // the Number 0

  static Expr number(Rat v);
  static Expr number(long v) { return number(Rat(v)); }
  static Expr symbol(std::string name);

  // Structural builders. They flatten nested sums/products and fold the
  // cheap constant cases but do not canonicalize; run simplify() for that.
  static Expr sum(std::vector<Expr> kids);
  static Expr product(std::vector<Expr> kids);
  static Expr power(Expr base, Expr expo);
  static Expr call(Fn f, Expr arg);

  Kind kind() const { return node_->kind; }
  const Rat& num() const { return node_->value; }
  const std::string& sym() const { return node_->name; }
  Fn fn() const { return node_->fn; }
  const std::vector<Expr>& kids() const { return node_->kids; }

  bool is_number() const { return kind() == Kind::Number; }
  bool is_number(const Rat& v) const { return is_number() && num() == v; }
  bool is_zero_number() const { return is_number(Rat(0)); }
  bool is_one() const { return is_number(Rat(1)); }
  bool is_symbol(std::string_view name) const { return kind() == Kind::Symbol && sym() == name; }

  bool depends_on(std::string_view name) const;
  void collect_symbols(std::vector<std::string>& out) const;

  std::size_t hash() const { return node_->hash; }
  bool operator==(const Expr& o) const;
  bool operator!=(const Expr& o) const { return !(*this == o); }

  // Deterministic total order; defines canonical child ordering.
  static int cmp(const Expr& a, const Expr& b);

 private:
  struct Node {
    Kind kind;
    Fn fn = Fn::Exp;
    Rat value;
    std::string name;
    std::vector<Expr> kids;
    std::size_t hash = 0;
  };
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  static Expr make(Node n);
  std::shared_ptr<const Node> node_;
};

inline Expr num(Rat v) { return Expr::number(std::move(v)); }
inline Expr num(long v) { return Expr::number(v); }
inline Expr num(long p, long q) { return Expr::number(Rat(Int(p), Int(q))); }
inline Expr sym(std::string name) { return Expr::symbol(std::move(name)); }

// Convenience arithmetic. Results are canonical.
Expr add(const Expr& a, const Expr& b);
Expr sub(const Expr& a, const Expr& b);
Expr mul(const Expr& a, const Expr& b);
Expr div(const Expr& a, const Expr& b);
Expr neg(const Expr& a);
Expr pow(const Expr& base, const Expr& expo);
Expr pow(const Expr& base, long expo);
Expr sum_of(std::vector<Expr> terms);
Expr product_of(std::vector<Expr> factors);

}  // namespace sundman

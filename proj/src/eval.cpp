#include <cmath>
#include <stdexcept>

#include "sundman/errors.hpp"
#include "sundman/symcore.hpp"

namespace sundman {

void Binding::set(std::string name, double v) {
  for (auto& [n, val] : vals)
    if (n == name) {
      val = v;
      return;
    }
  vals.emplace_back(std::move(name), v);
}

std::optional<double> Binding::get(std::string_view name) const {
  for (const auto& [n, val] : vals)
    if (n == name) return val;
  return std::nullopt;
}

Binding Binding::xy(double x, double y) {
  Binding b;
  b.vals = {{"x", x}, {"y", y}};
  return b;
}

namespace {

double eval_rec(const Expr& e, const Binding& b) {
  switch (e.kind()) {
    case Kind::Number:
      return to_double(e.num());
    case Kind::Symbol: {
      auto v = b.get(e.sym());
      if (!v) throw std::logic_error("unbound symbol: " + e.sym());
      return *v;
    }
    case Kind::Sum: {
      double s = 0;
      for (const Expr& k : e.kids()) s += eval_rec(k, b);
      return s;
    }
    case Kind::Product: {
      double p = 1;
      for (const Expr& k : e.kids()) p *= eval_rec(k, b);
      return p;
    }
    case Kind::Power: {
      double base = eval_rec(e.kids()[0], b);
      double expo = eval_rec(e.kids()[1], b);
      if (base == 0.0 && expo < 0) throw DomainError("zero raised to a negative power");
      if (base < 0) {
        // Negative base needs an integer exponent.
        if (std::rint(expo) != expo) throw DomainError("fractional power of a negative base");
      }
      return std::pow(base, expo);
    }
    case Kind::Call: {
      double a = eval_rec(e.kids()[0], b);
      switch (e.fn()) {
        case Fn::Exp:
          return std::exp(a);
        case Fn::Ln:
          if (a <= 0) throw DomainError("logarithm of a nonpositive value");
          return std::log(a);
        case Fn::Sin:
          return std::sin(a);
        case Fn::Cos:
          return std::cos(a);
        case Fn::Sqrt:
          if (a < 0) throw DomainError("square root of a negative value");
          return std::sqrt(a);
      }
      return 0;
    }
  }
  return 0;
}

}  // namespace

double eval(const Expr& e, const Binding& b) { return eval_rec(e, b); }

std::optional<double> try_eval(const Expr& e, const Binding& b) {
  try {
    double v = eval_rec(e, b);
    if (!std::isfinite(v)) return std::nullopt;
    return v;
  } catch (const DomainError&) {
    return std::nullopt;
  }
}

}  // namespace sundman

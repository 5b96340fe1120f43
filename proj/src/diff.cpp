#include "sundman/expr.hpp"
#include "sundman/symcore.hpp"

namespace sundman {

namespace {

Expr d(const Expr& e, std::string_view v) {
  switch (e.kind()) {
    case Kind::Number:
      return Expr::number(Rat(0));
    case Kind::Symbol:
      return Expr::number(Rat(e.sym() == v ? 1 : 0));
    case Kind::Sum: {
      std::vector<Expr> terms;
      for (const Expr& k : e.kids()) terms.push_back(d(k, v));
      return Expr::sum(std::move(terms));
    }
    case Kind::Product: {
      std::vector<Expr> terms;
      const auto& ks = e.kids();
      for (std::size_t i = 0; i < ks.size(); ++i) {
        std::vector<Expr> factors;
        for (std::size_t j = 0; j < ks.size(); ++j) factors.push_back(j == i ? d(ks[j], v) : ks[j]);
        terms.push_back(Expr::product(std::move(factors)));
      }
      return Expr::sum(std::move(terms));
    }
    case Kind::Power: {
      const Expr& b = e.kids()[0];
      const Expr& x = e.kids()[1];
      if (!x.depends_on(v)) {
        // x * b^(x-1) * b'
        Expr xm1 = Expr::sum({x, Expr::number(Rat(-1))});
        return Expr::product({x, Expr::power(b, xm1), d(b, v)});
      }
      // b^x * (x' ln b + x b'/b)
      Expr t1 = Expr::product({d(x, v), Expr::call(Fn::Ln, b)});
      Expr t2 = Expr::product({x, d(b, v), Expr::power(b, Expr::number(Rat(-1)))});
      return Expr::product({e, Expr::sum({t1, t2})});
    }
    case Kind::Call: {
      const Expr& a = e.kids()[0];
      Expr da = d(a, v);
      switch (e.fn()) {
        case Fn::Exp:
          return Expr::product({e, da});
        case Fn::Ln:
          return Expr::product({da, Expr::power(a, Expr::number(Rat(-1)))});
        case Fn::Sin:
          return Expr::product({Expr::call(Fn::Cos, a), da});
        case Fn::Cos:
          return Expr::product({Expr::number(Rat(-1)), Expr::call(Fn::Sin, a), da});
        case Fn::Sqrt:
          return Expr::product({Expr::number(Rat(1, 2)),
                                Expr::power(a, Expr::number(Rat(-1, 2))), da});
      }
      return Expr::number(Rat(0));
    }
  }
  return Expr::number(Rat(0));
}

}  // namespace

Expr diff(const Expr& e, std::string_view var) { return simplify(d(e, var)); }

}  // namespace sundman

#include <algorithm>
#include <cctype>
#include <sstream>

#include "sundman/errors.hpp"
#include "sundman/parser.hpp"
#include "sundman/symcore.hpp"
#include "sundman/zerotest.hpp"

namespace sundman {

LieForm lie_form(const QuadraticOde& ode) {
  return LieForm{Expr::number(Rat(0)), ode.lambda2, ode.lambda1, ode.lambda0};
}

namespace {

enum class Tok { Num, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, Equals, End };

struct Token {
  Tok type;
  std::string text;
  Rat value;
  std::size_t offset = 0;
};

bool is_fname(const std::string& s) {
  return s == "exp" || s == "ln" || s == "sin" || s == "cos" || s == "sqrt";
}

std::vector<Token> lex(const std::string& text, bool allow_primes) {
  std::vector<Token> out;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    char ch = text[i];
    if (std::isspace(static_cast<unsigned char>(ch))) {
      ++i;
      continue;
    }
    std::size_t start = i;
    if (std::isdigit(static_cast<unsigned char>(ch))) {
      std::string digits;
      while (i < n && std::isdigit(static_cast<unsigned char>(text[i]))) digits += text[i++];
      std::string frac;
      if (i < n && text[i] == '.') {
        ++i;
        while (i < n && std::isdigit(static_cast<unsigned char>(text[i]))) frac += text[i++];
        if (frac.empty())
          throw SyntaxError("expected digits after decimal point", i, "digit");
      }
      Rat v{Int(digits)};
      if (!frac.empty()) {
        Int scale = 1;
        for (std::size_t k = 0; k < frac.size(); ++k) scale *= 10;
        v += Rat(Int(frac), scale);
      }
      out.push_back({Tok::Num, text.substr(start, i - start), v, start});
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
      std::string name;
      while (i < n && (std::isalnum(static_cast<unsigned char>(text[i])) || text[i] == '_'))
        name += text[i++];
      if (i < n && text[i] == '\'') {
        if (!allow_primes)
          throw SyntaxError("derivative primes are not allowed here", i, "operator or end");
        if (name != "y")
          throw SyntaxError("derivative primes apply to y only", i, "y' or y''");
        int primes = 0;
        while (i < n && text[i] == '\'') {
          ++primes;
          ++i;
        }
        if (primes > 2)
          throw SyntaxError("derivatives above second order are not supported", start, "y' or y''");
        name += std::string(primes, '\'');
      }
      out.push_back({Tok::Ident, name, Rat(0), start});
      continue;
    }
    Tok t;
    switch (ch) {
      case '+': t = Tok::Plus; break;
      case '-': t = Tok::Minus; break;
      case '*': t = Tok::Star; break;
      case '/': t = Tok::Slash; break;
      case '^': t = Tok::Caret; break;
      case '(': t = Tok::LParen; break;
      case ')': t = Tok::RParen; break;
      case '=': t = Tok::Equals; break;
      default:
        throw SyntaxError(std::string("unexpected character '") + ch + "'", i,
                          "number, symbol, or operator");
    }
    out.push_back({t, std::string(1, ch), Rat(0), i});
    ++i;
  }
  out.push_back({Tok::End, "", Rat(0), n});
  return out;
}

class Parser {
 public:
  Parser(std::vector<Token> toks, std::vector<std::string> symbols)
      : toks_(std::move(toks)), symbols_(std::move(symbols)) {}

  Expr parse_full() {
    Expr e = expr();
    expect(Tok::End, "end of input");
    return simplify(e);
  }

  std::pair<Expr, Expr> parse_equation() {
    Expr lhs = expr();
    expect(Tok::Equals, "'='");
    Expr rhs = expr();
    expect(Tok::End, "end of input");
    return {simplify(lhs), simplify(rhs)};
  }

 private:
  const Token& cur() const { return toks_[pos_]; }
  void advance() { ++pos_; }

  [[noreturn]] void fail(const std::string& what, const std::string& expected) {
    throw SyntaxError(what + " at offset " + std::to_string(cur().offset), cur().offset, expected);
  }

  void expect(Tok t, const std::string& name) {
    if (cur().type != t) fail("unexpected token '" + cur().text + "'", name);
    advance();
  }

  Expr expr() {
    Expr acc = term();
    while (cur().type == Tok::Plus || cur().type == Tok::Minus) {
      bool minus = cur().type == Tok::Minus;
      advance();
      Expr rhs = term();
      if (minus) rhs = Expr::product({Expr::number(Rat(-1)), rhs});
      acc = Expr::sum({acc, rhs});
    }
    return acc;
  }

  Expr term() {
    Expr acc = factor();
    while (cur().type == Tok::Star || cur().type == Tok::Slash) {
      bool division = cur().type == Tok::Slash;
      advance();
      Expr rhs = factor();
      if (division) rhs = Expr::power(rhs, Expr::number(Rat(-1)));
      acc = Expr::product({acc, rhs});
    }
    return acc;
  }

  Expr factor() {
    if (cur().type == Tok::Minus) {
      advance();
      return Expr::product({Expr::number(Rat(-1)), factor()});
    }
    if (cur().type == Tok::Plus) {
      advance();
      return factor();
    }
    return postfix();
  }

  Expr postfix() {
    Expr base = primary();
    if (cur().type == Tok::Caret) {
      advance();
      Expr e = factor();
      return Expr::power(base, e);
    }
    return base;
  }

  Expr primary() {
    const Token& t = cur();
    switch (t.type) {
      case Tok::Num:
        advance();
        return Expr::number(t.value);
      case Tok::LParen: {
        advance();
        Expr e = expr();
        expect(Tok::RParen, "')'");
        return e;
      }
      case Tok::Ident: {
        if (is_fname(t.text)) {
          std::string name = t.text;
          advance();
          expect(Tok::LParen, "'(' after function name");
          Expr a = expr();
          expect(Tok::RParen, "')'");
          Fn f = name == "exp"    ? Fn::Exp
                 : name == "ln"   ? Fn::Ln
                 : name == "sin"  ? Fn::Sin
                 : name == "cos"  ? Fn::Cos
                                  : Fn::Sqrt;
          return Expr::call(f, a);
        }
        if (std::find(symbols_.begin(), symbols_.end(), t.text) == symbols_.end()) {
          std::string expected = "one of:";
          for (const std::string& s : symbols_) expected += " " + s;
          throw SyntaxError("unknown symbol '" + t.text + "'", t.offset, expected);
        }
        advance();
        return Expr::symbol(t.text);
      }
      default:
        fail("unexpected token '" + t.text + "'", "number, symbol, or '('");
    }
  }

  std::vector<Token> toks_;
  std::vector<std::string> symbols_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse_expr(const std::string& text, const std::vector<std::string>& symbols) {
  Parser p(lex(text, false), symbols);
  return p.parse_full();
}

namespace {

struct PrimeDegrees {
  Rat d2{0}, d1{0};
  std::vector<Expr> rest;
};

PrimeDegrees classify_term(const Expr& term) {
  PrimeDegrees out;
  std::vector<Expr> factors;
  if (term.kind() == Kind::Product)
    factors = term.kids();
  else
    factors = {term};
  for (const Expr& f : factors) {
    if (f.is_symbol("y''")) {
      out.d2 += 1;
      continue;
    }
    if (f.is_symbol("y'")) {
      out.d1 += 1;
      continue;
    }
    if (f.kind() == Kind::Power && f.kids()[1].is_number()) {
      if (f.kids()[0].is_symbol("y''")) {
        out.d2 += f.kids()[1].num();
        continue;
      }
      if (f.kids()[0].is_symbol("y'")) {
        out.d1 += f.kids()[1].num();
        continue;
      }
    }
    if (f.depends_on("y''"))
      throw NotSecondOrder("y'' appears inside a function or non-polynomial power");
    if (f.depends_on("y'"))
      throw NotQuadraticInDerivative("y' appears inside a function or non-polynomial power");
    out.rest.push_back(f);
  }
  return out;
}

}  // namespace

QuadraticOde parse_ode(const std::string& text, const Config& cfg) {
  Parser p(lex(text, true), {"x", "y", "y'", "y''"});
  auto [lhs, rhs] = p.parse_equation();
  Expr e = sub(lhs, rhs);
  auto [num_part, den_part] = as_fraction(e);
  if (den_part.depends_on("y''"))
    throw NotSecondOrder("y'' appears in a denominator");
  if (den_part.depends_on("y'"))
    throw NotQuadraticInDerivative("y' appears in a denominator");

  std::vector<Expr> terms;
  if (num_part.kind() == Kind::Sum)
    terms = num_part.kids();
  else
    terms = {num_part};

  std::vector<Expr> a_terms, b2_terms, b1_terms, b0_terms;
  for (const Expr& t : terms) {
    PrimeDegrees pd = classify_term(t);
    if (pd.d2 != 0) {
      if (pd.d2 != 1) throw NotSecondOrder("y'' appears nonlinearly");
      if (pd.d1 != 0)
        throw NotQuadraticInDerivative("coefficient of y'' depends on y'");
      a_terms.push_back(Expr::product(std::move(pd.rest)));
      continue;
    }
    if (!is_integer(pd.d1) || pd.d1 < 0 || pd.d1 > 2)
      throw NotQuadraticInDerivative("y' appears above degree 2");
    Expr coeff = Expr::product(std::move(pd.rest));
    if (pd.d1 == 2)
      b2_terms.push_back(coeff);
    else if (pd.d1 == 1)
      b1_terms.push_back(coeff);
    else
      b0_terms.push_back(coeff);
  }
  if (a_terms.empty()) throw NotSecondOrder("no y'' term");
  Expr a = sum_of(std::move(a_terms));
  ZeroVerdict za = is_zero(a, cfg);
  if (za.tag != ZeroTag::NonZero)
    throw NotSecondOrder("the y'' coefficient vanishes on the sampling box");

  QuadraticOde ode;
  ode.lambda2 = div(sum_of(std::move(b2_terms)), a);
  ode.lambda1 = div(sum_of(std::move(b1_terms)), a);
  ode.lambda0 = div(sum_of(std::move(b0_terms)), a);
  ode.source = text;
  return ode;
}

// ---- formatting -------------------------------------------------------------

namespace {

std::string fmt(const Expr& e);

// Numerator/denominator rendering of one product; sign reported separately.
struct TermText {
  bool negative = false;
  std::string text;
};

std::string fmt_pow_base(const Expr& b) {
  if (b.kind() == Kind::Symbol || b.kind() == Kind::Call) return fmt(b);
  if (b.is_number() && is_integer(b.num()) && b.num() >= 0) return fmt(b);
  return "(" + fmt(b) + ")";
}

std::string fmt_pow(const Expr& base, const Rat& e) {
  std::string bs = fmt_pow_base(base);
  if (e == 1) return bs;
  if (is_integer(e)) return bs + "^" + rat_to_string(e);
  return bs + "^(" + rat_to_string(e) + ")";
}

std::string fmt_factor(const Expr& f) {
  if (f.kind() == Kind::Sum) return "(" + fmt(f) + ")";
  if (f.kind() == Kind::Power) {
    const Expr& expo = f.kids()[1];
    if (expo.is_number()) return fmt_pow(f.kids()[0], expo.num());
    return fmt_pow_base(f.kids()[0]) + "^(" + fmt(expo) + ")";
  }
  return fmt(f);
}

TermText fmt_term(const Expr& e) {
  TermText out;
  if (e.is_number()) {
    out.negative = e.num() < 0;
    Rat a = out.negative ? Rat(-e.num()) : e.num();
    out.text = rat_to_string(a);
    return out;
  }
  std::vector<Expr> factors;
  if (e.kind() == Kind::Product)
    factors = e.kids();
  else
    factors = {e};
  Rat coef(1);
  std::vector<std::string> num_parts, den_parts;
  for (const Expr& f : factors) {
    if (f.is_number()) {
      coef *= f.num();
      continue;
    }
    if (f.kind() == Kind::Power && f.kids()[1].is_number() && f.kids()[1].num() < 0) {
      den_parts.push_back(fmt_pow(f.kids()[0], -f.kids()[1].num()));
      continue;
    }
    num_parts.push_back(fmt_factor(f));
  }
  out.negative = coef < 0;
  if (out.negative) coef = -coef;
  Int p = rat_num(coef), q = rat_den(coef);
  std::string num;
  if (p != 1 || num_parts.empty()) num = p.str();
  for (const std::string& s : num_parts) {
    if (!num.empty()) num += "*";
    num += s;
  }
  if (q != 1) den_parts.insert(den_parts.begin(), q.str());
  if (den_parts.empty()) {
    out.text = num;
    return out;
  }
  std::string den;
  for (const std::string& s : den_parts) {
    if (!den.empty()) den += "*";
    den += s;
  }
  if (den_parts.size() > 1)
    den = "(" + den + ")";
  out.text = num + "/" + den;
  return out;
}

std::string fmt(const Expr& e) {
  switch (e.kind()) {
    case Kind::Number:
      return rat_to_string(e.num());
    case Kind::Symbol:
      return e.sym();
    case Kind::Call:
      return std::string(fn_name(e.fn())) + "(" + fmt(e.kids()[0]) + ")";
    case Kind::Power:
    case Kind::Product: {
      TermText t = fmt_term(e);
      return t.negative ? "-" + t.text : t.text;
    }
    case Kind::Sum: {
      std::string out;
      bool first = true;
      for (const Expr& k : e.kids()) {
        TermText t = fmt_term(k);
        if (first) {
          out = (t.negative ? "-" : "") + t.text;
          first = false;
        } else {
          out += (t.negative ? " - " : " + ") + t.text;
        }
      }
      return out;
    }
  }
  return "0";
}

}  // namespace

std::string format_expr(const Expr& e) { return fmt(e); }

}  // namespace sundman

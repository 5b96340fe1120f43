#include "sundman/expr.hpp"

#include <algorithm>
#include <functional>

namespace sundman {

const char* fn_name(Fn f) {
  switch (f) {
    case Fn::Exp: return "exp";
    case Fn::Ln: return "ln";
    case Fn::Sin: return "sin";
    case Fn::Cos: return "cos";
    case Fn::Sqrt: return "sqrt";
  }
  return "?";
}

namespace {

std::size_t hash_combine(std::size_t seed, std::size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

std::size_t hash_rat(const Rat& r) {
  std::hash<std::string> h;
  return h(r.str());
}

}  // namespace

Expr Expr::make(Node n) {
  std::size_t h = static_cast<std::size_t>(n.kind) * 1315423911ULL;
  switch (n.kind) {
    case Kind::Number:
      h = hash_combine(h, hash_rat(n.value));
      break;
    case Kind::Symbol:
      h = hash_combine(h, std::hash<std::string>{}(n.name));
      break;
    case Kind::Call:
      h = hash_combine(h, static_cast<std::size_t>(n.fn));
      [[fallthrough]];
    default:
      for (const Expr& k : n.kids) h = hash_combine(h, k.hash());
      break;
  }
  n.hash = h;
  return Expr(std::make_shared<const Node>(std::move(n)));
}

Expr::Expr() { *this = number(Rat(0)); }

Expr Expr::number(Rat v) {
  Node n;
  n.kind = Kind::Number;
  n.value = std::move(v);
  return make(std::move(n));
}

Expr Expr::symbol(std::string name) {
  Node n;
  n.kind = Kind::Symbol;
  n.name = std::move(name);
  return make(std::move(n));
}

Expr Expr::sum(std::vector<Expr> kids) {
  std::vector<Expr> flat;
  Rat c(0);
  for (Expr& k : kids) {
    if (k.kind() == Kind::Sum) {
      for (const Expr& g : k.kids()) {
        if (g.is_number())
          c += g.num();
        else
          flat.push_back(g);
      }
    } else if (k.is_number()) {
      c += k.num();
    } else {
      flat.push_back(std::move(k));
    }
  }
  if (c != 0) flat.insert(flat.begin(), number(c));
  if (flat.empty()) return number(Rat(0));
  if (flat.size() == 1) return flat[0];
  Node n;
  n.kind = Kind::Sum;
  n.kids = std::move(flat);
  return make(std::move(n));
}

Expr Expr::product(std::vector<Expr> kids) {
  std::vector<Expr> flat;
  Rat c(1);
  for (Expr& k : kids) {
    if (k.kind() == Kind::Product) {
      for (const Expr& g : k.kids()) {
        if (g.is_number())
          c *= g.num();
        else
          flat.push_back(g);
      }
    } else if (k.is_number()) {
      c *= k.num();
    } else {
      flat.push_back(std::move(k));
    }
  }
  if (c == 0) return number(Rat(0));
  if (c != 1) flat.insert(flat.begin(), number(c));
  if (flat.empty()) return number(Rat(1));
  if (flat.size() == 1) return flat[0];
  Node n;
  n.kind = Kind::Product;
  n.kids = std::move(flat);
  return make(std::move(n));
}

Expr Expr::power(Expr base, Expr expo) {
  if (expo.is_number()) {
    if (expo.num() == 0) return number(Rat(1));
    if (expo.num() == 1) return base;
  }
  if (base.is_one()) return base;
  Node n;
  n.kind = Kind::Power;
  n.kids = {std::move(base), std::move(expo)};
  return make(std::move(n));
}

Expr Expr::call(Fn f, Expr arg) {
  Node n;
  n.kind = Kind::Call;
  n.fn = f;
  n.kids = {std::move(arg)};
  return make(std::move(n));
}

bool Expr::depends_on(std::string_view name) const {
  switch (kind()) {
    case Kind::Number: return false;
    case Kind::Symbol: return sym() == name;
    default:
      for (const Expr& k : kids())
        if (k.depends_on(name)) return true;
      return false;
  }
}

void Expr::collect_symbols(std::vector<std::string>& out) const {
  switch (kind()) {
    case Kind::Number: return;
    case Kind::Symbol:
      if (std::find(out.begin(), out.end(), sym()) == out.end()) out.push_back(sym());
      return;
    default:
      for (const Expr& k : kids()) k.collect_symbols(out);
  }
}

bool Expr::operator==(const Expr& o) const {
  if (node_ == o.node_) return true;
  if (node_->hash != o.node_->hash) return false;
  return cmp(*this, o) == 0;
}

int Expr::cmp(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return 0;
  if (a.kind() != b.kind()) return a.kind() < b.kind() ? -1 : 1;
  switch (a.kind()) {
    case Kind::Number: {
      if (a.num() == b.num()) return 0;
      return a.num() < b.num() ? -1 : 1;
    }
    case Kind::Symbol: {
      int c = a.sym().compare(b.sym());
      return c < 0 ? -1 : (c > 0 ? 1 : 0);
    }
    case Kind::Call:
      if (a.fn() != b.fn()) return a.fn() < b.fn() ? -1 : 1;
      break;
    default:
      break;
  }
  const auto& ak = a.kids();
  const auto& bk = b.kids();
  std::size_t n = std::min(ak.size(), bk.size());
  for (std::size_t i = 0; i < n; ++i) {
    int c = cmp(ak[i], bk[i]);
    if (c != 0) return c;
  }
  if (ak.size() != bk.size()) return ak.size() < bk.size() ? -1 : 1;
  return 0;
}

}  // namespace sundman

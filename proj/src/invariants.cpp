#include <utility>

#include "sundman/invariants.hpp"
#include "sundman/symcore.hpp"

namespace sundman {

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Linearizable: return "Linearizable";
    case Verdict::NotLinearizable: return "NotLinearizable";
    case Verdict::Indeterminate: return "Indeterminate";
  }
  return "Indeterminate";
}

namespace {

Expr dx(const Expr& e) { return diff(e, "x"); }
Expr dy(const Expr& e) { return diff(e, "y"); }

// Every partial derivative the condition set touches, computed once.
struct Ctx {
  Expr l0, l1, l2;
  Expr l0x, l0y, l1x, l1y, l2x, l2y;
  Expr l2xx, l2xy, l2xxx, l2xxy;
  Expr l3, l3x, l3y, l3xx, l3xy;
  Expr l4, l4x, l4y;
  Expr l5, l6, l6x, l6y;
};

Ctx make_ctx(const QuadraticOde& ode) {
  Ctx c;
  c.l0 = ode.lambda0;
  c.l1 = ode.lambda1;
  c.l2 = ode.lambda2;
  c.l0x = dx(c.l0);
  c.l0y = dy(c.l0);
  c.l1x = dx(c.l1);
  c.l1y = dy(c.l1);
  c.l2x = dx(c.l2);
  c.l2y = dy(c.l2);
  c.l2xx = dx(c.l2x);
  c.l2xy = dy(c.l2x);
  c.l2xxx = dx(c.l2xx);
  c.l2xxy = dy(c.l2xx);
  c.l3 = sub(c.l1y, mul(num(2), c.l2x));
  c.l3x = dx(c.l3);
  c.l3y = dy(c.l3);
  c.l3xx = dx(c.l3x);
  c.l3xy = dy(c.l3x);
  c.l4 = sum_of({mul(num(2), dy(c.l0y)), mul(num(-2), dy(c.l1x)),
                 mul(num(2), mul(c.l0, c.l2y)), neg(mul(c.l1y, c.l1)),
                 mul(num(2), mul(c.l0y, c.l2)), mul(num(2), c.l2xx)});
  c.l4x = dx(c.l4);
  c.l4y = dy(c.l4);
  c.l5 = sum_of({c.l2xx, mul(c.l2x, c.l1), c.l3x, mul(c.l1, c.l3)});
  c.l6 = add(c.l0x, mul(num(2), mul(c.l0, c.l1)));
  c.l6x = dx(c.l6);
  c.l6y = dy(c.l6);
  return c;
}

void add_condition(CheckReport& rep, const Config& cfg, std::string id,
                   std::string raw, Expr cleared) {
  ConditionResult r;
  r.id = std::move(id);
  r.raw_text = std::move(raw);
  r.cleared = std::move(cleared);
  r.verdict = is_zero(r.cleared, cfg);
  rep.conditions.push_back(std::move(r));
}

// Linearizable iff every condition's residual is zeroish; a definite NonZero
// wins over Indeterminate.
void conclude(CheckReport& rep) {
  bool indeterminate = false;
  for (const ConditionResult& c : rep.conditions) {
    if (c.verdict.tag == ZeroTag::NonZero) {
      rep.verdict = Verdict::NotLinearizable;
      return;
    }
    if (c.verdict.tag == ZeroTag::Indeterminate) indeterminate = true;
  }
  rep.verdict = indeterminate ? Verdict::Indeterminate : Verdict::Linearizable;
}

void note_classification(CheckReport& rep, const char* name, const ZeroVerdict& v) {
  rep.notes.push_back(std::string(name) + ": " + zero_tag_name(v.tag));
}

bool classified(CheckReport& rep, const char* name, const ZeroVerdict& v) {
  note_classification(rep, name, v);
  if (v.tag == ZeroTag::Indeterminate) {
    rep.notes.push_back(std::string("classification of ") + name +
                        " is indeterminate on the sampling box");
    rep.verdict = Verdict::Indeterminate;
    return false;
  }
  return true;
}

}  // namespace

Invariants derived_invariants(const QuadraticOde& ode) {
  Ctx c = make_ctx(ode);
  return Invariants{c.l3, c.l4, c.l5, c.l6};
}

CheckReport check_sundman(const QuadraticOde& ode, const Config& cfg) {
  Ctx c = make_ctx(ode);
  CheckReport rep;
  rep.seed = cfg.seed;

  ZeroVerdict z3 = is_zero(c.l3, cfg);
  if (!classified(rep, "lambda3", z3)) return rep;

  if (z3.tag == ZeroTag::NonZero) {
    ZeroVerdict z5 = is_zero(c.l5, cfg);
    if (!classified(rep, "lambda5", z5)) return rep;

    if (z5.tag == ZeroTag::NonZero) {
      rep.case_label = "A1";
      rep.case_detail = "lambda3 != 0, lambda5 != 0";
      add_condition(
          rep, cfg, "A1-lambda0x",
          "lambda_0x = 2*lambda0*(lambda5 - lambda1*lambda3)/lambda3",
          sub(mul(c.l0x, c.l3),
              mul(num(2), mul(c.l0, sub(c.l5, mul(c.l1, c.l3))))));
      add_condition(
          rep, cfg, "A1-lambda2xxy",
          "lambda_2xxy = -lambda_2xy*lambda1 - lambda_3xy - 2*lambda_2x^2 - "
          "2*lambda_2x*lambda3 - lambda_3y*lambda1 + "
          "lambda_3y*lambda5/lambda3",
          sum_of({mul(c.l3, c.l2xxy),
                  mul(c.l3, sum_of({mul(c.l2xy, c.l1), c.l3xy,
                                    mul(num(2), pow(c.l2x, 2)),
                                    mul(num(2), mul(c.l2x, c.l3)),
                                    mul(c.l3y, c.l1)})),
                  neg(mul(c.l3y, c.l5))}));
      add_condition(
          rep, cfg, "A1-lambda2xxx",
          "lambda_2xxx = -lambda_3xx - lambda_1x*lambda_2x - "
          "lambda_1x*lambda3 + lambda_2x*lambda1^2 + lambda1^2*lambda3 - "
          "2*lambda1*lambda5 + lambda5*(lambda_3x + lambda5)/lambda3",
          sum_of({mul(c.l3, c.l2xxx),
                  mul(c.l3, sum_of({c.l3xx, mul(c.l1x, c.l2x),
                                    mul(c.l1x, c.l3),
                                    neg(mul(c.l2x, pow(c.l1, 2))),
                                    neg(mul(pow(c.l1, 2), c.l3)),
                                    mul(num(2), mul(c.l1, c.l5))})),
                  neg(mul(c.l5, add(c.l3x, c.l5)))}));
      add_condition(
          rep, cfg, "A1-mixed",
          "lambda3*lambda5*(6*lambda_0y*lambda_2x + 2*lambda_2xy*lambda0 + "
          "4*lambda_2x*lambda0*lambda2 + 2*lambda_3y*lambda0 + "
          "4*lambda0*lambda2*lambda3 + lambda1*lambda5) - "
          "lambda3^2*(6*lambda_2x^2*lambda0 + 12*lambda_2x*lambda0*lambda3 - "
          "6*lambda_0y*lambda5 + 6*lambda0*lambda3^2) - lambda4*lambda5^2 - "
          "2*lambda5^3 = 0",
          sum_of(
              {mul(mul(c.l3, c.l5),
                   sum_of({mul(num(6), mul(c.l0y, c.l2x)),
                           mul(num(2), mul(c.l2xy, c.l0)),
                           mul(num(4), product_of({c.l2x, c.l0, c.l2})),
                           mul(num(2), mul(c.l3y, c.l0)),
                           mul(num(4), product_of({c.l0, c.l2, c.l3})),
                           mul(c.l1, c.l5)})),
               neg(mul(pow(c.l3, 2),
                       sum_of({mul(num(6), mul(pow(c.l2x, 2), c.l0)),
                               mul(num(12), product_of({c.l2x, c.l0, c.l3})),
                               mul(num(-6), mul(c.l0y, c.l5)),
                               mul(num(6), mul(c.l0, pow(c.l3, 2)))}))),
               neg(mul(c.l4, pow(c.l5, 2))),
               mul(num(-2), pow(c.l5, 3))}));
      conclude(rep);
      return rep;
    }

    ZeroVerdict z0 = is_zero(c.l0, cfg);
    if (!classified(rep, "lambda0", z0)) return rep;
    if (z0.tag == ZeroTag::NonZero) {
      rep.case_label = "A2";
      rep.case_detail = "lambda3 != 0, lambda5 = 0, lambda0 != 0";
      add_condition(rep, cfg, "A2-lambda0x", "lambda_0x = -2*lambda0*lambda1",
                    add(c.l0x, mul(num(2), mul(c.l0, c.l1))));
      add_condition(rep, cfg, "A2-lambda2x", "lambda_2x = -lambda3",
                    add(c.l2x, c.l3));
    } else {
      rep.case_label = "A3";
      rep.case_detail = "lambda3 != 0, lambda5 = 0, lambda0 = 0";
      add_condition(rep, cfg, "A3-lambda2x", "lambda_2x = -lambda3",
                    add(c.l2x, c.l3));
      rep.notes.push_back("lambda0 = 0: the lambda_0x relation holds trivially "
                          "and no further compatibility condition arises");
    }
    conclude(rep);
    return rep;
  }

  // lambda3 = 0
  ZeroVerdict z4 = is_zero(c.l4, cfg);
  if (!classified(rep, "lambda4", z4)) return rep;
  if (z4.tag != ZeroTag::NonZero) {
    rep.case_label = "DMS0";
    rep.case_detail = "lambda3 = 0, lambda4 = 0";
    add_condition(rep, cfg, "DMS0-lambda3", "lambda3 = 0", c.l3);
    add_condition(rep, cfg, "DMS0-lambda4", "lambda4 = 0", c.l4);
    rep.notes.push_back("linearizable to u'' = 0");
    conclude(rep);
    return rep;
  }

  ZeroVerdict z0 = is_zero(c.l0, cfg);
  if (!classified(rep, "lambda0", z0)) return rep;
  if (z0.tag != ZeroTag::NonZero) {
    rep.case_detail = "lambda3 = 0, lambda4 != 0, lambda0 = 0";
    ConditionResult r;
    r.id = "lambda0-contradiction";
    r.raw_text = "lambda3 = 0 and lambda0 = 0 force lambda4 = 0";
    r.cleared = c.l4;
    r.verdict = z4;
    rep.conditions.push_back(std::move(r));
    rep.notes.push_back(
        "lambda0 = 0 with lambda3 = 0 forces lambda4 = 0, contradicting the "
        "nonzero classification of lambda4; no transformation exists");
    rep.verdict = Verdict::NotLinearizable;
    return rep;
  }

  ZeroVerdict z6 = is_zero(c.l6, cfg);
  if (!classified(rep, "lambda6", z6)) return rep;
  if (z6.tag == ZeroTag::NonZero) {
    rep.case_label = "B";
    rep.case_detail = "lambda3 = 0, lambda4 != 0, lambda6 != 0";
    add_condition(rep, cfg, "B-lambda2xx", "lambda_2xx = -lambda_2x*lambda1",
                  add(c.l2xx, mul(c.l2x, c.l1)));
    add_condition(
        rep, cfg, "B-lambda6y",
        "lambda_6y = (lambda_0y*lambda6 + 2*lambda_2x*lambda0^2)/lambda0",
        sum_of({mul(c.l0, c.l6y), neg(mul(c.l0y, c.l6)),
                mul(num(-2), mul(c.l2x, pow(c.l0, 2)))}));
    add_condition(
        rep, cfg, "B-lambda6x",
        "lambda_6x = 3*lambda6*(lambda6 - 2*lambda0*lambda1)/(2*lambda0)",
        sum_of({mul(num(2), mul(c.l0, c.l6x)), mul(num(-3), pow(c.l6, 2)),
                mul(num(6), product_of({c.l6, c.l0, c.l1}))}));
    add_condition(
        rep, cfg, "B-lambda4x",
        "lambda_4x = (-24*lambda_2x^2*lambda0^3 - "
        "4*lambda0*lambda1*lambda4*lambda6 + "
        "lambda4*lambda6^2)/(2*lambda0*lambda6)",
        sum_of({mul(num(2), product_of({c.l0, c.l6, c.l4x})),
                mul(num(24), mul(pow(c.l2x, 2), pow(c.l0, 3))),
                mul(num(4), product_of({c.l0, c.l1, c.l4, c.l6})),
                neg(mul(c.l4, pow(c.l6, 2)))}));
  } else {
    rep.case_label = "C";
    rep.case_detail = "lambda3 = 0, lambda4 != 0, lambda6 = 0";
    add_condition(rep, cfg, "C-lambda2xx", "lambda_2xx = -lambda_2x*lambda1",
                  add(c.l2xx, mul(c.l2x, c.l1)));
    add_condition(rep, cfg, "C-lambda2x", "lambda_2x = 0", c.l2x);
    add_condition(rep, cfg, "C-lambda4x", "lambda_4x = -2*lambda1*lambda4",
                  add(c.l4x, mul(num(2), mul(c.l1, c.l4))));
  }
  conclude(rep);
  return rep;
}

CheckReport check_dms(const QuadraticOde& ode, const Config& cfg) {
  Ctx c = make_ctx(ode);
  CheckReport rep;
  rep.seed = cfg.seed;
  rep.notes.push_back("target is u'' = 0");

  ZeroVerdict z3 = is_zero(c.l3, cfg);
  if (!classified(rep, "lambda3", z3)) return rep;

  if (z3.tag != ZeroTag::NonZero) {
    rep.case_label = "DMS0";
    rep.case_detail = "lambda3 = 0";
    add_condition(rep, cfg, "dms-lambda4", "lambda4 = 0", c.l4);
    conclude(rep);
    return rep;
  }

  rep.case_label = "DMS1";
  rep.case_detail = "lambda3 != 0";
  ZeroVerdict z4 = is_zero(c.l4, cfg);
  if (!classified(rep, "lambda4", z4)) return rep;
  if (z4.tag != ZeroTag::NonZero) {
    ConditionResult r;
    r.id = "dms-lambda4-nonzero";
    r.raw_text = "lambda4 != 0 is required when lambda3 != 0";
    r.cleared = c.l4;
    r.verdict = z4;
    rep.conditions.push_back(std::move(r));
    rep.notes.push_back("lambda4 must not vanish when lambda3 != 0");
    rep.verdict = Verdict::NotLinearizable;
    return rep;
  }

  add_condition(
      rep, cfg, "dms-1",
      "lambda4^2 + 2*lambda_3x*lambda4 - 2*lambda3^2*lambda_1x + "
      "4*lambda3^2*lambda_0y + 4*lambda3^2*lambda0*lambda2 - "
      "2*lambda3*lambda_4x - lambda3^2*lambda1^2 = 0",
      sum_of({pow(c.l4, 2), mul(num(2), mul(c.l3x, c.l4)),
              mul(num(-2), mul(pow(c.l3, 2), c.l1x)),
              mul(num(4), mul(pow(c.l3, 2), c.l0y)),
              mul(num(4), product_of({pow(c.l3, 2), c.l0, c.l2})),
              mul(num(-2), mul(c.l3, c.l4x)),
              neg(mul(pow(c.l3, 2), pow(c.l1, 2)))}));
  add_condition(
      rep, cfg, "dms-2",
      "lambda_3y*lambda4 + lambda3^2*lambda_1y - 2*lambda3^2*lambda_2x - "
      "lambda3*lambda_4y = 0",
      sum_of({mul(c.l3y, c.l4), mul(pow(c.l3, 2), c.l1y),
              mul(num(-2), mul(pow(c.l3, 2), c.l2x)),
              neg(mul(c.l3, c.l4y))}));
  conclude(rep);
  return rep;
}

CheckReport check_lie(const QuadraticOde& ode, const Config& cfg) {
  LieForm f = lie_form(ode);
  CheckReport rep;
  rep.seed = cfg.seed;
  rep.case_label = "Lie";
  rep.case_detail = "point transformation test on (a, b, c, d) = "
                    "(0, lambda2, lambda1, lambda0)";

  const Expr &a = f.a, &b = f.b, &c = f.c, &d = f.d;
  Expr l1 = sum_of({mul(num(3), dx(dx(a))), mul(num(-2), dy(dx(b))),
                    dy(dy(c)), mul(num(-3), mul(dx(a), c)),
                    mul(num(3), mul(dy(a), d)), mul(num(2), mul(dx(b), b)),
                    mul(num(-3), mul(dx(c), a)), neg(mul(dy(c), b)),
                    mul(num(6), mul(dy(d), a))});
  Expr l2 = sum_of({dx(dx(b)), mul(num(-2), dy(dx(c))),
                    mul(num(3), dy(dy(d))), mul(num(-6), mul(dx(a), d)),
                    mul(dx(b), c), mul(num(3), mul(dy(b), d)),
                    mul(num(-2), mul(dy(c), c)), mul(num(-3), mul(dx(d), a)),
                    mul(num(3), mul(dy(d), b))});
  add_condition(rep, cfg, "lie-1",
                "3a_xx - 2b_xy + c_yy - 3a_x*c + 3a_y*d + 2b_x*b - 3c_x*a - "
                "c_y*b + 6d_y*a = 0",
                l1);
  add_condition(rep, cfg, "lie-2",
                "b_xx - 2c_xy + 3d_yy - 6a_x*d + b_x*c + 3b_y*d - 2c_y*c - "
                "3d_x*a + 3d_y*b = 0",
                l2);
  conclude(rep);
  return rep;
}

}  // namespace sundman

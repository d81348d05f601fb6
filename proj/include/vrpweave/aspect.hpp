#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "vrpweave/error.hpp"
#include "vrpweave/lexer.hpp"
#include "vrpweave/model.hpp"
#include "vrpweave/model_io.hpp"

namespace vrp {

enum class ParamType { VPTask, VPActivity, VPWorkP, VPRole, VPTool };

inline constexpr ParamType kAllParamTypes[] = {ParamType::VPTask, ParamType::VPActivity,
                                               ParamType::VPWorkP, ParamType::VPRole,
                                               ParamType::VPTool};

inline constexpr std::string_view to_string(ParamType t) {
  switch (t) {
    case ParamType::VPTask: return "VPTask";
    case ParamType::VPActivity: return "VPActivity";
    case ParamType::VPWorkP: return "VPWorkP";
    case ParamType::VPRole: return "VPRole";
    case ParamType::VPTool: return "VPTool";
  }
  return "?";
}

inline std::optional<ParamType> parse_param_type(std::string_view s) {
  std::string l = detail::lower(s);
  for (ParamType t : kAllParamTypes) {
    if (detail::lower(to_string(t)) == l) return t;
  }
  return std::nullopt;
}

/// VP kinds a parameter of this type may bind.
inline constexpr bool accepts(ParamType t, VpKind k) {
  switch (t) {
    case ParamType::VPTask:
    case ParamType::VPActivity: return k == VpKind::Call || k == VpKind::Execution;
    case ParamType::VPWorkP:
      return k == VpKind::Use || k == VpKind::Create || k == VpKind::Init || k == VpKind::Deliver;
    case ParamType::VPRole:
    case ParamType::VPTool: return k == VpKind::Access;
  }
  return false;
}

struct Param {
  std::string name;
  ParamType type = ParamType::VPTask;

  bool operator==(const Param&) const = default;
};

/// Designator expression. Immutable; subtrees are shared.
struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  enum class Op { Designator, Within, And, Or, Not, Ref };

  Op op = Op::Designator;
  VpKind kind = VpKind::Execution;  // Designator
  IdPattern pattern;                // Designator, Within
  ExprPtr lhs;                      // And, Or, Not
  ExprPtr rhs;                      // And, Or
  std::string pointcut;             // Ref
  std::string param;                // Ref; empty in advice triggers

  static ExprPtr designator(VpKind k, IdPattern p) {
    auto e = std::make_shared<Expr>();
    e->op = Op::Designator;
    e->kind = k;
    e->pattern = std::move(p);
    return e;
  }
  static ExprPtr within(IdPattern p) {
    auto e = std::make_shared<Expr>();
    e->op = Op::Within;
    e->pattern = std::move(p);
    return e;
  }
  static ExprPtr binary(Op op, ExprPtr l, ExprPtr r) {
    auto e = std::make_shared<Expr>();
    e->op = op;
    e->lhs = std::move(l);
    e->rhs = std::move(r);
    return e;
  }
  static ExprPtr conj(ExprPtr l, ExprPtr r) { return binary(Op::And, std::move(l), std::move(r)); }
  static ExprPtr disj(ExprPtr l, ExprPtr r) { return binary(Op::Or, std::move(l), std::move(r)); }
  static ExprPtr negate(ExprPtr x) {
    auto e = std::make_shared<Expr>();
    e->op = Op::Not;
    e->lhs = std::move(x);
    return e;
  }
  static ExprPtr ref(std::string pointcut, std::string param = {}) {
    auto e = std::make_shared<Expr>();
    e->op = Op::Ref;
    e->pointcut = std::move(pointcut);
    e->param = std::move(param);
    return e;
  }
};

inline bool same(const ExprPtr& a, const ExprPtr& b) {
  if (!a || !b) return a == b;
  if (a->op != b->op) return false;
  switch (a->op) {
    case Expr::Op::Designator: return a->kind == b->kind && a->pattern == b->pattern;
    case Expr::Op::Within: return a->pattern == b->pattern;
    case Expr::Op::And:
    case Expr::Op::Or: return same(a->lhs, b->lhs) && same(a->rhs, b->rhs);
    case Expr::Op::Not: return same(a->lhs, b->lhs);
    case Expr::Op::Ref: return a->pointcut == b->pointcut && a->param == b->param;
  }
  return false;
}

struct Pointcut {
  std::string name;
  std::vector<Param> params;
  std::vector<std::pair<std::string, ExprPtr>> bindings;  // in declaration order

  const Param* find_param(std::string_view n) const {
    for (const auto& p : params) {
      if (p.name == n) return &p;
    }
    return nullptr;
  }
  ExprPtr binding_for(std::string_view n) const {
    for (const auto& [p, e] : bindings) {
      if (p == n) return e;
    }
    return nullptr;
  }

  bool operator==(const Pointcut& o) const {
    if (name != o.name || params != o.params || bindings.size() != o.bindings.size()) return false;
    for (std::size_t i = 0; i < bindings.size(); ++i) {
      if (bindings[i].first != o.bindings[i].first) return false;
      if (!same(bindings[i].second, o.bindings[i].second)) return false;
    }
    return true;
  }
};

struct Action {
  std::string param;
  std::string variant;

  bool operator==(const Action&) const = default;
};

struct Advice {
  ExprPtr trigger;  // Ref/And/Or/Not over pointcut names
  std::vector<Param> params;
  std::vector<Action> actions;

  bool operator==(const Advice& o) const {
    return same(trigger, o.trigger) && params == o.params && actions == o.actions;
  }
};

struct ProcessAspect {
  std::string name;
  bool active = false;
  std::vector<Pointcut> pointcuts;
  std::vector<Advice> advices;
  std::vector<Variant> owned_variants;
  std::vector<VarPoint> owned_varpoints;  // slot_kind Unresolved until resolved against a model

  const Pointcut* find_pointcut(std::string_view n) const {
    for (const auto& p : pointcuts) {
      if (p.name == n) return &p;
    }
    return nullptr;
  }

  bool operator==(const ProcessAspect&) const = default;
};

namespace detail {

inline std::optional<VpKind> parse_designator(std::string_view w) {
  return parse_vp_kind(lower(w));
}

inline void collect_trigger_names(const ExprPtr& e, std::vector<std::string>& out) {
  if (!e) return;
  if (e->op == Expr::Op::Ref) {
    out.push_back(e->pointcut);
    return;
  }
  collect_trigger_names(e->lhs, out);
  collect_trigger_names(e->rhs, out);
}

struct ExprFacts {
  bool has_kind_designator = false;
  bool has_ref = false;
  bool compatible_designator = false;
};

inline void collect_facts(const ExprPtr& e, ParamType type, ExprFacts& f) {
  if (!e) return;
  switch (e->op) {
    case Expr::Op::Designator:
      f.has_kind_designator = true;
      if (accepts(type, e->kind)) f.compatible_designator = true;
      break;
    case Expr::Op::Ref: f.has_ref = true; break;
    case Expr::Op::Within: break;
    default:
      collect_facts(e->lhs, type, f);
      collect_facts(e->rhs, type, f);
  }
}

class AspectParser {
 public:
  explicit AspectParser(std::string_view text) : ts_(tokenize(text)) {}

  std::vector<ProcessAspect> parse() {
    std::vector<ProcessAspect> out;
    while (!ts_.at_end()) out.push_back(parse_aspect());
    return out;
  }

 private:
  struct PendingRef {
    std::string pointcut;
    std::string param;
    SourceLocation loc;
  };

  ProcessAspect parse_aspect() {
    ts_.expect_keyword("aspect");
    ProcessAspect a;
    a.name = ts_.expect_word("aspect name").text;
    a.active = ts_.accept_keyword("active");
    ts_.expect_symbol("{");
    refs_.clear();
    triggers_.clear();
    while (!ts_.accept_symbol("}")) {
      if (ts_.at_end()) ts_.fail("'}'");
      if (ts_.accept_keyword("variant")) {
        SourceLocation loc = ts_.peek().loc;
        Variant v;
        v.payload = ModelParser::parse_variant_payload(ts_, v.name);
        v.owning_aspect = a.name;
        for (const auto& o : a.owned_variants) {
          if (o.name == v.name) {
            throw Error(ErrorCode::DuplicateId, "duplicate variant \"" + v.name + "\"", loc);
          }
        }
        a.owned_variants.push_back(std::move(v));
      } else if (ts_.accept_keyword("varpoint")) {
        VarPoint vp = ModelParser::parse_varpoint_tail(ts_);
        if (ts_.accept_keyword("at")) vp.owner = ts_.expect_word("owner id").text;
        vp.subject = vp.owner;
        vp.slot_kind = SlotKind::Unresolved;
        vp.aspect = a.name;
        a.owned_varpoints.push_back(std::move(vp));
      } else if (ts_.peek_keyword("pointcut")) {
        SourceLocation loc = ts_.next().loc;
        Pointcut pc = parse_pointcut();
        if (a.find_pointcut(pc.name) != nullptr) {
          throw Error(ErrorCode::DuplicateId, "duplicate pointcut '" + pc.name + "'", loc);
        }
        a.pointcuts.push_back(std::move(pc));
      } else if (ts_.accept_keyword("advice")) {
        a.advices.push_back(parse_advice());
      } else {
        ts_.fail("aspect member");
      }
    }
    resolve(a);
    return a;
  }

  std::vector<Param> parse_params() {
    std::vector<Param> params;
    ts_.expect_symbol("(");
    if (ts_.accept_symbol(")")) return params;
    do {
      const Token& t = ts_.expect_word("parameter type");
      auto type = parse_param_type(t.text);
      if (!type) throw Error(ErrorCode::Syntax, "unknown parameter type '" + t.text + "'", t.loc);
      const Token& n = ts_.expect_word("parameter name");
      for (const auto& p : params) {
        if (p.name == n.text) {
          throw Error(ErrorCode::DuplicateId, "duplicate parameter '" + n.text + "'", n.loc);
        }
      }
      params.push_back({n.text, *type});
    } while (ts_.accept_symbol(","));
    ts_.expect_symbol(")");
    return params;
  }

  Pointcut parse_pointcut() {
    Pointcut pc;
    pc.name = ts_.expect_word("pointcut name").text;
    pc.params = parse_params();
    ts_.expect_symbol(":");
    // Bindings run until the next member keyword or the aspect's closing brace.
    while (ts_.peek().kind == TokenKind::Word && ts_.peek(1).is_symbol("=")) {
      const Token& p = ts_.next();
      ts_.expect_symbol("=");
      const Param* param = pc.find_param(p.text);
      if (param == nullptr) {
        throw Error(ErrorCode::UnknownParam, "'" + p.text + "' is not a parameter of " + pc.name,
                    p.loc);
      }
      if (pc.binding_for(p.text)) {
        throw Error(ErrorCode::Syntax, "parameter '" + p.text + "' bound twice", p.loc);
      }
      ts_.expect_symbol("(");
      ExprPtr e = parse_or();
      ts_.expect_symbol(")");
      ts_.accept_symbol(";");

      ExprFacts facts;
      collect_facts(e, param->type, facts);
      if (!facts.has_kind_designator && !facts.has_ref) {
        throw Error(ErrorCode::Syntax,
                    "binding of '" + p.text + "' needs a kind designator; within() only filters",
                    p.loc);
      }
      if (facts.has_kind_designator && !facts.compatible_designator && !facts.has_ref) {
        throw Error(ErrorCode::ParamTypeMismatch,
                    "no designator in the binding of '" + p.text + "' can match a " +
                        std::string(to_string(param->type)),
                    p.loc);
      }
      pc.bindings.emplace_back(p.text, std::move(e));
    }
    return pc;
  }

  ExprPtr parse_or() {
    ExprPtr l = parse_and();
    while (ts_.accept_symbol("||")) l = Expr::disj(l, parse_and());
    return l;
  }
  ExprPtr parse_and() {
    ExprPtr l = parse_unary();
    while (ts_.accept_symbol("&&")) l = Expr::conj(l, parse_unary());
    return l;
  }
  ExprPtr parse_unary() {
    if (ts_.accept_symbol("!")) return Expr::negate(parse_unary());
    return parse_primary();
  }

  IdPattern parse_pattern() {
    if (ts_.accept_symbol("*")) return IdPattern("*");
    return IdPattern(ts_.expect_string("pattern").text);
  }

  ExprPtr parse_primary() {
    if (ts_.accept_symbol("(")) {
      ExprPtr e = parse_or();
      ts_.expect_symbol(")");
      return e;
    }
    const Token& w = ts_.expect_word("designator or pointcut reference");
    if (ts_.peek().is_symbol("(")) {
      std::string l = lower(w.text);
      ts_.next();
      ExprPtr e;
      if (l == "within") {
        e = Expr::within(parse_pattern());
      } else if (auto k = parse_designator(l)) {
        e = Expr::designator(*k, parse_pattern());
      } else {
        throw Error(ErrorCode::Syntax, "unknown designator '" + w.text + "'", w.loc);
      }
      ts_.expect_symbol(")");
      return e;
    }
    auto dot = w.text.rfind('.');
    if (dot == std::string::npos || dot == 0 || dot + 1 == w.text.size()) {
      throw Error(ErrorCode::Syntax, "expected '<pointcut>.<param>', found '" + w.text + "'",
                  w.loc);
    }
    refs_.push_back({w.text.substr(0, dot), w.text.substr(dot + 1), w.loc});
    return Expr::ref(w.text.substr(0, dot), w.text.substr(dot + 1));
  }

  ExprPtr parse_trigger_or() {
    ExprPtr l = parse_trigger_and();
    while (ts_.accept_symbol("||")) l = Expr::disj(l, parse_trigger_and());
    return l;
  }
  ExprPtr parse_trigger_and() {
    ExprPtr l = parse_trigger_unary();
    while (ts_.accept_symbol("&&")) l = Expr::conj(l, parse_trigger_unary());
    return l;
  }
  ExprPtr parse_trigger_unary() {
    if (ts_.accept_symbol("!")) return Expr::negate(parse_trigger_unary());
    if (ts_.accept_symbol("(")) {
      ExprPtr e = parse_trigger_or();
      ts_.expect_symbol(")");
      return e;
    }
    const Token& w = ts_.expect_word("pointcut name");
    triggers_.push_back({w.text, "", w.loc});
    return Expr::ref(w.text);
  }

  Advice parse_advice() {
    Advice adv;
    SourceLocation loc = ts_.peek().loc;
    adv.trigger = parse_trigger_or();
    adv.params = parse_params();
    ts_.expect_symbol("{");
    while (!ts_.accept_symbol("}")) {
      const Token& w = ts_.expect_word("action");
      auto dot = w.text.rfind('.');
      if (dot == std::string::npos || lower(w.text.substr(dot + 1)) != "occupe") {
        throw Error(ErrorCode::Syntax, "expected '<param>.occupe', found '" + w.text + "'", w.loc);
      }
      Action act{w.text.substr(0, dot), {}};
      bool declared = false;
      for (const auto& p : adv.params) declared = declared || p.name == act.param;
      if (!declared) {
        throw Error(ErrorCode::UnknownParam, "'" + act.param + "' is not an advice parameter",
                    w.loc);
      }
      ts_.expect_symbol("(");
      act.variant = ts_.expect_string("variant name").text;
      ts_.expect_symbol(")");
      ts_.accept_symbol(";");
      adv.actions.push_back(std::move(act));
    }
    advice_locs_.push_back(loc);
    return adv;
  }

  void resolve(const ProcessAspect& a) {
    for (const auto& r : refs_) {
      const Pointcut* pc = a.find_pointcut(r.pointcut);
      if (pc == nullptr) {
        throw Error(ErrorCode::UnknownPointcut, "unknown pointcut '" + r.pointcut + "'", r.loc);
      }
      if (pc->find_param(r.param) == nullptr) {
        throw Error(ErrorCode::UnknownParam,
                    "pointcut '" + r.pointcut + "' has no parameter '" + r.param + "'", r.loc);
      }
    }
    for (const auto& r : triggers_) {
      if (a.find_pointcut(r.pointcut) == nullptr) {
        throw Error(ErrorCode::UnknownPointcut, "unknown pointcut '" + r.pointcut + "'", r.loc);
      }
    }
    for (std::size_t i = 0; i < a.advices.size(); ++i) {
      const Advice& adv = a.advices[i];
      std::vector<std::string> names;
      collect_trigger_names(adv.trigger, names);
      for (const auto& p : adv.params) {
        bool found = false;
        for (const auto& n : names) {
          const Param* q = a.find_pointcut(n)->find_param(p.name);
          if (q == nullptr) continue;
          if (q->type != p.type) {
            throw Error(ErrorCode::ParamTypeMismatch,
                        "advice parameter '" + p.name + "' is " + std::string(to_string(p.type)) +
                            " but " + n + " declares " + std::string(to_string(q->type)),
                        advice_locs_[i]);
          }
          found = true;
        }
        if (!found) {
          throw Error(ErrorCode::UnknownParam,
                      "advice parameter '" + p.name + "' is not declared by its pointcut",
                      advice_locs_[i]);
        }
      }
    }
    advice_locs_.clear();
  }

  TokenStream ts_;
  std::vector<PendingRef> refs_;
  std::vector<PendingRef> triggers_;
  std::vector<SourceLocation> advice_locs_;
};

enum Prec { kOr = 1, kAnd = 2, kUnary = 3 };

inline std::string print_pattern(const IdPattern& p) {
  return p.text() == "*" ? std::string("*") : quote(p.text());
}

inline std::string print_expr(const ExprPtr& e, int context = kOr) {
  std::string s;
  int mine = kUnary;
  switch (e->op) {
    case Expr::Op::Designator:
      s = std::string(to_string(e->kind)) + "(" + print_pattern(e->pattern) + ")";
      break;
    case Expr::Op::Within: s = "within(" + print_pattern(e->pattern) + ")"; break;
    case Expr::Op::Ref: s = e->param.empty() ? e->pointcut : e->pointcut + "." + e->param; break;
    case Expr::Op::Not: s = "!" + print_expr(e->lhs, kUnary); break;
    case Expr::Op::And:
      mine = kAnd;
      s = print_expr(e->lhs, kAnd) + " && " + print_expr(e->rhs, kAnd + 1);
      break;
    case Expr::Op::Or:
      mine = kOr;
      s = print_expr(e->lhs, kOr) + " || " + print_expr(e->rhs, kOr + 1);
      break;
  }
  return mine < context ? "(" + s + ")" : s;
}

inline std::string print_params(const std::vector<Param>& params) {
  std::string s = "(";
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (i != 0) s += ", ";
    s += std::string(to_string(params[i].type)) + " " + params[i].name;
  }
  return s + ")";
}

}  // namespace detail

/// Parses an aspect file. Pointcut references, parameters and advice
/// signatures are resolved within each aspect; variant names need the
/// model and are checked by `check_aspects`.
inline std::vector<ProcessAspect> parse_aspect_file(std::string_view text) {
  return detail::AspectParser(text).parse();
}

inline std::string print_aspects(const std::vector<ProcessAspect>& aspects) {
  std::ostringstream out;
  for (std::size_t i = 0; i < aspects.size(); ++i) {
    const auto& a = aspects[i];
    if (i != 0) out << "\n";
    out << "aspect " << a.name << (a.active ? " active" : "") << " {\n";
    for (const auto& v : a.owned_variants) out << write_variant(v, "  ");
    for (const auto& vp : a.owned_varpoints) {
      out << "  varpoint " << vp.name << " kind " << to_string(vp.kind) << " "
          << to_string(vp.policy);
      if (!vp.owner.empty()) out << " at " << vp.owner;
      out << "\n";
    }
    for (const auto& pc : a.pointcuts) {
      out << "  pointcut " << pc.name << " " << detail::print_params(pc.params) << ":\n";
      for (const auto& [param, e] : pc.bindings) {
        out << "    " << param << "=(" << detail::print_expr(e) << ");\n";
      }
    }
    for (const auto& adv : a.advices) {
      out << "  advice " << detail::print_expr(adv.trigger) << " "
          << detail::print_params(adv.params) << " {\n";
      for (const auto& act : adv.actions) {
        out << "    " << act.param << ".occupe(" << detail::quote(act.variant) << ");\n";
      }
      out << "  }\n";
    }
    out << "}\n";
  }
  return out.str();
}

/// Parameters that no binding covers; these always evaluate to nothing.
inline std::vector<std::string> aspect_warnings(const ProcessAspect& a) {
  std::vector<std::string> out;
  for (const auto& pc : a.pointcuts) {
    for (const auto& p : pc.params) {
      if (!pc.binding_for(p.name)) {
        out.push_back("aspect " + a.name + ": parameter '" + p.name + "' of pointcut " + pc.name +
                      " has no binding");
      }
    }
  }
  return out;
}

}  // namespace vrp

#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "vrpweave/aspect.hpp"
#include "vrpweave/error.hpp"
#include "vrpweave/model.hpp"
#include "vrpweave/model_io.hpp"
#include "vrpweave/variability.hpp"

namespace vrp {

/// Lookups the designators need: names and container ancestry by id.
class ModelIndex {
 public:
  explicit ModelIndex(const ProcessModel& model) : process_name_(model.name) {
    walk(model, [&](const ProcessElement& e, std::string_view parent) {
      names_.emplace(e.qualified_id(), e.name);
      kinds_.emplace(e.qualified_id(), e.kind);
      parents_.emplace(e.qualified_id(), std::string(parent));
    });
  }

  /// Display name of an id; unknown ids (variants) name themselves.
  std::string_view name_of(const std::string& id) const {
    if (id.empty()) return process_name_;
    auto it = names_.find(id);
    return it == names_.end() ? std::string_view(id) : std::string_view(it->second);
  }

  std::optional<ElementKind> kind_of(const std::string& id) const {
    if (id.empty()) return ElementKind::Process;
    auto it = kinds_.find(id);
    if (it == kinds_.end()) return std::nullopt;
    return it->second;
  }

  /// `id` followed by its containers up to and including process scope.
  std::vector<std::string> lineage(const std::string& id) const {
    std::vector<std::string> chain;
    std::string cur = id;
    while (true) {
      chain.push_back(cur);
      if (cur.empty()) break;
      auto it = parents_.find(cur);
      if (it == parents_.end()) {
        chain.emplace_back();
        break;
      }
      cur = it->second;
    }
    return chain;
  }

 private:
  std::string process_name_;
  std::map<std::string, std::string> names_;
  std::map<std::string, ElementKind> kinds_;
  std::map<std::string, std::string> parents_;
};

/// Primitive designator test. Kind designators match the VP's subject
/// element (explicit VPs: their owner, or the VP's own name when the
/// pattern reads like a name); `within` matches the owner or any ancestor.
inline bool match_designator(const Expr& d, const VarPoint& vp, const ModelIndex& index) {
  if (d.op == Expr::Op::Within) {
    for (const auto& id : index.lineage(vp.owner)) {
      if (d.pattern.matches(id, index.name_of(id))) return true;
    }
    return false;
  }
  if (d.op != Expr::Op::Designator || d.kind != vp.kind) return false;
  if (d.pattern.matches(vp.subject, index.name_of(vp.subject))) return true;
  return !vp.is_implicit && d.pattern.targets_names() && d.pattern.matches(vp.name);
}

inline bool match_designator(const Expr& d, const VarPoint& vp, const ProcessModel& model) {
  return match_designator(d, vp, ModelIndex(model));
}

/// Result of evaluating a pointcut or advice trigger: per parameter, the
/// selected VPs in population order.
class Binding {
 public:
  void set(std::string param, std::vector<VarPoint> vps) {
    entries_.emplace_back(std::move(param), std::move(vps));
  }

  const std::vector<VarPoint>& operator[](std::string_view param) const {
    static const std::vector<VarPoint> kEmpty;
    for (const auto& [p, v] : entries_) {
      if (p == param) return v;
    }
    return kEmpty;
  }

  const std::vector<std::pair<std::string, std::vector<VarPoint>>>& entries() const {
    return entries_;
  }

  bool operator==(const Binding&) const = default;

 private:
  std::vector<std::pair<std::string, std::vector<VarPoint>>> entries_;
};

/// Evaluates designator expressions over a fixed VP population.
///
/// Expressions are evaluated set-wise: And/Or are intersection/union and
/// Not is the complement within the population. A parameter's binding is
/// the selection filtered by the parameter type's VP kinds; if it then
/// holds any explicit VP, implicit ones are dropped, so authored slots
/// take precedence over derived join points.
class PointcutEvaluator {
 public:
  using Mask = std::vector<bool>;

  PointcutEvaluator(const ProcessModel& model, std::vector<VarPoint> population,
                    const ProcessAspect* aspect = nullptr)
      : index_(model), population_(std::move(population)), aspect_(aspect) {}

  const std::vector<VarPoint>& population() const noexcept { return population_; }

  Mask select(const Expr& e) {
    Mask out(population_.size(), false);
    switch (e.op) {
      case Expr::Op::Designator:
      case Expr::Op::Within:
        for (std::size_t i = 0; i < population_.size(); ++i) {
          out[i] = match_designator(e, population_[i], index_);
        }
        break;
      case Expr::Op::And: {
        Mask l = select(*e.lhs), r = select(*e.rhs);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = l[i] && r[i];
        break;
      }
      case Expr::Op::Or: {
        Mask l = select(*e.lhs), r = select(*e.rhs);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = l[i] || r[i];
        break;
      }
      case Expr::Op::Not: {
        Mask x = select(*e.lhs);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = !x[i];
        break;
      }
      case Expr::Op::Ref: {
        const Binding& b = evaluate(lookup(e.pointcut));
        std::set<std::string> names;
        for (const auto& vp : b[e.param]) names.insert(vp.name);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = names.count(population_[i].name) != 0;
        break;
      }
    }
    return out;
  }

  const Binding& evaluate(const Pointcut& pc) {
    if (auto it = memo_.find(pc.name); it != memo_.end()) return it->second;
    if (std::find(stack_.begin(), stack_.end(), pc.name) != stack_.end()) {
      std::string cycle;
      for (const auto& s : stack_) cycle += s + " -> ";
      throw Error(ErrorCode::CyclicPointcutReference, "pointcut cycle " + cycle + pc.name);
    }
    stack_.push_back(pc.name);
    Binding b;
    for (const auto& p : pc.params) {
      ExprPtr e = pc.binding_for(p.name);
      b.set(p.name, e ? bind(select(*e), p.type) : std::vector<VarPoint>{});
    }
    stack_.pop_back();
    return memo_.emplace(pc.name, std::move(b)).first->second;
  }

  Binding evaluate(const Advice& adv) {
    Binding b;
    for (const auto& p : adv.params) b.set(p.name, bind(select_trigger(*adv.trigger, p.name), p.type));
    return b;
  }

 private:
  const Pointcut& lookup(const std::string& name) {
    const Pointcut* pc = aspect_ != nullptr ? aspect_->find_pointcut(name) : nullptr;
    if (pc == nullptr) {
      if (!stack_.empty() && stack_.back() == name) {
        throw Error(ErrorCode::CyclicPointcutReference, "pointcut " + name + " references itself");
      }
      throw Error(ErrorCode::UnknownPointcut, "unknown pointcut '" + name + "'");
    }
    return *pc;
  }

  Mask select_trigger(const Expr& e, const std::string& param) {
    Mask out(population_.size(), false);
    switch (e.op) {
      case Expr::Op::Ref: {
        const Pointcut& pc = lookup(e.pointcut);
        if (pc.find_param(param) == nullptr) break;
        std::set<std::string> names;
        for (const auto& vp : evaluate(pc)[param]) names.insert(vp.name);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = names.count(population_[i].name) != 0;
        break;
      }
      case Expr::Op::And: {
        Mask l = select_trigger(*e.lhs, param), r = select_trigger(*e.rhs, param);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = l[i] && r[i];
        break;
      }
      case Expr::Op::Or: {
        Mask l = select_trigger(*e.lhs, param), r = select_trigger(*e.rhs, param);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = l[i] || r[i];
        break;
      }
      case Expr::Op::Not: {
        Mask x = select_trigger(*e.lhs, param);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = !x[i];
        break;
      }
      default:
        throw Error(ErrorCode::Syntax, "advice trigger must combine pointcut names");
    }
    return out;
  }

  std::vector<VarPoint> bind(const Mask& mask, ParamType type) const {
    std::vector<VarPoint> out;
    bool any_explicit = false;
    for (std::size_t i = 0; i < population_.size(); ++i) {
      if (mask[i] && accepts(type, population_[i].kind)) {
        out.push_back(population_[i]);
        any_explicit = any_explicit || !population_[i].is_implicit;
      }
    }
    if (any_explicit) {
      std::erase_if(out, [](const VarPoint& vp) { return vp.is_implicit; });
    }
    return out;
  }

  ModelIndex index_;
  std::vector<VarPoint> population_;
  const ProcessAspect* aspect_;
  std::map<std::string, Binding> memo_;
  std::vector<std::string> stack_;
};

/// Evaluates a standalone pointcut. References to other pointcuts need
/// the aspect overload.
inline Binding evaluate_pointcut(const Pointcut& pc, const std::vector<VarPoint>& vps,
                                 const ProcessModel& model) {
  PointcutEvaluator ev(model, vps);
  return ev.evaluate(pc);
}

inline Binding evaluate_pointcut(const Pointcut& pc, const std::vector<VarPoint>& vps,
                                 const ProcessModel& model, const ProcessAspect& aspect) {
  PointcutEvaluator ev(model, vps, &aspect);
  return ev.evaluate(pc);
}

/// Places an aspect-owned VP on the model: end position of a container
/// owner, or the kind's edge slot of a task owner.
inline VarPoint resolve_owned_varpoint(const VarPoint& vp, const ProcessModel& model) {
  if (vp.slot_kind != SlotKind::Unresolved) return vp;
  VarPoint out = vp;
  ElementKind owner_kind = ElementKind::Process;
  std::size_t children = model.roots.size();
  if (!vp.owner.empty()) {
    const ProcessElement* owner = find_element(model.roots, vp.owner);
    if (owner == nullptr) {
      throw Error(ErrorCode::DanglingReference,
                  "varpoint '" + vp.name + "' placed at undeclared element " + vp.owner);
    }
    owner_kind = owner->kind;
    children = owner->children.size();
  }
  if (!detail::vp_kind_allowed(owner_kind, vp.kind)) {
    throw Error(ErrorCode::KindViolation, "varpoint '" + vp.name + "' of kind " +
                                              std::string(to_string(vp.kind)) + " not allowed in " +
                                              std::string(to_string(owner_kind)));
  }
  if (is_container(owner_kind)) {
    out.slot_kind = SlotKind::Position;
    out.slot = children;
  } else {
    out.slot_kind = detail::edge_slot_for(vp.kind);
    out.slot = 0;
  }
  return out;
}

/// Variant visible to an aspect's actions: its own first, then the model's.
inline const Variant* resolve_variant(const ProcessAspect& aspect, const ProcessModel& model,
                                      std::string_view name) {
  if (const auto* v = find_variant(aspect.owned_variants, name)) return v;
  return find_variant(model.variants, name);
}

/// Cross-checks parsed aspects against the model they will be woven into.
inline void check_aspects(const std::vector<ProcessAspect>& aspects, const ProcessModel& model) {
  auto elements = element_index(model);
  std::map<std::string, ElementKind> variants;
  for (const auto& v : model.variants) variants.emplace(v.name, v.payload.kind);
  std::set<std::string> aspect_names;
  std::set<std::string> vp_names;
  for (const auto& vp : model.explicit_varpoints) vp_names.insert(vp.name);

  for (const auto& a : aspects) {
    if (!aspect_names.insert(a.name).second) {
      throw Error(ErrorCode::DuplicateId, "duplicate aspect '" + a.name + "'");
    }
    for (const auto& v : a.owned_variants) {
      if (elements.count(v.name) != 0 || !variants.emplace(v.name, v.payload.kind).second) {
        throw Error(ErrorCode::DuplicateId, "aspect " + a.name + " variant \"" + v.name +
                                                "\" collides with a model declaration");
      }
    }
  }
  for (const auto& a : aspects) {
    for (const auto& v : a.owned_variants) {
      if (is_work_unit(v.payload.kind)) {
        detail::check_unit_refs(v.payload, "variant \"" + v.name + "\"", elements, variants);
      }
    }
    for (const auto& vp : a.owned_varpoints) {
      if (!vp_names.insert(vp.name).second) {
        throw Error(ErrorCode::DuplicateId, "duplicate varpoint '" + vp.name + "'");
      }
      (void)resolve_owned_varpoint(vp, model);
    }
    for (const auto& adv : a.advices) {
      for (const auto& act : adv.actions) {
        if (resolve_variant(a, model, act.variant) == nullptr) {
          throw Error(ErrorCode::UnknownVariant,
                      "aspect " + a.name + ": unknown variant \"" + act.variant + "\"");
        }
      }
    }
  }
}

/// Parses and resolves every name, including variants from `model`.
inline std::vector<ProcessAspect> parse_aspect_file(std::string_view text,
                                                    const ProcessModel& model) {
  auto aspects = parse_aspect_file(text);
  check_aspects(aspects, model);
  return aspects;
}

/// Explicit model VPs, then VPs owned by the given aspects, then the
/// implicit ones. This is the order advices apply in.
inline std::vector<VarPoint> varpoint_population(const ProcessModel& model,
                                                 const std::vector<const ProcessAspect*>& active = {}) {
  std::vector<VarPoint> out = model.explicit_varpoints;
  for (const auto* a : active) {
    for (const auto& vp : a->owned_varpoints) out.push_back(resolve_owned_varpoint(vp, model));
  }
  auto implicit = derive_implicit_varpoints(model);
  out.insert(out.end(), implicit.begin(), implicit.end());
  return out;
}

}  // namespace vrp

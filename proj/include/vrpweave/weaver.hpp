#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "vrpweave/aspect.hpp"
#include "vrpweave/error.hpp"
#include "vrpweave/metrics.hpp"
#include "vrpweave/model.hpp"
#include "vrpweave/model_io.hpp"
#include "vrpweave/planner.hpp"
#include "vrpweave/pointcut.hpp"
#include "vrpweave/variability.hpp"

namespace vrp {

struct ChangeRecord {
  std::string varpoint;
  std::string variant;
  Origin origin;

  bool operator==(const ChangeRecord&) const = default;
};

struct ManualBinding {
  std::string varpoint;
  std::string variant;

  bool operator==(const ManualBinding&) const = default;
};

struct WeaveRequest {
  ProcessModel model;
  std::vector<ProcessAspect> aspects;
  std::vector<std::string> activations;  // planning order
  std::vector<ManualBinding> manual_bindings;
};

struct TailoredProcess {
  ProcessModel result;
  std::vector<ChangeRecord> ledger;
  std::vector<RealizedEdge> realized_edges;  // materialized ids
  EffortReport report;
  std::vector<std::string> warnings;

  bool operator==(const TailoredProcess&) const = default;
};

namespace detail {

/// Rewrites a copy of the model; the input is never touched.
class Materializer {
 public:
  explicit Materializer(const ProcessModel& model)
      : base_(model), out_(model), index_(model) {
    out_.explicit_varpoints.clear();
    walk(model, [&](const ProcessElement& e, std::string_view) { ids_.insert(e.qualified_id()); });
  }

  void apply(const Occupation& occ) {
    const VarPoint& vp = occ.varpoint;
    const ProcessElement& payload = occ.variant.payload;
    bool deliver = vp.kind == VpKind::Deliver;

    switch (vp.slot_kind) {
      case SlotKind::Position:
      case SlotKind::Unresolved:
        place(occ.variant, vp.owner, original_child(vp.owner, vp.slot), deliver);
        return;
      case SlotKind::Definition: {
        auto kind = index_.kind_of(vp.owner);
        if (kind && is_container(*kind)) {
          place(occ.variant, vp.owner, std::nullopt, deliver);
        } else {
          place(occ.variant, parent_of(vp.owner), next_sibling(vp.owner), deliver);
        }
        return;
      }
      case SlotKind::Invokes: {
        std::string id = place(occ.variant, parent_of(vp.owner), next_sibling(vp.owner), deliver);
        unit(vp.owner).invokes.push_back(id);
        return;
      }
      case SlotKind::Delivery:
      case SlotKind::FirstUse:
      case SlotKind::Input:
      case SlotKind::Output:
      case SlotKind::Performer:
      case SlotKind::ToolSlot: {
        auto kind = index_.kind_of(vp.owner);
        if (!kind || !is_work_unit(*kind)) {
          // Deliverable never produced: declare beside the product's container.
          place(occ.variant, vp.owner, std::nullopt, deliver);
          return;
        }
        std::string name = place(occ.variant, parent_of(vp.owner), vp.owner, deliver);
        ProcessElement& u = unit(vp.owner);
        auto& list = payload.kind == ElementKind::Role ? u.performers
                     : payload.kind == ElementKind::Tool ? u.tools
                     : (vp.slot_kind == SlotKind::Input || vp.slot_kind == SlotKind::FirstUse)
                         ? u.inputs
                         : u.outputs;
        if (std::find(list.begin(), list.end(), name) == list.end()) list.push_back(name);
        return;
      }
    }
  }

  std::vector<RealizedEdge> realize(const std::vector<Occupation>& occupations) {
    std::vector<RealizedEdge> edges;
    for (const auto& dep : base_.dependencies) {
      if (!variant_occupied(occupations, dep.from) || !variant_occupied(occupations, dep.to)) {
        continue;
      }
      RealizedEdge e = realize_dependency(dep, occupations);
      for (const auto& src : placed_[e.source]) {
        for (const auto& tgt : placed_[e.target]) {
          ProcessElement& u = unit(src);
          auto& list = e.kind == EdgeKind::Input    ? u.inputs
                       : e.kind == EdgeKind::Output ? u.outputs
                                                    : u.invokes;
          if (std::find(list.begin(), list.end(), tgt) == list.end()) list.push_back(tgt);
          edges.push_back({e.kind, src, tgt});
        }
      }
    }
    return edges;
  }

  ProcessModel finish() {
    std::erase_if(out_.variants, [&](const Variant& v) { return placed_.count(v.name) != 0; });
    std::erase_if(out_.dependencies, [&](const Dependency& d) {
      return placed_.count(d.from) != 0 || placed_.count(d.to) != 0;
    });
    prune_references(out_.roots);
    return std::move(out_);
  }

 private:
  std::string parent_of(const std::string& id) const {
    auto chain = index_.lineage(id);
    return chain.size() > 1 ? chain[1] : std::string();
  }

  const std::vector<ProcessElement>& base_children(const std::string& container) const {
    if (container.empty()) return base_.roots;
    return find_element(base_.roots, container)->children;
  }

  std::optional<std::string> original_child(const std::string& container, std::size_t slot) const {
    const auto& kids = base_children(container);
    if (slot < kids.size()) return kids[slot].qualified_id();
    return std::nullopt;
  }

  std::optional<std::string> next_sibling(const std::string& id) const {
    const auto& kids = base_children(parent_of(id));
    for (std::size_t i = 0; i < kids.size(); ++i) {
      if (kids[i].qualified_id() == id) {
        if (i + 1 < kids.size()) return kids[i + 1].qualified_id();
        break;
      }
    }
    return std::nullopt;
  }

  std::vector<ProcessElement>& children(const std::string& container) {
    if (container.empty()) return out_.roots;
    return find_element(out_.roots, container)->children;
  }

  ProcessElement& unit(const std::string& id) { return *find_element(out_.roots, id); }

  std::string fresh_id(const std::string& container) {
    std::string prefix = container.empty() ? "" : container + ".";
    std::size_t next = 1;
    for (const auto& c : children(container)) {
      if (!is_work_unit(c.kind) || c.id.rfind(prefix, 0) != 0) continue;
      std::string tail = c.id.substr(prefix.size());
      if (tail.empty() || tail.find_first_not_of("0123456789") != std::string::npos) continue;
      if (tail.size() > 9) continue;
      next = std::max(next, static_cast<std::size_t>(std::stoul(tail)) + 1);
    }
    while (ids_.count(prefix + std::to_string(next)) != 0) ++next;
    return prefix + std::to_string(next);
  }

  // Inserts the payload before `anchor` (an original element) or at the end
  // of `container`. Work units get a fresh id per placement; named payloads
  // are declared once and reused. Returns the materialized qualified id.
  std::string place(const Variant& variant, const std::string& container,
                    const std::optional<std::string>& anchor, bool deliverable) {
    ProcessElement e = variant.payload;
    if (is_work_unit(e.kind)) {
      e.id = fresh_id(container);
    } else {
      e.id = e.name;
      if (ids_.count(e.id) != 0) {
        if (deliverable) find_element(out_.roots, e.id)->deliverable = true;
        return e.id;
      }
      if (deliverable) e.deliverable = true;
    }
    auto& kids = children(container);
    auto pos = kids.end();
    if (anchor) {
      pos = std::find_if(kids.begin(), kids.end(),
                         [&](const ProcessElement& k) { return k.qualified_id() == *anchor; });
    }
    std::string id = e.id;
    ids_.insert(id);
    placed_[variant.name].push_back(id);
    kids.insert(pos, std::move(e));
    return id;
  }

  bool resolves(const std::string& ref) const {
    return ids_.count(ref) != 0 || find_variant(out_.variants, ref) != nullptr;
  }

  void prune_references(std::vector<ProcessElement>& elements) {
    for (auto& e : elements) {
      for (auto* list : {&e.inputs, &e.outputs, &e.performers, &e.tools, &e.invokes}) {
        std::erase_if(*list, [&](const std::string& r) { return !resolves(r); });
      }
      prune_references(e.children);
    }
  }

  const ProcessModel& base_;
  ProcessModel out_;
  ModelIndex index_;
  std::set<std::string> ids_;
  std::map<std::string, std::vector<std::string>> placed_;
};

/// Explicit model VPs, then implicit VPs, then anything else by name.
inline std::vector<Occupation> canonical_order(const ProcessModel& model,
                                               std::vector<Occupation> occupations) {
  std::map<std::string, std::size_t> rank;
  std::size_t n = 0;
  for (const auto& vp : model.explicit_varpoints) rank.emplace(vp.name, n++);
  for (const auto& vp : derive_implicit_varpoints(model)) rank.emplace(vp.name, n++);
  auto key = [&](const Occupation& o) {
    auto it = rank.find(o.varpoint.name);
    return std::make_tuple(it == rank.end() ? n : it->second, o.varpoint.aspect, o.varpoint.name);
  };
  std::stable_sort(occupations.begin(), occupations.end(),
                   [&](const Occupation& a, const Occupation& b) { return key(a) < key(b); });
  return occupations;
}

inline TailoredProcess materialize(const ProcessModel& model,
                                   const std::vector<Occupation>& occupations,
                                   const std::vector<VarPoint>& mandatory) {
  std::map<std::string, const Occupation*> by_vp;
  for (const auto& o : occupations) {
    auto [it, fresh] = by_vp.emplace(o.varpoint.name, &o);
    if (!fresh) {
      throw Error(ErrorCode::Conflict, "varpoint '" + o.varpoint.name + "' occupied by \"" +
                                           it->second->variant.name + "\" (" +
                                           it->second->origin.str() + ") and \"" + o.variant.name +
                                           "\" (" + o.origin.str() + ")");
    }
  }
  for (const auto& vp : mandatory) {
    if (by_vp.count(vp.name) == 0) {
      throw Error(ErrorCode::UnresolvedMandatory, "mandatory varpoint '" + vp.name + "' is unoccupied");
    }
  }
  DependencyReport deps = check_dependencies(occupations, model.dependencies);
  if (!deps.consistent()) {
    std::string msg;
    for (const auto& v : deps.violations) {
      if (!msg.empty()) msg += "; ";
      msg += "\"" + v.dependency.from + "\" requires \"" + v.missing + "\"";
    }
    throw Error(ErrorCode::DependencyViolation, msg);
  }

  Materializer m(model);
  for (const auto& o : canonical_order(model, occupations)) m.apply(o);

  TailoredProcess tp;
  tp.realized_edges = m.realize(occupations);
  tp.result = m.finish();
  for (const auto& o : occupations) tp.ledger.push_back({o.varpoint.name, o.variant.name, o.origin});
  validate_model(tp.result);
  return tp;
}

inline std::vector<VarPoint> mandatory_varpoints(const std::vector<VarPoint>& vps) {
  std::vector<VarPoint> out;
  for (const auto& vp : vps) {
    if (!vp.is_implicit && vp.policy == Policy::Mandatory) out.push_back(vp);
  }
  return out;
}

}  // namespace detail

/// Materializes the given occupations directly, skipping pointcut
/// evaluation. Used as the reference path for woven results.
inline TailoredProcess weave_manual_oracle(const ProcessModel& model,
                                           const std::vector<Occupation>& occupations) {
  return detail::materialize(model, occupations,
                             detail::mandatory_varpoints(model.explicit_varpoints));
}

/// Aspects to plan: the activation list in order, then aspects declared
/// `active` that the list does not name.
inline std::vector<const ProcessAspect*> activated_aspects(const WeaveRequest& req) {
  std::vector<const ProcessAspect*> out;
  auto find = [&](std::string_view name) -> const ProcessAspect* {
    for (const auto& a : req.aspects) {
      if (a.name == name) return &a;
    }
    return nullptr;
  };
  for (const auto& name : req.activations) {
    const ProcessAspect* a = find(name);
    if (a == nullptr) throw Error(ErrorCode::UnknownAspect, "no aspect named '" + name + "'");
    if (std::find(out.begin(), out.end(), a) == out.end()) out.push_back(a);
  }
  for (const auto& a : req.aspects) {
    if (a.active && std::find(out.begin(), out.end(), &a) == out.end()) out.push_back(&a);
  }
  return out;
}

inline TailoredProcess weave(const WeaveRequest& req) {
  check_aspects(req.aspects, req.model);
  auto active = activated_aspects(req);
  auto population = varpoint_population(req.model, active);

  std::vector<Occupation> occupations;
  std::vector<std::string> warnings;
  for (const auto* a : active) {
    PlanResult plan = plan_aspect(*a, req.model, population);
    occupations.insert(occupations.end(), plan.occupations.begin(), plan.occupations.end());
    warnings.insert(warnings.end(), plan.warnings.begin(), plan.warnings.end());
  }

  for (const auto& mb : req.manual_bindings) {
    auto it = std::find_if(population.begin(), population.end(),
                           [&](const VarPoint& vp) { return vp.name == mb.varpoint; });
    if (it == population.end()) {
      throw Error(ErrorCode::UnknownVarPoint, "no varpoint named '" + mb.varpoint + "'");
    }
    const Variant* v = find_variant(req.model.variants, mb.variant);
    for (std::size_t i = 0; v == nullptr && i < active.size(); ++i) {
      v = find_variant(active[i]->owned_variants, mb.variant);
    }
    if (v == nullptr) throw Error(ErrorCode::UnknownVariant, "unknown variant \"" + mb.variant + "\"");
    occupations.push_back(make_occupation(*it, *v, Origin::by_hand()));
  }

  TailoredProcess tp =
      detail::materialize(req.model, occupations, detail::mandatory_varpoints(population));
  tp.report = effort_report(req.model, req.aspects);
  tp.warnings = std::move(warnings);
  return tp;
}

inline std::string render_ledger_text(const TailoredProcess& tp) {
  std::string s;
  for (const auto& c : tp.ledger) {
    s += "occupe " + c.varpoint + " <- \"" + c.variant + "\" [" + c.origin.str() + "]\n";
  }
  for (const auto& e : tp.realized_edges) {
    s += "edge " + std::string(to_string(e.kind)) + " " + e.source + " -> " + e.target + "\n";
  }
  return s;
}

inline std::string render_ledger_structured(const TailoredProcess& tp) {
  std::string s;
  for (const auto& c : tp.ledger) {
    s += "ledger\t" + c.varpoint + "\t" + c.variant + "\t" + c.origin.str() + "\n";
  }
  for (const auto& e : tp.realized_edges) {
    s += "edge\t" + std::string(to_string(e.kind)) + "\t" + e.source + "\t" + e.target + "\n";
  }
  return s;
}

}  // namespace vrp

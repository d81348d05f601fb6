#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "vrpweave/error.hpp"
#include "vrpweave/model.hpp"
#include "vrpweave/model_io.hpp"

namespace vrp {

/// Payload/VP compatibility: work units fill call and execution slots,
/// products fill use/create/init/deliver, roles and tools fill access.
inline constexpr bool compatible(ElementKind payload, VpKind vp) {
  switch (vp) {
    case VpKind::Call:
    case VpKind::Execution: return is_work_unit(payload);
    case VpKind::Use:
    case VpKind::Create:
    case VpKind::Init:
    case VpKind::Deliver: return payload == ElementKind::WorkProduct;
    case VpKind::Access: return is_resource(payload);
  }
  return false;
}

/// Implicit VPs at every join point of the model, in a fixed order: per
/// work unit in pre-order (execution, calls, inputs, outputs, performers,
/// tools), then one `init` per distinct input product in first-use order,
/// then one `deliver` per deliverable product.
inline std::vector<VarPoint> derive_implicit_varpoints(const ProcessModel& model) {
  std::vector<VarPoint> out;
  std::vector<std::pair<std::string, std::string>> first_use;  // product, unit
  std::set<std::string> seen;
  std::map<std::string, std::string> first_producer;
  std::vector<std::pair<std::string, std::string>> deliverables;  // product, container

  auto make = [](VpKind kind, std::string name, const std::string& owner, std::string subject,
                 SlotKind slot_kind, std::size_t slot) {
    VarPoint vp;
    vp.name = std::move(name);
    vp.kind = kind;
    vp.owner = owner;
    vp.subject = std::move(subject);
    vp.slot_kind = slot_kind;
    vp.slot = slot;
    vp.is_implicit = true;
    vp.policy = Policy::Optional;
    return vp;
  };

  walk(model, [&](const ProcessElement& e, std::string_view parent) {
    if (e.kind == ElementKind::WorkProduct && e.deliverable) {
      deliverables.emplace_back(e.name, std::string(parent));
    }
    if (!is_work_unit(e.kind)) return;
    const std::string& id = e.id;
    out.push_back(make(VpKind::Execution, "execution@" + id, id, id, SlotKind::Definition, 0));
    for (std::size_t k = 0; k < e.invokes.size(); ++k) {
      out.push_back(make(VpKind::Call, "call@" + id + "#call" + std::to_string(k), id,
                         e.invokes[k], SlotKind::Invokes, k));
    }
    for (std::size_t k = 0; k < e.inputs.size(); ++k) {
      out.push_back(make(VpKind::Use, "use@" + id + "#in" + std::to_string(k), id, e.inputs[k],
                         SlotKind::Input, k));
    }
    for (std::size_t k = 0; k < e.outputs.size(); ++k) {
      out.push_back(make(VpKind::Create, "create@" + id + "#out" + std::to_string(k), id,
                         e.outputs[k], SlotKind::Output, k));
      first_producer.emplace(e.outputs[k], id);
    }
    for (std::size_t k = 0; k < e.performers.size(); ++k) {
      out.push_back(make(VpKind::Access, "access@" + id + "#role" + std::to_string(k), id,
                         e.performers[k], SlotKind::Performer, k));
    }
    for (std::size_t k = 0; k < e.tools.size(); ++k) {
      out.push_back(make(VpKind::Access, "access@" + id + "#tool" + std::to_string(k), id,
                         e.tools[k], SlotKind::ToolSlot, k));
    }
    for (const auto& p : e.inputs) {
      if (seen.insert(p).second) first_use.emplace_back(p, id);
    }
  });

  for (const auto& [product, unit] : first_use) {
    out.push_back(make(VpKind::Init, "init@" + product, unit, product, SlotKind::FirstUse, 0));
  }
  for (const auto& [product, container] : deliverables) {
    auto it = first_producer.find(product);
    const std::string& owner = it != first_producer.end() ? it->second : container;
    out.push_back(make(VpKind::Deliver, "deliver@" + product, owner, product, SlotKind::Delivery, 0));
  }
  return out;
}

struct Origin {
  bool manual = true;
  std::string aspect;  // set when produced by an advice

  static Origin by_hand() { return {}; }
  static Origin advice(std::string aspect_name) { return {false, std::move(aspect_name)}; }

  std::string str() const { return manual ? "manual" : "advice(" + aspect + ")"; }

  bool operator==(const Origin&) const = default;
};

struct Occupation {
  VarPoint varpoint;
  Variant variant;
  Origin origin;

  bool operator==(const Occupation&) const = default;
};

/// Checks kind compatibility and the no-manual-implicit rule.
inline Occupation make_occupation(const VarPoint& vp, const Variant& variant, Origin origin) {
  if (!compatible(variant.payload.kind, vp.kind)) {
    throw Error(ErrorCode::KindMismatch,
                std::string(to_string(variant.payload.kind)) + " variant \"" + variant.name +
                    "\" cannot occupy " + std::string(to_string(vp.kind)) + " varpoint '" +
                    vp.name + "'");
  }
  if (origin.manual && vp.is_implicit) {
    throw Error(ErrorCode::ImplicitManualBinding,
                "implicit varpoint '" + vp.name + "' cannot be bound manually");
  }
  return Occupation{vp, variant, std::move(origin)};
}

/// Capacity-one occupation relation. Values are immutable; `occupy`
/// returns a new set.
class OccupationSet {
 public:
  OccupationSet() = default;

  const std::vector<Occupation>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }

  const Occupation* find(std::string_view vp_name) const {
    for (const auto& o : entries_) {
      if (o.varpoint.name == vp_name) return &o;
    }
    return nullptr;
  }

  bool occupies_variant(std::string_view variant) const {
    return std::any_of(entries_.begin(), entries_.end(),
                       [&](const Occupation& o) { return o.variant.name == variant; });
  }

  friend OccupationSet occupy(const OccupationSet& set, const VarPoint& vp,
                              const Variant& variant, Origin origin);

 private:
  std::vector<Occupation> entries_;
};

inline OccupationSet occupy(const OccupationSet& set, const VarPoint& vp, const Variant& variant,
                            Origin origin) {
  if (const auto* prior = set.find(vp.name)) {
    throw Error(ErrorCode::AlreadyOccupied, "varpoint '" + vp.name + "' already holds \"" +
                                                prior->variant.name + "\" (" +
                                                prior->origin.str() + ")");
  }
  OccupationSet next = set;
  next.entries_.push_back(make_occupation(vp, variant, std::move(origin)));
  return next;
}

struct DependencyViolation {
  Dependency dependency;
  std::string missing;  // the unoccupied `to` variant

  bool operator==(const DependencyViolation&) const = default;
};

struct DependencyReport {
  std::vector<DependencyViolation> violations;

  bool consistent() const noexcept { return violations.empty(); }
};

namespace detail {
inline bool variant_occupied(const std::vector<Occupation>& occupations, std::string_view name) {
  return std::any_of(occupations.begin(), occupations.end(),
                     [&](const Occupation& o) { return o.variant.name == name; });
}
}  // namespace detail

inline DependencyReport check_dependencies(const std::vector<Occupation>& occupations,
                                           const std::vector<Dependency>& deps) {
  DependencyReport report;
  for (const auto& d : deps) {
    if (detail::variant_occupied(occupations, d.from) &&
        !detail::variant_occupied(occupations, d.to)) {
      report.violations.push_back({d, d.to});
    }
  }
  return report;
}

/// Edge to add in the tailored process: `source` gains `target` in its
/// input, output or invokes list. Names are variant names until the
/// weaver maps them to materialized ids.
struct RealizedEdge {
  EdgeKind kind = EdgeKind::Output;
  std::string source;
  std::string target;

  bool operator==(const RealizedEdge&) const = default;
};

/// Reverses the dependency into a concrete edge. For input/output the
/// work-unit endpoint carries the edge and the product endpoint is its
/// target; for invokes, `to` invokes `from`.
inline RealizedEdge realize_dependency(const Dependency& dep,
                                       const std::vector<Occupation>& occupations) {
  const Variant* from = nullptr;
  const Variant* to = nullptr;
  for (const auto& o : occupations) {
    if (o.variant.name == dep.from) from = &o.variant;
    if (o.variant.name == dep.to) to = &o.variant;
  }
  if (from == nullptr || to == nullptr) {
    throw Error(ErrorCode::EndpointUnoccupied,
                "dependency \"" + dep.from + "\" -> \"" + dep.to + "\" has an unoccupied endpoint \"" +
                    (from == nullptr ? dep.from : dep.to) + "\"");
  }
  if (dep.realize_edge == EdgeKind::Invokes) return {EdgeKind::Invokes, dep.to, dep.from};
  bool from_is_unit = is_work_unit(from->payload.kind);
  return {dep.realize_edge, from_is_unit ? dep.from : dep.to, from_is_unit ? dep.to : dep.from};
}

}  // namespace vrp

#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vrpweave/pattern.hpp"

namespace vrp {

enum class ElementKind { Process, Activity, Task, WorkProduct, Role, Tool };

inline constexpr std::string_view to_string(ElementKind k) {
  switch (k) {
    case ElementKind::Process: return "process";
    case ElementKind::Activity: return "activity";
    case ElementKind::Task: return "task";
    case ElementKind::WorkProduct: return "product";
    case ElementKind::Role: return "role";
    case ElementKind::Tool: return "tool";
  }
  return "?";
}

inline constexpr bool is_work_unit(ElementKind k) {
  return k == ElementKind::Activity || k == ElementKind::Task;
}
inline constexpr bool is_container(ElementKind k) {
  return k == ElementKind::Process || k == ElementKind::Activity;
}
inline constexpr bool is_resource(ElementKind k) {
  return k == ElementKind::Role || k == ElementKind::Tool;
}

/// Node of the process tree. Work units carry dotted ids; products, roles
/// and tools are identified by name, so for them `id == name`.
struct ProcessElement {
  ElementKind kind = ElementKind::Task;
  std::string id;
  std::string name;
  std::vector<ProcessElement> children;  // activities only
  std::vector<std::string> inputs;       // product names
  std::vector<std::string> outputs;      // product names
  std::vector<std::string> performers;   // role names
  std::vector<std::string> tools;        // tool names
  std::vector<std::string> invokes;      // work-unit ids
  bool deliverable = false;              // products only

  const std::string& qualified_id() const noexcept { return id; }

  bool operator==(const ProcessElement&) const = default;
};

enum class VpKind { Call, Execution, Use, Create, Access, Init, Deliver };

inline constexpr VpKind kAllVpKinds[] = {VpKind::Call,   VpKind::Execution, VpKind::Use,
                                         VpKind::Create, VpKind::Access,    VpKind::Init,
                                         VpKind::Deliver};

inline constexpr std::string_view to_string(VpKind k) {
  switch (k) {
    case VpKind::Call: return "call";
    case VpKind::Execution: return "execution";
    case VpKind::Use: return "use";
    case VpKind::Create: return "create";
    case VpKind::Access: return "access";
    case VpKind::Init: return "init";
    case VpKind::Deliver: return "deliver";
  }
  return "?";
}

inline std::optional<VpKind> parse_vp_kind(std::string_view s) {
  for (VpKind k : kAllVpKinds) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

enum class Policy { Optional, Mandatory };

inline constexpr std::string_view to_string(Policy p) {
  return p == Policy::Optional ? "optional" : "mandatory";
}

/// Where a variation point sits on its owner.
enum class SlotKind {
  Position,    // child position inside a container
  Definition,  // the work unit itself (implicit execution)
  Input,
  Output,
  Performer,
  ToolSlot,
  Invokes,
  FirstUse,    // implicit init
  Delivery,    // implicit deliver
  Unresolved,  // aspect-owned, not yet placed against a model
};

struct VarPoint {
  std::string name;
  VpKind kind = VpKind::Execution;
  std::string owner;    // qualified id of the hosting element; "" is process scope
  std::string subject;  // qualified id of the kind-relevant element
  SlotKind slot_kind = SlotKind::Position;
  std::size_t slot = 0;
  bool is_implicit = false;
  Policy policy = Policy::Optional;
  std::string aspect;  // owning aspect, empty for model VPs

  bool operator==(const VarPoint&) const = default;
};

struct Variant {
  std::string name;
  ProcessElement payload;  // id empty until materialized
  std::string owning_aspect;

  bool operator==(const Variant&) const = default;
};

enum class EdgeKind { Input, Output, Invokes };

inline constexpr std::string_view to_string(EdgeKind e) {
  switch (e) {
    case EdgeKind::Input: return "input";
    case EdgeKind::Output: return "output";
    case EdgeKind::Invokes: return "invokes";
  }
  return "?";
}

struct Dependency {
  std::string from;
  std::string to;
  EdgeKind realize_edge = EdgeKind::Output;

  bool operator==(const Dependency&) const = default;
};

struct ProcessModel {
  std::string name;
  std::vector<ProcessElement> roots;
  std::vector<Variant> variants;
  std::vector<Dependency> dependencies;
  std::vector<VarPoint> explicit_varpoints;

  bool operator==(const ProcessModel&) const = default;
};

/// Element-kind filter for `find_elements`; `std::nullopt` accepts all kinds.
using KindFilter = std::optional<ElementKind>;

inline bool match_pattern(const IdPattern& pattern, const ProcessElement& element) {
  return pattern.matches(element.qualified_id(), element.name);
}

/// Pre-order walk; the callback receives each element and its parent
/// container id ("" for process scope).
inline void walk(const std::vector<ProcessElement>& elements, std::string_view parent,
                 const std::function<void(const ProcessElement&, std::string_view)>& visit) {
  for (const auto& e : elements) {
    visit(e, parent);
    walk(e.children, e.id, visit);
  }
}

inline void walk(const ProcessModel& model,
                 const std::function<void(const ProcessElement&, std::string_view)>& visit) {
  walk(model.roots, "", visit);
}

inline std::vector<ProcessElement> find_elements(const ProcessModel& model, KindFilter kind,
                                                 const IdPattern& pattern) {
  std::vector<ProcessElement> out;
  walk(model, [&](const ProcessElement& e, std::string_view) {
    if (kind && e.kind != *kind) return;
    if (match_pattern(pattern, e)) out.push_back(e);
  });
  return out;
}

inline const ProcessElement* find_element(const std::vector<ProcessElement>& elements,
                                          std::string_view id) {
  for (const auto& e : elements) {
    if (e.id == id) return &e;
    if (const auto* hit = find_element(e.children, id)) return hit;
  }
  return nullptr;
}

inline ProcessElement* find_element(std::vector<ProcessElement>& elements, std::string_view id) {
  for (auto& e : elements) {
    if (e.id == id) return &e;
    if (auto* hit = find_element(e.children, id)) return hit;
  }
  return nullptr;
}

inline const Variant* find_variant(const std::vector<Variant>& variants, std::string_view name) {
  for (const auto& v : variants) {
    if (v.name == name) return &v;
  }
  return nullptr;
}

}  // namespace vrp

#pragma once

#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>

#include "vrpweave/error.hpp"
#include "vrpweave/lexer.hpp"
#include "vrpweave/model.hpp"

namespace vrp {

namespace detail {

inline std::string quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  out += '"';
  return out;
}

inline bool valid_vp_name(std::string_view name) {
  if (name.empty()) return false;
  for (char c : name) {
    bool ok = std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
    if (!ok) return false;
  }
  return true;
}

/// Which explicit VP kinds an owner of the given kind may host.
/// Containers host positional slots; tasks host edge slots.
inline bool vp_kind_allowed(ElementKind owner, VpKind kind) {
  if (is_container(owner)) return kind != VpKind::Call;
  if (owner == ElementKind::Task) return kind != VpKind::Execution;
  return false;
}

inline SlotKind edge_slot_for(VpKind kind) {
  switch (kind) {
    case VpKind::Call: return SlotKind::Invokes;
    case VpKind::Use:
    case VpKind::Init: return SlotKind::Input;
    case VpKind::Create:
    case VpKind::Deliver: return SlotKind::Output;
    case VpKind::Access: return SlotKind::Performer;
    case VpKind::Execution: return SlotKind::Definition;
  }
  return SlotKind::Position;
}

inline std::optional<ElementKind> parse_variant_kind(std::string_view w) {
  std::string k = lower(w);
  if (k == "task") return ElementKind::Task;
  if (k == "activity") return ElementKind::Activity;
  if (k == "product") return ElementKind::WorkProduct;
  if (k == "role") return ElementKind::Role;
  if (k == "tool") return ElementKind::Tool;
  return std::nullopt;
}

inline std::optional<EdgeKind> parse_edge_kind(std::string_view w) {
  std::string k = lower(w);
  if (k == "input") return EdgeKind::Input;
  if (k == "output") return EdgeKind::Output;
  if (k == "invokes") return EdgeKind::Invokes;
  return std::nullopt;
}

class ModelParser {
 public:
  explicit ModelParser(std::string_view text) : ts_(tokenize(text)) {}

  ProcessModel parse() {
    ProcessModel model;
    ts_.expect_keyword("process");
    model.name = ts_.expect_string("process name").text;
    ts_.expect_symbol("{");
    parse_items(model, model.roots, "", ElementKind::Process);
    ts_.expect_symbol("}");
    if (!ts_.at_end()) ts_.fail("end of document");
    return model;
  }

  // Parses `varpoint NAME kind KIND (optional|mandatory)` after the keyword.
  static VarPoint parse_varpoint_tail(TokenStream& ts) {
    VarPoint vp;
    const Token& name = ts.expect_word("varpoint name");
    if (!valid_vp_name(name.text)) {
      throw Error(ErrorCode::Syntax, "invalid varpoint name '" + name.text + "'", name.loc);
    }
    vp.name = name.text;
    ts.expect_keyword("kind");
    const Token& kind = ts.expect_word("varpoint kind");
    auto k = parse_vp_kind(lower(kind.text));
    if (!k) throw Error(ErrorCode::Syntax, "unknown varpoint kind '" + kind.text + "'", kind.loc);
    vp.kind = *k;
    if (ts.accept_keyword("optional")) {
      vp.policy = Policy::Optional;
    } else if (ts.accept_keyword("mandatory")) {
      vp.policy = Policy::Mandatory;
    } else {
      ts.fail("'optional' or 'mandatory'");
    }
    return vp;
  }

  // Body lines shared by tasks, activities and variant payloads. Returns
  // false when the next token is not a body line.
  static bool parse_body_line(TokenStream& ts, ProcessElement& unit, bool allow_resources) {
    if (ts.accept_keyword("input")) {
      unit.inputs.push_back(ts.expect_string("product name").text);
    } else if (ts.accept_keyword("output")) {
      unit.outputs.push_back(ts.expect_string("product name").text);
    } else if (allow_resources && ts.accept_keyword("role")) {
      unit.performers.push_back(ts.expect_string("role name").text);
    } else if (allow_resources && ts.accept_keyword("tool")) {
      unit.tools.push_back(ts.expect_string("tool name").text);
    } else if (ts.accept_keyword("invokes")) {
      unit.invokes.push_back(ts.expect_word("work-unit id").text);
    } else {
      return false;
    }
    return true;
  }

  static ProcessElement parse_variant_payload(TokenStream& ts, std::string& name_out) {
    const Token& kw = ts.expect_word("variant kind");
    auto kind = parse_variant_kind(kw.text);
    if (!kind) throw Error(ErrorCode::Syntax, "unknown variant kind '" + kw.text + "'", kw.loc);
    ProcessElement payload;
    payload.kind = *kind;
    name_out = ts.expect_string("variant name").text;
    payload.name = name_out;
    if (!is_work_unit(*kind)) payload.id = name_out;
    if (ts.peek_keyword("deliverable")) {
      if (*kind != ElementKind::WorkProduct) {
        throw Error(ErrorCode::KindViolation, "only product variants can be deliverable",
                    ts.peek().loc);
      }
      ts.next();
      payload.deliverable = true;
    }
    ts.expect_symbol("{");
    while (!ts.peek().is_symbol("}")) {
      SourceLocation loc = ts.peek().loc;
      if (!is_work_unit(*kind)) {
        throw Error(ErrorCode::KindViolation,
                    std::string(to_string(*kind)) + " variants have no body", loc);
      }
      if (!parse_body_line(ts, payload, *kind == ElementKind::Task)) {
        if (ts.peek_keyword("role") || ts.peek_keyword("tool")) {
          throw Error(ErrorCode::KindViolation, "activity variants cannot list resources",
                      loc);
        }
        ts.fail("variant body line");
      }
    }
    ts.expect_symbol("}");
    return payload;
  }

  static Dependency parse_dependency_tail(TokenStream& ts) {
    Dependency dep;
    ts.expect_keyword("variant2variant");
    dep.from = ts.expect_string("variant name").text;
    ts.expect_symbol("->");
    dep.to = ts.expect_string("variant name").text;
    ts.expect_keyword("realize");
    const Token& e = ts.expect_word("edge kind");
    auto ek = parse_edge_kind(e.text);
    if (!ek) throw Error(ErrorCode::Syntax, "unknown edge kind '" + e.text + "'", e.loc);
    dep.realize_edge = *ek;
    return dep;
  }

 private:
  void parse_items(ProcessModel& model, std::vector<ProcessElement>& into,
                   const std::string& owner_id, ElementKind owner_kind) {
    while (!ts_.peek().is_symbol("}") && !ts_.at_end()) {
      parse_one_item(model, into, owner_id, owner_kind);
    }
  }

  void parse_one_item(ProcessModel& model, std::vector<ProcessElement>& into,
                      const std::string& owner_id, ElementKind owner_kind) {
    SourceLocation loc = ts_.peek().loc;
    if (ts_.accept_keyword("activity")) {
      into.push_back(parse_activity(model));
    } else if (ts_.accept_keyword("task")) {
      into.push_back(parse_task(model));
    } else if (ts_.accept_keyword("product")) {
      ProcessElement p;
      p.kind = ElementKind::WorkProduct;
      p.name = ts_.expect_string("product name").text;
      p.id = p.name;
      p.deliverable = ts_.accept_keyword("deliverable");
      into.push_back(std::move(p));
    } else if (ts_.peek_keyword("role") || ts_.peek_keyword("tool")) {
      ProcessElement r;
      r.kind = ts_.peek_keyword("role") ? ElementKind::Role : ElementKind::Tool;
      ts_.next();
      r.name = ts_.expect_string("resource name").text;
      r.id = r.name;
      into.push_back(std::move(r));
    } else if (ts_.accept_keyword("varpoint")) {
      VarPoint vp = parse_varpoint_tail(ts_);
      if (!vp_kind_allowed(owner_kind, vp.kind)) {
        throw Error(ErrorCode::KindViolation,
                    "varpoint kind '" + std::string(to_string(vp.kind)) + "' not allowed in " +
                        std::string(to_string(owner_kind)),
                    loc);
      }
      vp.owner = owner_id;
      vp.subject = owner_id;
      vp.slot_kind = SlotKind::Position;
      vp.slot = into.size();
      model.explicit_varpoints.push_back(std::move(vp));
    } else if (ts_.accept_keyword("variant")) {
      Variant v;
      v.payload = parse_variant_payload(ts_, v.name);
      model.variants.push_back(std::move(v));
    } else if (ts_.accept_keyword("dependency")) {
      model.dependencies.push_back(parse_dependency_tail(ts_));
    } else if (ts_.peek_keyword("input") || ts_.peek_keyword("output") ||
               ts_.peek_keyword("invokes")) {
      throw Error(ErrorCode::KindViolation,
                  "'" + ts_.peek().text + "' is only valid inside a work unit", loc);
    } else {
      ts_.fail("process item");
    }
  }

  // Activities take input/output/invokes lines; `role`/`tool` inside them
  // declare resources rather than performers.
  ProcessElement parse_activity(ProcessModel& model) {
    ProcessElement a;
    a.kind = ElementKind::Activity;
    a.id = ts_.expect_word("activity id").text;
    a.name = ts_.expect_string("activity name").text;
    ts_.expect_symbol("{");
    while (!ts_.peek().is_symbol("}") && !ts_.at_end()) {
      if (ts_.peek_keyword("input") || ts_.peek_keyword("output") ||
          ts_.peek_keyword("invokes")) {
        parse_body_line(ts_, a, false);
      } else {
        parse_one_item(model, a.children, a.id, ElementKind::Activity);
      }
    }
    ts_.expect_symbol("}");
    return a;
  }

  ProcessElement parse_task(ProcessModel& model) {
    ProcessElement t;
    t.kind = ElementKind::Task;
    t.id = ts_.expect_word("task id").text;
    t.name = ts_.expect_string("task name").text;
    ts_.expect_symbol("{");
    while (!ts_.peek().is_symbol("}") && !ts_.at_end()) {
      SourceLocation loc = ts_.peek().loc;
      if (parse_body_line(ts_, t, true)) continue;
      if (ts_.accept_keyword("varpoint")) {
        VarPoint vp = parse_varpoint_tail(ts_);
        if (!vp_kind_allowed(ElementKind::Task, vp.kind)) {
          throw Error(ErrorCode::KindViolation,
                      "varpoint kind '" + std::string(to_string(vp.kind)) +
                          "' not allowed in task",
                      loc);
        }
        vp.owner = t.id;
        vp.subject = t.id;
        vp.slot_kind = edge_slot_for(vp.kind);
        vp.slot = 0;
        model.explicit_varpoints.push_back(std::move(vp));
        continue;
      }
      static constexpr std::string_view kItems[] = {"activity", "task",    "product",
                                                    "variant",  "dependency"};
      for (auto kw : kItems) {
        if (ts_.peek_keyword(kw)) {
          throw Error(ErrorCode::KindViolation,
                      "task " + t.id + " cannot contain '" + ts_.peek().text + "'", loc);
        }
      }
      ts_.fail("task body line");
    }
    ts_.expect_symbol("}");
    return t;
  }

  TokenStream ts_;
};

inline void check_unit_refs(const ProcessElement& unit, const std::string& where,
                            const std::map<std::string, ElementKind>& elements,
                            const std::map<std::string, ElementKind>& variants) {
  auto resolves = [&](const std::string& ref, ElementKind want) {
    if (auto it = elements.find(ref); it != elements.end() && it->second == want) return true;
    if (auto it = variants.find(ref); it != variants.end() && it->second == want) return true;
    return false;
  };
  auto check = [&](const std::vector<std::string>& refs, ElementKind want, std::string_view what) {
    for (const auto& r : refs) {
      if (!resolves(r, want)) {
        throw Error(ErrorCode::DanglingReference,
                    where + " references undeclared " + std::string(what) + " \"" + r + "\"");
      }
    }
  };
  check(unit.inputs, ElementKind::WorkProduct, "product");
  check(unit.outputs, ElementKind::WorkProduct, "product");
  check(unit.performers, ElementKind::Role, "role");
  check(unit.tools, ElementKind::Tool, "tool");
  for (const auto& callee : unit.invokes) {
    auto it = elements.find(callee);
    if (it == elements.end() || !is_work_unit(it->second)) {
      throw Error(ErrorCode::DanglingReference,
                  where + " invokes undeclared work unit " + callee);
    }
  }
}

}  // namespace detail

/// Qualified id -> kind for every element in the tree.
inline std::map<std::string, ElementKind> element_index(const ProcessModel& model) {
  std::map<std::string, ElementKind> index;
  walk(model, [&](const ProcessElement& e, std::string_view) {
    if (!index.emplace(e.qualified_id(), e.kind).second) {
      throw Error(ErrorCode::DuplicateId, "duplicate id '" + e.qualified_id() + "'");
    }
  });
  return index;
}

/// Qualified id -> parent container id ("" for process scope).
inline std::map<std::string, std::string> parent_index(const ProcessModel& model) {
  std::map<std::string, std::string> parents;
  walk(model, [&](const ProcessElement& e, std::string_view parent) {
    parents.emplace(e.qualified_id(), std::string(parent));
  });
  return parents;
}

/// Structural checks shared by `load_model` and the weaver's output.
inline void validate_model(const ProcessModel& model) {
  auto elements = element_index(model);

  std::map<std::string, ElementKind> variants;
  for (const auto& v : model.variants) {
    if (elements.count(v.name) != 0) {
      throw Error(ErrorCode::DuplicateId, "variant \"" + v.name + "\" collides with an element");
    }
    if (!variants.emplace(v.name, v.payload.kind).second) {
      throw Error(ErrorCode::DuplicateId, "duplicate variant \"" + v.name + "\"");
    }
  }

  walk(model, [&](const ProcessElement& e, std::string_view) {
    if (is_work_unit(e.kind)) {
      detail::check_unit_refs(e, std::string(to_string(e.kind)) + " " + e.id, elements, variants);
    }
  });
  for (const auto& v : model.variants) {
    if (is_work_unit(v.payload.kind)) {
      detail::check_unit_refs(v.payload, "variant \"" + v.name + "\"", elements, variants);
    }
  }

  std::set<std::string> vp_names;
  for (const auto& vp : model.explicit_varpoints) {
    if (!vp_names.insert(vp.name).second) {
      throw Error(ErrorCode::DuplicateId, "duplicate varpoint '" + vp.name + "'");
    }
    ElementKind owner_kind = ElementKind::Process;
    if (!vp.owner.empty()) {
      auto it = elements.find(vp.owner);
      if (it == elements.end()) {
        throw Error(ErrorCode::DanglingReference,
                    "varpoint '" + vp.name + "' owned by undeclared element " + vp.owner);
      }
      owner_kind = it->second;
    }
    if (!detail::vp_kind_allowed(owner_kind, vp.kind)) {
      throw Error(ErrorCode::KindViolation, "varpoint '" + vp.name + "' of kind " +
                                                std::string(to_string(vp.kind)) +
                                                " not allowed in " +
                                                std::string(to_string(owner_kind)));
    }
  }

  for (const auto& dep : model.dependencies) {
    for (const auto* end : {&dep.from, &dep.to}) {
      if (variants.count(*end) == 0) {
        throw Error(ErrorCode::DanglingReference,
                    "dependency references undeclared variant \"" + *end + "\"");
      }
    }
    bool from_unit = is_work_unit(variants[dep.from]);
    bool to_unit = is_work_unit(variants[dep.to]);
    bool from_product = variants[dep.from] == ElementKind::WorkProduct;
    bool to_product = variants[dep.to] == ElementKind::WorkProduct;
    bool ok = dep.realize_edge == EdgeKind::Invokes
                  ? (from_unit && to_unit)
                  : ((from_unit && to_product) || (from_product && to_unit));
    if (!ok) {
      throw Error(ErrorCode::KindViolation,
                  "dependency \"" + dep.from + "\" -> \"" + dep.to + "\" cannot realize as " +
                      std::string(to_string(dep.realize_edge)));
    }
  }
}

inline ProcessModel load_model(std::string_view document) {
  ProcessModel model = detail::ModelParser(document).parse();
  validate_model(model);
  return model;
}

namespace detail {

inline void write_body(std::ostringstream& out, const ProcessElement& e, const std::string& pad) {
  for (const auto& r : e.inputs) out << pad << "input " << quote(r) << "\n";
  for (const auto& r : e.outputs) out << pad << "output " << quote(r) << "\n";
  for (const auto& r : e.performers) out << pad << "role " << quote(r) << "\n";
  for (const auto& r : e.tools) out << pad << "tool " << quote(r) << "\n";
  for (const auto& r : e.invokes) out << pad << "invokes " << r << "\n";
}

inline void write_varpoint(std::ostringstream& out, const VarPoint& vp, const std::string& pad) {
  out << pad << "varpoint " << vp.name << " kind " << to_string(vp.kind) << " "
      << to_string(vp.policy) << "\n";
}

inline void write_items(std::ostringstream& out, const ProcessModel& model,
                        const std::vector<ProcessElement>& items, const std::string& owner,
                        const std::string& pad);

inline void write_element(std::ostringstream& out, const ProcessModel& model,
                          const ProcessElement& e, const std::string& pad) {
  std::string inner = pad + "  ";
  switch (e.kind) {
    case ElementKind::Activity:
      out << pad << "activity " << e.id << " " << quote(e.name) << " {\n";
      write_body(out, e, inner);
      write_items(out, model, e.children, e.id, inner);
      out << pad << "}\n";
      break;
    case ElementKind::Task:
      out << pad << "task " << e.id << " " << quote(e.name) << " {\n";
      write_body(out, e, inner);
      for (const auto& vp : model.explicit_varpoints) {
        if (vp.owner == e.id) write_varpoint(out, vp, inner);
      }
      out << pad << "}\n";
      break;
    case ElementKind::WorkProduct:
      out << pad << "product " << quote(e.name) << (e.deliverable ? " deliverable" : "") << "\n";
      break;
    case ElementKind::Role:
      out << pad << "role " << quote(e.name) << "\n";
      break;
    case ElementKind::Tool:
      out << pad << "tool " << quote(e.name) << "\n";
      break;
    case ElementKind::Process:
      break;
  }
}

inline void write_items(std::ostringstream& out, const ProcessModel& model,
                        const std::vector<ProcessElement>& items, const std::string& owner,
                        const std::string& pad) {
  auto write_vps_at = [&](std::size_t position) {
    for (const auto& vp : model.explicit_varpoints) {
      if (vp.owner == owner && vp.slot_kind == SlotKind::Position && vp.slot == position) {
        write_varpoint(out, vp, pad);
      }
    }
  };
  for (std::size_t i = 0; i < items.size(); ++i) {
    write_vps_at(i);
    write_element(out, model, items[i], pad);
  }
  // Positions past the end collapse onto the trailing slot.
  for (const auto& vp : model.explicit_varpoints) {
    if (vp.owner == owner && vp.slot_kind == SlotKind::Position && vp.slot >= items.size()) {
      write_varpoint(out, vp, pad);
    }
  }
}

}  // namespace detail

inline std::string write_variant(const Variant& v, const std::string& pad) {
  std::ostringstream out;
  out << pad << "variant " << to_string(v.payload.kind) << " " << detail::quote(v.name)
      << (v.payload.deliverable ? " deliverable" : "") << " {\n";
  detail::write_body(out, v.payload, pad + "  ");
  out << pad << "}\n";
  return out.str();
}

inline std::string write_dependency(const Dependency& d) {
  return "dependency variant2variant " + detail::quote(d.from) + " -> " + detail::quote(d.to) +
         " realize " + std::string(to_string(d.realize_edge));
}

/// Canonical text: two-space indentation, declaration order preserved,
/// VP declarations interleaved at their slot positions.
inline std::string serialize_model(const ProcessModel& model) {
  std::ostringstream out;
  out << "process " << detail::quote(model.name) << " {\n";
  detail::write_items(out, model, model.roots, "", "  ");
  for (const auto& v : model.variants) out << write_variant(v, "  ");
  for (const auto& d : model.dependencies) out << "  " << write_dependency(d) << "\n";
  out << "}\n";
  return out.str();
}

}  // namespace vrp

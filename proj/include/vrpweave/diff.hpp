#pragma once

#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "vrpweave/model.hpp"
#include "vrpweave/model_io.hpp"

namespace vrp {

namespace detail {

struct FlatElement {
  const ProcessElement* element;
  std::string parent;
};

inline std::vector<FlatElement> flatten(const ProcessModel& m) {
  std::vector<FlatElement> out;
  walk(m, [&](const ProcessElement& e, std::string_view parent) {
    out.push_back({&e, std::string(parent)});
  });
  return out;
}

using EdgeTriple = std::tuple<std::string, std::string, std::string>;  // owner, kind, target

inline std::vector<EdgeTriple> edges_of(const ProcessModel& m) {
  std::vector<EdgeTriple> out;
  walk(m, [&](const ProcessElement& e, std::string_view) {
    auto add = [&](const std::vector<std::string>& list, const char* kind) {
      for (const auto& t : list) out.emplace_back(e.qualified_id(), kind, t);
    };
    add(e.inputs, "input");
    add(e.outputs, "output");
    add(e.performers, "role");
    add(e.tools, "tool");
    add(e.invokes, "invokes");
  });
  return out;
}

inline std::string describe(const ProcessElement& e) {
  if (is_work_unit(e.kind)) return std::string(to_string(e.kind)) + " " + e.id + " " + quote(e.name);
  return std::string(to_string(e.kind)) + " " + quote(e.name);
}

inline std::string scope(const std::string& parent) {
  return parent.empty() ? "process" : parent;
}

}  // namespace detail

/// Changes from `base` to `tailored`: elements, edges, varpoints, variants
/// and dependencies, each section in document order.
inline std::vector<std::string> diff(const ProcessModel& base, const ProcessModel& tailored) {
  using namespace detail;
  std::vector<std::string> out;
  auto a = flatten(base);
  auto b = flatten(tailored);
  std::map<std::string, const FlatElement*> in_a, in_b;
  for (const auto& f : a) in_a.emplace(f.element->qualified_id(), &f);
  for (const auto& f : b) in_b.emplace(f.element->qualified_id(), &f);

  for (const auto& f : a) {
    if (in_b.count(f.element->qualified_id()) == 0) {
      out.push_back("- " + describe(*f.element) + " in " + scope(f.parent));
    }
  }
  for (const auto& f : b) {
    if (in_a.count(f.element->qualified_id()) == 0) {
      out.push_back("+ " + describe(*f.element) + " in " + scope(f.parent));
    }
  }
  for (const auto& f : a) {
    auto it = in_b.find(f.element->qualified_id());
    if (it == in_b.end()) continue;
    const ProcessElement& x = *f.element;
    const ProcessElement& y = *it->second->element;
    if (x.kind != y.kind || x.name != y.name) {
      out.push_back("~ " + describe(x) + " is now " + describe(y));
    }
    if (f.parent != it->second->parent) {
      out.push_back("~ " + describe(y) + " moved from " + scope(f.parent) + " to " +
                    scope(it->second->parent));
    }
    if (x.deliverable != y.deliverable) {
      out.push_back("~ " + describe(y) + (y.deliverable ? " is deliverable" : " is not deliverable"));
    }
  }

  auto ea = edges_of(base);
  auto eb = edges_of(tailored);
  std::set<EdgeTriple> sa(ea.begin(), ea.end()), sb(eb.begin(), eb.end());
  auto edge_line = [](char sign, const EdgeTriple& t) {
    return std::string(1, sign) + " edge " + std::get<1>(t) + " " + std::get<0>(t) + " -> " +
           quote(std::get<2>(t));
  };
  for (const auto& t : ea) {
    if (sb.count(t) == 0) out.push_back(edge_line('-', t));
  }
  for (const auto& t : eb) {
    if (sa.count(t) == 0) out.push_back(edge_line('+', t));
  }

  auto vp_line = [](char sign, const VarPoint& vp) {
    return std::string(1, sign) + " varpoint " + vp.name + " kind " + std::string(to_string(vp.kind)) +
           " in " + scope(vp.owner);
  };
  auto has_vp = [](const ProcessModel& m, const VarPoint& vp) {
    for (const auto& o : m.explicit_varpoints) {
      if (o.name == vp.name) return true;
    }
    return false;
  };
  for (const auto& vp : base.explicit_varpoints) {
    if (!has_vp(tailored, vp)) out.push_back(vp_line('-', vp));
  }
  for (const auto& vp : tailored.explicit_varpoints) {
    if (!has_vp(base, vp)) out.push_back(vp_line('+', vp));
  }

  for (const auto& v : base.variants) {
    if (find_variant(tailored.variants, v.name) == nullptr) {
      out.push_back("- variant " + std::string(to_string(v.payload.kind)) + " " + quote(v.name));
    }
  }
  for (const auto& v : tailored.variants) {
    if (find_variant(base.variants, v.name) == nullptr) {
      out.push_back("+ variant " + std::string(to_string(v.payload.kind)) + " " + quote(v.name));
    }
  }
  auto has_dep = [](const ProcessModel& m, const Dependency& d) {
    return std::find(m.dependencies.begin(), m.dependencies.end(), d) != m.dependencies.end();
  };
  for (const auto& d : base.dependencies) {
    if (!has_dep(tailored, d)) out.push_back("- " + write_dependency(d));
  }
  for (const auto& d : tailored.dependencies) {
    if (!has_dep(base, d)) out.push_back("+ " + write_dependency(d));
  }
  return out;
}

}  // namespace vrp

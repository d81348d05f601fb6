#pragma once

// Random models and aspects for property tests, plus oracles that do not
// share code paths with the library under test.

#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "vrpweave/vrpweave.hpp"

namespace vrp::testing {

using Rng = std::mt19937;

inline std::size_t pick(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}
inline bool coin(Rng& rng, double p = 0.5) { return std::bernoulli_distribution(p)(rng); }

struct ModelShape {
  std::size_t max_units = 10;
  bool allow_mandatory = false;
  bool allow_dependencies = true;
  double vp_density = 0.4;
};

/// Builds a valid model directly as a value, then round-trips it through
/// the text format so slots and ids are exactly what loading produces.
inline ProcessModel random_model(Rng& rng, const ModelShape& shape = {}) {
  ProcessModel m;
  m.name = "Random " + std::to_string(pick(rng, 1000));

  std::size_t n_products = 1 + pick(rng, 5);
  std::size_t n_roles = 1 + pick(rng, 2);
  std::size_t n_tools = pick(rng, 2);
  std::vector<std::string> products, roles, tools;
  for (std::size_t i = 0; i < n_products; ++i) products.push_back("WP" + std::to_string(i));
  for (std::size_t i = 0; i < n_roles; ++i) roles.push_back("Role" + std::to_string(i));
  for (std::size_t i = 0; i < n_tools; ++i) tools.push_back("Tool" + std::to_string(i));

  // Variants first so units may reference product variants.
  std::vector<std::string> product_variants;
  std::size_t n_variants = pick(rng, 5);
  for (std::size_t i = 0; i < n_variants; ++i) {
    Variant v;
    v.name = "V" + std::to_string(i);
    static constexpr ElementKind kinds[] = {ElementKind::Task, ElementKind::Activity,
                                            ElementKind::WorkProduct, ElementKind::Role,
                                            ElementKind::Tool};
    v.payload.kind = kinds[pick(rng, 5)];
    v.payload.name = v.name;
    if (!is_work_unit(v.payload.kind)) v.payload.id = v.name;
    if (v.payload.kind == ElementKind::WorkProduct) {
      v.payload.deliverable = coin(rng, 0.3);
      product_variants.push_back(v.name);
    }
    m.variants.push_back(std::move(v));
  }
  for (auto& v : m.variants) {
    if (is_work_unit(v.payload.kind)) {
      if (coin(rng)) v.payload.inputs.push_back(products[pick(rng, products.size())]);
      if (coin(rng)) v.payload.outputs.push_back(products[pick(rng, products.size())]);
      if (v.payload.kind == ElementKind::Task && coin(rng)) {
        v.payload.performers.push_back(roles[pick(rng, roles.size())]);
      }
    }
  }
  std::vector<std::string> all_products = products;
  all_products.insert(all_products.end(), product_variants.begin(), product_variants.end());

  std::size_t units = 1 + pick(rng, shape.max_units);
  std::vector<std::string> unit_ids;

  // Work units: a random tree. Activities may nest up to depth 3.
  std::function<void(std::vector<ProcessElement>&, const std::string&, int)> grow =
      [&](std::vector<ProcessElement>& into, const std::string& prefix, int depth) {
        std::size_t n = 1 + pick(rng, 3);
        for (std::size_t i = 1; i <= n && unit_ids.size() < units; ++i) {
          ProcessElement e;
          e.id = prefix.empty() ? std::to_string(i) : prefix + "." + std::to_string(i);
          bool activity = depth < 3 && coin(rng, 0.35);
          e.kind = activity ? ElementKind::Activity : ElementKind::Task;
          e.name = (activity ? "Activity " : "Task ") + e.id;
          unit_ids.push_back(e.id);
          std::size_t ins = pick(rng, 3), outs = pick(rng, 3);
          for (std::size_t k = 0; k < ins; ++k) e.inputs.push_back(all_products[pick(rng, all_products.size())]);
          for (std::size_t k = 0; k < outs; ++k) e.outputs.push_back(all_products[pick(rng, all_products.size())]);
          if (!activity) {
            for (std::size_t k = pick(rng, 3); k > 0; --k) e.performers.push_back(roles[pick(rng, roles.size())]);
            if (!tools.empty()) {
              for (std::size_t k = pick(rng, 2); k > 0; --k) e.tools.push_back(tools[pick(rng, tools.size())]);
            }
          }
          if (activity) grow(e.children, e.id, depth + 1);
          into.push_back(std::move(e));
        }
      };
  grow(m.roots, "", 0);

  // Invokes edges to earlier-declared units only (no requirement, just variety).
  std::function<void(std::vector<ProcessElement>&)> add_calls = [&](std::vector<ProcessElement>& es) {
    for (auto& e : es) {
      if (coin(rng, 0.25)) e.invokes.push_back(unit_ids[pick(rng, unit_ids.size())]);
      add_calls(e.children);
    }
  };
  add_calls(m.roots);

  // Declarations of products/roles/tools scattered over containers.
  std::vector<std::string> containers{""};
  walk(m, [&](const ProcessElement& e, std::string_view) {
    if (e.kind == ElementKind::Activity) containers.push_back(e.id);
  });
  auto declare = [&](ElementKind kind, const std::string& name) {
    ProcessElement d;
    d.kind = kind;
    d.name = name;
    d.id = name;
    if (kind == ElementKind::WorkProduct) d.deliverable = coin(rng, 0.3);
    const std::string& at = containers[pick(rng, containers.size())];
    auto& c = at.empty() ? m.roots : find_element(m.roots, at)->children;
    c.insert(c.begin() + static_cast<std::ptrdiff_t>(pick(rng, c.size() + 1)), std::move(d));
  };
  for (const auto& p : products) declare(ElementKind::WorkProduct, p);
  for (const auto& r : roles) declare(ElementKind::Role, r);
  for (const auto& t : tools) declare(ElementKind::Tool, t);

  // Explicit VPs.
  std::size_t vp_counter = 0;
  auto policy = [&] {
    return shape.allow_mandatory && coin(rng, 0.2) ? Policy::Mandatory : Policy::Optional;
  };
  auto add_positional = [&](const std::string& owner, std::size_t children) {
    static constexpr VpKind kinds[] = {VpKind::Execution, VpKind::Use,  VpKind::Create,
                                       VpKind::Init,      VpKind::Deliver, VpKind::Access};
    VarPoint vp;
    vp.name = "vp" + std::to_string(vp_counter++);
    vp.kind = kinds[pick(rng, 6)];
    vp.owner = owner;
    vp.subject = owner;
    vp.slot_kind = SlotKind::Position;
    vp.slot = pick(rng, children + 1);
    vp.policy = policy();
    m.explicit_varpoints.push_back(vp);
  };
  if (coin(rng, shape.vp_density)) add_positional("", m.roots.size());
  walk(m, [&](const ProcessElement& e, std::string_view) {
    if (!coin(rng, shape.vp_density)) return;
    if (e.kind == ElementKind::Activity) {
      add_positional(e.id, e.children.size());
    } else if (e.kind == ElementKind::Task) {
      static constexpr VpKind kinds[] = {VpKind::Call,  VpKind::Use,     VpKind::Create,
                                         VpKind::Init,  VpKind::Deliver, VpKind::Access};
      VarPoint vp;
      vp.name = "vp" + std::to_string(vp_counter++);
      vp.kind = kinds[pick(rng, 6)];
      vp.owner = e.id;
      vp.subject = e.id;
      vp.slot_kind = detail::edge_slot_for(vp.kind);
      vp.policy = policy();
      m.explicit_varpoints.push_back(vp);
    }
  });

  if (shape.allow_dependencies && m.variants.size() >= 2 && coin(rng, 0.3)) {
    const Variant& a = m.variants[pick(rng, m.variants.size())];
    const Variant& b = m.variants[pick(rng, m.variants.size())];
    if (a.name != b.name) {
      if (is_work_unit(a.payload.kind) && is_work_unit(b.payload.kind)) {
        m.dependencies.push_back({a.name, b.name, EdgeKind::Invokes});
      } else if ((is_work_unit(a.payload.kind) && b.payload.kind == ElementKind::WorkProduct) ||
                 (a.payload.kind == ElementKind::WorkProduct && is_work_unit(b.payload.kind))) {
        m.dependencies.push_back({a.name, b.name, coin(rng) ? EdgeKind::Output : EdgeKind::Input});
      }
    }
  }

  // The text round trip fixes VP document order to what the loader yields.
  return load_model(serialize_model(m));
}

/// Every id and name in the model, plus a few wildcard forms.
inline std::vector<std::string> pattern_pool(const ProcessModel& m) {
  std::vector<std::string> pool{"*"};
  walk(m, [&](const ProcessElement& e, std::string_view) {
    pool.push_back(e.qualified_id());
    if (is_work_unit(e.kind)) {
      pool.push_back(e.id + "*");
      pool.push_back(e.name);
    }
  });
  for (const auto& vp : m.explicit_varpoints) pool.push_back(vp.name);
  pool.push_back("WP*");
  pool.push_back("*Task*");
  return pool;
}

inline ExprPtr random_expr(Rng& rng, const std::vector<std::string>& pool, int depth) {
  auto pattern = [&] { return IdPattern(pool[pick(rng, pool.size())]); };
  if (depth <= 0 || coin(rng, 0.3)) {
    if (coin(rng, 0.2)) return Expr::within(pattern());
    return Expr::designator(kAllVpKinds[pick(rng, 7)], pattern());
  }
  switch (pick(rng, 3)) {
    case 0: return Expr::conj(random_expr(rng, pool, depth - 1), random_expr(rng, pool, depth - 1));
    case 1: return Expr::disj(random_expr(rng, pool, depth - 1), random_expr(rng, pool, depth - 1));
    default: return Expr::negate(random_expr(rng, pool, depth - 1));
  }
}

inline VpKind kind_for(Rng& rng, ParamType t) {
  switch (t) {
    case ParamType::VPTask:
    case ParamType::VPActivity: return coin(rng) ? VpKind::Execution : VpKind::Call;
    case ParamType::VPWorkP: {
      static constexpr VpKind k[] = {VpKind::Use, VpKind::Create, VpKind::Init, VpKind::Deliver};
      return k[pick(rng, 4)];
    }
    default: return VpKind::Access;
  }
}

inline ElementKind payload_for(Rng& rng, ParamType t) {
  switch (t) {
    case ParamType::VPTask: return ElementKind::Task;
    case ParamType::VPActivity: return coin(rng) ? ElementKind::Activity : ElementKind::Task;
    case ParamType::VPWorkP: return ElementKind::WorkProduct;
    case ParamType::VPRole: return ElementKind::Role;
    case ParamType::VPTool: return ElementKind::Tool;
  }
  return ElementKind::Task;
}

/// One pointcut, one advice. Each parameter's binding conjoins a designator
/// the parameter type accepts with a random subexpression; each action uses
/// a model variant of a compatible kind, or a variant the aspect owns.
inline ProcessAspect random_aspect(Rng& rng, const ProcessModel& m, const std::string& name) {
  ProcessAspect a;
  a.name = name;
  auto pool = pattern_pool(m);
  Pointcut pc;
  pc.name = "pc";
  std::size_t n_params = 1 + pick(rng, 2);
  for (std::size_t i = 0; i < n_params; ++i) {
    Param p{"p" + std::to_string(i), kAllParamTypes[pick(rng, 5)]};
    pc.params.push_back(p);
    if (coin(rng, 0.9)) {
      ExprPtr head = Expr::designator(kind_for(rng, p.type), IdPattern(pool[pick(rng, pool.size())]));
      ExprPtr e = coin(rng, 0.5) ? head : Expr::conj(head, random_expr(rng, pool, 2));
      if (coin(rng, 0.3)) e = Expr::disj(e, Expr::designator(kind_for(rng, p.type), IdPattern("*")));
      pc.bindings.emplace_back(p.name, e);
    }
  }
  Advice adv;
  adv.trigger = Expr::ref(pc.name);
  adv.params = pc.params;
  std::size_t owned = 0;
  for (const auto& p : pc.params) {
    ElementKind want = payload_for(rng, p.type);
    std::vector<std::string> candidates;
    for (const auto& v : m.variants) {
      if (v.payload.kind == want) candidates.push_back(v.name);
    }
    std::string variant;
    if (candidates.empty() || coin(rng, 0.2)) {
      Variant v;
      v.name = name + "_own" + std::to_string(owned++);
      v.payload.kind = want;
      v.payload.name = v.name;
      if (!is_work_unit(want)) v.payload.id = v.name;
      v.owning_aspect = name;
      variant = v.name;
      a.owned_variants.push_back(std::move(v));
    } else {
      variant = candidates[pick(rng, candidates.size())];
    }
    adv.actions.push_back({p.name, variant});
  }
  a.pointcuts.push_back(std::move(pc));
  a.advices.push_back(std::move(adv));
  // Normalize through the parser so the AST is exactly what a file yields.
  return parse_aspect_file(print_aspects({a})).front();
}

// ---- oracles ---------------------------------------------------------------

/// Closed-form implicit VP count: per work unit one execution plus one per
/// call, input, output, performer and tool slot; one init per distinct
/// input product; one deliver per deliverable product.
inline std::size_t census_formula(const ProcessModel& m) {
  std::size_t total = 0;
  std::set<std::string> inputs;
  std::size_t deliverables = 0;
  std::function<void(const std::vector<ProcessElement>&)> go = [&](const std::vector<ProcessElement>& es) {
    for (const auto& e : es) {
      if (e.kind == ElementKind::Activity || e.kind == ElementKind::Task) {
        total += 1 + e.invokes.size() + e.inputs.size() + e.outputs.size() + e.performers.size() +
                 e.tools.size();
        inputs.insert(e.inputs.begin(), e.inputs.end());
      }
      if (e.kind == ElementKind::WorkProduct && e.deliverable) ++deliverables;
      go(e.children);
    }
  };
  go(m.roots);
  return total + inputs.size() + deliverables;
}

/// Plain glob matcher (recursive), independent of IdPattern.
inline bool glob(const std::string& p, const std::string& s, std::size_t i = 0, std::size_t j = 0) {
  if (i == p.size()) return j == s.size();
  if (p[i] == '*') {
    for (std::size_t k = j; k <= s.size(); ++k) {
      if (glob(p, s, i + 1, k)) return true;
    }
    return false;
  }
  return j < s.size() && p[i] == s[j] && glob(p, s, i + 1, j + 1);
}

/// Structure with all VarPoint constructs removed.
inline ProcessModel without_varpoints(ProcessModel m) {
  m.explicit_varpoints.clear();
  return m;
}

}  // namespace vrp::testing

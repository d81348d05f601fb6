#pragma once

#include <string>
#include <vector>

#include "vrpweave/aspect.hpp"
#include "vrpweave/pointcut.hpp"
#include "vrpweave/variability.hpp"

namespace vrp {

struct PlanResult {
  std::vector<Occupation> occupations;  // advice order, action order, population order
  std::vector<std::string> warnings;
};

/// Interprets an aspect's advices into occupations without touching the
/// model. An action whose parameter matched nothing is reported as a
/// warning: aspects are reused across processes where a criterion may not
/// apply.
inline PlanResult plan_aspect(const ProcessAspect& aspect, const ProcessModel& model,
                              const std::vector<VarPoint>& vps) {
  PlanResult plan;
  PointcutEvaluator ev(model, vps, &aspect);
  for (const auto& adv : aspect.advices) {
    Binding binding = ev.evaluate(adv);
    for (const auto& act : adv.actions) {
      const Variant* variant = resolve_variant(aspect, model, act.variant);
      if (variant == nullptr) {
        throw Error(ErrorCode::UnknownVariant,
                    "aspect " + aspect.name + ": unknown variant \"" + act.variant + "\"");
      }
      const auto& matched = binding[act.param];
      if (matched.empty()) {
        plan.warnings.push_back("EmptyMandatoryMatch: aspect " + aspect.name + ": " + act.param +
                                ".occupe(\"" + act.variant + "\") matched no varpoint");
      }
      for (const auto& vp : matched) {
        plan.occupations.push_back(make_occupation(vp, *variant, Origin::advice(aspect.name)));
      }
    }
  }
  return plan;
}

}  // namespace vrp

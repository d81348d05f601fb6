#pragma once

#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "vrpweave/aspect.hpp"
#include "vrpweave/error.hpp"
#include "vrpweave/planner.hpp"

namespace vrp {

struct Ratio {
  std::size_t num = 1;
  std::size_t den = 1;

  static Ratio of(std::size_t n, std::size_t d) {
    if (d == 0) return {1, 1};
    std::size_t g = std::gcd(n, d);
    if (g == 0) g = 1;
    return {n / g, d / g};
  }

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  std::string str() const { return std::to_string(num) + "/" + std::to_string(den); }

  bool operator==(const Ratio&) const = default;
};

/// Tailoring decisions with and without aspects. Counts are per tailored
/// process; multiply by the number of processes derived from the line.
struct EffortReport {
  std::size_t baseline_decisions = 0;
  std::size_t aspect_decisions = 0;
  Ratio reduction_ratio;
  std::vector<std::string> covering_aspects;
  std::size_t uncovered_varpoints = 0;

  bool operator==(const EffortReport&) const = default;
};

/// Explicit model VPs an aspect would occupy, by name.
inline std::set<std::string> covered_varpoints(const ProcessAspect& aspect,
                                               const ProcessModel& model,
                                               const std::vector<VarPoint>& vps) {
  std::set<std::string> out;
  PointcutEvaluator ev(model, vps, &aspect);
  for (const auto& adv : aspect.advices) {
    Binding b = ev.evaluate(adv);
    for (const auto& act : adv.actions) {
      for (const auto& vp : b[act.param]) {
        if (!vp.is_implicit && vp.aspect.empty()) out.insert(vp.name);
      }
    }
  }
  return out;
}

/// One decision per authored variation point without aspects; with
/// aspects, one per aspect that covers a not-yet-covered VP (in list
/// order) plus one per VP no aspect covers. With no VPs the ratio is 1.
inline EffortReport effort_report(const ProcessModel& model,
                                  const std::vector<ProcessAspect>& aspects) {
  EffortReport r;
  r.baseline_decisions = model.explicit_varpoints.size();
  auto population = varpoint_population(model);
  std::set<std::string> covered;
  std::size_t counted = 0;
  for (const auto& a : aspects) {
    std::set<std::string> mine;
    try {
      mine = covered_varpoints(a, model, population);
    } catch (const Error&) {
      continue;  // an aspect that cannot evaluate covers nothing
    }
    bool adds = false;
    for (const auto& n : mine) adds = covered.insert(n).second || adds;
    if (adds) {
      ++counted;
      r.covering_aspects.push_back(a.name);
    }
  }
  r.uncovered_varpoints = r.baseline_decisions - covered.size();
  r.aspect_decisions = counted + r.uncovered_varpoints;
  r.reduction_ratio = Ratio::of(r.aspect_decisions, r.baseline_decisions);
  return r;
}

inline std::string render_report_text(const EffortReport& r) {
  std::string s;
  s += "baseline decisions: " + std::to_string(r.baseline_decisions) + "\n";
  s += "aspect decisions:   " + std::to_string(r.aspect_decisions) + "\n";
  s += "reduction ratio:    " + r.reduction_ratio.str() + "\n";
  s += "covering aspects:   ";
  for (std::size_t i = 0; i < r.covering_aspects.size(); ++i) {
    s += (i ? ", " : "") + r.covering_aspects[i];
  }
  s += r.covering_aspects.empty() ? "(none)\n" : "\n";
  s += "manual decisions:   " + std::to_string(r.uncovered_varpoints) + "\n";
  return s;
}

inline std::string render_report_structured(const EffortReport& r) {
  std::string s;
  s += "report\tbaseline_decisions\t" + std::to_string(r.baseline_decisions) + "\n";
  s += "report\taspect_decisions\t" + std::to_string(r.aspect_decisions) + "\n";
  s += "report\treduction_ratio\t" + r.reduction_ratio.str() + "\n";
  for (const auto& a : r.covering_aspects) s += "report\tcovering_aspect\t" + a + "\n";
  s += "report\tmanual_decisions\t" + std::to_string(r.uncovered_varpoints) + "\n";
  return s;
}

}  // namespace vrp

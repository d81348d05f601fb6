#include <gtest/gtest.h>

#include "support/fixtures.hpp"
#include "support/generators.hpp"

using namespace vrp;
using vrp::testing::jaxa;
using vrp::testing::read_fixture;

namespace {

WeaveRequest jaxa_request(std::vector<std::string> activate) {
  WeaveRequest req;
  req.model = jaxa();
  req.aspects = vrp::testing::jaxa_aspects(req.model);
  req.activations = std::move(activate);
  return req;
}

const ProcessElement& element(const ProcessModel& m, const std::string& id) {
  const ProcessElement* e = find_element(m.roots, id);
  if (e == nullptr) throw std::runtime_error("no element " + id);
  return *e;
}

// Same outcome: equal results, or the same error code.
std::string outcome(const std::function<TailoredProcess()>& fn, TailoredProcess* out = nullptr) {
  try {
    TailoredProcess tp = fn();
    if (out != nullptr) *out = tp;
    return serialize_model(tp.result);
  } catch (const Error& e) {
    return "error " + std::string(to_string(e.code()));
  }
}

}  // namespace

TEST(Plan, Satellite2) {
  ProcessModel m = jaxa();
  auto aspects = vrp::testing::jaxa_aspects(m);
  PlanResult plan = plan_aspect(aspects[0], m, varpoint_population(m));
  ASSERT_EQ(plan.occupations.size(), 2u);
  EXPECT_EQ(plan.occupations[0].varpoint.name, "vpTask");
  EXPECT_EQ(plan.occupations[0].variant.name, "Analyze HW SW Interaction");
  EXPECT_EQ(plan.occupations[1].varpoint.name, "vpWorkP");
  EXPECT_EQ(plan.occupations[1].origin, Origin::advice("satellite2"));
  EXPECT_TRUE(plan.warnings.empty());
}

TEST(Plan, EveryMatchedVarpointIsOccupied) {
  ProcessModel m = load_model(
      "process \"P\" {\n  product \"A\"\n  product \"B\"\n  product \"C\"\n"
      "  task 1 \"t\" { input \"A\" input \"B\" }\n  task 2 \"u\" { input \"C\" }\n"
      "  variant product \"Note\" { }\n}\n");
  auto as = parse_aspect_file(
      "aspect a { pointcut p (VPWorkP w): w=(use(*));"
      " advice p (VPWorkP w) { w.occupe(\"Note\") } }", m);
  PlanResult plan = plan_aspect(as[0], m, varpoint_population(m));
  EXPECT_EQ(plan.occupations.size(), 3u);
  TailoredProcess tp = weave({m, as, {"a"}, {}});
  EXPECT_EQ(element(tp.result, "1").inputs, (std::vector<std::string>{"A", "B", "Note"}));
  EXPECT_EQ(element(tp.result, "2").inputs, (std::vector<std::string>{"C", "Note"}));
  EXPECT_EQ(tp.ledger.size(), 3u);
}

TEST(Plan, EmptyMatchWarns) {
  ProcessModel m = jaxa();
  auto as = parse_aspect_file(
      "aspect a { pointcut p (VPTask t): t=(execution(\"9*\"));"
      " advice p (VPTask t) { t.occupe(\"Analyze HW SW Interaction\") } }", m);
  PlanResult plan = plan_aspect(as[0], m, varpoint_population(m));
  EXPECT_TRUE(plan.occupations.empty());
  ASSERT_EQ(plan.warnings.size(), 1u);
  EXPECT_EQ(plan.warnings[0].rfind("EmptyMandatoryMatch", 0), 0u);
}

TEST(Weave, Satellite2MatchesGolden) {
  TailoredProcess tp = weave(jaxa_request({"satellite2"}));
  EXPECT_EQ(serialize_model(tp.result), read_fixture("jaxa_satellite2.golden.vrp"));
  const ProcessElement& t = element(tp.result, "1.2.2.2");
  EXPECT_EQ(t.name, "Analyze HW SW Interaction");
  EXPECT_EQ(t.outputs, std::vector<std::string>{"FMECA"});
  EXPECT_EQ(element(tp.result, "FMECA").kind, ElementKind::WorkProduct);
  ASSERT_EQ(tp.realized_edges.size(), 1u);
  EXPECT_EQ(tp.realized_edges[0], (RealizedEdge{EdgeKind::Output, "1.2.2.2", "FMECA"}));
  EXPECT_TRUE(tp.result.explicit_varpoints.empty());
  EXPECT_TRUE(tp.result.dependencies.empty());
  EXPECT_NO_THROW(validate_model(tp.result));
}

TEST(Weave, NoActivationIsIdentityProjection) {
  WeaveRequest req = jaxa_request({});
  TailoredProcess tp = weave(req);
  EXPECT_EQ(tp.result, vrp::testing::without_varpoints(req.model));
  EXPECT_TRUE(tp.ledger.empty());
}

TEST(Weave, InputIsNotModified) {
  WeaveRequest req = jaxa_request({"satellite2", "nonscience"});
  ProcessModel before = req.model;
  auto aspects_before = req.aspects;
  (void)weave(req);
  EXPECT_EQ(req.model, before);
  EXPECT_EQ(req.aspects, aspects_before);
}

TEST(Weave, Deterministic) {
  WeaveRequest req = jaxa_request({"satellite2", "nonscience"});
  TailoredProcess a = weave(req), b = weave(req);
  EXPECT_EQ(a, b);
  EXPECT_EQ(serialize_model(a.result), serialize_model(b.result));
  EXPECT_EQ(render_ledger_text(a), render_ledger_text(b));
}

TEST(Weave, ActivationOrderDoesNotChangeResult) {
  TailoredProcess ab = weave(jaxa_request({"satellite2", "nonscience"}));
  TailoredProcess ba = weave(jaxa_request({"nonscience", "satellite2"}));
  EXPECT_EQ(serialize_model(ab.result), serialize_model(ba.result));
  EXPECT_EQ(ab.ledger.size(), 5u);
  EXPECT_EQ(ab.ledger[0].varpoint, "vpTask");
  EXPECT_EQ(ba.ledger[0].varpoint, "vpRationale");
}

TEST(Weave, ConflictBetweenAspects) {
  WeaveRequest req = jaxa_request({"satellite2", "other"});
  auto extra = parse_aspect_file(
      "aspect other { pointcut p (VPWorkP w): w=(use(\"vpWorkP\"));"
      " advice p (VPWorkP w) { w.occupe(\"Requirements in Design\") } }", req.model);
  req.aspects.push_back(extra[0]);
  try {
    weave(req);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Conflict);
    EXPECT_NE(e.detail().find("vpWorkP"), std::string::npos);
    EXPECT_NE(e.detail().find("advice(other)"), std::string::npos);
  }
}

TEST(Weave, ManualAndAdviceConflict) {
  WeaveRequest req = jaxa_request({"satellite2"});
  req.manual_bindings.push_back({"vpWorkP", "Requirements in Design"});
  EXPECT_VRP_ERROR(ErrorCode::Conflict, weave(req));
}

TEST(Weave, MandatoryMustBeOccupied) {
  WeaveRequest req;
  req.model = load_model(read_fixture("mandatory.vrp"));
  EXPECT_VRP_ERROR(ErrorCode::UnresolvedMandatory, weave(req));
  req.manual_bindings.push_back({"vpReview", "Peer Review"});
  TailoredProcess tp = weave(req);
  EXPECT_EQ(element(tp.result, "1.2").name, "Peer Review");
  EXPECT_EQ(tp.ledger.at(0).origin, Origin::by_hand());
}

TEST(Weave, DependencyEnforced) {
  WeaveRequest req = jaxa_request({});
  req.manual_bindings.push_back({"vpTask", "Analyze HW SW Interaction"});
  try {
    weave(req);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DependencyViolation);
    EXPECT_NE(e.detail().find("FMECA"), std::string::npos);
  }
}

TEST(Weave, ManualBindingErrors) {
  WeaveRequest req = jaxa_request({});
  req.manual_bindings = {{"noSuchVp", "FMECA"}};
  EXPECT_VRP_ERROR(ErrorCode::UnknownVarPoint, weave(req));
  req.manual_bindings = {{"vpWorkP", "Ghost"}};
  EXPECT_VRP_ERROR(ErrorCode::UnknownVariant, weave(req));
  req.manual_bindings = {{"use@1.3.1#in0", "FMECA"}};
  EXPECT_VRP_ERROR(ErrorCode::ImplicitManualBinding, weave(req));
  req.manual_bindings.clear();
  req.activations = {"nope"};
  EXPECT_VRP_ERROR(ErrorCode::UnknownAspect, weave(req));
}

TEST(Weave, ActiveKeywordActivates) {
  WeaveRequest req = jaxa_request({});
  std::string text = read_fixture("jaxa.pasp");
  text.replace(text.find("aspect satellite2"), 17, "aspect satellite2 active");
  req.aspects = parse_aspect_file(text, req.model);
  EXPECT_EQ(serialize_model(weave(req).result), read_fixture("jaxa_satellite2.golden.vrp"));
}

TEST(Weave, RepeatedWorkUnitGetsFreshIds) {
  ProcessModel m = load_model(
      "process \"P\" {\n  activity 1 \"A\" {\n    task 1.1 \"t\" { }\n  }\n"
      "  activity 2 \"B\" {\n    task 2.1 \"u\" { }\n  }\n"
      "  variant task \"Check\" { }\n}\n");
  auto as = parse_aspect_file(
      "aspect a { pointcut p (VPTask t): t=(execution(\"*.1\"));"
      " advice p (VPTask t) { t.occupe(\"Check\") } }", m);
  TailoredProcess tp = weave({m, as, {"a"}, {}});
  EXPECT_EQ(element(tp.result, "1.2").name, "Check");
  EXPECT_EQ(element(tp.result, "2.2").name, "Check");
  EXPECT_TRUE(tp.result.variants.empty());
}

TEST(Weave, AspectOwnedVarpointAndVariant) {
  ProcessModel m = jaxa();
  auto as = parse_aspect_file(
      "aspect extra {\n"
      "  variant product \"Safety Case\" deliverable { }\n"
      "  varpoint vpSafety kind create optional at 1.3\n"
      "  pointcut p (VPWorkP w): w=(create(\"vpSafety\"));\n"
      "  advice p (VPWorkP w) { w.occupe(\"Safety Case\") }\n"
      "}\n", m);
  TailoredProcess tp = weave({m, as, {"extra"}, {}});
  const ProcessElement& a = element(tp.result, "1.3");
  ASSERT_FALSE(a.children.empty());
  EXPECT_EQ(a.children.back().name, "Safety Case");
  EXPECT_TRUE(a.children.back().deliverable);
}

TEST(WeaveProperty, MatchesManualOracle) {
  std::mt19937 rng(41);
  int compared = 0;
  for (int i = 0; i < 300; ++i) {
    ProcessModel m = vrp::testing::random_model(rng);
    ProcessAspect a = vrp::testing::random_aspect(rng, m, "gen");
    std::vector<ProcessAspect> as{a};
    PlanResult plan = plan_aspect(a, m, varpoint_population(m));
    std::string woven = outcome([&] { return weave({m, as, {"gen"}, {}}); });
    std::string oracle = outcome([&] { return weave_manual_oracle(m, plan.occupations); });
    ASSERT_EQ(woven, oracle) << serialize_model(m) << print_aspects(as);
    ++compared;
  }
  EXPECT_EQ(compared, 300);
}

TEST(WeaveProperty, ResultsValidateAndAreStable) {
  std::mt19937 rng(43);
  for (int i = 0; i < 200; ++i) {
    ProcessModel m = vrp::testing::random_model(rng);
    std::vector<ProcessAspect> as{vrp::testing::random_aspect(rng, m, "a"),
                                  vrp::testing::random_aspect(rng, m, "b")};
    ProcessModel before = m;
    TailoredProcess first, second;
    std::string x = outcome([&] { return weave({m, as, {"a", "b"}, {}}); }, &first);
    std::string y = outcome([&] { return weave({m, as, {"b", "a"}, {}}); }, &second);
    ASSERT_EQ(m, before);
    if (x.rfind("error", 0) == 0) continue;
    ASSERT_EQ(x, y) << serialize_model(m) << print_aspects(as);
    ASSERT_NO_THROW(validate_model(first.result));
    ASSERT_EQ(load_model(x), first.result);
  }
}

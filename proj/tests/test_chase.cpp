#include <gtest/gtest.h>

#include <random>

#include "catamerge/model_check.hpp"
#include "catamerge/printer.hpp"
#include "support/support.hpp"

using namespace testing_support;

namespace {

std::shared_ptr<const Schema> loop_schema()
{
    return std::make_shared<const Schema>(
        Schema("Loop", {"A", "B"}, {{"f", "A", "B", {}, {}, {}}, {"g", "A", "A", {}, {}, {}}}, {{"a", "A", BaseType::Int, {}, {}}, {"b", "B", BaseType::Int, {}, {}}}));
}

Constraint parse(const std::string &text, const Schema &s)
{
    auto r = parse_constraint(text, s);
    EXPECT_TRUE(r.ok()) << text;
    return *r.value;
}

std::map<std::string, std::size_t> values_of(const Instance &inst, const std::string &entity, const std::string &attr)
{
    std::map<std::string, std::size_t> out;
    auto e = inst.schema().entity_index(entity);
    auto a = inst.schema().member(entity, attr)->index;
    for (auto x : inst.elements(e)) {
        AttrValue v = inst.resolve(inst.attr_value(x, a));
        ++out[v.is_null() ? "null" : render_plain(v.constant())];
    }
    return out;
}

} // namespace

TEST(Chase, FirstExampleMaterializesPointsAndTimeseries)
{
    Workspace ws = load_fixtures(example1_files());
    auto r = integrate(ws, "Combined");
    ASSERT_EQ(r.status, ChaseStatus::Saturated);
    const Instance &inst = r.instance;
    const Schema &s = inst.schema();
    EXPECT_EQ(inst.class_count(s.entity_index("BRICK_Point")), 5u);
    EXPECT_EQ(inst.class_count(s.entity_index("Equipment")), 5u);
    auto ts = values_of(inst, "BRICK_Point", "timeseriesId");
    EXPECT_EQ(ts.count("null"), 0u);
    EXPECT_EQ(ts.size(), 5u);
    EXPECT_EQ(ts.count("TUC.245.77.R240"), 1u);
    EXPECT_TRUE(check_model(inst, s.constraints()).satisfied());
}

TEST(Chase, SecondExampleMergesLocationsAndSetsSetPoints)
{
    Workspace ws = load_fixtures(example2_files());
    auto r = integrate(ws, "CombinedThreeWay");
    ASSERT_EQ(r.status, ChaseStatus::Saturated);
    const Instance &inst = r.instance;
    const Schema &s = inst.schema();
    EXPECT_EQ(inst.class_count(s.entity_index("Location")), 5u);
    auto sp = values_of(inst, "BRICK_SetPoint", "setPointValue");
    EXPECT_EQ(sp["26.0"], 1u);
    EXPECT_EQ(sp["22.0"], 4u);
    auto area = values_of(inst, "Location", "roomArea");
    EXPECT_EQ(area.count("null"), 0u);
    EXPECT_TRUE(check_model(inst, s.constraints()).satisfied());
    EXPECT_FALSE(check_model(pre_instance(ws, "CombinedThreeWay"), s.constraints()).satisfied());
}

TEST(Chase, ClashFixtureFails)
{
    Workspace ws = load_fixtures(clash_files());
    auto r = integrate(ws, "CombinedThreeWay");
    ASSERT_EQ(r.status, ChaseStatus::Failed);
    ASSERT_TRUE(r.clash);
    EXPECT_EQ(r.clash->attribute, "roomArea");
}

TEST(Chase, ReplayReproducesTheResult)
{
    for (const auto &[files, ext] : {std::pair{example1_files(), "Combined"}, std::pair{example2_files(), "CombinedThreeWay"}}) {
        Workspace ws = load_fixtures(files);
        auto r = integrate(ws, ext);
        Instance again = replay(pre_instance(ws, ext), r.trace);
        EXPECT_EQ(print_canonical(again), print_canonical(r.instance)) << ext;
        EXPECT_FALSE(r.trace.to_log().empty());
    }
}

TEST(Chase, RerunsAreIdentical)
{
    Workspace ws = load_fixtures(example2_files());
    auto a = integrate(ws, "CombinedThreeWay");
    auto b = integrate(ws, "CombinedThreeWay");
    EXPECT_EQ(a.trace.to_log(), b.trace.to_log());
    EXPECT_EQ(print_canonical(a.instance), print_canonical(b.instance));
}

TEST(Chase, FireOnceRepairsOneMatch)
{
    auto s = loop_schema();
    Instance inst(s);
    auto x = inst.add_element("A", "x");
    inst.set_attr(x, "a", Value::integer(3));
    auto c = parse("forall x : A -> exists y : B, x.f = y, y.b = x.a", *s);
    auto fired = fire_once(inst, c, {x}, 1);
    EXPECT_FALSE(fired.noop());
    auto y = inst.fk_value(x, 0);
    ASSERT_TRUE(y);
    EXPECT_EQ(inst.resolve(inst.attr_value(*y, 1)), AttrValue(Value::integer(3)));
    EXPECT_TRUE(fire_once(inst, c, {x}, 2).noop());
}

TEST(Chase, NonTerminatingSetsAreRejectedOrExhausted)
{
    auto s = loop_schema();
    Schema with = *s;
    auto c = parse("forall x : A -> exists y : A, x.g = y", with);
    Instance pre(s);
    pre.add_element("A", "seed");
    EXPECT_THROW(chase(pre, {c}), ChasePreconditionError);
    ChaseConfig cfg;
    cfg.require_weak_acyclicity = false;
    cfg.max_rounds = 5;
    auto r = chase(pre, {c}, cfg);
    EXPECT_EQ(r.status, ChaseStatus::Exhausted);
    EXPECT_GT(r.instance.class_count(0), 5u);
}

TEST(Chase, IllTypedConstraintsAreRejected)
{
    auto s = loop_schema();
    Constraint bad;
    bad.label = "bad";
    bad.universals = {{"x", "A", {}}};
    bad.conclusion.push_back({Term::path("x", {"nothing"}), Term::literal(Value::integer(1)), {}});
    EXPECT_THROW(chase(Instance(s), {bad}), std::invalid_argument);
}

TEST(Chase, ResultIsUniqueUpToIsomorphism)
{
    Workspace ws = load_fixtures(example2_files());
    auto a = integrate(ws, "CombinedThreeWay");
    // Same constraints in reverse order reach an isomorphic model.
    auto cs = ws.combined.at("CombinedThreeWay").schema->constraints();
    std::reverse(cs.begin(), cs.end());
    auto b = chase(pre_instance(ws, "CombinedThreeWay"), cs);
    ASSERT_EQ(b.status, ChaseStatus::Saturated);
    EXPECT_TRUE(verify_universality(a.instance, b.instance).isomorphic());
    EXPECT_TRUE(verify_universality(a.instance, a.instance).isomorphic());
}

TEST(Chase, UniversalityDetectsExtraFacts)
{
    Workspace ws = load_fixtures(example1_files());
    auto a = integrate(ws, "Combined");
    Instance changed = a.instance;
    const Schema &s = changed.schema();
    auto e = s.entity_index("BRICK_Zone");
    changed.add_element(e, "extra");
    auto v = verify_universality(a.instance, changed);
    EXPECT_FALSE(v.isomorphic());
    EXPECT_FALSE(v.reason.empty());
}

TEST(Chase, RandomCasesSaturateToModels)
{
    // Every random constraint set is weakly acyclic and clash-free, so the
    // chase must saturate, satisfy every constraint, and be order-independent.
    std::mt19937 rng(1234);
    for (int i = 0; i < 150; ++i) {
        RandomCase rc = random_case(rng);
        auto r = chase(rc.instance, rc.constraints);
        ASSERT_EQ(r.status, ChaseStatus::Saturated) << "case " << i;
        auto report = check_model(r.instance, rc.constraints);
        ASSERT_TRUE(report.satisfied()) << "case " << i << ": " << report.violations.front().constraint << " "
                                        << report.violations.front().reason;
        auto reversed = rc.constraints;
        std::reverse(reversed.begin(), reversed.end());
        auto r2 = chase(rc.instance, reversed);
        ASSERT_EQ(r2.status, ChaseStatus::Saturated);
        ASSERT_TRUE(verify_universality(r.instance, r2.instance).isomorphic())
            << "case " << i << ": " << verify_universality(r.instance, r2.instance).reason;
        ASSERT_EQ(print_canonical(replay(rc.instance, r.trace)), print_canonical(r.instance)) << "case " << i;
    }
}

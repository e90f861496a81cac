#include <gtest/gtest.h>

#include <random>

#include "support/support.hpp"

using namespace testing_support;

TEST(Query, FirstExampleMatchesGoldenTable)
{
    Workspace ws = load_fixtures(example1_files());
    auto r = integrate(ws, "Combined");
    auto table = evaluate(ws.queries.at("q"), r.instance);
    EXPECT_EQ(table.to_csv(), read_file(fixture_path("golden/table1.csv")));
}

TEST(Query, TenantBillingMatchesGoldenTable)
{
    Workspace ws = load_fixtures(example2_files());
    auto r = integrate(ws, "CombinedThreeWay");
    const QuerySpec &q = ws.queries.at("TenantBilling");
    auto table = evaluate(q, r.instance);
    EXPECT_EQ(table.to_csv(), read_file(fixture_path("golden/table2.csv")));
    EXPECT_TRUE(same_multiset(table.rows, oracle_rows(q, r.instance)));
}

TEST(Query, ExplainShowsTheJoinShrinking)
{
    Workspace ws = load_fixtures(example2_files());
    auto r = integrate(ws, "CombinedThreeWay");
    auto plan = explain(ws.queries.at("TenantBilling"), r.instance);
    ASSERT_EQ(plan.steps.size(), 2u);
    EXPECT_EQ(plan.steps[0].cardinality, 5u);
    EXPECT_EQ(plan.steps[1].cardinality, 5u);
    EXPECT_EQ(plan.steps[1].input_rows * plan.steps[1].cardinality, 25u);
    EXPECT_EQ(plan.steps[1].output_rows, 5u);
    EXPECT_EQ(plan.result_rows, 5u);
    EXPECT_FALSE(plan.contradiction);
    EXPECT_NE(plan.render().find("REC_Lease"), std::string::npos);
}

TEST(Query, EmptyInstanceGivesHeaderOnly)
{
    Workspace ws = load_fixtures(example1_files());
    Instance empty(ws.combined.at("Combined").schema, "empty");
    auto table = evaluate(ws.queries.at("q"), empty);
    EXPECT_TRUE(table.rows.empty());
    EXPECT_EQ(table.to_csv(), "IFC_spaceName,IFC_spaceArea,BRICK_timeseriesId\n");
}

TEST(Query, UndefinedAndNullCellsRenderAsMarker)
{
    // On the unsaturated pre-instance, Equipment from IFC has no hasPoint yet.
    Workspace ws = load_fixtures(example1_files());
    Instance pre = pre_instance(ws, "Combined");
    auto table = evaluate(ws.queries.at("q"), pre);
    ASSERT_EQ(table.rows.size(), 5u);
    for (const auto &row : table.rows)
        EXPECT_EQ(row.back(), kNullMarker);
    EXPECT_TRUE(same_multiset(table.rows, oracle_rows(ws.queries.at("q"), pre)));
}

TEST(Query, ContradictoryConstantsAreDetectedStatically)
{
    Workspace ws = load_fixtures(example2_files());
    const Schema &s = *ws.combined.at("CombinedThreeWay").schema;
    auto q = parse_query(SourceDocument("q", "query Q = simple : CombinedThreeWay {\n    from l : Location\n"
                                             "    where l.roomName = \"A\" and l.roomName = \"B\"\n"
                                             "    attributes\n        n -> l.roomName\n}\n"),
                         s);
    ASSERT_TRUE(q.ok());
    auto r = integrate(ws, "CombinedThreeWay");
    auto plan = explain(*q.value, r.instance);
    EXPECT_TRUE(plan.contradiction);
    EXPECT_TRUE(evaluate(*q.value, r.instance).rows.empty());
}

TEST(Query, RejectsIllTypedQueries)
{
    Workspace ws = load_fixtures(example1_files());
    QuerySpec q = ws.queries.at("q");
    q.attributes.push_back({"bad", Term::path("e", {"nothing"}), {}});
    Instance pre = pre_instance(ws, "Combined");
    EXPECT_THROW(evaluate(q, pre), QueryError);
}

TEST(Query, TextAndCsvRendering)
{
    ResultTable t{{"a", "b"}, {{"x,y", "say \"hi\""}, {"1", "-"}}};
    EXPECT_EQ(t.to_csv(), "a,b\n\"x,y\",\"say \"\"hi\"\"\"\n1,-\n");
    std::string text = t.to_text();
    EXPECT_NE(text.find("x,y"), std::string::npos);
    EXPECT_NE(text.find("a"), std::string::npos);
}

namespace {

// Random one- or two-variable query over a random case.
QuerySpec random_query(std::mt19937 &rng, const Schema &s)
{
    auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
    QuerySpec q;
    q.name = "R";
    q.target = s.name();
    std::size_t vars = 1 + pick(2);
    for (std::size_t i = 0; i < vars; ++i)
        q.from.push_back({"v" + std::to_string(i), s.entities()[pick(s.entities().size())], {}});
    auto path_from = [&](std::size_t v, bool attribute) {
        std::size_t e = s.entity_index(q.from[v].entity);
        std::vector<std::string> steps;
        for (std::size_t k = pick(3); k > 0 && !s.foreign_keys_of(e).empty(); --k) {
            auto fk = s.foreign_keys_of(e)[pick(s.foreign_keys_of(e).size())];
            steps.push_back(s.foreign_keys()[fk].name);
            e = s.fk_target(fk);
        }
        if (attribute) steps.push_back(s.attributes()[s.attributes_of(e)[pick(s.attributes_of(e).size())]].name);
        return std::pair{Term::path(q.from[v].name, steps), e};
    };
    for (std::size_t i = pick(3); i > 0; --i) {
        auto [l, le] = path_from(pick(vars), true);
        auto [r, re] = path_from(pick(vars), true);
        q.where.push_back({Comparison::Eq, l, r, {}});
    }
    if (vars == 2 && pick(2) == 0) {
        auto [l, le] = path_from(0, false);
        auto [r, re] = path_from(1, false);
        q.where.push_back({Comparison::Eq, l, r, {}});
    }
    for (std::size_t i = 0, n = 1 + pick(3); i < n; ++i)
        q.attributes.push_back({"c" + std::to_string(i), path_from(pick(vars), pick(2) == 0).first, {}});
    return q;
}

} // namespace

TEST(Query, EvaluationMatchesCrossProductOracle)
{
    std::mt19937 rng(555);
    int checked = 0;
    for (int i = 0; i < 400; ++i) {
        RandomCase rc = random_case(rng);
        auto r = chase(rc.instance, rc.constraints);
        ASSERT_EQ(r.status, ChaseStatus::Saturated);
        QuerySpec q = random_query(rng, *rc.schema);
        if (!typecheck_query(q, *rc.schema).empty()) continue;
        ++checked;
        for (const Instance *inst : {&rc.instance, &r.instance}) {
            auto table = evaluate(q, *inst);
            ASSERT_TRUE(same_multiset(table.rows, oracle_rows(q, *inst))) << "case " << i;
            auto plan = explain(q, *inst);
            ASSERT_EQ(plan.result_rows, table.rows.size()) << "case " << i;
        }
    }
    EXPECT_GT(checked, 100);
}

#include <gtest/gtest.h>

#include <chrono>
#include <random>
#include <set>

#include "catamerge/printer.hpp"
#include "support/support.hpp"

using namespace testing_support;

namespace {

const std::vector<std::string> kAllFixtures = {"ifc_schema.cmg",   "brick_schema.cmg",       "rec_schema.cmg",
                                               "ifc_instance.cmg", "brick_instance.cmg",     "rec_instance.cmg",
                                               "brick_empty.cmg",  "example1.cmg",
                                               "example2.cmg"};

std::map<std::string, Schema, std::less<>> source_schemas()
{
    Workspace ws = load_fixtures({"ifc_schema.cmg", "brick_schema.cmg", "rec_schema.cmg"});
    return ws.schemas;
}

std::string dump(const std::vector<Diagnostic> &ds)
{
    std::string s;
    for (const auto &d : ds)
        s += format_diagnostic(d) + "\n";
    return s;
}

} // namespace

TEST(Parser, IfcSchemaHasFourEntities)
{
    auto r = parse_schema(SourceDocument("ifc", read_file(fixture_path("ifc_schema.cmg"))));
    ASSERT_TRUE(r.ok()) << dump(r.diagnostics);
    EXPECT_EQ(r.value->name(), "IFC");
    EXPECT_EQ(r.value->entities(),
              (std::vector<std::string>{"IfcSpace", "IfcDistributionElement", "IfcSensor", "IfcPropertySet"}));
}

TEST(Parser, EmptySchemaIsValid)
{
    auto r = parse_schema(SourceDocument("e", "schema Empty { }"));
    ASSERT_TRUE(r.ok()) << dump(r.diagnostics);
    EXPECT_TRUE(r.value->entities().empty());
    EXPECT_EQ(print_canonical(*r.value), "schema Empty { }\n");
}

TEST(Parser, UnknownEntityIsReportedAtItsToken)
{
    std::string text = "schema S {\n    entities\n        A\n    foreign_keys\n        f : A -> Ghost\n}\n";
    auto r = parse_schema(SourceDocument("s.cmg", text));
    ASSERT_FALSE(r.ok());
    ASSERT_FALSE(r.diagnostics.empty());
    const Diagnostic &d = r.diagnostics.front();
    EXPECT_EQ(d.file, "s.cmg");
    EXPECT_EQ(d.line, 5u);
    EXPECT_EQ(d.offset, text.find("Ghost"));
    EXPECT_NE(d.message.find("Ghost"), std::string::npos);
}

TEST(Parser, AttributeTypeErrorIsReported)
{
    Schema s = *parse_schema(SourceDocument("ifc", read_file(fixture_path("ifc_schema.cmg")))).value;
    auto r = parse_constraint("forall x : IfcSpace -> x.spaceArea = \"big\"", s);
    ASSERT_FALSE(r.ok());
    EXPECT_NE(dump(r.diagnostics).find("spaceArea"), std::string::npos) << dump(r.diagnostics);
}

TEST(Parser, PredicatesAreRejectedInConclusions)
{
    Schema s = *parse_schema(SourceDocument("ifc", read_file(fixture_path("ifc_schema.cmg")))).value;
    auto r = parse_constraint("forall x : IfcSpace -> x.spaceArea > 3", s);
    ASSERT_FALSE(r.ok());
    EXPECT_NE(dump(r.diagnostics).find("predicates are not allowed"), std::string::npos);
}

TEST(Parser, ConstraintShapes)
{
    Schema s = *parse_schema(SourceDocument("ifc", read_file(fixture_path("ifc_schema.cmg")))).value;
    auto r = parse_constraint(
        "L: forall s : IfcSensor  e : IfcDistributionElement where s.sensorAttachedTo = e and e.elementType = \"AC\""
        " -> exists p : IfcPropertySet, s.hasPropertySet = p, p.deviceId = e.elementName",
        s);
    ASSERT_TRUE(r.ok()) << dump(r.diagnostics);
    const Constraint &c = *r.value;
    EXPECT_EQ(c.label, "L");
    EXPECT_EQ(c.universals.size(), 2u);
    EXPECT_EQ(c.premise.size(), 2u);
    EXPECT_EQ(c.existentials.size(), 1u);
    EXPECT_EQ(c.conclusion.size(), 2u);
    auto again = parse_constraint(print_constraint(c), s);
    ASSERT_TRUE(again.ok()) << print_constraint(c) << "\n" << dump(again.diagnostics);
    EXPECT_EQ(*again.value, c);
}

TEST(Parser, ExtensionsCountIdentificationsAndConstraints)
{
    auto schemas = source_schemas();
    auto x1 = parse_extension(SourceDocument("x1", read_file(fixture_path("example1.cmg"))), schemas);
    // example1.cmg also holds a query, which parse_extension does not accept.
    EXPECT_FALSE(x1.ok());
    Workspace ws1 = load_fixtures(example1_files());
    EXPECT_EQ(ws1.extensions.at("Combined").identifications.size(), 2u);
    EXPECT_EQ(ws1.extensions.at("Combined").constraints.size(), 2u);
    Workspace ws2 = load_fixtures(example2_files());
    EXPECT_EQ(ws2.extensions.at("CombinedThreeWay").identifications.size(), 3u);
    EXPECT_EQ(ws2.extensions.at("CombinedThreeWay").constraints.size(), 6u);

    std::string only = "extension X {\n    include IFC BRICK\n    identify BRICK.Location = IFC.IfcSpace\n}\n";
    auto x = parse_extension(SourceDocument("x", only), schemas);
    ASSERT_TRUE(x.ok()) << dump(x.diagnostics);
    EXPECT_EQ(x.value->includes, (std::vector<std::string>{"IFC", "BRICK"}));
}

TEST(Parser, BridgeConstraintsAreCheckedAgainstTheCombinedSignature)
{
    auto schemas = source_schemas();
    std::string text = "extension X {\n    include IFC BRICK\n    identify BRICK.Location = IFC.IfcSpace\n"
                       "    constraints\n        forall l : Location -> l.locationName = l.noSuchAttr\n}\n";
    auto x = parse_extension(SourceDocument("x", text), schemas);
    ASSERT_FALSE(x.ok());
    EXPECT_NE(dump(x.diagnostics).find("noSuchAttr"), std::string::npos) << dump(x.diagnostics);
}

TEST(Parser, SameSchemaIdentificationIsRejected)
{
    auto schemas = source_schemas();
    std::string text = "extension X {\n    include IFC\n    identify IFC.IfcSensor = IFC.IfcSpace\n}\n";
    EXPECT_FALSE(parse_extension(SourceDocument("x", text), schemas).ok());
}

TEST(Parser, Queries)
{
    Workspace ws = load_fixtures(example2_files());
    const QuerySpec &q = ws.queries.at("TenantBilling");
    EXPECT_EQ(q.target, "CombinedThreeWay");
    EXPECT_EQ(q.from.size(), 2u);
    EXPECT_EQ(q.where.size(), 1u);
    EXPECT_EQ(q.attributes.size(), 7u);
    EXPECT_EQ(q.attributes.front().column, "REC_personName");

    const Schema &combined = *ws.combined.at("CombinedThreeWay").schema;
    auto empty_from = parse_query(
        SourceDocument("q", "query Q = simple : CombinedThreeWay {\n    from\n    attributes\n        a -> 1\n}\n"),
        combined);
    ASSERT_FALSE(empty_from.ok());
    EXPECT_NE(dump(empty_from.diagnostics).find("at least one from-variable"), std::string::npos)
        << dump(empty_from.diagnostics);

    auto bad_kind = parse_query(
        SourceDocument("q", "query Q = fancy : CombinedThreeWay {\n    from l : Location\n    attributes\n        a -> l\n}\n"),
        combined);
    EXPECT_FALSE(bad_kind.ok());

    auto bad_path = parse_query(SourceDocument("q", "query Q = simple : CombinedThreeWay {\n    from l : Location\n"
                                                    "    attributes\n        a -> l.nothing\n}\n"),
                                combined);
    EXPECT_FALSE(bad_path.ok());
}

TEST(Parser, InstancesSupportNullsAndSharedNullTags)
{
    Workspace ws = load_fixtures({"rec_schema.cmg"});
    std::string text = "instance R : REC {\n    entity Room {\n"
                       "        row r1 { roomName = \"A\"  roomArea = null:t }\n"
                       "        row r2 { roomName = \"B\"  roomArea = null:t }\n"
                       "        row r3 { roomName = \"C\"  roomArea = null }\n    }\n}\n";
    auto r = parse_instance(SourceDocument("i", text), ws.schema_ptrs.at("REC"));
    ASSERT_TRUE(r.ok()) << dump(r.diagnostics);
    const Instance &inst = *r.value;
    std::size_t area = ws.schemas.at("REC").member("Room", "roomArea")->index;
    auto v1 = inst.resolve(inst.attr_value(*inst.find("r1"), area));
    auto v2 = inst.resolve(inst.attr_value(*inst.find("r2"), area));
    auto v3 = inst.resolve(inst.attr_value(*inst.find("r3"), area));
    ASSERT_TRUE(v1.is_null() && v2.is_null() && v3.is_null());
    EXPECT_EQ(v1, v2);
    EXPECT_NE(v1, v3);
}

TEST(Parser, InstanceErrors)
{
    Workspace ws = load_fixtures({"rec_schema.cmg"});
    auto rec = ws.schema_ptrs.at("REC");
    for (const char *text : {
             "instance R : REC { entity Room { row r1 { roomArea = \"big\" } } }",
             "instance R : REC { entity Lease { row l1 { leaseOf = nowhere } } }",
             "instance R : REC { entity Room { row r1 { } row r1 { } } }",
             "instance R : REC { entity Ghost { } }",
             "instance R : REC { entity Room { row r1 { noSuch = 1 } } }",
         })
        EXPECT_FALSE(parse_instance(SourceDocument("i", text), rec).ok()) << text;
}

TEST(Parser, PrintParseRoundTripOnFixtures)
{
    Workspace ws = load_fixtures(kAllFixtures);
    for (const auto &[name, s] : ws.schemas) {
        auto again = parse_schema(SourceDocument(name, print_canonical(s)));
        ASSERT_TRUE(again.ok()) << print_canonical(s) << dump(again.diagnostics);
        EXPECT_EQ(*again.value, s) << name;
        EXPECT_EQ(print_canonical(*again.value), print_canonical(s));
    }
    for (const auto &[name, x] : ws.extensions) {
        auto again = parse_extension(SourceDocument(name, print_canonical(x)), ws.schemas);
        ASSERT_TRUE(again.ok()) << print_canonical(x) << dump(again.diagnostics);
        EXPECT_EQ(print_canonical(*again.value), print_canonical(x));
    }
    for (const auto &[name, inst] : ws.instances) {
        auto schema = ws.schema_ptrs.count(inst.schema().name()) ? ws.schema_ptrs.at(inst.schema().name())
                                                                 : inst.schema_ptr();
        auto again = parse_instance(SourceDocument(name, print_canonical(inst)), schema);
        ASSERT_TRUE(again.ok()) << print_canonical(inst) << dump(again.diagnostics);
        EXPECT_EQ(print_canonical(*again.value), print_canonical(inst)) << name;
    }
    for (const auto &[name, q] : ws.queries) {
        const Schema &target = *ws.combined.at(q.target).schema;
        auto again = parse_query(SourceDocument(name, print_canonical(q)), target);
        ASSERT_TRUE(again.ok()) << print_canonical(q) << dump(again.diagnostics);
        EXPECT_EQ(*again.value, q);
    }
}

TEST(Parser, SaturatedInstancesRoundTrip)
{
    Workspace ws = load_fixtures(example2_files());
    auto r = integrate(ws, "CombinedThreeWay");
    ASSERT_EQ(r.status, ChaseStatus::Saturated);
    std::string text = print_canonical(r.instance);
    auto again = parse_instance(SourceDocument("sat", text), r.instance.schema_ptr());
    ASSERT_TRUE(again.ok()) << dump(again.diagnostics);
    EXPECT_EQ(print_canonical(*again.value), text);
}

TEST(Parser, RecoversAndReportsErrorsInSeveralBlocks)
{
    std::string text = "schema A {\n    entities\n        X\n    attributes\n        a : X -> Strin\n}\n"
                       "schema B { entities Y : Z }\n"
                       "schema C { entities Z }\n";
    Workspace ws = load_workspace({SourceDocument("m.cmg", text)});
    EXPECT_FALSE(ws.ok());
    std::set<std::size_t> lines;
    for (const auto &d : ws.diagnostics)
        lines.insert(d.line);
    EXPECT_TRUE(lines.count(5)) << dump(ws.diagnostics);
    EXPECT_TRUE(lines.count(7)) << dump(ws.diagnostics);
    EXPECT_TRUE(ws.schemas.count("C"));
}

TEST(Parser, DiagnosticsAreDeterministic)
{
    std::string text = "schema A { entities X foreign_keys f : X -> Y g : Q -> X attributes a : X -> Flt }\n"
                       "instance I : A { entity X { row r { a = 1 f = zz } } }\n"
                       "query Q = simple : Nope { from x : X attributes a -> x }\n";
    auto first = dump(load_workspace({SourceDocument("d", text)}).diagnostics);
    EXPECT_FALSE(first.empty());
    for (int i = 0; i < 5; ++i)
        EXPECT_EQ(dump(load_workspace({SourceDocument("d", text)}).diagnostics), first);
}

TEST(Parser, DeepNestingIsAnErrorNotACrash)
{
    Schema s = *parse_schema(SourceDocument("ifc", read_file(fixture_path("ifc_schema.cmg")))).value;
    std::string t = "x.spaceName";
    for (int i = 0; i < 1000; ++i)
        t = "concat(" + t + ", \"a\")";
    auto r = parse_constraint("forall x : IfcSpace -> x.spaceName = " + t, s);
    EXPECT_FALSE(r.ok());
}

TEST(Parser, MutatedFixturesNeverCrash)
{
    std::string base = read_file(fixture_path("example2.cmg"));
    std::string schemas = read_file(fixture_path("ifc_schema.cmg")) + read_file(fixture_path("brick_schema.cmg")) +
                          read_file(fixture_path("rec_schema.cmg"));
    std::mt19937 rng(3);
    const std::string alphabet = "{}()=<>:.,-\"\\ \n#abcXYZ019_";
    for (int i = 0; i < 2000; ++i) {
        std::string m = base;
        int edits = std::uniform_int_distribution<int>(1, 4)(rng);
        for (int k = 0; k < edits && !m.empty(); ++k) {
            std::size_t at = std::uniform_int_distribution<std::size_t>(0, m.size() - 1)(rng);
            switch (std::uniform_int_distribution<int>(0, 2)(rng)) {
            case 0: m.erase(at, 1); break;
            case 1: m.insert(at, 1, alphabet[std::uniform_int_distribution<std::size_t>(0, alphabet.size() - 1)(rng)]); break;
            default: m[at] = alphabet[std::uniform_int_distribution<std::size_t>(0, alphabet.size() - 1)(rng)];
            }
        }
        Workspace ws = load_workspace({SourceDocument("s", schemas), SourceDocument("m", m)});
        for (const auto &d : ws.diagnostics) {
            ASSERT_FALSE(d.message.empty());
            ASSERT_LE(d.offset, m.size() + schemas.size());
        }
    }
}

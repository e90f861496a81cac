#include "support.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "catamerge/acyclicity.hpp"
#include "catamerge/integrator.hpp"
#include "catamerge/typeside.hpp"

#ifndef CATAMERGE_FIXTURES_DIR
#error "CATAMERGE_FIXTURES_DIR must be defined"
#endif

namespace testing_support {

std::string fixture_path(const std::string &name) { return std::string(CATAMERGE_FIXTURES_DIR) + "/" + name; }

std::string read_file(const std::string &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Workspace load_texts(const std::vector<std::pair<std::string, std::string>> &named_texts)
{
    std::vector<SourceDocument> docs;
    for (const auto &[name, text] : named_texts)
        docs.emplace_back(name, text);
    Workspace ws = load_workspace(docs);
    if (!ws.ok()) {
        std::string all;
        for (const auto &d : ws.diagnostics)
            all += format_diagnostic(d) + "\n";
        throw std::runtime_error("fixture diagnostics:\n" + all);
    }
    return ws;
}

Workspace load_fixtures(const std::vector<std::string> &names)
{
    std::vector<std::pair<std::string, std::string>> texts;
    for (const auto &n : names)
        texts.emplace_back(n, read_file(fixture_path(n)));
    return load_texts(texts);
}

std::vector<std::string> example1_files()
{
    return {"ifc_schema.cmg", "brick_schema.cmg", "ifc_instance.cmg", "brick_empty.cmg", "example1.cmg"};
}

std::vector<std::string> example2_files()
{
    return {"ifc_schema.cmg",   "brick_schema.cmg",   "rec_schema.cmg", "ifc_instance.cmg",
            "brick_instance.cmg", "rec_instance.cmg", "example2.cmg"};
}

std::vector<std::string> clash_files()
{
    return {"ifc_schema.cmg",     "brick_schema.cmg",        "rec_schema.cmg", "ifc_instance.cmg",
            "brick_instance.cmg", "rec_instance_clash.cmg", "example2.cmg"};
}

Instance pre_instance(const Workspace &ws, const std::string &extension)
{
    const CombinedSchema &c = ws.combined.at(extension);
    std::map<std::string, const Instance *> sources;
    for (const auto &[name, inst] : ws.instances)
        if (std::find(c.includes.begin(), c.includes.end(), inst.schema().name()) != c.includes.end())
            sources[inst.schema().name()] = &inst;
    return sigma_insert(c, sources);
}

ChaseResult integrate(const Workspace &ws, const std::string &extension, ChaseConfig cfg)
{
    return chase(pre_instance(ws, extension), ws.combined.at(extension).schema->constraints(), cfg);
}

std::string scaled_ifc_instance(std::size_t rooms)
{
    std::ostringstream s;
    s << "instance IFC_data : IFC {\n    entity IfcSpace {\n";
    for (std::size_t k = 1; k <= rooms; ++k)
        s << "        row sp" << k << " { spaceName = \"Room " << k << "\"  spaceArea = " << (15 + k % 7) << ".25 }\n";
    s << "    }\n    entity IfcDistributionElement {\n";
    for (std::size_t k = 1; k <= rooms; ++k)
        s << "        row ac" << k << " { elementInSpace = sp" << k << "  elementName = \"AC-" << k << "\" }\n";
    s << "    }\n    entity IfcSensor {\n";
    for (std::size_t k = 1; k <= rooms; ++k)
        s << "        row ts" << k << " { sensorAttachedTo = ac" << k << "  hasPropertySet = ps" << k << " }\n";
    s << "    }\n    entity IfcPropertySet {\n";
    for (std::size_t k = 1; k <= rooms; ++k)
        s << "        row ps" << k << " { deviceId = \"TUC.245.77.R" << k << "\" }\n";
    s << "    }\n}\n";
    return s.str();
}

// --- query oracle ------------------------------------------------------------

namespace {

struct OValue
{
    enum class Kind { Element, Constant, Null, Undefined };
    Kind kind = Kind::Undefined;
    ElementId element{};
    Value constant;
    std::uint32_t null_root = 0;
};

OValue walk(const Instance &inst, ElementId x, const std::vector<std::string> &steps)
{
    const Schema &s = inst.schema();
    ElementId at = inst.canonical(x);
    for (const auto &step : steps) {
        auto m = s.member(s.entities()[inst.entity_of(at)], step);
        if (!m) throw std::logic_error("oracle: unknown member " + step);
        if (m->kind == Member::Kind::ForeignKey) {
            auto next = inst.fk_value(at, m->index);
            if (!next) return {};
            at = inst.canonical(*next);
            continue;
        }
        AttrValue v = inst.resolve(inst.attr_value(at, m->index));
        if (v.is_null()) return {OValue::Kind::Null, {}, {}, inst.null_root(v.label()).value};
        return {OValue::Kind::Constant, {}, v.constant(), 0};
    }
    return {OValue::Kind::Element, at, {}, 0};
}

OValue eval(const Instance &inst, const QuerySpec &q, const Term &t, const std::vector<ElementId> &binding)
{
    switch (t.kind) {
    case Term::Kind::Constant: return {OValue::Kind::Constant, {}, t.constant, 0};
    case Term::Kind::Path:
        for (std::size_t i = 0; i < q.from.size(); ++i)
            if (q.from[i].name == t.variable) return walk(inst, binding[i], t.steps);
        throw std::logic_error("oracle: unbound " + t.variable);
    case Term::Kind::Apply: {
        std::vector<Value> args;
        std::vector<BaseType> types;
        for (const auto &a : t.arguments) {
            OValue v = eval(inst, q, a, binding);
            if (v.kind != OValue::Kind::Constant) return {};
            args.push_back(v.constant);
            types.push_back(v.constant.type());
        }
        auto sig = typeside::resolve(t.function, types);
        if (!sig) throw std::logic_error("oracle: no signature for " + t.function);
        for (std::size_t i = 0; i < args.size(); ++i)
            args[i] = args[i].coerced_to(sig->arguments[i]);
        auto r = typeside::apply(sig->id, args);
        if (!r) return {};
        return {OValue::Kind::Constant, {}, *r, 0};
    }
    }
    return {};
}

std::pair<Value, Value> widened(Value a, Value b)
{
    if (a.type() == BaseType::Int && b.type() == BaseType::Double) a = a.coerced_to(BaseType::Double);
    if (b.type() == BaseType::Int && a.type() == BaseType::Double) b = b.coerced_to(BaseType::Double);
    return {a, b};
}

bool holds(const Instance &inst, const QuerySpec &q, const Atom &a, const std::vector<ElementId> &binding)
{
    OValue l = eval(inst, q, a.lhs, binding), r = eval(inst, q, a.rhs, binding);
    if (l.kind != r.kind) return false;
    switch (l.kind) {
    case OValue::Kind::Element: return a.op == Comparison::Eq && l.element == r.element;
    case OValue::Kind::Null: return a.op == Comparison::Eq && l.null_root == r.null_root;
    case OValue::Kind::Undefined: return false;
    case OValue::Kind::Constant: {
        auto [x, y] = widened(l.constant, r.constant);
        return typeside::compare(a.op, x, y);
    }
    }
    return false;
}

std::string render(const Instance &inst, const OValue &v)
{
    switch (v.kind) {
    case OValue::Kind::Element: return inst.export_id(v.element);
    case OValue::Kind::Constant: return render_plain(v.constant);
    default: return std::string(kNullMarker);
    }
}

} // namespace

std::vector<std::vector<std::string>> oracle_rows(const QuerySpec &q, const Instance &inst)
{
    const Schema &s = inst.schema();
    std::vector<std::vector<ElementId>> domains;
    for (const auto &v : q.from)
        domains.push_back(inst.elements(s.entity_index(v.entity)));
    std::vector<std::vector<std::string>> rows;
    std::vector<ElementId> binding(q.from.size());
    std::vector<std::size_t> idx(q.from.size(), 0);
    for (const auto &d : domains)
        if (d.empty()) return rows;
    while (true) {
        for (std::size_t i = 0; i < idx.size(); ++i)
            binding[i] = domains[i][idx[i]];
        bool ok = true;
        for (const auto &a : q.where)
            ok = ok && holds(inst, q, a, binding);
        if (ok) {
            std::vector<std::string> row;
            for (const auto &p : q.attributes)
                row.push_back(render(inst, eval(inst, q, p.term, binding)));
            rows.push_back(std::move(row));
        }
        std::size_t i = 0;
        while (i < idx.size() && ++idx[i] == domains[i].size())
            idx[i++] = 0;
        if (i == idx.size()) break;
    }
    return rows;
}

bool same_multiset(std::vector<std::vector<std::string>> a, std::vector<std::vector<std::string>> b)
{
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    return a == b;
}

// --- random cases ------------------------------------------------------------

namespace {

Value constant_of(BaseType t)
{
    switch (t) {
    case BaseType::String: return Value::string("s");
    case BaseType::Int: return Value::integer(7);
    case BaseType::Double: return Value::real(1.5);
    case BaseType::Bool: return Value::boolean(true);
    }
    return {};
}

struct Gen
{
    std::mt19937 &rng;
    const Schema &schema;

    std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }
    bool coin(double p) { return std::bernoulli_distribution(p)(rng); }

    /// Random FK chain from entity e; returns steps and the end entity.
    std::pair<std::vector<std::string>, std::size_t> chain(std::size_t e, std::size_t max_len)
    {
        std::vector<std::string> steps;
        std::size_t len = pick(max_len + 1);
        for (std::size_t i = 0; i < len; ++i) {
            const auto &fks = schema.foreign_keys_of(e);
            if (fks.empty()) break;
            std::size_t fk = fks[pick(fks.size())];
            steps.push_back(schema.foreign_keys()[fk].name);
            e = schema.fk_target(fk);
        }
        return {steps, e};
    }

    /// Attribute path from entity e: FK chain then an attribute.
    std::pair<std::vector<std::string>, BaseType> attr_path(std::size_t e, std::size_t max_len)
    {
        auto [steps, end] = chain(e, max_len);
        const auto &attrs = schema.attributes_of(end);
        std::size_t a = attrs[pick(attrs.size())];
        steps.push_back(schema.attributes()[a].name);
        return {steps, schema.attributes()[a].type};
    }

    std::optional<std::pair<std::vector<std::string>, BaseType>> attr_path_of_type(std::size_t e, BaseType t)
    {
        for (int tries = 0; tries < 20; ++tries) {
            auto p = attr_path(e, 2);
            if (p.second == t) return p;
        }
        return std::nullopt;
    }

    std::optional<Constraint> constraint(std::size_t k)
    {
        Constraint c;
        c.label = "R" + std::to_string(k);
        std::size_t e = pick(schema.entities().size());
        const std::string &E = schema.entities()[e];
        switch (pick(5)) {
        case 0: { // unify elements agreeing on an attribute
            auto [steps, type] = attr_path(e, 1);
            c.universals = {{"x", E, {}}, {"y", E, {}}};
            c.premise.push_back({Comparison::Eq, Term::path("x", steps), Term::path("y", steps), {}});
            c.conclusion.push_back({Term::path("x"), Term::path("y"), {}});
            return c;
        }
        case 1: { // copy one attribute path into another
            auto [steps, type] = attr_path(e, 2);
            auto other = attr_path_of_type(e, type);
            if (!other || other->first == steps) return std::nullopt;
            c.universals = {{"x", E, {}}};
            c.conclusion.push_back({Term::path("x", steps), Term::path("x", other->first), {}});
            return c;
        }
        case 2: { // invent a target for a foreign key
            const auto &fks = schema.foreign_keys_of(e);
            if (fks.empty()) return std::nullopt;
            std::size_t fk = fks[pick(fks.size())];
            const std::string &F = schema.entities()[schema.fk_target(fk)];
            c.universals = {{"x", E, {}}};
            c.existentials = {{"y", F, {}}};
            c.conclusion.push_back({Term::path("x", {schema.foreign_keys()[fk].name}), Term::path("y"), {}});
            const auto &attrs = schema.attributes_of(schema.fk_target(fk));
            if (!attrs.empty() && coin(0.5)) {
                std::size_t a = attrs[pick(attrs.size())];
                auto src = attr_path_of_type(e, schema.attributes()[a].type);
                if (src)
                    c.conclusion.push_back(
                        {Term::path("y", {schema.attributes()[a].name}), Term::path("x", src->first), {}});
            }
            return c;
        }
        case 3: { // constant-guarded constant assignment
            auto [premise, ptype] = attr_path(e, 1);
            auto [target, ttype] = attr_path(e, 2);
            c.universals = {{"x", E, {}}};
            c.premise.push_back({Comparison::Eq, Term::path("x", premise), Term::literal(constant_of(ptype)), {}});
            c.conclusion.push_back({Term::path("x", target), Term::literal(constant_of(ttype)), {}});
            return c;
        }
        default: { // two foreign-key chains that must agree
            auto [p, end] = chain(e, 2);
            for (int tries = 0; tries < 10; ++tries) {
                auto [q, end2] = chain(e, 2);
                if (end2 == end && q != p) {
                    c.universals = {{"x", E, {}}};
                    c.conclusion.push_back({Term::path("x", p), Term::path("x", q), {}});
                    return c;
                }
            }
            return std::nullopt;
        }
        }
    }
};

} // namespace

RandomCase random_case(std::mt19937 &rng)
{
    auto pick = [&](std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(rng); };
    std::size_t n = pick(1, 4);
    std::vector<std::string> entities;
    for (std::size_t i = 0; i < n; ++i)
        entities.push_back("E" + std::to_string(i));
    std::vector<ForeignKey> fks;
    std::size_t nfk = pick(0, 4);
    for (std::size_t i = 0; i < nfk; ++i)
        fks.push_back({"f" + std::to_string(i), entities[pick(0, n - 1)], entities[pick(0, n - 1)], {}, {}, {}});
    std::vector<Attribute> attrs;
    const BaseType types[] = {BaseType::String, BaseType::Int, BaseType::Double, BaseType::Bool};
    std::size_t k = 0;
    for (const auto &e : entities) {
        std::size_t na = pick(1, 2);
        for (std::size_t i = 0; i < na; ++i)
            attrs.push_back({"a" + std::to_string(k++), e, types[pick(0, 3)], {}, {}});
    }
    auto schema = std::make_shared<const Schema>(Schema("Random", entities, fks, attrs));

    Instance inst(schema, "random");
    std::size_t total = pick(n, 30);
    std::vector<std::vector<ElementId>> by_entity(n);
    for (std::size_t i = 0; i < total; ++i) {
        std::size_t e = i < n ? i : pick(0, n - 1);
        by_entity[e].push_back(inst.add_element(e, "x" + std::to_string(i)));
    }
    std::bernoulli_distribution half(0.5), often(0.6);
    for (std::size_t e = 0; e < n; ++e)
        for (auto x : by_entity[e]) {
            for (auto fk : schema->foreign_keys_of(e))
                if (often(rng)) {
                    const auto &targets = by_entity[schema->fk_target(fk)];
                    inst.set_fk(x, schema->foreign_keys()[fk].name, targets[pick(0, targets.size() - 1)]);
                }
            for (auto a : schema->attributes_of(e))
                if (half(rng)) inst.set_attr(x, a, AttrValue(constant_of(schema->attributes()[a].type)));
        }

    Gen gen{rng, *schema};
    std::vector<Constraint> cs;
    std::size_t want = pick(1, 4);
    for (std::size_t tries = 0; cs.size() < want && tries < 50; ++tries) {
        auto c = gen.constraint(cs.size() + 1);
        if (!c || !typecheck(*c, *schema).empty()) continue;
        cs.push_back(*c);
        if (!check_weak_acyclicity(cs, *schema).acyclic) cs.pop_back();
    }
    return {schema, std::move(inst), std::move(cs)};
}

} // namespace testing_support

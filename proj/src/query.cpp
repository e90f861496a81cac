#include "catamerge/query.hpp"

#include <algorithm>
#include <map>

#include "catamerge/csv.hpp"
#include "catamerge/printer.hpp"
#include "compiled.hpp"
#include "text_table.hpp"

namespace catamerge {

using namespace detail;

namespace {

Constraint as_constraint(const QuerySpec &q)
{
    Constraint c;
    c.label = q.name;
    c.universals = q.from;
    c.premise = q.where;
    return c;
}

std::string render(const Instance &inst, const Evaluated &v)
{
    switch (v.kind) {
    case Evaluated::Kind::Element: return inst.export_id(v.element);
    case Evaluated::Kind::Value: {
        AttrValue r = inst.resolve(*v.value);
        return r.is_null() ? std::string(kNullMarker) : render_plain(r.constant());
    }
    case Evaluated::Kind::Undefined: return std::string(kNullMarker);
    }
    return {};
}

struct Compiled
{
    CConstraint where;
    std::vector<CTerm> projections;
};

Compiled compile_query(const QuerySpec &q, const Schema &schema)
{
    auto errors = typecheck_query(q, schema);
    if (!errors.empty()) throw QueryError("query '" + q.name + "': " + errors.front().message);
    Compiled out{compile(as_constraint(q), schema), {}};
    for (const auto &p : q.attributes)
        out.projections.push_back(compile_term(p.term, schema, out.where.var_names, out.where.var_entity));
    return out;
}

} // namespace

std::vector<TypeError> typecheck_query(const QuerySpec &q, const Schema &schema)
{
    std::vector<TypeError> errors;
    if (q.from.empty()) errors.push_back({"query '" + q.name + "' has an empty from clause", q.span});
    for (const auto &a : q.where)
        if (a.op != Comparison::Eq)
            errors.push_back({"query where-atoms must be equations, found '" + std::string(to_string(a.op)) + "'", a.span});
    Constraint c = as_constraint(q);
    for (const auto &p : q.attributes)
        c.premise.push_back(Atom{Comparison::Eq, p.term, p.term, p.span});
    for (auto &e : typecheck(c, schema))
        errors.push_back(std::move(e));
    std::map<std::string, int> seen;
    for (const auto &p : q.attributes)
        if (seen[p.column]++ == 1) errors.push_back({"column '" + p.column + "' is declared more than once", p.span});
    return errors;
}

ResultTable evaluate(const QuerySpec &q, const Instance &inst)
{
    auto c = compile_query(q, inst.schema());
    ResultTable table;
    for (const auto &p : q.attributes)
        table.columns.push_back(p.column);
    std::vector<std::pair<std::vector<std::string>, std::vector<std::string>>> rows;
    Matcher m(inst, c.where.premise, c.where.var_entity, &equation_holds, true);
    m.run({}, 0, c.where.var_entity.size(), [&](const Binding &b) {
        std::vector<std::string> key, cells;
        for (auto e : b)
            key.push_back(inst.export_id(e));
        for (const auto &t : c.projections)
            cells.push_back(render(inst, evaluate(inst, t, b)));
        rows.emplace_back(std::move(key), std::move(cells));
        return true;
    });
    std::stable_sort(rows.begin(), rows.end(), [](const auto &a, const auto &b) { return a.first < b.first; });
    for (auto &r : rows)
        table.rows.push_back(std::move(r.second));
    return table;
}

std::string render_cell(const Instance &inst, const QuerySpec &q, const Term &term, const std::vector<ElementId> &binding)
{
    std::vector<std::string> names;
    std::vector<std::size_t> entities;
    for (const auto &v : q.from) {
        names.push_back(v.name);
        entities.push_back(inst.schema().entity_index(v.entity));
    }
    auto t = compile_term(term, inst.schema(), names, entities);
    return render(inst, evaluate(inst, t, binding));
}

std::string ResultTable::to_csv() const
{
    std::string out = csv_line(columns);
    for (const auto &r : rows)
        out += csv_line(r);
    return out;
}

std::string ResultTable::to_text() const
{
    TextTable t(columns);
    for (const auto &r : rows)
        t.add(r);
    return t.render();
}

JoinPlan explain(const QuerySpec &q, const Instance &inst)
{
    auto c = compile_query(q, inst.schema());
    const auto &atoms = c.where.premise;
    JoinPlan plan;

    // statically contradictory constants on one term
    std::vector<std::pair<const Term *, const Term *>> pinned; // term, constant
    for (const auto &a : q.where) {
        const Term *term = nullptr, *constant = nullptr;
        if (a.rhs.kind == Term::Kind::Constant) {
            term = &a.lhs;
            constant = &a.rhs;
        } else if (a.lhs.kind == Term::Kind::Constant) {
            term = &a.rhs;
            constant = &a.lhs;
        }
        if (!term) continue;
        if (term->kind == Term::Kind::Constant && !typeside::compare(Comparison::Eq, term->constant, constant->constant)) {
            plan.contradiction = true;
            plan.contradiction_reason = print_atom(a) + " never holds";
        }
        for (const auto &[t, k] : pinned)
            if (*t == *term && !typeside::compare(Comparison::Eq, k->constant, constant->constant) && !plan.contradiction) {
                plan.contradiction = true;
                plan.contradiction_reason =
                    print_term(*term) + " = " + print_term(*k) + " and " + print_term(*term) + " = " + print_term(*constant);
            }
        pinned.emplace_back(term, constant);
    }

    std::size_t previous = 1;
    for (std::size_t k = 0; k < c.where.var_entity.size(); ++k) {
        JoinStep step;
        step.variable = q.from[k].name;
        step.entity = q.from[k].entity;
        step.cardinality = inst.class_count(c.where.var_entity[k]);
        step.input_rows = previous;
        std::vector<CAtom> prefix;
        for (std::size_t i = 0; i < atoms.size(); ++i) {
            auto m = atoms[i].max_var;
            if (m == npos || m <= k) prefix.push_back(atoms[i]);
            if (m == k || (m == npos && k == 0)) step.filters.push_back(print_atom(q.where[i]));
        }
        std::size_t count = 0;
        Matcher m(inst, prefix, std::span(c.where.var_entity.data(), k + 1), &equation_holds, true);
        m.run({}, 0, k + 1, [&](const Binding &) {
            ++count;
            return true;
        });
        step.output_rows = count;
        previous = count;
        plan.steps.push_back(step);
    }
    plan.result_rows = plan.steps.empty() ? 0 : plan.steps.back().output_rows;
    return plan;
}

std::string JoinPlan::render() const
{
    std::string out;
    for (std::size_t i = 0; i < steps.size(); ++i) {
        const auto &s = steps[i];
        out += std::to_string(i + 1) + ". ";
        if (i == 0) {
            out += "scan " + s.variable + " : " + s.entity + " (" + std::to_string(s.cardinality) + " elements)";
        } else {
            out += "join " + s.variable + " : " + s.entity + " (" + std::to_string(s.cardinality) + " elements): " +
                   std::to_string(s.input_rows) + " x " + std::to_string(s.cardinality) + " = " +
                   std::to_string(s.input_rows * s.cardinality) + " candidates";
        }
        for (const auto &f : s.filters)
            out += ", filter " + f;
        out += " -> " + std::to_string(s.output_rows) + " rows\n";
    }
    if (contradiction)
        out += "result: empty (contradictory constants: " + contradiction_reason + ")\n";
    else
        out += "result: " + std::to_string(result_rows) + " rows\n";
    return out;
}

} // namespace catamerge

#include "catamerge/validate.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace catamerge {

bool ValidationReport::mentions(std::string_view subject) const
{
    return std::ranges::any_of(violations, [&](const Violation &v) { return v.subject == subject; });
}

ValidationReport validate_schema(const Schema &s)
{
    ValidationReport report;
    auto add = [&](std::string subject, std::string message, SourceSpan span = {}) {
        report.violations.push_back({std::move(subject), std::move(message), span});
    };

    std::set<std::string, std::less<>> seen;
    for (const auto &e : s.entities())
        if (!seen.insert(e).second) add(e, "entity '" + e + "' is declared more than once");

    std::set<std::pair<std::string, std::string>> members;
    for (const auto &fk : s.foreign_keys()) {
        if (!s.has_entity(fk.source))
            add(fk.source, "foreign key '" + fk.name + "' has undeclared source entity '" + fk.source + "'", fk.source_span);
        if (!s.has_entity(fk.target))
            add(fk.target, "foreign key '" + fk.name + "' targets undeclared entity '" + fk.target + "'", fk.target_span);
        if (!members.insert({fk.source, fk.name}).second)
            add(fk.name, "'" + fk.source + "." + fk.name + "' is declared more than once", fk.span);
    }
    for (const auto &a : s.attributes()) {
        if (!s.has_entity(a.source))
            add(a.source, "attribute '" + a.name + "' has undeclared source entity '" + a.source + "'", a.source_span);
        if (!members.insert({a.source, a.name}).second)
            add(a.name, "'" + a.source + "." + a.name + "' is declared more than once", a.span);
    }
    if (!report.ok()) return report; // constraint checking assumes a sound signature

    std::set<std::string> labels;
    for (const auto &c : s.constraints()) {
        if (!c.label.empty() && !labels.insert(c.label).second)
            add(c.label, "constraint label '" + c.label + "' is used more than once", c.span);
        for (const auto &err : typecheck(c, s))
            add(c.label, "constraint '" + c.label + "': " + err.message, err.span);
    }
    return report;
}

ValidationReport validate_extension(const ExtensionSpec &x, const std::map<std::string, Schema, std::less<>> &schemas)
{
    ValidationReport report;
    auto add = [&](std::string subject, std::string message, SourceSpan span = {}) {
        report.violations.push_back({std::move(subject), std::move(message), span});
    };

    if (x.includes.empty()) add(x.name, "extension '" + x.name + "' includes no schema");
    std::set<std::string> included;
    for (const auto &name : x.includes) {
        if (!schemas.count(name)) add(name, "extension '" + x.name + "' includes unknown schema '" + name + "'");
        if (!included.insert(name).second) add(name, "schema '" + name + "' is included more than once");
    }

    // union-find over qualified entity names to find identification classes
    std::map<std::string, std::string> parent;
    auto find = [&](std::string q) {
        while (parent.count(q) && parent[q] != q)
            q = parent[q];
        return q;
    };
    auto known = [&](const EntityRef &r) {
        if (!included.count(r.schema)) {
            add(r.qualified(), "identification refers to schema '" + r.schema + "' which is not included", r.span);
            return false;
        }
        auto it = schemas.find(r.schema);
        if (it != schemas.end() && !it->second.has_entity(r.entity)) {
            add(r.qualified(), "identification refers to undeclared entity '" + r.qualified() + "'", r.span);
            return false;
        }
        return it != schemas.end();
    };
    for (const auto &id : x.identifications) {
        bool ok = known(id.left);
        ok = known(id.right) && ok;
        if (!ok) continue;
        if (id.left.schema == id.right.schema) {
            add(id.left.qualified(),
                "identification '" + id.left.qualified() + " = " + id.right.qualified() +
                    "' merges two entities of the same schema, which is not supported",
                id.left.span);
            continue;
        }
        for (const auto *r : {&id.left, &id.right})
            if (!parent.count(r->qualified())) parent[r->qualified()] = r->qualified();
        auto a = find(id.left.qualified()), b = find(id.right.qualified());
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }

    std::map<std::string, std::map<std::string, std::string>> schema_members; // root -> schema -> entity
    for (const auto &[q, _] : parent) {
        auto dot = q.find('.');
        std::string schema = q.substr(0, dot), entity = q.substr(dot + 1);
        auto &members = schema_members[find(q)];
        if (auto it = members.find(schema); it != members.end() && it->second != entity)
            add(q, "identifications transitively merge '" + schema + "." + it->second + "' with '" + q +
                       "', two entities of the same schema");
        else
            members[schema] = entity;
    }
    return report;
}

} // namespace catamerge

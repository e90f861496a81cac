#include "catamerge/integrator.hpp"

#include <algorithm>
#include <functional>

#include "catamerge/validate.hpp"
#include "text_table.hpp"

namespace catamerge {

std::string CombinedSchema::combined_entity(const std::string &s, const std::string &entity) const
{
    auto it = entity_of.find(Origin{s, entity, {}});
    if (it == entity_of.end()) throw IntegrationError("no combined entity for '" + s + "." + entity + "'");
    return it->second;
}

std::string CombinedSchema::combined_member(const std::string &s, const std::string &entity,
                                            const std::string &member) const
{
    auto it = member_of.find(Origin{s, entity, member});
    if (it == member_of.end())
        throw IntegrationError("no combined member for '" + s + "." + entity + "." + member + "'");
    return it->second;
}

std::set<std::string> CombinedSchema::entity_schemas(const std::string &entity) const
{
    std::set<std::string> out;
    if (auto it = entity_origins.find(entity); it != entity_origins.end())
        for (const auto &o : it->second)
            out.insert(o.schema);
    return out;
}

std::string CombinedSchema::member_schema(const std::string &entity, const std::string &member) const
{
    auto it = member_origin.find({entity, member});
    return it == member_origin.end() ? std::string{} : it->second.schema;
}

namespace {

struct Renamer
{
    const Schema &source;
    const CombinedSchema &combined;
    std::map<std::string, std::string> sorts; // variable -> source entity

    Term rename(const Term &t) const
    {
        Term out = t;
        if (t.kind == Term::Kind::Apply) {
            for (auto &a : out.arguments)
                a = rename(a);
            return out;
        }
        if (t.kind != Term::Kind::Path) return out;
        auto it = sorts.find(t.variable);
        if (it == sorts.end()) return out;
        std::string at = it->second;
        for (auto &step : out.steps) {
            auto m = source.member(at, step);
            if (!m) break;
            std::string owner = at;
            if (m->kind == Member::Kind::ForeignKey) at = source.foreign_keys()[m->index].target;
            step = combined.combined_member(source.name(), owner, step);
        }
        return out;
    }
};

Constraint import_constraint(const Constraint &c, const Schema &source, const CombinedSchema &combined)
{
    Renamer r{source, combined, {}};
    Constraint out = c;
    out.label = source.name() + "." + c.label;
    for (auto *vars : {&out.universals, &out.existentials})
        for (auto &v : *vars) {
            r.sorts[v.name] = v.entity;
            if (source.has_entity(v.entity)) v.entity = combined.combined_entity(source.name(), v.entity);
        }
    for (auto &a : out.premise) {
        a.lhs = r.rename(a.lhs);
        a.rhs = r.rename(a.rhs);
    }
    for (auto &e : out.conclusion) {
        e.lhs = r.rename(e.lhs);
        e.rhs = r.rename(e.rhs);
    }
    return out;
}

} // namespace

CombinedSchema combine_schemas(const ExtensionSpec &x, const std::map<std::string, Schema, std::less<>> &schemas)
{
    auto report = validate_extension(x, schemas);
    if (!report.ok()) throw IntegrationError(report.violations.front().message);

    CombinedSchema out;
    out.extension = x.name;
    out.includes = x.includes;

    // identification classes, keyed by root, remembering first mention
    std::map<std::string, std::string> parent;
    std::vector<EntityRef> mention_order;
    std::function<std::string(const std::string &)> find = [&](const std::string &q) -> std::string {
        auto it = parent.find(q);
        if (it == parent.end() || it->second == q) return q;
        return it->second = find(it->second);
    };
    for (const auto &id : x.identifications) {
        for (const auto *r : {&id.left, &id.right})
            if (!parent.count(r->qualified())) {
                parent[r->qualified()] = r->qualified();
                mention_order.push_back(*r);
            }
        auto a = find(id.left.qualified()), b = find(id.right.qualified());
        if (a != b) parent[b] = a;
    }
    std::map<std::string, std::vector<EntityRef>> by_root;
    for (const auto &r : mention_order)
        by_root[find(r.qualified())].push_back(r);

    std::map<std::string, std::string> class_name; // root -> combined name
    std::set<std::string> taken;
    for (const auto &s : x.includes)
        for (const auto &e : schemas.at(s).entities())
            if (!parent.count(s + "." + e)) taken.insert(s + "_" + e);
    for (const auto &r : mention_order) {
        auto root = find(r.qualified());
        if (class_name.count(root)) continue;
        const auto &first = by_root[root].front();
        std::string name = first.entity;
        if (taken.count(name)) name = first.schema + "_" + first.entity;
        if (taken.count(name))
            throw IdentificationCollision("identification class of '" + first.qualified() +
                                          "' cannot be named: '" + name + "' is already taken");
        taken.insert(name);
        class_name[root] = name;
        out.classes[name] = by_root[root];
    }

    std::vector<std::string> entities;
    for (const auto &s : x.includes)
        for (const auto &e : schemas.at(s).entities()) {
            auto q = s + "." + e;
            std::string name = parent.count(q) ? class_name[find(q)] : s + "_" + e;
            out.entity_of[Origin{s, e, {}}] = name;
            out.entity_origins[name].push_back(Origin{s, e, {}});
            if (std::find(entities.begin(), entities.end(), name) == entities.end()) entities.push_back(name);
        }

    // member names: prefix those that occur in more than one origin schema
    std::map<std::pair<std::string, std::string>, std::set<std::string>> name_sources;
    for (const auto &s : x.includes) {
        const auto &schema = schemas.at(s);
        for (const auto &fk : schema.foreign_keys())
            name_sources[{out.combined_entity(s, fk.source), fk.name}].insert(s);
        for (const auto &a : schema.attributes())
            name_sources[{out.combined_entity(s, a.source), a.name}].insert(s);
    }
    std::set<std::pair<std::string, std::string>> used;
    auto member_name = [&](const std::string &s, const std::string &source, const std::string &name) {
        std::string entity = out.combined_entity(s, source);
        std::string result = name_sources[{entity, name}].size() > 1 ? s + "_" + name : name;
        if (!used.insert({entity, result}).second)
            throw IdentificationCollision("member '" + result + "' of '" + entity + "' is ambiguous after prefixing");
        out.member_of[Origin{s, source, name}] = result;
        out.member_origin[{entity, result}] = Origin{s, source, name};
        return result;
    };

    std::vector<ForeignKey> fks;
    std::vector<Attribute> attrs;
    for (const auto &s : x.includes) {
        const auto &schema = schemas.at(s);
        for (const auto &fk : schema.foreign_keys())
            fks.push_back({member_name(s, fk.source, fk.name), out.combined_entity(s, fk.source),
                           out.combined_entity(s, fk.target), {}, {}, {}});
        for (const auto &a : schema.attributes())
            attrs.push_back({member_name(s, a.source, a.name), out.combined_entity(s, a.source), a.type, {}, {}});
    }

    std::map<std::string, std::set<std::string>> alias_targets;
    for (const auto &[origin, combined] : out.entity_of)
        alias_targets[origin.entity].insert(combined);
    std::map<std::string, std::string, std::less<>> aliases;
    for (const auto &[alias, targets] : alias_targets)
        if (targets.size() == 1 && std::find(entities.begin(), entities.end(), alias) == entities.end())
            aliases[alias] = *targets.begin();

    // provisional schema so imported constraints can be renamed
    out.schema = std::make_shared<const Schema>(Schema(x.name, entities, fks, attrs).with_aliases(aliases));
    std::vector<Constraint> constraints;
    for (const auto &s : x.includes) {
        const auto &schema = schemas.at(s);
        for (const auto &c : schema.constraints())
            constraints.push_back(import_constraint(c, schema, out));
    }
    for (const auto &c : x.constraints)
        constraints.push_back(canonicalize_entities(c, *out.schema));
    out.schema = std::make_shared<const Schema>(out.schema->with_constraints(std::move(constraints)));
    return out;
}

Instance sigma_insert(const CombinedSchema &c, const std::map<std::string, const Instance *> &sources)
{
    Instance out(c.schema, c.extension);
    const auto &schema = *c.schema;
    for (const auto &s : c.includes) {
        auto it = sources.find(s);
        if (it == sources.end() || !it->second) continue;
        const Instance &src = *it->second;
        const auto &ss = src.schema();
        std::map<std::uint32_t, ElementId> mapped;
        std::map<std::uint32_t, NullLabel> nulls;
        for (std::size_t e = 0; e < ss.entities().size(); ++e)
            for (auto x : src.elements(e))
                mapped[x.value] = out.add_element(c.combined_entity(s, ss.entities()[e]), s + "." + src.export_id(x));
        for (std::size_t e = 0; e < ss.entities().size(); ++e) {
            const auto &ename = ss.entities()[e];
            for (auto x : src.elements(e)) {
                ElementId y = mapped.at(x.value);
                for (auto fk : ss.foreign_keys_of(e))
                    if (auto v = src.fk_value(x, fk))
                        out.set_fk(y, c.combined_member(s, ename, ss.foreign_keys()[fk].name), mapped.at(v->value));
                for (auto a : ss.attributes_of(e)) {
                    auto member = schema.member(c.combined_entity(s, ename),
                                                c.combined_member(s, ename, ss.attributes()[a].name));
                    AttrValue v = src.resolve(src.attr_value(x, a));
                    if (v.is_null()) {
                        auto [slot, fresh] = nulls.try_emplace(v.label().value, NullLabel{});
                        if (fresh) slot->second = out.fresh_null();
                        out.set_attr(y, member->index, AttrValue(slot->second));
                    } else {
                        out.set_attr(y, member->index, v);
                    }
                }
            }
        }
    }
    return out;
}

Instance delta_project(const CombinedSchema &c, const Instance &sat, const std::shared_ptr<const Schema> &target)
{
    const auto &t = *target;
    const auto &cs = *c.schema;
    if (std::find(c.includes.begin(), c.includes.end(), t.name()) == c.includes.end())
        throw IntegrationError("schema '" + t.name() + "' is not part of extension '" + c.extension + "'");
    Instance out(target, t.name());
    std::string prefix = t.name() + ".";
    std::vector<std::map<std::uint32_t, ElementId>> rows(t.entities().size());

    for (std::size_t e = 0; e < t.entities().size(); ++e) {
        auto ce = cs.entity_index(c.combined_entity(t.name(), t.entities()[e]));
        for (auto x : sat.elements(ce)) {
            std::optional<std::string> original;
            for (auto m : sat.class_members(x)) {
                const auto &label = sat.label_of(m);
                if (!sat.is_user_declared(m) || label.rfind(prefix, 0) != 0) continue;
                auto stripped = label.substr(prefix.size());
                if (!original || stripped < *original) original = stripped;
            }
            std::string label = original ? *original : sat.export_id(x);
            if (out.find(label)) label = sat.export_id(x);
            rows[e][x.value] = out.add_element(e, label);
        }
    }
    std::map<std::uint32_t, NullLabel> nulls;
    for (std::size_t e = 0; e < t.entities().size(); ++e) {
        const auto &ename = t.entities()[e];
        auto cname = c.combined_entity(t.name(), ename);
        for (const auto &[root, y] : rows[e]) {
            ElementId x{root};
            for (auto fk : t.foreign_keys_of(e)) {
                auto m = cs.member(cname, c.combined_member(t.name(), ename, t.foreign_keys()[fk].name));
                auto v = sat.fk_value(x, m->index);
                if (!v) continue;
                out.set_fk(y, t.foreign_keys()[fk].name, rows[t.fk_target(fk)].at(v->value));
            }
            for (auto a : t.attributes_of(e)) {
                auto m = cs.member(cname, c.combined_member(t.name(), ename, t.attributes()[a].name));
                AttrValue v = sat.resolve(sat.attr_value(x, m->index));
                if (v.is_null()) {
                    auto [slot, fresh] = nulls.try_emplace(v.label().value, NullLabel{});
                    if (fresh) slot->second = out.fresh_null();
                    out.set_attr(y, a, AttrValue(slot->second));
                } else {
                    out.set_attr(y, a, v);
                }
            }
        }
    }
    return out;
}

const RoundTripRow *RoundTripReport::table(std::string_view name) const
{
    for (const auto &t : tables)
        if (t.table == name) return &t;
    return nullptr;
}

std::string RoundTripReport::render() const
{
    detail::TextTable table({"table", "rows_in", "rows_recovered", "attributes_gained", "attributes_lost", "new_rows"});
    for (const auto &t : tables)
        table.add({t.table, std::to_string(t.rows_in), std::to_string(t.rows_recovered),
                   std::to_string(t.attributes_gained), std::to_string(t.attributes_lost), std::to_string(t.new_rows)});
    return "round-trip report for " + schema + "\n" + table.render();
}

RoundTripReport roundtrip_report(const Instance &original, const Instance &recovered)
{
    const auto &schema = original.schema();
    if (!(schema == recovered.schema())) throw IntegrationError("round-trip instances are over different schemas");
    RoundTripReport report;
    report.schema = schema.name();
    for (std::size_t e = 0; e < schema.entities().size(); ++e) {
        RoundTripRow row;
        row.table = schema.entities()[e];
        std::set<std::string> original_ids;
        for (auto x : original.elements(e)) {
            ++row.rows_in;
            original_ids.insert(original.export_id(x));
            auto y = recovered.find(original.export_id(x));
            bool matched = y && recovered.entity_of(*y) == e;
            if (matched) ++row.rows_recovered;
            for (auto a : schema.attributes_of(e)) {
                AttrValue before = original.resolve(original.attr_value(x, a));
                if (!matched) {
                    row.attributes_lost += !before.is_null();
                    continue;
                }
                AttrValue after = recovered.resolve(recovered.attr_value(*y, a));
                if (before.is_null() && !after.is_null()) ++row.attributes_gained;
                if (!before.is_null() && (after.is_null() || after.constant() != before.constant()))
                    ++row.attributes_lost;
            }
        }
        for (auto y : recovered.elements(e)) {
            bool known = false;
            for (auto m : recovered.class_members(y))
                known = known || original_ids.count(recovered.label_of(m));
            row.new_rows += !known;
        }
        report.tables.push_back(row);
    }
    return report;
}

} // namespace catamerge

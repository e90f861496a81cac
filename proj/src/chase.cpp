#include "catamerge/chase.hpp"

#include "catamerge/acyclicity.hpp"
#include "compiled.hpp"

namespace catamerge {

using namespace detail;

std::string_view to_string(ChaseStatus s)
{
    switch (s) {
    case ChaseStatus::Saturated: return "saturated";
    case ChaseStatus::Failed: return "failed";
    case ChaseStatus::Exhausted: return "exhausted";
    }
    return "?";
}

std::string ChaseAction::describe() const
{
    switch (kind) {
    case Kind::Created: return "created " + element + " : " + entity;
    case Kind::Merged: return "merged(" + element + ", " + other + ")";
    case Kind::AssignedFk: return "assigned " + element + "." + member + " := " + other;
    case Kind::AssignedAttr:
        if (constant) return "assigned " + element + "." + member + " := " + render_literal(*constant);
        return "assigned " + element + "." + member + " := " + other + "." + other_member;
    }
    return "?";
}

std::string ChaseTrace::to_log() const
{
    std::string out;
    for (const auto &e : entries)
        for (const auto &a : e.actions)
            out += "round " + std::to_string(e.round) + ": " + e.constraint + " @ " + e.assignment + " -> " +
                   a.describe() + "\n";
    return out;
}

std::size_t ChaseTrace::action_count() const
{
    std::size_t n = 0;
    for (const auto &e : entries)
        n += e.actions.size();
    return n;
}

namespace {

class Repairer
{
  public:
    Repairer(Instance &inst, std::size_t round, std::vector<ChaseAction> &log) : inst_(inst), round_(round), log_(log)
    {
    }

    // Gives the stuck foreign key of an undefined path a fresh target.
    void materialize_step(const Evaluated &stuck)
    {
        const auto &schema = inst_.schema();
        std::size_t target = schema.fk_target(stuck.stuck_fk);
        ElementId owner = stuck.stuck_at;
        ElementId fresh = inst_.add_fresh_element(target, round_);
        log_.push_back({ChaseAction::Kind::Created, schema.entities()[target], inst_.label_of(fresh), {}, {}, {}, {}});
        log_.push_back({ChaseAction::Kind::AssignedFk, {}, inst_.label_of(owner),
                        schema.foreign_keys()[stuck.stuck_fk].name, inst_.label_of(fresh), {}, {}});
        inst_.assign_fk(owner, stuck.stuck_fk, fresh);
    }

    void enforce(const CAtom &a, const Binding &b)
    {
        for (;;) {
            auto l = evaluate(inst_, a.lhs, b);
            auto r = evaluate(inst_, a.rhs, b);
            bool lu = l.kind == Evaluated::Kind::Undefined, ru = r.kind == Evaluated::Kind::Undefined;
            if (!lu && !ru) {
                settle(a, l, r);
                return;
            }
            if ((lu && l.stuck_fk == npos) || (ru && r.stuck_fk == npos))
                throw InstanceError("conclusion term has no value (undefined built-in result)");
            if (a.lhs.entity_valued()) {
                if (lu && !ru && l.stuck_step + 1 == a.lhs.fks.size()) {
                    assign_fk(l, r.element);
                    return;
                }
                if (ru && !lu && r.stuck_step + 1 == a.rhs.fks.size()) {
                    assign_fk(r, l.element);
                    return;
                }
            }
            materialize_step(lu ? l : r);
        }
    }

  private:
    void assign_fk(const Evaluated &stuck, ElementId target)
    {
        const auto &schema = inst_.schema();
        log_.push_back({ChaseAction::Kind::AssignedFk, {}, inst_.label_of(stuck.stuck_at),
                        schema.foreign_keys()[stuck.stuck_fk].name, inst_.label_of(target), {}, {}});
        inst_.assign_fk(stuck.stuck_at, stuck.stuck_fk, target);
    }

    void settle(const CAtom &a, const Evaluated &l, const Evaluated &r)
    {
        if (l.kind == Evaluated::Kind::Element) {
            if (inst_.same(l.element, r.element)) return;
            log_.push_back(
                {ChaseAction::Kind::Merged, {}, inst_.label_of(l.element), {}, inst_.label_of(r.element), {}, {}});
            inst_.merge_elements(l.element, r.element);
            return;
        }
        AttrValue lv = inst_.resolve(*l.value), rv = inst_.resolve(*r.value);
        if (lv == rv) return;
        const auto &schema = inst_.schema();
        bool l_cell = a.lhs.kind == Term::Kind::Path, r_cell = a.rhs.kind == Term::Kind::Path;
        if (!l_cell && !r_cell) throw ConstantClashError({"(constant)", lv.constant(), rv.constant()});
        const CTerm &cell_term = l_cell ? a.lhs : a.rhs;
        const Evaluated &cell = l_cell ? l : r;
        const Evaluated &other = l_cell ? r : l;
        const CTerm &other_term = l_cell ? a.rhs : a.lhs;
        ChaseAction act{ChaseAction::Kind::AssignedAttr, {}, inst_.label_of(cell.cell_element),
                        schema.attributes()[cell_term.attr].name, {}, {}, {}};
        if (other_term.kind == Term::Kind::Path) {
            act.other = inst_.label_of(other.cell_element);
            act.other_member = schema.attributes()[other_term.attr].name;
        } else {
            act.constant = inst_.resolve(*other.value).constant();
        }
        log_.push_back(act);
        inst_.assign_attr(cell.cell_element, cell_term.attr, *other.value);
    }

    Instance &inst_;
    std::size_t round_;
    std::vector<ChaseAction> &log_;
};

bool witnessed(const Instance &inst, const CConstraint &c, const Binding &b)
{
    bool found = false;
    Matcher m(inst, c.conclusion, c.var_entity, &equation_holds, false);
    m.run(b, c.universal_count, c.var_entity.size(), [&](const Binding &) {
        found = true;
        return false;
    });
    return found;
}

// Conclusion repair for one premise match; appends the actions to `log`
// before applying each so that a clash leaves the failing action recorded.
void repair(Instance &inst, const CConstraint &c, Binding b, std::size_t round, std::vector<ChaseAction> &log)
{
    if (witnessed(inst, c, b)) return;
    b.resize(c.var_entity.size(), ElementId{kNoElement});
    for (std::size_t s = c.universal_count; s < c.var_entity.size(); ++s) {
        ElementId fresh = inst.add_fresh_element(c.var_entity[s], round);
        log.push_back({ChaseAction::Kind::Created, inst.schema().entities()[c.var_entity[s]], inst.label_of(fresh), {},
                       {}, {}, {}});
        b[s] = fresh;
    }
    Repairer r(inst, round, log);
    for (const auto &a : c.conclusion)
        r.enforce(a, b);
}

struct Demand
{
    std::size_t constraint;
    const CTerm *path;
    ElementId element;
};

struct Fire
{
    std::size_t constraint;
    Binding binding;
};

void collect_paths(const CTerm &t, std::vector<const CTerm *> &out)
{
    if (t.kind == Term::Kind::Path && !t.fks.empty()) out.push_back(&t);
    for (const auto &a : t.arguments)
        collect_paths(a, out);
}

} // namespace

FireResult fire_once(Instance &inst, const Constraint &c, const std::vector<ElementId> &assignment, std::size_t round)
{
    CConstraint cc = compile(c, inst.schema());
    if (assignment.size() != cc.universal_count)
        throw std::invalid_argument("assignment must bind every universal variable of '" + c.label + "'");
    Binding b(assignment.begin(), assignment.end());
    for (auto &e : b)
        e = inst.canonical(e);
    FireResult result;
    repair(inst, cc, b, round, result.actions);
    return result;
}

ChaseResult chase(Instance pre, const std::vector<Constraint> &constraints, const ChaseConfig &config)
{
    if (config.max_rounds < 1) throw std::invalid_argument("max_rounds must be at least 1");
    if (config.require_weak_acyclicity) {
        auto wa = check_weak_acyclicity(constraints, pre.schema());
        if (!wa.acyclic) throw ChasePreconditionError("constraints are not weakly acyclic: " + wa.describe());
    }
    std::vector<CConstraint> compiled;
    compiled.reserve(constraints.size());
    for (const auto &c : constraints)
        compiled.push_back(compile(c, pre.schema()));

    std::vector<std::vector<const CTerm *>> premise_paths(compiled.size());
    for (std::size_t i = 0; i < compiled.size(); ++i)
        for (const auto &a : compiled[i].premise) {
            collect_paths(a.lhs, premise_paths[i]);
            collect_paths(a.rhs, premise_paths[i]);
        }

    ChaseResult result{ChaseStatus::Saturated, std::move(pre), {}, std::nullopt, 0};
    Instance &inst = result.instance;

    for (std::size_t round = 1;; ++round) {
        std::vector<Demand> demands;
        std::vector<Fire> fires;
        for (std::size_t ci = 0; ci < compiled.size(); ++ci) {
            const auto &c = compiled[ci];
            for (const auto *p : premise_paths[ci]) {
                Binding b(c.var_entity.size(), ElementId{kNoElement});
                for (auto e : inst.elements(c.var_entity[p->var])) {
                    b[p->var] = e;
                    if (evaluate(inst, *p, b).kind == Evaluated::Kind::Undefined) demands.push_back({ci, p, e});
                }
            }
            Matcher premise(inst, c.premise, c.var_entity, &premise_holds, true);
            Matcher conclusion(inst, c.conclusion, c.var_entity, &equation_holds, true);
            premise.run({}, 0, c.universal_count, [&](const Binding &b) {
                bool ok = false;
                conclusion.run(b, c.universal_count, c.var_entity.size(), [&](const Binding &) {
                    ok = true;
                    return false;
                });
                if (!ok) fires.push_back({ci, Binding(b.begin(), b.begin() + c.universal_count)});
                return true;
            });
        }
        if (demands.empty() && fires.empty()) return result;
        if (round > config.max_rounds) {
            result.status = ChaseStatus::Exhausted;
            return result;
        }

        auto record = [&](std::size_t ci, const std::string &assignment, auto &&apply) {
            TraceEntry entry{round, compiled[ci].label, assignment, {}};
            try {
                apply(entry.actions);
            } catch (const ConstantClashError &e) {
                result.trace.entries.push_back(std::move(entry));
                result.status = ChaseStatus::Failed;
                result.clash = e.clash();
                throw;
            }
            if (!entry.actions.empty()) result.trace.entries.push_back(std::move(entry));
        };

        try {
            for (const auto &f : fires) {
                const auto &c = compiled[f.constraint];
                if (c.is_tgd()) continue;
                record(f.constraint, describe_binding(inst, c, f.binding),
                       [&](std::vector<ChaseAction> &log) { repair(inst, c, f.binding, round, log); });
            }
            for (const auto &d : demands) {
                const auto &c = compiled[d.constraint];
                std::string assignment = "{" + c.var_names[d.path->var] + "=" + inst.export_id(d.element) + "}";
                record(d.constraint, assignment, [&](std::vector<ChaseAction> &log) {
                    Binding b(c.var_entity.size(), ElementId{kNoElement});
                    b[d.path->var] = inst.canonical(d.element);
                    Repairer r(inst, round, log);
                    for (;;) {
                        auto v = evaluate(inst, *d.path, b);
                        if (v.kind != Evaluated::Kind::Undefined) break;
                        r.materialize_step(v);
                    }
                });
            }
            for (const auto &f : fires) {
                const auto &c = compiled[f.constraint];
                if (!c.is_tgd()) continue;
                record(f.constraint, describe_binding(inst, c, f.binding),
                       [&](std::vector<ChaseAction> &log) { repair(inst, c, f.binding, round, log); });
            }
        } catch (const ConstantClashError &) {
            return result;
        }
        result.rounds = round;
    }
}

Instance replay(Instance pre, const ChaseTrace &trace)
{
    const auto &schema = pre.schema();
    auto element = [&](const std::string &label) {
        auto e = pre.find(label);
        if (!e) throw InstanceError("replay: unknown element '" + label + "'");
        return *e;
    };
    auto member = [&](ElementId e, const std::string &name) {
        auto m = schema.member(schema.entities()[pre.entity_of(e)], name);
        if (!m) throw InstanceError("replay: unknown member '" + name + "'");
        return m->index;
    };
    for (const auto &entry : trace.entries)
        for (const auto &a : entry.actions) {
            switch (a.kind) {
            case ChaseAction::Kind::Created: {
                auto e = schema.entity_index(a.entity);
                if (e == npos) throw InstanceError("replay: unknown entity '" + a.entity + "'");
                auto fresh = pre.add_fresh_element(e, entry.round);
                if (pre.label_of(fresh) != a.element)
                    throw InstanceError("replay diverged: created '" + pre.label_of(fresh) + "', trace says '" +
                                        a.element + "'");
                break;
            }
            case ChaseAction::Kind::Merged: pre.merge_elements(element(a.element), element(a.other)); break;
            case ChaseAction::Kind::AssignedFk: {
                auto e = element(a.element);
                pre.assign_fk(e, member(e, a.member), element(a.other));
                break;
            }
            case ChaseAction::Kind::AssignedAttr: {
                auto e = element(a.element);
                if (a.constant) {
                    pre.assign_attr(e, member(e, a.member), AttrValue(*a.constant));
                } else {
                    auto src = element(a.other);
                    pre.assign_attr(e, member(e, a.member), pre.attr_value(src, member(src, a.other_member)));
                }
                break;
            }
            }
        }
    return pre;
}

} // namespace catamerge

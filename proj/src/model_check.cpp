#include "catamerge/model_check.hpp"

#include "compiled.hpp"

namespace catamerge {

bool SatisfactionReport::violated(std::string_view label) const
{
    for (const auto &v : violations)
        if (v.constraint == label) return true;
    return false;
}

namespace {

using namespace detail;

// First element of `c`'s universal entities at which a premise path is
// undefined.
std::optional<ConstraintViolation> undefined_premise(const Instance &inst, const CConstraint &c)
{
    std::vector<const CTerm *> paths;
    std::function<void(const CTerm &)> collect = [&](const CTerm &t) {
        if (t.kind == Term::Kind::Path && !t.fks.empty()) paths.push_back(&t);
        for (const auto &a : t.arguments)
            collect(a);
    };
    for (const auto &a : c.premise) {
        collect(a.lhs);
        collect(a.rhs);
    }
    for (const auto *p : paths) {
        Binding b(c.var_entity.size(), ElementId{kNoElement});
        for (auto e : inst.elements(c.var_entity[p->var])) {
            b[p->var] = e;
            auto v = evaluate(inst, *p, b);
            if (v.kind != Evaluated::Kind::Undefined) continue;
            const auto &schema = inst.schema();
            return ConstraintViolation{c.label, "{" + c.var_names[p->var] + "=" + inst.export_id(e) + "}",
                                       "foreign key '" + schema.foreign_keys()[v.stuck_fk].name + "' of '" +
                                           inst.export_id(v.stuck_at) + "' has no value"};
        }
    }
    return std::nullopt;
}

} // namespace

SatisfactionReport check_model(const Instance &inst, const std::vector<Constraint> &constraints)
{
    SatisfactionReport report;
    for (const auto &source : constraints) {
        CConstraint c = compile(source, inst.schema());
        if (auto v = undefined_premise(inst, c)) {
            report.violations.push_back(*v);
            continue;
        }
        std::optional<ConstraintViolation> found;
        Matcher premise(inst, c.premise, c.var_entity, &premise_holds, true);
        Matcher conclusion(inst, c.conclusion, c.var_entity, &equation_holds, true);
        premise.run({}, 0, c.universal_count, [&](const Binding &b) {
            bool witnessed = false;
            conclusion.run(b, c.universal_count, c.var_entity.size(), [&](const Binding &) {
                witnessed = true;
                return false;
            });
            if (witnessed) return true;
            found = ConstraintViolation{c.label, describe_binding(inst, c, b), "no witness for the conclusion"};
            return false;
        });
        if (found) report.violations.push_back(*found);
    }
    return report;
}

} // namespace catamerge

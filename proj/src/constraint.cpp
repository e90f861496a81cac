#include "catamerge/constraint.hpp"

#include <map>
#include <optional>

#include "catamerge/printer.hpp"
#include "catamerge/schema.hpp"

namespace catamerge {

Term Term::path(std::string variable, std::vector<std::string> steps, SourceSpan span)
{
    Term t;
    t.kind = Kind::Path;
    t.variable = std::move(variable);
    t.steps = std::move(steps);
    t.span = span;
    return t;
}

Term Term::literal(Value v, SourceSpan span)
{
    Term t;
    t.kind = Kind::Constant;
    t.constant = std::move(v);
    t.span = span;
    return t;
}

Term Term::apply(std::string function, std::vector<Term> arguments, SourceSpan span)
{
    Term t;
    t.kind = Kind::Apply;
    t.function = std::move(function);
    t.arguments = std::move(arguments);
    t.span = span;
    return t;
}

bool Term::is_ground() const
{
    switch (kind) {
    case Kind::Path: return false;
    case Kind::Constant: return true;
    case Kind::Apply:
        for (const auto &a : arguments)
            if (!a.is_ground()) return false;
        return true;
    }
    return false;
}

bool operator==(const Term &a, const Term &b)
{
    if (a.kind != b.kind) return false;
    switch (a.kind) {
    case Term::Kind::Path: return a.variable == b.variable && a.steps == b.steps;
    case Term::Kind::Constant: return a.constant == b.constant;
    case Term::Kind::Apply: return a.function == b.function && a.arguments == b.arguments;
    }
    return false;
}

std::string_view to_string(ConstraintKind kind) { return kind == ConstraintKind::EGD ? "EGD" : "TGD"; }

ConstraintKind classify_constraint(const Constraint &c)
{
    return c.existentials.empty() ? ConstraintKind::EGD : ConstraintKind::TGD;
}

std::string Sort::describe() const
{
    if (is_entity()) return "entity " + entity();
    return std::string(to_string(base()));
}

namespace {

std::optional<BaseType> unify_base(BaseType a, BaseType b)
{
    if (a == b) return a;
    bool numeric_a = a == BaseType::Int || a == BaseType::Double;
    bool numeric_b = b == BaseType::Int || b == BaseType::Double;
    if (numeric_a && numeric_b) return BaseType::Double;
    return std::nullopt;
}

class Checker
{
  public:
    Checker(const Schema &schema, std::vector<TypeError> &errors) : schema_(schema), errors_(errors) { }

    void bind(const VariableDecl &v, bool existential)
    {
        if (env_.count(v.name)) {
            error("variable '" + v.name + "' is declared twice", v.span);
            return;
        }
        if (!schema_.has_entity(v.entity)) {
            error("variable '" + v.name + "' has unknown entity '" + v.entity + "'", v.span);
            return;
        }
        env_[v.name] = Binding{v.entity, existential};
    }

    std::optional<Sort> sort_of(const Term &t, bool allow_existentials, bool in_conclusion)
    {
        switch (t.kind) {
        case Term::Kind::Constant: return Sort{t.constant.type()};
        case Term::Kind::Path: {
            auto it = env_.find(t.variable);
            if (it == env_.end()) {
                error("unbound variable '" + t.variable + "'", t.span);
                return std::nullopt;
            }
            if (it->second.existential && !allow_existentials) {
                error("existential variable '" + t.variable + "' used in the premise", t.span);
                return std::nullopt;
            }
            try {
                Path p = resolve_steps(schema_, it->second.entity, t.steps);
                return path_codomain(schema_, p);
            } catch (const TypeMismatch &e) {
                error(std::string(e.what()) + " (in path starting at '" + t.variable + "')", t.span);
                return std::nullopt;
            }
        }
        case Term::Kind::Apply: {
            if (in_conclusion && !t.is_ground()) {
                error("function '" + t.function + "' in a conclusion may only be applied to constants", t.span);
                return std::nullopt;
            }
            std::vector<BaseType> types;
            bool ok = true;
            for (const auto &a : t.arguments) {
                auto s = sort_of(a, allow_existentials, in_conclusion);
                if (!s) {
                    ok = false;
                    continue;
                }
                if (s->is_entity()) {
                    error("function '" + t.function + "' applied to an entity-valued term", a.span);
                    ok = false;
                    continue;
                }
                types.push_back(s->base());
            }
            if (!ok) return std::nullopt;
            auto sig = typeside::resolve(t.function, types);
            if (!sig) {
                std::string args;
                for (auto ty : types)
                    args += (args.empty() ? "" : ", ") + std::string(to_string(ty));
                error("no built-in function '" + t.function + "(" + args + ")'", t.span);
                return std::nullopt;
            }
            return Sort{sig->result};
        }
        }
        return std::nullopt;
    }

    static std::string typed(const Term &t, const Sort &s) { return print_term(t) + " (" + s.describe() + ")"; }

    void check_relation(Comparison op, const Term &lhs, const Term &rhs, SourceSpan span, bool conclusion)
    {
        auto a = sort_of(lhs, conclusion, conclusion);
        auto b = sort_of(rhs, conclusion, conclusion);
        if (!a || !b) return;
        if (a->is_entity() || b->is_entity()) {
            if (op != Comparison::Eq) {
                error("predicate '" + std::string(to_string(op)) + "' is not defined on entities", span);
            } else if (!(a->is_entity() && b->is_entity() && a->entity() == b->entity())) {
                error("ill-typed equation: " + typed(lhs, *a) + " = " + typed(rhs, *b), span);
            }
            return;
        }
        auto common = unify_base(a->base(), b->base());
        if (!common) {
            error("ill-typed " + std::string(op == Comparison::Eq ? "equation" : "comparison") + ": " + typed(lhs, *a) +
                      " " + std::string(to_string(op)) + " " + typed(rhs, *b),
                  span);
            return;
        }
        if (conclusion && a->base() != b->base() && !lhs.is_ground() && !rhs.is_ground()) {
            error("conclusion equates " + a->describe() + " with " + b->describe() + "; only constants widen", span);
            return;
        }
        if (!typeside::comparison_defined(op, *common))
            error("predicate '" + std::string(to_string(op)) + "' is not defined on " + std::string(to_string(*common)),
                  span);
    }

  private:
    struct Binding
    {
        std::string entity;
        bool existential;
    };

    void error(std::string message, SourceSpan span) { errors_.push_back({std::move(message), span}); }

    const Schema &schema_;
    std::vector<TypeError> &errors_;
    std::map<std::string, Binding> env_;
};

} // namespace

std::vector<TypeError> typecheck(const Constraint &c, const Schema &schema)
{
    std::vector<TypeError> errors;
    Checker checker(schema, errors);
    for (const auto &v : c.universals)
        checker.bind(v, false);
    for (const auto &v : c.existentials)
        checker.bind(v, true);
    for (const auto &atom : c.premise)
        checker.check_relation(atom.op, atom.lhs, atom.rhs, atom.span, false);
    for (const auto &eq : c.conclusion)
        checker.check_relation(Comparison::Eq, eq.lhs, eq.rhs, eq.span, true);
    return errors;
}

Constraint canonicalize_entities(Constraint c, const Schema &schema)
{
    for (auto *vars : {&c.universals, &c.existentials})
        for (auto &v : *vars)
            if (auto name = schema.resolve_entity(v.entity)) v.entity = *name;
    return c;
}

} // namespace catamerge

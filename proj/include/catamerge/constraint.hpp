#pragma once

#include <string>
#include <variant>
#include <vector>

#include "catamerge/source.hpp"
#include "catamerge/typeside.hpp"
#include "catamerge/value.hpp"

namespace catamerge {

class Schema;

/// A term of the constraint and query language. Paths are written
/// `x.f.g.attr`; a bare variable is a path with no steps.
struct Term
{
    enum class Kind { Path, Constant, Apply };

    Kind kind = Kind::Constant;
    std::string variable;
    std::vector<std::string> steps;
    Value constant;
    std::string function;
    std::vector<Term> arguments;
    SourceSpan span;

    static Term path(std::string variable, std::vector<std::string> steps = {}, SourceSpan span = {});
    static Term literal(Value v, SourceSpan span = {});
    static Term apply(std::string function, std::vector<Term> arguments, SourceSpan span = {});

    bool is_variable() const { return kind == Kind::Path && steps.empty(); }
    bool is_ground() const;

    /// Structural equality; source spans are ignored.
    friend bool operator==(const Term &a, const Term &b);
};

/// Premise atom: `lhs op rhs`. Equations use Comparison::Eq.
struct Atom
{
    Comparison op = Comparison::Eq;
    Term lhs;
    Term rhs;
    SourceSpan span;

    friend bool operator==(const Atom &a, const Atom &b) { return a.op == b.op && a.lhs == b.lhs && a.rhs == b.rhs; }
};

struct Equation
{
    Term lhs;
    Term rhs;
    SourceSpan span;

    friend bool operator==(const Equation &a, const Equation &b) { return a.lhs == b.lhs && a.rhs == b.rhs; }
};

struct VariableDecl
{
    std::string name;
    std::string entity;
    SourceSpan span;

    friend bool operator==(const VariableDecl &a, const VariableDecl &b)
    {
        return a.name == b.name && a.entity == b.entity;
    }
};

/// Existential Horn clause
///   forall x:X ... where premise -> exists u:U ..., conclusion
/// Built-in predicates may appear only in the premise.
struct Constraint
{
    std::string label;
    std::vector<VariableDecl> universals;
    std::vector<Atom> premise;
    std::vector<VariableDecl> existentials;
    std::vector<Equation> conclusion;
    SourceSpan span;

    friend bool operator==(const Constraint &a, const Constraint &b)
    {
        return a.label == b.label && a.universals == b.universals && a.premise == b.premise &&
               a.existentials == b.existentials && a.conclusion == b.conclusion;
    }
};

enum class ConstraintKind { EGD, TGD };

std::string_view to_string(ConstraintKind kind);

ConstraintKind classify_constraint(const Constraint &c);

/// Either an entity name or a base type.
struct Sort
{
    std::variant<std::string, BaseType> value;

    bool is_entity() const { return value.index() == 0; }
    const std::string &entity() const { return std::get<0>(value); }
    BaseType base() const { return std::get<1>(value); }
    std::string describe() const;

    friend bool operator==(const Sort &, const Sort &) = default;
};

struct TypeError
{
    std::string message;
    SourceSpan span;
};

/// Type-checks against `schema`'s signature and the typeside. Entity names
/// in variable declarations must already be canonical names of `schema`.
std::vector<TypeError> typecheck(const Constraint &c, const Schema &schema);

/// Copy of `c` with variable sorts rewritten to canonical entity names
/// (resolving aliases); unknown names are left as-is for typecheck to report.
Constraint canonicalize_entities(Constraint c, const Schema &schema);

} // namespace catamerge

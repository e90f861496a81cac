#pragma once

// Index-resolved constraints and the premise join kernel shared by the
// chase, model checking and query evaluation.

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "catamerge/constraint.hpp"
#include "catamerge/instance.hpp"
#include "catamerge/schema.hpp"

namespace catamerge::detail {

struct CTerm
{
    Term::Kind kind = Term::Kind::Constant;
    std::size_t var = npos;
    std::vector<std::size_t> fks; // global fk indices
    std::size_t attr = npos;      // global attr index, npos for entity-valued paths
    Value constant;
    Builtin function = Builtin::Concat;
    std::vector<CTerm> arguments;
    Sort sort;
    const Term *source = nullptr;

    bool entity_valued() const { return sort.is_entity(); }
    /// Largest variable slot mentioned, or npos for ground terms.
    std::size_t max_var() const;
    void collect_vars(std::vector<std::size_t> &out) const;
};

struct CAtom
{
    Comparison op = Comparison::Eq;
    CTerm lhs;
    CTerm rhs;
    std::size_t max_var = npos;
};

struct CConstraint
{
    std::string label;
    std::size_t universal_count = 0;
    std::vector<std::size_t> var_entity; // universals then existentials
    std::vector<std::string> var_names;
    std::vector<CAtom> premise;
    std::vector<CAtom> conclusion;
    const Constraint *source = nullptr;

    bool is_tgd() const { return var_entity.size() > universal_count; }
};

/// Throws std::invalid_argument when `c` does not type-check.
CConstraint compile(const Constraint &c, const Schema &schema);

/// Compiles a term over explicitly given variable sorts (query projections).
CTerm compile_term(const Term &t, const Schema &schema, const std::vector<std::string> &names,
                   const std::vector<std::size_t> &entities);

using Binding = std::vector<ElementId>; // slot -> element (kNoElement when unbound)

struct Evaluated
{
    enum class Kind { Element, Value, Undefined };
    Kind kind = Kind::Undefined;
    ElementId element{};
    std::optional<AttrValue> value; // raw cell content (unresolved) for attribute paths
    ElementId cell_element{};       // owner of the attribute cell, for attribute paths
    ElementId stuck_at{};           // Undefined: element whose fk is unvalued
    std::size_t stuck_fk = npos;
    std::size_t stuck_step = 0;     // index into fks of the missing step
    bool computed = false;          // value came from a builtin (undefined result => Undefined with stuck_fk npos)
};

Evaluated evaluate(const Instance &inst, const CTerm &t, const Binding &binding);

/// Premise semantics: both sides defined and constant (labelled nulls never
/// match); entity equality by class.
bool premise_holds(const Instance &inst, const CAtom &a, const Binding &binding);

/// Conclusion semantics: entity equality by class, value equality by
/// resolved constant or by null class.
bool equation_holds(const Instance &inst, const CAtom &a, const Binding &binding);

/// Enumerates assignments of slots [first, last) extending `binding`, in
/// lexicographic order of element ids, such that every atom in `atoms` whose
/// variables are all bound holds under `holds`. Atoms are checked as soon as
/// their largest slot is bound. `use_index` enables hash lookups for
/// base-typed equalities (only valid while the instance is not mutated).
class Matcher
{
  public:
    using Holds = bool (*)(const Instance &, const CAtom &, const Binding &);

    Matcher(const Instance &inst, std::span<const CAtom> atoms, std::span<const std::size_t> var_entity, Holds holds,
            bool use_index);

    /// Calls `visit` for each match; stops early when it returns false.
    void run(Binding binding, std::size_t first, std::size_t last, const std::function<bool(const Binding &)> &visit);

  private:
    struct Pin
    {
        enum class Kind { None, Element, Index } kind = Kind::None;
        const CTerm *key = nullptr;   // term over earlier slots
        const CTerm *probe = nullptr; // term rooted at the slot itself (Index)
    };

    bool search(Binding &binding, std::size_t slot, std::size_t last,
                const std::function<bool(const Binding &)> &visit);
    std::vector<ElementId> candidates(const Binding &binding, std::size_t slot);
    Pin plan_slot(std::size_t slot) const;

    const Instance &inst_;
    std::span<const CAtom> atoms_;
    std::span<const std::size_t> var_entity_;
    Holds holds_;
    bool use_index_;
    std::vector<Pin> pins_;
    std::vector<std::vector<const CAtom *>> checks_; // atoms to test once slot is bound
    std::vector<const CAtom *> ground_;
    std::vector<std::vector<ElementId>> all_;
    std::vector<std::optional<std::unordered_map<std::string, std::vector<ElementId>>>> index_;
    bool strict_values_;
};

/// Stable key for hashing a resolved attribute value.
std::string value_key(const Instance &inst, const AttrValue &v);

std::string describe_binding(const Instance &inst, const CConstraint &c, const Binding &b);

} // namespace catamerge::detail

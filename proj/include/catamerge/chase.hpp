#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "catamerge/constraint.hpp"
#include "catamerge/instance.hpp"

namespace catamerge {

struct ChaseConfig
{
    std::size_t max_rounds = 10000;
    bool require_weak_acyclicity = true;
    bool deterministic_order = true; // the only supported mode
};

/// One primitive change to an instance. Elements are named by their labels,
/// which are unique within an instance, so a trace can be replayed.
struct ChaseAction
{
    enum class Kind { Created, Merged, AssignedFk, AssignedAttr };

    Kind kind = Kind::Created;
    std::string entity;                 // Created
    std::string element;                // subject element
    std::string member;                 // fk or attribute name
    std::string other;                  // Merged / AssignedFk target, or the source cell's element
    std::string other_member;           // AssignedAttr from another cell
    std::optional<Value> constant;      // AssignedAttr from a constant

    std::string describe() const;
    friend bool operator==(const ChaseAction &, const ChaseAction &) = default;
};

struct TraceEntry
{
    std::size_t round = 0;
    std::string constraint;
    std::string assignment;
    std::vector<ChaseAction> actions;

    friend bool operator==(const TraceEntry &, const TraceEntry &) = default;
};

struct ChaseTrace
{
    std::vector<TraceEntry> entries;

    /// `round N: <constraint> @ <assignment> -> <action>`, one line per action.
    std::string to_log() const;
    std::size_t action_count() const;
};

enum class ChaseStatus { Saturated, Failed, Exhausted };

std::string_view to_string(ChaseStatus s);

struct ChaseResult
{
    ChaseStatus status = ChaseStatus::Saturated;
    Instance instance;
    ChaseTrace trace;
    std::optional<ConstantClash> clash; // Failed
    std::size_t rounds = 0;             // rounds that changed the instance
};

/// The constraint set is not weakly acyclic and the configuration demands it.
class ChasePreconditionError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

/// Round-based chase. Each round matches every constraint against the
/// start-of-round instance (declaration order, lexicographic assignments),
/// then applies EGD repairs, then materializes missing premise foreign keys,
/// then applies TGD repairs. Each repair is re-checked just before it is
/// applied. Throws std::invalid_argument when a constraint does not
/// type-check against the instance's schema.
ChaseResult chase(Instance pre, const std::vector<Constraint> &constraints, const ChaseConfig &config = {});

struct FireResult
{
    std::vector<ChaseAction> actions;
    bool noop() const { return actions.empty(); }
};

/// Repairs one premise match. `assignment` lists the universal variables in
/// declaration order. Throws ConstantClashError.
FireResult fire_once(Instance &inst, const Constraint &c, const std::vector<ElementId> &assignment,
                     std::size_t round = 0);

/// Re-applies a trace. A trace that ended in a clash rethrows it.
Instance replay(Instance pre, const ChaseTrace &trace);

enum class UniversalityVerdict { Isomorphic, CounterExample };

struct UniversalityResult
{
    UniversalityVerdict verdict = UniversalityVerdict::Isomorphic;
    std::string reason; // CounterExample

    bool isomorphic() const { return verdict == UniversalityVerdict::Isomorphic; }
};

/// Looks for an isomorphism between two instances over the same schema that
/// fixes every user-declared element and is a bijection on labelled nulls.
/// Intended for desk-scale instances.
UniversalityResult verify_universality(const Instance &sat, const Instance &alt);

} // namespace catamerge

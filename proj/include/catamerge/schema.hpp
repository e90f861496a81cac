#pragma once

#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "catamerge/constraint.hpp"
#include "catamerge/source.hpp"
#include "catamerge/value.hpp"

namespace catamerge {

inline constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

struct ForeignKey
{
    std::string name;
    std::string source;
    std::string target;
    SourceSpan span;
    SourceSpan source_span;
    SourceSpan target_span;

    friend bool operator==(const ForeignKey &a, const ForeignKey &b)
    {
        return a.name == b.name && a.source == b.source && a.target == b.target;
    }
};

struct Attribute
{
    std::string name;
    std::string source;
    BaseType type = BaseType::String;
    SourceSpan span;
    SourceSpan source_span;

    friend bool operator==(const Attribute &a, const Attribute &b)
    {
        return a.name == b.name && a.source == b.source && a.type == b.type;
    }
};

/// Result of looking a name up in an entity's member namespace.
struct Member
{
    enum class Kind { ForeignKey, Attribute };
    Kind kind;
    std::size_t index; // into foreign_keys() or attributes()
};

/// A presentation of a first-order theory: entities, foreign keys (functions
/// between entities), attributes (functions into base types) and existential
/// Horn clauses. Immutable once built. Construction tolerates ill-formed
/// input; validate_schema reports the problems.
class Schema
{
  public:
    Schema() = default;
    Schema(std::string name, std::vector<std::string> entities, std::vector<ForeignKey> foreign_keys,
           std::vector<Attribute> attributes, std::vector<Constraint> constraints = {});

    const std::string &name() const { return name_; }
    const std::vector<std::string> &entities() const { return entities_; }
    const std::vector<ForeignKey> &foreign_keys() const { return foreign_keys_; }
    const std::vector<Attribute> &attributes() const { return attributes_; }
    const std::vector<Constraint> &constraints() const { return constraints_; }

    std::size_t entity_index(std::string_view name) const;
    bool has_entity(std::string_view name) const { return entity_index(name) != npos; }

    /// Canonical entity name for `name`, also accepting registered aliases.
    std::optional<std::string> resolve_entity(std::string_view name) const;

    std::optional<Member> member(std::string_view entity, std::string_view name) const;

    /// Indices (into foreign_keys()/attributes()) of the members whose source
    /// is entity `e`, in declaration order. Their position in this list is the
    /// member's slot.
    const std::vector<std::size_t> &foreign_keys_of(std::size_t e) const { return fks_of_[e]; }
    const std::vector<std::size_t> &attributes_of(std::size_t e) const { return attrs_of_[e]; }
    std::size_t fk_slot(std::size_t fk) const { return fk_slot_[fk]; }
    std::size_t attr_slot(std::size_t attr) const { return attr_slot_[attr]; }
    std::size_t fk_source(std::size_t fk) const { return fk_source_[fk]; }
    std::size_t fk_target(std::size_t fk) const { return fk_target_[fk]; }
    std::size_t attr_source(std::size_t attr) const { return attr_source_[attr]; }

    /// Extra entity names accepted by resolve_entity (used by combined
    /// schemas so constraints can say `IfcSensor` for `IFC_IfcSensor`).
    const std::map<std::string, std::string, std::less<>> &entity_aliases() const { return aliases_; }
    Schema with_aliases(std::map<std::string, std::string, std::less<>> aliases) const;

    Schema with_constraints(std::vector<Constraint> constraints) const;

    /// Structural equality; aliases and source spans are ignored.
    friend bool operator==(const Schema &a, const Schema &b);

  private:
    void build_indexes();

    std::string name_;
    std::vector<std::string> entities_;
    std::vector<ForeignKey> foreign_keys_;
    std::vector<Attribute> attributes_;
    std::vector<Constraint> constraints_;
    std::map<std::string, std::string, std::less<>> aliases_;

    std::map<std::string, std::size_t, std::less<>> entity_index_;
    std::map<std::pair<std::string, std::string>, Member> members_;
    std::vector<std::vector<std::size_t>> fks_of_;
    std::vector<std::vector<std::size_t>> attrs_of_;
    std::vector<std::size_t> fk_slot_, attr_slot_, fk_source_, fk_target_, attr_source_;
};

/// root entity, a chain of foreign keys, optionally ending in an attribute.
struct Path
{
    std::string root;
    std::vector<std::string> foreign_keys;
    std::optional<std::string> attribute;

    static Path identity(std::string entity) { return Path{std::move(entity), {}, std::nullopt}; }

    friend bool operator==(const Path &, const Path &) = default;
};

std::string to_string(const Path &p);

class TypeMismatch : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

/// Codomain of `p`; throws TypeMismatch when a step does not resolve.
Sort path_codomain(const Schema &schema, const Path &p);

/// Splits dotted `steps` starting at entity `root` into foreign keys and an
/// optional terminal attribute. Throws TypeMismatch on failure.
Path resolve_steps(const Schema &schema, std::string root, const std::vector<std::string> &steps);

/// p then q. Requires p to end at an entity equal to q's root.
Path compose_paths(const Schema &schema, const Path &p, const Path &q);

} // namespace catamerge

#pragma once

#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "catamerge/extension.hpp"
#include "catamerge/instance.hpp"
#include "catamerge/schema.hpp"

namespace catamerge {

class IntegrationError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

/// A class's merged signature stays ambiguous after origin prefixing.
class IdentificationCollision : public IntegrationError
{
  public:
    using IntegrationError::IntegrationError;
};

/// Where a combined symbol came from.
struct Origin
{
    std::string schema;
    std::string entity;
    std::string member; // empty for entities

    friend auto operator<=>(const Origin &, const Origin &) = default;
};

/// The colimit of the included schemas along the identifications, with
/// provenance in both directions.
struct CombinedSchema
{
    std::shared_ptr<const Schema> schema;
    std::string extension;
    std::vector<std::string> includes;
    /// Identification classes with more than one member, by combined name.
    std::map<std::string, std::vector<EntityRef>> classes;

    std::map<Origin, std::string> entity_of;                          // origin entity -> combined entity
    std::map<Origin, std::string> member_of;                          // origin member -> combined member name
    std::map<std::string, std::vector<Origin>> entity_origins;        // combined entity -> origins
    std::map<std::pair<std::string, std::string>, Origin> member_origin; // (combined entity, member) -> origin

    std::string combined_entity(const std::string &schema, const std::string &entity) const;
    std::string combined_member(const std::string &schema, const std::string &entity, const std::string &member) const;

    /// Schemas a combined symbol descends from.
    std::set<std::string> entity_schemas(const std::string &entity) const;
    std::string member_schema(const std::string &entity, const std::string &member) const;
};

/// Builds the combined schema. Non-identified entities are renamed
/// `<Schema>_<Entity>`; each identification class takes the name of its
/// first-mentioned member and the union of its members' keys and attributes,
/// prefixing member names that occur in more than one origin. Source
/// constraints are imported (relabelled `<Schema>.<label>`) followed by the
/// bridge constraints. Bridge constraints are attached as written, with entity
/// aliases resolved; type-check them with typecheck().
CombinedSchema combine_schemas(const ExtensionSpec &x, const std::map<std::string, Schema, std::less<>> &schemas);

/// Disjoint union of the source instances over the combined schema. Element
/// `id` of schema S becomes `S.id`. Missing sources count as empty.
Instance sigma_insert(const CombinedSchema &c, const std::map<std::string, const Instance *> &sources);

/// Restricts a combined instance to one source schema. Each element class
/// becomes one row, labelled by its least original id from that schema when
/// it has one, otherwise by its export id.
Instance delta_project(const CombinedSchema &c, const Instance &sat, const std::shared_ptr<const Schema> &target);

struct RoundTripRow
{
    std::string table;
    std::size_t rows_in = 0;
    std::size_t rows_recovered = 0;
    std::size_t attributes_gained = 0;
    std::size_t attributes_lost = 0;
    std::size_t new_rows = 0;
};

struct RoundTripReport
{
    std::string schema;
    std::vector<RoundTripRow> tables;

    const RoundTripRow *table(std::string_view name) const;
    std::string render() const;
};

/// Cell-wise comparison matched by row id: gained counts cells that were null
/// and are now constant, lost counts constants that disappeared or changed.
RoundTripReport roundtrip_report(const Instance &original, const Instance &recovered);

} // namespace catamerge

#pragma once

#include <string>
#include <vector>

#include "catamerge/constraint.hpp"
#include "catamerge/instance.hpp"

namespace catamerge {

struct Projection
{
    std::string column;
    Term term;
    SourceSpan span;

    friend bool operator==(const Projection &a, const Projection &b)
    {
        return a.column == b.column && a.term == b.term;
    }
};

/// `simple` conjunctive query: a filtered cross product of the from-bindings
/// with one output column per projection.
struct QuerySpec
{
    std::string name;
    std::string target; // extension (or schema) the query is stated against
    std::vector<VariableDecl> from;
    std::vector<Atom> where; // equations only
    std::vector<Projection> attributes;
    SourceSpan span;

    friend bool operator==(const QuerySpec &a, const QuerySpec &b)
    {
        return a.name == b.name && a.target == b.target && a.from == b.from && a.where == b.where &&
               a.attributes == b.attributes;
    }
};

std::vector<TypeError> typecheck_query(const QuerySpec &q, const Schema &schema);

class QueryError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

struct ResultTable
{
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    std::string to_csv() const;
    std::string to_text() const;

    friend bool operator==(const ResultTable &, const ResultTable &) = default;
};

/// Marker for labelled nulls and undefined values in result cells.
inline constexpr std::string_view kNullMarker = "-";

/// Rows come out sorted by the export ids of their binding tuples. Throws
/// QueryError when the query does not type-check against `inst`'s schema.
ResultTable evaluate(const QuerySpec &q, const Instance &inst);

/// Renders one projection term for a full binding of q.from, in order.
std::string render_cell(const Instance &inst, const QuerySpec &q, const Term &term,
                        const std::vector<ElementId> &binding);

struct JoinStep
{
    std::string variable;
    std::string entity;
    std::size_t cardinality = 0;   // elements of the entity
    std::size_t input_rows = 0;    // partial bindings before this step
    std::vector<std::string> filters; // where-atoms checked at this step
    std::size_t output_rows = 0;   // partial bindings after filtering
};

struct JoinPlan
{
    std::vector<JoinStep> steps;
    bool contradiction = false; // statically empty
    std::string contradiction_reason;
    std::size_t result_rows = 0;

    std::string render() const;
};

JoinPlan explain(const QuerySpec &q, const Instance &inst);

} // namespace catamerge

#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "catamerge/constraint.hpp"
#include "catamerge/extension.hpp"
#include "catamerge/instance.hpp"
#include "catamerge/integrator.hpp"
#include "catamerge/query.hpp"
#include "catamerge/schema.hpp"
#include "catamerge/source.hpp"

namespace catamerge {

template <class T> struct ParseResult
{
    std::optional<T> value;
    std::vector<Diagnostic> diagnostics;

    bool ok() const { return value.has_value() && !has_errors(diagnostics); }
};

/// Each parse_* function expects a document holding exactly one block of the
/// corresponding kind. Unlabelled constraints are labelled `C<k>` by position.
ParseResult<Schema> parse_schema(const SourceDocument &doc);

/// A single constraint resolved and type-checked against `schema`.
ParseResult<Constraint> parse_constraint(const std::string &text, const Schema &schema);

ParseResult<Instance> parse_instance(const SourceDocument &doc, std::shared_ptr<const Schema> schema);

/// Bridge constraints are type-checked against the combined signature.
ParseResult<ExtensionSpec> parse_extension(const SourceDocument &doc,
                                           const std::map<std::string, Schema, std::less<>> &schemas);

ParseResult<QuerySpec> parse_query(const SourceDocument &doc, const Schema &combined);

/// Everything declared across a set of documents, elaborated in dependency
/// order: schemas, extensions (with their combined schemas), instances over a
/// schema or an extension, then queries.
struct Workspace
{
    std::vector<Diagnostic> diagnostics;

    std::map<std::string, Schema, std::less<>> schemas;
    std::map<std::string, std::shared_ptr<const Schema>, std::less<>> schema_ptrs;
    std::map<std::string, ExtensionSpec, std::less<>> extensions;
    std::map<std::string, CombinedSchema, std::less<>> combined;
    std::map<std::string, Instance, std::less<>> instances;
    std::map<std::string, QuerySpec, std::less<>> queries;

    std::vector<std::string> schema_order, extension_order, instance_order, query_order;

    bool ok() const { return !has_errors(diagnostics); }
};

Workspace load_workspace(const std::vector<SourceDocument> &docs);

} // namespace catamerge

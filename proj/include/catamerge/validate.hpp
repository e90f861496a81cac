#pragma once

#include <map>
#include <string>
#include <vector>

#include "catamerge/extension.hpp"
#include "catamerge/schema.hpp"

namespace catamerge {

struct Violation
{
    std::string subject; // offending declaration name
    std::string message;
    SourceSpan span;
};

struct ValidationReport
{
    std::vector<Violation> violations;

    bool ok() const { return violations.empty(); }
    bool mentions(std::string_view subject) const;
};

ValidationReport validate_schema(const Schema &s);

/// Structural checks on an extension against its included schemas:
/// includes resolve, identified entities exist, no same-schema
/// identifications. Bridge constraints are checked by combine_schemas.
ValidationReport validate_extension(const ExtensionSpec &x, const std::map<std::string, Schema, std::less<>> &schemas);

} // namespace catamerge

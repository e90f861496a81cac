#pragma once

#include <string>
#include <vector>

#include "catamerge/constraint.hpp"
#include "catamerge/source.hpp"

namespace catamerge {

struct EntityRef
{
    std::string schema;
    std::string entity;
    SourceSpan span;

    std::string qualified() const { return schema + "." + entity; }

    friend bool operator==(const EntityRef &a, const EntityRef &b)
    {
        return a.schema == b.schema && a.entity == b.entity;
    }
};

/// `left ≅ right`: both entities denote the same table in the combined theory.
struct Identification
{
    EntityRef left;
    EntityRef right;

    friend bool operator==(const Identification &, const Identification &) = default;
};

/// A theory extension: included schemas glued along entity identifications,
/// plus bridge constraints over the combined signature.
struct ExtensionSpec
{
    std::string name;
    std::vector<std::string> includes;
    std::vector<Identification> identifications;
    std::vector<Constraint> constraints;

    friend bool operator==(const ExtensionSpec &, const ExtensionSpec &) = default;
};

} // namespace catamerge

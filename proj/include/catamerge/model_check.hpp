#pragma once

#include <string>
#include <vector>

#include "catamerge/constraint.hpp"
#include "catamerge/instance.hpp"

namespace catamerge {

struct ConstraintViolation
{
    std::string constraint;
    std::string assignment; // `{x=id, ...}`
    std::string reason;
};

struct SatisfactionReport
{
    /// At most one entry per violated constraint, in input order.
    std::vector<ConstraintViolation> violations;

    bool satisfied() const { return violations.empty(); }
    bool violated(std::string_view label) const;
};

/// Checks every constraint against `inst`. A premise path that cannot be
/// evaluated because a foreign key has no value counts as a violation: the
/// instance is not yet a model of the schema.
SatisfactionReport check_model(const Instance &inst, const std::vector<Constraint> &constraints);

} // namespace catamerge

#pragma once

#include <string>

#include "catamerge/constraint.hpp"
#include "catamerge/extension.hpp"
#include "catamerge/instance.hpp"
#include "catamerge/query.hpp"
#include "catamerge/schema.hpp"

namespace catamerge {

std::string print_term(const Term &t);
std::string print_atom(const Atom &a);
std::string print_constraint(const Constraint &c);

/// Deterministic DSL renderings; parsing the output yields an equal value.
/// Instances print one row per element class, labelled by its export id;
/// labelled nulls shared by several cells print as `null:<tag>`.
std::string print_canonical(const Schema &s);
std::string print_canonical(const Instance &i);
std::string print_canonical(const ExtensionSpec &x);
std::string print_canonical(const QuerySpec &q);

/// Row ids print bare when they are dotted identifiers, quoted otherwise.
std::string print_row_id(const std::string &id);

} // namespace catamerge

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "catamerge/instance.hpp"

namespace catamerge {

/// RFC 4180 field quoting: fields containing a comma, quote, CR or LF are
/// wrapped in quotes with inner quotes doubled.
std::string csv_escape(std::string_view field);

/// Comma-joined escaped fields terminated by "\n".
std::string csv_line(const std::vector<std::string> &fields);

/// One row per element class: id, then foreign keys (target ids), then
/// attributes. Labelled nulls and unset keys are empty cells.
std::string entity_csv(const Instance &inst, std::size_t entity);

} // namespace catamerge

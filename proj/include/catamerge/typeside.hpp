#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "catamerge/value.hpp"

namespace catamerge {

enum class Builtin { Levenshtein, Concat, AddInt, SubInt, MulInt, DivInt, AddDouble, SubDouble, MulDouble, DivDouble };

struct FunctionSignature
{
    Builtin id;
    std::string_view name;
    std::vector<BaseType> arguments;
    BaseType result;
};

enum class Comparison { Eq, Lt, Gt, Le, Ge };

std::string_view to_string(Comparison op);
std::optional<Comparison> comparison_from_symbol(std::string_view symbol);

/// The fixed typeside: String, Int, Double, Bool plus a small function
/// library. User-defined types and functions are not supported.
namespace typeside {

const std::vector<FunctionSignature> &functions();

/// Exact signature match wins; otherwise Int arguments may widen to Double
/// provided exactly one signature remains.
std::optional<FunctionSignature> resolve(std::string_view name, std::span<const BaseType> argument_types);

bool is_function_name(std::string_view name);

/// Whether `op` is defined on operands of `type`. Equality is defined on all
/// base types, orderings on Int and Double only.
bool comparison_defined(Comparison op, BaseType type);

/// Arguments must already be coerced to the signature's argument types.
/// Returns nullopt for undefined results (integer division by zero).
std::optional<Value> apply(Builtin id, std::span<const Value> arguments);

bool compare(Comparison op, const Value &lhs, const Value &rhs);

std::int64_t levenshtein(std::string_view a, std::string_view b);

} // namespace typeside
} // namespace catamerge

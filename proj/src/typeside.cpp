#include "catamerge/typeside.hpp"

#include <algorithm>

namespace catamerge {

std::string_view to_string(Comparison op)
{
    switch (op) {
    case Comparison::Eq: return "=";
    case Comparison::Lt: return "<";
    case Comparison::Gt: return ">";
    case Comparison::Le: return "<=";
    case Comparison::Ge: return ">=";
    }
    return "?";
}

std::optional<Comparison> comparison_from_symbol(std::string_view symbol)
{
    if (symbol == "=") return Comparison::Eq;
    if (symbol == "<") return Comparison::Lt;
    if (symbol == ">") return Comparison::Gt;
    if (symbol == "<=") return Comparison::Le;
    if (symbol == ">=") return Comparison::Ge;
    return std::nullopt;
}

namespace typeside {

const std::vector<FunctionSignature> &functions()
{
    using enum BaseType;
    static const std::vector<FunctionSignature> table = {
        {Builtin::Levenshtein, "levenshtein", {String, String}, Int},
        {Builtin::Concat, "concat", {String, String}, String},
        {Builtin::AddInt, "+", {Int, Int}, Int},
        {Builtin::SubInt, "-", {Int, Int}, Int},
        {Builtin::MulInt, "*", {Int, Int}, Int},
        {Builtin::DivInt, "/", {Int, Int}, Int},
        {Builtin::AddDouble, "+", {Double, Double}, Double},
        {Builtin::SubDouble, "-", {Double, Double}, Double},
        {Builtin::MulDouble, "*", {Double, Double}, Double},
        {Builtin::DivDouble, "/", {Double, Double}, Double},
    };
    return table;
}

bool is_function_name(std::string_view name)
{
    return std::ranges::any_of(functions(), [&](const auto &f) { return f.name == name; });
}

std::optional<FunctionSignature> resolve(std::string_view name, std::span<const BaseType> argument_types)
{
    std::vector<const FunctionSignature *> widened;
    for (const auto &sig : functions()) {
        if (sig.name != name || sig.arguments.size() != argument_types.size()) continue;
        if (std::ranges::equal(sig.arguments, argument_types)) return sig;
        bool ok = true;
        for (std::size_t i = 0; i < argument_types.size(); ++i) {
            bool same = sig.arguments[i] == argument_types[i];
            bool widens = sig.arguments[i] == BaseType::Double && argument_types[i] == BaseType::Int;
            ok = ok && (same || widens);
        }
        if (ok) widened.push_back(&sig);
    }
    if (widened.size() == 1) return *widened.front();
    return std::nullopt;
}

bool comparison_defined(Comparison op, BaseType type)
{
    if (op == Comparison::Eq) return true;
    return type == BaseType::Int || type == BaseType::Double;
}

std::int64_t levenshtein(std::string_view a, std::string_view b)
{
    std::vector<std::int64_t> row(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j)
        row[j] = static_cast<std::int64_t>(j);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        std::int64_t diagonal = row[0];
        row[0] = static_cast<std::int64_t>(i);
        for (std::size_t j = 1; j <= b.size(); ++j) {
            std::int64_t above = row[j];
            std::int64_t substitution = diagonal + (a[i - 1] == b[j - 1] ? 0 : 1);
            row[j] = std::min({above + 1, row[j - 1] + 1, substitution});
            diagonal = above;
        }
    }
    return row[b.size()];
}

std::optional<Value> apply(Builtin id, std::span<const Value> args)
{
    switch (id) {
    case Builtin::Levenshtein: return Value::integer(levenshtein(args[0].as_string(), args[1].as_string()));
    case Builtin::Concat: return Value::string(args[0].as_string() + args[1].as_string());
    // wrap-around on overflow rather than UB
    case Builtin::AddInt:
        return Value::integer(static_cast<std::int64_t>(static_cast<std::uint64_t>(args[0].as_int()) +
                                                        static_cast<std::uint64_t>(args[1].as_int())));
    case Builtin::SubInt:
        return Value::integer(static_cast<std::int64_t>(static_cast<std::uint64_t>(args[0].as_int()) -
                                                        static_cast<std::uint64_t>(args[1].as_int())));
    case Builtin::MulInt:
        return Value::integer(static_cast<std::int64_t>(static_cast<std::uint64_t>(args[0].as_int()) *
                                                        static_cast<std::uint64_t>(args[1].as_int())));
    case Builtin::DivInt:
        if (args[1].as_int() == 0) return std::nullopt;
        if (args[1].as_int() == -1) return Value::integer(static_cast<std::int64_t>(0 - static_cast<std::uint64_t>(args[0].as_int())));
        return Value::integer(args[0].as_int() / args[1].as_int());
    case Builtin::AddDouble: return Value::real(args[0].as_double() + args[1].as_double());
    case Builtin::SubDouble: return Value::real(args[0].as_double() - args[1].as_double());
    case Builtin::MulDouble: return Value::real(args[0].as_double() * args[1].as_double());
    case Builtin::DivDouble:
        if (args[1].as_double() == 0.0) return std::nullopt;
        return Value::real(args[0].as_double() / args[1].as_double());
    }
    return std::nullopt;
}

bool compare(Comparison op, const Value &lhs, const Value &rhs)
{
    BaseType t = lhs.type() == BaseType::Double || rhs.type() == BaseType::Double ? BaseType::Double : lhs.type();
    Value a = lhs.coerced_to(t), b = rhs.coerced_to(t);
    if (a.type() != b.type()) return false;
    switch (op) {
    case Comparison::Eq: return a == b;
    case Comparison::Lt: return a < b;
    case Comparison::Gt: return a > b;
    case Comparison::Le: return a <= b;
    case Comparison::Ge: return a >= b;
    }
    return false;
}

} // namespace typeside
} // namespace catamerge

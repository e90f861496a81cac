#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace catamerge {

enum class BaseType { String, Int, Double, Bool };

std::string_view to_string(BaseType type);
std::optional<BaseType> base_type_from_name(std::string_view name);

/// A typeside constant. Doubles are normalized to six decimals on
/// construction so that equality is exact bit equality of the normalized
/// value (18.68 parsed twice always compares equal).
class Value
{
  public:
    using Storage = std::variant<std::string, std::int64_t, double, bool>;

    Value() : data_(std::int64_t{0}) { }
    static Value string(std::string s) { return Value(Storage(std::move(s))); }
    static Value integer(std::int64_t i) { return Value(Storage(i)); }
    static Value real(double d);
    static Value boolean(bool b) { return Value(Storage(b)); }

    BaseType type() const;
    const Storage &data() const { return data_; }

    const std::string &as_string() const { return std::get<std::string>(data_); }
    std::int64_t as_int() const { return std::get<std::int64_t>(data_); }
    double as_double() const { return std::get<double>(data_); }
    bool as_bool() const { return std::get<bool>(data_); }

    /// Int -> Double widening; identity otherwise.
    Value coerced_to(BaseType type) const;

    friend bool operator==(const Value &, const Value &) = default;
    friend auto operator<=>(const Value &a, const Value &b) { return a.data_ <=> b.data_; }

  private:
    explicit Value(Storage data) : data_(std::move(data)) { }
    Storage data_;
};

double normalize_double(double d);

/// Minimal decimal digits with at least one fractional digit: 26 -> "26.0",
/// 18.68 -> "18.68".
std::string render_double(double d);

/// Plain rendering used in result tables and CSV cells (strings unquoted).
std::string render_plain(const Value &v);

/// DSL literal rendering (strings quoted and escaped, doubles always carry a
/// decimal point so they re-lex as doubles).
std::string render_literal(const Value &v);

std::string quote_string(std::string_view s);

} // namespace catamerge

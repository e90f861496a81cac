#include "catamerge/value.hpp"

#include <cmath>
#include <cstdio>

namespace catamerge {

std::string_view to_string(BaseType type)
{
    switch (type) {
    case BaseType::String: return "String";
    case BaseType::Int: return "Int";
    case BaseType::Double: return "Double";
    case BaseType::Bool: return "Bool";
    }
    return "?";
}

std::optional<BaseType> base_type_from_name(std::string_view name)
{
    if (name == "String") return BaseType::String;
    if (name == "Int") return BaseType::Int;
    if (name == "Double") return BaseType::Double;
    if (name == "Bool") return BaseType::Bool;
    return std::nullopt;
}

double normalize_double(double d)
{
    if (!std::isfinite(d)) return d;
    double r = std::round(d * 1e6) / 1e6;
    return r == 0.0 ? 0.0 : r; // no negative zero
}

Value Value::real(double d) { return Value(Storage(normalize_double(d))); }

BaseType Value::type() const
{
    switch (data_.index()) {
    case 0: return BaseType::String;
    case 1: return BaseType::Int;
    case 2: return BaseType::Double;
    default: return BaseType::Bool;
    }
}

Value Value::coerced_to(BaseType type) const
{
    if (type == BaseType::Double && this->type() == BaseType::Int)
        return Value::real(static_cast<double>(as_int()));
    return *this;
}

std::string render_double(double d)
{
    if (std::isnan(d)) return "nan";
    if (std::isinf(d)) return d > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", d);
    std::string s(buf);
    auto dot = s.find('.');
    std::size_t end = s.size();
    while (end > dot + 2 && s[end - 1] == '0')
        --end;
    s.resize(end);
    return s;
}

std::string render_plain(const Value &v)
{
    switch (v.type()) {
    case BaseType::String: return v.as_string();
    case BaseType::Int: return std::to_string(v.as_int());
    case BaseType::Double: return render_double(v.as_double());
    case BaseType::Bool: return v.as_bool() ? "true" : "false";
    }
    return {};
}

std::string quote_string(std::string_view s)
{
    std::string out = "\"";
    for (char c : s) {
        switch (c) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        case '\r': out += "\\r"; break;
        default: out += c;
        }
    }
    out += '"';
    return out;
}

std::string render_literal(const Value &v)
{
    if (v.type() == BaseType::String) return quote_string(v.as_string());
    return render_plain(v);
}

} // namespace catamerge

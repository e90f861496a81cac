#include "catamerge/printer.hpp"

#include <cctype>
#include <map>

namespace catamerge {

namespace {

bool is_operator(const std::string &f) { return f == "+" || f == "-" || f == "*" || f == "/"; }

bool ident_start(unsigned char c) { return std::isalpha(c) || c == '_' || c >= 0x80; }
bool ident_char(unsigned char c) { return std::isalnum(c) || c == '_' || c >= 0x80; }

bool is_identifier(std::string_view s)
{
    if (s.empty() || !ident_start(static_cast<unsigned char>(s[0]))) return false;
    for (char c : s)
        if (!ident_char(static_cast<unsigned char>(c))) return false;
    return true;
}

std::string declarations(const std::vector<VariableDecl> &vars)
{
    std::string out;
    for (const auto &v : vars) {
        if (!out.empty()) out += "  ";
        out += v.name + " : " + v.entity;
    }
    return out;
}

} // namespace

std::string print_row_id(const std::string &id)
{
    std::size_t start = 0;
    bool ok = !id.empty();
    while (ok) {
        auto dot = id.find('.', start);
        ok = is_identifier(std::string_view(id).substr(start, dot == std::string::npos ? std::string::npos : dot - start));
        if (dot == std::string::npos) break;
        start = dot + 1;
    }
    return ok ? id : quote_string(id);
}

std::string print_term(const Term &t)
{
    switch (t.kind) {
    case Term::Kind::Constant: return render_literal(t.constant);
    case Term::Kind::Path: {
        std::string out = t.variable;
        for (const auto &s : t.steps)
            out += "." + s;
        return out;
    }
    case Term::Kind::Apply: {
        if (is_operator(t.function) && t.arguments.size() == 2)
            return "(" + print_term(t.arguments[0]) + " " + t.function + " " + print_term(t.arguments[1]) + ")";
        std::string out = t.function + "(";
        for (std::size_t i = 0; i < t.arguments.size(); ++i)
            out += (i ? ", " : "") + print_term(t.arguments[i]);
        return out + ")";
    }
    }
    return {};
}

std::string print_atom(const Atom &a)
{
    return print_term(a.lhs) + " " + std::string(to_string(a.op)) + " " + print_term(a.rhs);
}

std::string print_constraint(const Constraint &c)
{
    std::string out;
    if (!c.label.empty()) out += c.label + ": ";
    out += "forall " + declarations(c.universals);
    if (!c.premise.empty()) {
        out += " where ";
        for (std::size_t i = 0; i < c.premise.size(); ++i)
            out += (i ? " and " : "") + print_atom(c.premise[i]);
    }
    out += " -> ";
    if (!c.existentials.empty()) out += "exists " + declarations(c.existentials) + ", ";
    for (std::size_t i = 0; i < c.conclusion.size(); ++i)
        out += (i ? " and " : "") + print_term(c.conclusion[i].lhs) + " = " + print_term(c.conclusion[i].rhs);
    return out;
}

std::string print_canonical(const Schema &s)
{
    if (s.entities().empty() && s.foreign_keys().empty() && s.attributes().empty() && s.constraints().empty())
        return "schema " + s.name() + " { }\n";
    std::string out = "schema " + s.name() + " {\n";
    if (!s.entities().empty()) {
        out += "    entities\n";
        for (const auto &e : s.entities())
            out += "        " + e + "\n";
    }
    if (!s.foreign_keys().empty()) {
        out += "    foreign_keys\n";
        for (const auto &fk : s.foreign_keys())
            out += "        " + fk.name + " : " + fk.source + " -> " + fk.target + "\n";
    }
    if (!s.attributes().empty()) {
        out += "    attributes\n";
        for (const auto &a : s.attributes())
            out += "        " + a.name + " : " + a.source + " -> " + std::string(to_string(a.type)) + "\n";
    }
    if (!s.constraints().empty()) {
        out += "    constraints\n";
        for (const auto &c : s.constraints())
            out += "        " + print_constraint(c) + "\n";
    }
    return out + "}\n";
}

std::string print_canonical(const Instance &inst)
{
    const auto &schema = inst.schema();
    // nulls shared by more than one cell need a tag to keep the sharing
    std::map<std::uint32_t, int> uses;
    for (std::size_t e = 0; e < schema.entities().size(); ++e)
        for (auto x : inst.elements(e))
            for (auto a : schema.attributes_of(e)) {
                AttrValue v = inst.resolve(inst.attr_value(x, a));
                if (v.is_null()) ++uses[v.label().value];
            }
    std::map<std::uint32_t, std::string> tags;
    std::string out = "instance " + inst.name() + " : " + schema.name() + " {\n";
    for (std::size_t e = 0; e < schema.entities().size(); ++e) {
        auto rows = inst.elements(e);
        if (rows.empty()) continue;
        out += "    entity " + schema.entities()[e] + " {\n";
        for (auto x : rows) {
            out += "        row " + print_row_id(inst.export_id(x)) + " {";
            for (auto fk : schema.foreign_keys_of(e))
                if (auto v = inst.fk_value(x, fk))
                    out += " " + schema.foreign_keys()[fk].name + " = " + print_row_id(inst.export_id(*v));
            for (auto a : schema.attributes_of(e)) {
                AttrValue v = inst.resolve(inst.attr_value(x, a));
                out += " " + schema.attributes()[a].name + " = ";
                if (!v.is_null()) {
                    out += render_literal(v.constant());
                } else if (uses[v.label().value] > 1) {
                    auto [it, fresh] = tags.try_emplace(v.label().value, "");
                    if (fresh) it->second = "n" + std::to_string(tags.size());
                    out += "null:" + it->second;
                } else {
                    out += "null";
                }
            }
            out += " }\n";
        }
        out += "    }\n";
    }
    return out + "}\n";
}

std::string print_canonical(const ExtensionSpec &x)
{
    std::string out = "extension " + x.name + " {\n";
    out += "    include";
    for (const auto &s : x.includes)
        out += " " + s;
    out += "\n";
    for (const auto &id : x.identifications)
        out += "    identify " + id.left.qualified() + " = " + id.right.qualified() + "\n";
    if (!x.constraints.empty()) {
        out += "    constraints\n";
        for (const auto &c : x.constraints)
            out += "        " + print_constraint(c) + "\n";
    }
    return out + "}\n";
}

std::string print_canonical(const QuerySpec &q)
{
    std::string out = "query " + q.name + " : " + q.target + " {\n";
    out += "    from " + declarations(q.from) + "\n";
    if (!q.where.empty()) {
        out += "    where ";
        for (std::size_t i = 0; i < q.where.size(); ++i)
            out += (i ? " and " : "") + print_atom(q.where[i]);
        out += "\n";
    }
    out += "    attributes\n";
    for (const auto &p : q.attributes)
        out += "        " + p.column + " -> " + print_term(p.term) + "\n";
    return out + "}\n";
}

} // namespace catamerge

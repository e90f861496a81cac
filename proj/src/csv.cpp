#include "catamerge/csv.hpp"

namespace catamerge {

std::string csv_escape(std::string_view field)
{
    if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string csv_line(const std::vector<std::string> &fields)
{
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out += ',';
        out += csv_escape(fields[i]);
    }
    return out + "\n";
}

std::string entity_csv(const Instance &inst, std::size_t entity)
{
    const auto &schema = inst.schema();
    std::vector<std::string> header{"id"};
    for (auto fk : schema.foreign_keys_of(entity))
        header.push_back(schema.foreign_keys()[fk].name);
    for (auto a : schema.attributes_of(entity))
        header.push_back(schema.attributes()[a].name);
    std::string out = csv_line(header);
    for (auto e : inst.elements(entity)) {
        std::vector<std::string> row{inst.export_id(e)};
        for (auto fk : schema.foreign_keys_of(entity)) {
            auto v = inst.fk_value(e, fk);
            row.push_back(v ? inst.export_id(*v) : std::string{});
        }
        for (auto a : schema.attributes_of(entity)) {
            AttrValue v = inst.resolve(inst.attr_value(e, a));
            row.push_back(v.is_null() ? std::string{} : render_plain(v.constant()));
        }
        out += csv_line(row);
    }
    return out;
}

} // namespace catamerge

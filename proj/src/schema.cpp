#include "catamerge/schema.hpp"

namespace catamerge {

Schema::Schema(std::string name, std::vector<std::string> entities, std::vector<ForeignKey> foreign_keys,
               std::vector<Attribute> attributes, std::vector<Constraint> constraints)
    : name_(std::move(name)),
      entities_(std::move(entities)),
      foreign_keys_(std::move(foreign_keys)),
      attributes_(std::move(attributes)),
      constraints_(std::move(constraints))
{
    build_indexes();
}

void Schema::build_indexes()
{
    entity_index_.clear();
    members_.clear();
    for (std::size_t i = 0; i < entities_.size(); ++i)
        entity_index_.emplace(entities_[i], i); // first declaration wins
    fks_of_.assign(entities_.size(), {});
    attrs_of_.assign(entities_.size(), {});
    fk_slot_.assign(foreign_keys_.size(), npos);
    fk_source_.assign(foreign_keys_.size(), npos);
    fk_target_.assign(foreign_keys_.size(), npos);
    attr_slot_.assign(attributes_.size(), npos);
    attr_source_.assign(attributes_.size(), npos);

    for (std::size_t i = 0; i < foreign_keys_.size(); ++i) {
        const auto &fk = foreign_keys_[i];
        fk_source_[i] = entity_index(fk.source);
        fk_target_[i] = entity_index(fk.target);
        if (fk_source_[i] != npos) {
            fk_slot_[i] = fks_of_[fk_source_[i]].size();
            fks_of_[fk_source_[i]].push_back(i);
        }
        members_.emplace(std::pair{fk.source, fk.name}, Member{Member::Kind::ForeignKey, i});
    }
    for (std::size_t i = 0; i < attributes_.size(); ++i) {
        const auto &a = attributes_[i];
        attr_source_[i] = entity_index(a.source);
        if (attr_source_[i] != npos) {
            attr_slot_[i] = attrs_of_[attr_source_[i]].size();
            attrs_of_[attr_source_[i]].push_back(i);
        }
        members_.emplace(std::pair{a.source, a.name}, Member{Member::Kind::Attribute, i});
    }
}

std::size_t Schema::entity_index(std::string_view name) const
{
    auto it = entity_index_.find(name);
    return it == entity_index_.end() ? npos : it->second;
}

std::optional<std::string> Schema::resolve_entity(std::string_view name) const
{
    if (has_entity(name)) return std::string(name);
    if (auto it = aliases_.find(name); it != aliases_.end()) return it->second;
    return std::nullopt;
}

std::optional<Member> Schema::member(std::string_view entity, std::string_view name) const
{
    auto it = members_.find(std::pair{std::string(entity), std::string(name)});
    if (it == members_.end()) return std::nullopt;
    return it->second;
}

Schema Schema::with_aliases(std::map<std::string, std::string, std::less<>> aliases) const
{
    Schema copy = *this;
    copy.aliases_ = std::move(aliases);
    return copy;
}

Schema Schema::with_constraints(std::vector<Constraint> constraints) const
{
    Schema copy = *this;
    copy.constraints_ = std::move(constraints);
    return copy;
}

bool operator==(const Schema &a, const Schema &b)
{
    return a.name_ == b.name_ && a.entities_ == b.entities_ && a.foreign_keys_ == b.foreign_keys_ &&
           a.attributes_ == b.attributes_ && a.constraints_ == b.constraints_;
}

std::string to_string(const Path &p)
{
    std::string out = p.root;
    for (const auto &f : p.foreign_keys)
        out += "." + f;
    if (p.attribute) out += "." + *p.attribute;
    return out;
}

Path resolve_steps(const Schema &schema, std::string root, const std::vector<std::string> &steps)
{
    if (!schema.has_entity(root)) throw TypeMismatch("unknown entity '" + root + "'");
    Path p{root, {}, std::nullopt};
    std::string at = root;
    for (std::size_t i = 0; i < steps.size(); ++i) {
        auto m = schema.member(at, steps[i]);
        if (!m) throw TypeMismatch("entity '" + at + "' has no foreign key or attribute '" + steps[i] + "'");
        if (m->kind == Member::Kind::Attribute) {
            if (i + 1 != steps.size())
                throw TypeMismatch("attribute '" + steps[i] + "' of '" + at + "' has a base type and cannot be followed by '" +
                                   steps[i + 1] + "'");
            p.attribute = steps[i];
            return p;
        }
        p.foreign_keys.push_back(steps[i]);
        at = schema.foreign_keys()[m->index].target;
    }
    return p;
}

Sort path_codomain(const Schema &schema, const Path &p)
{
    std::vector<std::string> steps = p.foreign_keys;
    if (p.attribute) steps.push_back(*p.attribute);
    Path resolved = resolve_steps(schema, p.root, steps);
    if (resolved.attribute.has_value() != p.attribute.has_value())
        throw TypeMismatch("path '" + to_string(p) + "' ends in a foreign key where an attribute was expected");
    std::string at = p.root;
    for (const auto &f : p.foreign_keys)
        at = schema.foreign_keys()[schema.member(at, f)->index].target;
    if (p.attribute) return Sort{schema.attributes()[schema.member(at, *p.attribute)->index].type};
    return Sort{at};
}

Path compose_paths(const Schema &schema, const Path &p, const Path &q)
{
    if (p.attribute)
        throw TypeMismatch("cannot compose: path '" + to_string(p) + "' ends in attribute of type " +
                           path_codomain(schema, p).describe() + ", not an entity");
    Sort mid = path_codomain(schema, p);
    path_codomain(schema, q); // validates q
    if (mid.entity() != q.root)
        throw TypeMismatch("cannot compose: '" + to_string(p) + "' ends at entity '" + mid.entity() + "' but '" +
                           to_string(q) + "' starts at entity '" + q.root + "'");
    Path out = p;
    out.foreign_keys.insert(out.foreign_keys.end(), q.foreign_keys.begin(), q.foreign_keys.end());
    out.attribute = q.attribute;
    return out;
}

} // namespace catamerge

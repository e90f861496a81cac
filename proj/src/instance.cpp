#include "catamerge/instance.hpp"

#include <deque>

namespace catamerge {

std::string to_string(NullLabel n) { return "_n" + std::to_string(n.value); }

std::string ConstantClash::describe() const
{
    return "constant clash on '" + attribute + "': " + render_literal(first) + " vs " + render_literal(second);
}

ConstantClashError::ConstantClashError(ConstantClash clash) : std::runtime_error(clash.describe()), clash_(std::move(clash))
{
}

Instance::Instance(std::shared_ptr<const Schema> schema, std::string name)
    : schema_(std::move(schema)), name_(std::move(name))
{
    by_entity_.resize(schema_->entities().size());
}

ElementId Instance::add(std::size_t entity, std::string label, bool user)
{
    if (entity >= schema_->entities().size()) throw InstanceError("unknown entity index");
    if (by_label_.count(label)) throw InstanceError("element id '" + label + "' is already used in this instance");
    ElementId id{static_cast<std::uint32_t>(elements_.size())};
    by_label_.emplace(label, id);
    elements_.push_back({entity, std::move(label), user});
    parent_.push_back(id.value);
    members_.push_back({id});
    best_label_.push_back(id.value);
    fk_rows_.emplace_back(schema_->foreign_keys_of(entity).size(), kNoElement);
    std::vector<AttrValue> attrs;
    attrs.reserve(schema_->attributes_of(entity).size());
    for (std::size_t i = 0; i < schema_->attributes_of(entity).size(); ++i)
        attrs.emplace_back(fresh_null());
    attr_rows_.push_back(std::move(attrs));
    by_entity_[entity].push_back(id);
    return id;
}

ElementId Instance::add_element(std::string_view entity, std::string id)
{
    auto e = schema_->entity_index(entity);
    if (e == npos) throw InstanceError("unknown entity '" + std::string(entity) + "'");
    return add(e, std::move(id), true);
}

ElementId Instance::add_element(std::size_t entity, std::string id) { return add(entity, std::move(id), true); }

ElementId Instance::add_fresh_element(std::size_t entity, std::size_t round)
{
    std::string label =
        schema_->entities()[entity] + "!" + std::to_string(round) + "." + std::to_string(fresh_counter_++);
    return add(entity, std::move(label), false);
}

NullLabel Instance::fresh_null()
{
    NullLabel n{static_cast<std::uint32_t>(null_parent_.size())};
    null_parent_.push_back(n.value);
    null_anchor_.emplace_back();
    return n;
}

std::size_t Instance::fk_index(std::size_t entity, std::string_view fk) const
{
    const auto &ename = schema_->entities()[entity];
    auto m = schema_->member(ename, fk);
    if (!m || m->kind != Member::Kind::ForeignKey)
        throw InstanceError("entity '" + ename + "' has no foreign key '" + std::string(fk) + "'");
    return m->index;
}

std::size_t Instance::attr_index(std::size_t entity, std::string_view attr) const
{
    const auto &ename = schema_->entities()[entity];
    auto m = schema_->member(ename, attr);
    if (!m || m->kind != Member::Kind::Attribute)
        throw InstanceError("entity '" + ename + "' has no attribute '" + std::string(attr) + "'");
    return m->index;
}

void Instance::set_fk(ElementId e, std::string_view fk, ElementId target)
{
    if (e.value >= elements_.size() || target.value >= elements_.size()) throw InstanceError("unknown element");
    std::size_t f = fk_index(entity_of(e), fk);
    if (schema_->fk_target(f) != entity_of(target))
        throw InstanceError("foreign key '" + std::string(fk) + "' of '" + label_of(e) + "' must target entity '" +
                            schema_->foreign_keys()[f].target + "', but '" + label_of(target) + "' is a '" +
                            schema_->entities()[entity_of(target)] + "'");
    if (auto current = fk_value(e, f); current && !same(*current, target))
        throw InstanceError("foreign key '" + std::string(fk) + "' of '" + label_of(e) + "' is already set to '" +
                            label_of(*current) + "'");
    fk_rows_[root_compress(e.value)][schema_->fk_slot(f)] = target.value;
}

void Instance::set_attr(ElementId e, std::string_view attr, std::optional<Value> v)
{
    if (e.value >= elements_.size()) throw InstanceError("unknown element");
    std::size_t a = attr_index(entity_of(e), attr);
    if (!v) {
        set_attr(e, a, AttrValue(fresh_null()));
        return;
    }
    BaseType expected = schema_->attributes()[a].type;
    Value coerced = v->coerced_to(expected);
    if (coerced.type() != expected)
        throw InstanceError("attribute '" + std::string(attr) + "' has type " + std::string(to_string(expected)) +
                            ", got " + std::string(to_string(v->type())) + " " + render_literal(*v));
    set_attr(e, a, AttrValue(coerced));
}

void Instance::set_attr(ElementId e, std::size_t attr, AttrValue v)
{
    auto slot = schema_->attr_slot(attr);
    auto &cell = attr_rows_[root_compress(e.value)][slot];
    AttrValue current = resolve(cell);
    if (!current.is_null() && !v.is_null()) {
        if (current.constant() != v.constant())
            throw InstanceError("attribute '" + schema_->attributes()[attr].name + "' of '" + label_of(e) +
                                "' is already " + render_literal(current.constant()) + ", cannot set " +
                                render_literal(v.constant()));
        return;
    }
    if (!current.is_null()) return; // a null never overrides explicit data
    cell = v;
}

std::uint32_t Instance::root(std::uint32_t x) const
{
    while (parent_[x] != x)
        x = parent_[x];
    return x;
}

std::uint32_t Instance::root_compress(std::uint32_t x)
{
    std::uint32_t r = root(x);
    while (parent_[x] != r) {
        auto next = parent_[x];
        parent_[x] = r;
        x = next;
    }
    return r;
}

ElementId Instance::canonical(ElementId e) const { return ElementId{root(e.value)}; }

std::uint32_t Instance::null_root_compress(std::uint32_t x)
{
    std::uint32_t r = null_root(NullLabel{x}).value;
    while (null_parent_[x] != r) {
        auto next = null_parent_[x];
        null_parent_[x] = r;
        x = next;
    }
    return r;
}

NullLabel Instance::null_root(NullLabel n) const
{
    auto x = n.value;
    while (null_parent_[x] != x)
        x = null_parent_[x];
    return NullLabel{x};
}

AttrValue Instance::resolve(const AttrValue &v) const
{
    if (!v.is_null()) return v;
    auto r = null_root(v.label());
    if (null_anchor_[r.value]) return *null_anchor_[r.value];
    return r;
}

std::optional<ElementId> Instance::find(std::string_view label) const
{
    auto it = by_label_.find(std::string(label));
    if (it == by_label_.end()) return std::nullopt;
    return it->second;
}

std::vector<ElementId> Instance::elements(std::size_t entity) const
{
    std::vector<ElementId> out;
    for (auto e : by_entity_[entity])
        if (parent_[e.value] == e.value) out.push_back(e);
    return out;
}

std::size_t Instance::class_count(std::size_t entity) const
{
    std::size_t n = 0;
    for (auto e : by_entity_[entity])
        n += parent_[e.value] == e.value;
    return n;
}

const std::vector<ElementId> &Instance::class_members(ElementId e) const { return members_[root(e.value)]; }

const std::string &Instance::export_id(ElementId e) const { return elements_[best_label_[root(e.value)]].label; }

std::optional<ElementId> Instance::fk_value(ElementId e, std::size_t fk) const
{
    auto v = fk_rows_[root(e.value)][schema_->fk_slot(fk)];
    if (v == kNoElement) return std::nullopt;
    return ElementId{root(v)};
}

AttrValue Instance::attr_value(ElementId e, std::size_t attr) const
{
    return attr_rows_[root(e.value)][schema_->attr_slot(attr)];
}

PathValue Instance::eval_path(ElementId e, const Path &p) const
{
    std::size_t entity = entity_of(e);
    if (schema_->entities()[entity] != p.root)
        throw InstanceError("path rooted at '" + p.root + "' applied to element '" + label_of(e) + "' of entity '" +
                            schema_->entities()[entity] + "'");
    ElementId at = canonical(e);
    for (const auto &f : p.foreign_keys) {
        auto fk = fk_index(entity_of(at), f);
        auto next = fk_value(at, fk);
        if (!next) return Undefined{};
        at = *next;
    }
    if (p.attribute) return resolve(attr_value(at, attr_index(entity_of(at), *p.attribute)));
    return at;
}

void Instance::unify(const AttrValue &a, const AttrValue &b, std::string_view attribute)
{
    if (!a.is_null() && !b.is_null()) {
        if (a.constant() != b.constant()) throw ConstantClashError({std::string(attribute), a.constant(), b.constant()});
        return;
    }
    if (a.is_null() && b.is_null()) {
        auto ra = null_root_compress(a.label().value), rb = null_root_compress(b.label().value);
        if (ra == rb) return;
        auto &anchor_a = null_anchor_[ra];
        auto &anchor_b = null_anchor_[rb];
        if (anchor_a && anchor_b && *anchor_a != *anchor_b)
            throw ConstantClashError({std::string(attribute), *anchor_a, *anchor_b});
        auto keep = std::min(ra, rb), drop = std::max(ra, rb);
        if (!null_anchor_[keep]) null_anchor_[keep] = null_anchor_[drop];
        null_parent_[drop] = keep;
        return;
    }
    const AttrValue &null = a.is_null() ? a : b;
    const Value &constant = a.is_null() ? b.constant() : a.constant();
    auto r = null_root_compress(null.label().value);
    auto &anchor = null_anchor_[r];
    if (anchor) {
        if (*anchor != constant) {
            bool null_first = a.is_null();
            throw ConstantClashError(
                {std::string(attribute), null_first ? *anchor : constant, null_first ? constant : *anchor});
        }
        return;
    }
    anchor = constant;
}

void Instance::assign_attr(ElementId e, std::size_t attr, const AttrValue &v)
{
    auto &cell = attr_rows_[root_compress(e.value)][schema_->attr_slot(attr)];
    AttrValue current = cell;
    unify(current, v, schema_->attributes()[attr].name);
}

MergeReport Instance::assign_fk(ElementId e, std::size_t fk, ElementId target)
{
    auto r = root_compress(e.value);
    auto &slot = fk_rows_[r][schema_->fk_slot(fk)];
    if (slot == kNoElement) {
        slot = root_compress(target.value);
        return {};
    }
    return merge_elements(ElementId{slot}, target);
}

MergeReport Instance::merge_elements(ElementId a, ElementId b)
{
    MergeReport report;
    std::deque<std::pair<std::uint32_t, std::uint32_t>> pending{{a.value, b.value}};
    while (!pending.empty()) {
        auto [x, y] = pending.front();
        pending.pop_front();
        auto rx = root_compress(x), ry = root_compress(y);
        if (rx == ry) continue;
        if (elements_[rx].entity != elements_[ry].entity)
            throw InstanceError("cannot merge '" + elements_[rx].label + "' and '" + elements_[ry].label +
                                "': different entities");
        // larger class stays root; ties keep the older element
        bool swap = members_[ry].size() > members_[rx].size() ||
                    (members_[ry].size() == members_[rx].size() && ry < rx);
        auto keep = swap ? ry : rx, drop = swap ? rx : ry;

        parent_[drop] = keep;
        auto &kept_members = members_[keep];
        kept_members.insert(kept_members.end(), members_[drop].begin(), members_[drop].end());
        members_[drop].clear();
        members_[drop].shrink_to_fit();

        const auto &lk = elements_[best_label_[keep]], &ld = elements_[best_label_[drop]];
        if ((ld.user && !lk.user) || (ld.user == lk.user && ld.label < lk.label)) best_label_[keep] = best_label_[drop];

        auto &fk_keep = fk_rows_[keep];
        auto &fk_drop = fk_rows_[drop];
        for (std::size_t s = 0; s < fk_keep.size(); ++s) {
            if (fk_drop[s] == kNoElement) continue;
            if (fk_keep[s] == kNoElement)
                fk_keep[s] = fk_drop[s];
            else
                pending.emplace_back(fk_keep[s], fk_drop[s]);
        }
        const auto &attrs = schema_->attributes_of(elements_[keep].entity);
        for (std::size_t s = 0; s < attrs.size(); ++s) {
            AttrValue kept = attr_rows_[keep][s], dropped = attr_rows_[drop][s];
            unify(kept, dropped, schema_->attributes()[attrs[s]].name);
            ++report.attribute_unifications;
        }
        report.merged.emplace_back(ElementId{x}, ElementId{y});
    }
    return report;
}

} // namespace catamerge

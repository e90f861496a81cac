#pragma once

#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "catamerge/schema.hpp"
#include "catamerge/value.hpp"

namespace catamerge {

struct ElementId
{
    std::uint32_t value = 0;
    friend auto operator<=>(const ElementId &, const ElementId &) = default;
};

struct NullLabel
{
    std::uint32_t value = 0;
    friend auto operator<=>(const NullLabel &, const NullLabel &) = default;
};

std::string to_string(NullLabel n); // "_n<k>"

/// Attribute cell content: a constant or a labelled null. Constants compare
/// by value, nulls by label.
class AttrValue
{
  public:
    AttrValue(Value v) : data_(std::move(v)) { }
    AttrValue(NullLabel n) : data_(n) { }

    bool is_null() const { return data_.index() == 1; }
    const Value &constant() const { return std::get<Value>(data_); }
    NullLabel label() const { return std::get<NullLabel>(data_); }

    friend bool operator==(const AttrValue &, const AttrValue &) = default;

  private:
    std::variant<Value, NullLabel> data_;
};

struct Undefined
{
    friend bool operator==(const Undefined &, const Undefined &) = default;
};

/// Result of evaluating a path: an element, an attribute value, or
/// Undefined when a foreign key along the way has no value yet.
using PathValue = std::variant<ElementId, AttrValue, Undefined>;

struct ConstantClash
{
    std::string attribute;
    Value first;
    Value second;

    std::string describe() const;
};

class ConstantClashError : public std::runtime_error
{
  public:
    explicit ConstantClashError(ConstantClash clash);
    const ConstantClash &clash() const { return clash_; }

  private:
    ConstantClash clash_;
};

class InstanceError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

struct MergeReport
{
    /// Every class union performed, starting with the requested one, in order.
    std::vector<std::pair<ElementId, ElementId>> merged;
    std::size_t attribute_unifications = 0;

    bool noop() const { return merged.empty(); }
};

/// A model in progress over a schema: element sets per entity, partial
/// foreign-key valuations and total attribute valuations (unknown values are
/// labelled nulls). Elements and nulls each live in a union-find; merging
/// elements propagates congruence eagerly. Single writer; const access is
/// safe to share once mutation has stopped.
class Instance
{
  public:
    explicit Instance(std::shared_ptr<const Schema> schema, std::string name = {});

    const Schema &schema() const { return *schema_; }
    const std::shared_ptr<const Schema> &schema_ptr() const { return schema_; }
    const std::string &name() const { return name_; }
    void set_name(std::string name) { name_ = std::move(name); }

    // --- builder -----------------------------------------------------------

    /// Adds a user-declared element. Every attribute starts as a fresh null.
    ElementId add_element(std::string_view entity, std::string id);
    ElementId add_element(std::size_t entity, std::string id);

    /// Adds a chase-created element labelled `<entity>!<round>.<counter>`.
    ElementId add_fresh_element(std::size_t entity, std::size_t round);

    /// Explicit data entry: errors on unknown names, ill-typed targets, and on
    /// re-assignment to a different target.
    void set_fk(ElementId e, std::string_view fk, ElementId target);

    /// Explicit data entry: `nullopt` stores a fresh labelled null. Setting a
    /// different constant over an existing constant is an error.
    void set_attr(ElementId e, std::string_view attr, std::optional<Value> v);
    void set_attr(ElementId e, std::size_t attr, AttrValue v);

    NullLabel fresh_null();

    // --- saturation primitives ---------------------------------------------

    /// Enforce fk(e) = target: set when unvalued, otherwise merge the two.
    MergeReport assign_fk(ElementId e, std::size_t fk, ElementId target);

    /// Enforce attr(e) = v by unification. Throws ConstantClashError.
    void assign_attr(ElementId e, std::size_t attr, const AttrValue &v);

    /// Unify two attribute values. Throws ConstantClashError.
    void unify(const AttrValue &a, const AttrValue &b, std::string_view attribute);

    /// Merge the classes of a and b and close under congruence. Throws
    /// ConstantClashError when two distinct constants would have to be equal;
    /// the instance must then be discarded.
    MergeReport merge_elements(ElementId a, ElementId b);

    // --- queries -----------------------------------------------------------

    std::size_t element_count() const { return elements_.size(); }
    std::size_t null_count() const { return null_parent_.size(); }
    std::optional<ElementId> find(std::string_view label) const;

    ElementId canonical(ElementId e) const;
    bool same(ElementId a, ElementId b) const { return canonical(a) == canonical(b); }
    std::size_t entity_of(ElementId e) const { return elements_[e.value].entity; }
    const std::string &label_of(ElementId e) const { return elements_[e.value].label; }
    bool is_user_declared(ElementId e) const { return elements_[e.value].user; }

    /// All elements ever added to entity `e`, merged or not.
    const std::vector<ElementId> &all_elements(std::size_t entity) const { return by_entity_[entity]; }
    /// Canonical representatives of entity `e`, in insertion order.
    std::vector<ElementId> elements(std::size_t entity) const;
    std::size_t class_count(std::size_t entity) const;
    /// Every element in the class of e (including e).
    const std::vector<ElementId> &class_members(ElementId e) const;

    /// Lexicographically least user-declared label in e's class; classes
    /// without one use their least fresh label.
    const std::string &export_id(ElementId e) const;

    std::optional<ElementId> fk_value(ElementId e, std::size_t fk) const;
    AttrValue attr_value(ElementId e, std::size_t attr) const; // raw label or constant
    /// Constant if the null's class is anchored, otherwise its root label.
    AttrValue resolve(const AttrValue &v) const;
    NullLabel null_root(NullLabel n) const;

    PathValue eval_path(ElementId e, const Path &p) const;

  private:
    struct Element
    {
        std::size_t entity;
        std::string label;
        bool user;
    };

    ElementId add(std::size_t entity, std::string label, bool user);
    std::uint32_t root(std::uint32_t x) const;
    std::uint32_t root_compress(std::uint32_t x);
    std::uint32_t null_root_compress(std::uint32_t x);
    std::size_t fk_index(std::size_t entity, std::string_view fk) const;
    std::size_t attr_index(std::size_t entity, std::string_view attr) const;

    std::shared_ptr<const Schema> schema_;
    std::string name_;

    std::vector<Element> elements_;
    std::vector<std::uint32_t> parent_;
    std::vector<std::vector<ElementId>> members_; // valid at roots
    std::vector<std::uint32_t> best_label_;       // element whose label is export_id, valid at roots
    std::vector<std::vector<std::uint32_t>> fk_rows_;
    std::vector<std::vector<AttrValue>> attr_rows_;
    std::vector<std::vector<ElementId>> by_entity_;
    std::unordered_map<std::string, ElementId> by_label_;
    std::size_t fresh_counter_ = 0;

    std::vector<std::uint32_t> null_parent_;
    std::vector<std::optional<Value>> null_anchor_; // valid at roots
};

inline constexpr std::uint32_t kNoElement = 0xffffffffu;

} // namespace catamerge

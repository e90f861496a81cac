#include "compiled.hpp"

#include <algorithm>
#include <stdexcept>

namespace catamerge::detail {

namespace {

std::size_t max_slot(std::size_t a, std::size_t b)
{
    if (a == npos) return b;
    if (b == npos) return a;
    return std::max(a, b);
}

const FunctionSignature &signature_of(Builtin id)
{
    for (const auto &sig : typeside::functions())
        if (sig.id == id) return sig;
    throw std::logic_error("unknown builtin");
}

// Widens an Int literal facing a Double term so that hashing and unification
// see one representation.
void widen_literal(CTerm &literal, const CTerm &other)
{
    if (literal.kind != Term::Kind::Constant || other.entity_valued() || literal.entity_valued()) return;
    if (literal.sort.base() == BaseType::Int && other.sort.base() == BaseType::Double) {
        literal.constant = literal.constant.coerced_to(BaseType::Double);
        literal.sort = Sort{BaseType::Double};
    }
}

CAtom compile_atom(Comparison op, const Term &lhs, const Term &rhs, const Schema &schema,
                   const std::vector<std::string> &names, const std::vector<std::size_t> &entities)
{
    CAtom a;
    a.op = op;
    a.lhs = compile_term(lhs, schema, names, entities);
    a.rhs = compile_term(rhs, schema, names, entities);
    widen_literal(a.lhs, a.rhs);
    widen_literal(a.rhs, a.lhs);
    a.max_var = max_slot(a.lhs.max_var(), a.rhs.max_var());
    return a;
}

} // namespace

std::size_t CTerm::max_var() const
{
    switch (kind) {
    case Term::Kind::Path: return var;
    case Term::Kind::Constant: return npos;
    case Term::Kind::Apply: {
        std::size_t m = npos;
        for (const auto &a : arguments)
            m = max_slot(m, a.max_var());
        return m;
    }
    }
    return npos;
}

void CTerm::collect_vars(std::vector<std::size_t> &out) const
{
    if (kind == Term::Kind::Path) out.push_back(var);
    for (const auto &a : arguments)
        a.collect_vars(out);
}

CTerm compile_term(const Term &t, const Schema &schema, const std::vector<std::string> &names,
                   const std::vector<std::size_t> &entities)
{
    CTerm c;
    c.kind = t.kind;
    c.source = &t;
    switch (t.kind) {
    case Term::Kind::Constant:
        c.constant = t.constant;
        c.sort = Sort{t.constant.type()};
        break;
    case Term::Kind::Path: {
        auto it = std::find(names.begin(), names.end(), t.variable);
        if (it == names.end()) throw std::invalid_argument("unbound variable '" + t.variable + "'");
        c.var = static_cast<std::size_t>(it - names.begin());
        std::size_t at = entities[c.var];
        for (std::size_t i = 0; i < t.steps.size(); ++i) {
            const auto &step = t.steps[i];
            auto m = schema.member(schema.entities()[at], step);
            if (!m) throw std::invalid_argument("entity '" + schema.entities()[at] + "' has no member '" + step + "'");
            if (m->kind == Member::Kind::ForeignKey) {
                c.fks.push_back(m->index);
                at = schema.fk_target(m->index);
                continue;
            }
            if (i + 1 != t.steps.size())
                throw std::invalid_argument("attribute '" + step + "' must end the path");
            c.attr = m->index;
        }
        c.sort = c.attr == npos ? Sort{schema.entities()[at]} : Sort{schema.attributes()[c.attr].type};
        break;
    }
    case Term::Kind::Apply: {
        std::vector<BaseType> types;
        for (const auto &a : t.arguments) {
            c.arguments.push_back(compile_term(a, schema, names, entities));
            if (c.arguments.back().entity_valued())
                throw std::invalid_argument("function '" + t.function + "' applied to an entity");
            types.push_back(c.arguments.back().sort.base());
        }
        auto sig = typeside::resolve(t.function, types);
        if (!sig) throw std::invalid_argument("no built-in function '" + t.function + "' for these arguments");
        c.function = sig->id;
        c.sort = Sort{sig->result};
        for (std::size_t i = 0; i < c.arguments.size(); ++i) {
            auto &arg = c.arguments[i];
            if (arg.kind == Term::Kind::Constant) {
                arg.constant = arg.constant.coerced_to(sig->arguments[i]);
                arg.sort = Sort{sig->arguments[i]};
            }
        }
        break;
    }
    }
    return c;
}

CConstraint compile(const Constraint &c, const Schema &schema)
{
    auto errors = typecheck(c, schema);
    if (!errors.empty()) throw std::invalid_argument("constraint '" + c.label + "': " + errors.front().message);
    CConstraint out;
    out.label = c.label;
    out.source = &c;
    out.universal_count = c.universals.size();
    for (const auto *vars : {&c.universals, &c.existentials})
        for (const auto &v : *vars) {
            out.var_names.push_back(v.name);
            out.var_entity.push_back(schema.entity_index(v.entity));
        }
    for (const auto &a : c.premise)
        out.premise.push_back(compile_atom(a.op, a.lhs, a.rhs, schema, out.var_names, out.var_entity));
    for (const auto &e : c.conclusion)
        out.conclusion.push_back(compile_atom(Comparison::Eq, e.lhs, e.rhs, schema, out.var_names, out.var_entity));
    return out;
}

Evaluated evaluate(const Instance &inst, const CTerm &t, const Binding &binding)
{
    Evaluated r;
    switch (t.kind) {
    case Term::Kind::Constant:
        r.kind = Evaluated::Kind::Value;
        r.value = AttrValue(t.constant);
        return r;
    case Term::Kind::Path: {
        ElementId at = inst.canonical(binding[t.var]);
        for (std::size_t i = 0; i < t.fks.size(); ++i) {
            auto next = inst.fk_value(at, t.fks[i]);
            if (!next) {
                r.kind = Evaluated::Kind::Undefined;
                r.stuck_at = at;
                r.stuck_fk = t.fks[i];
                r.stuck_step = i;
                return r;
            }
            at = *next;
        }
        if (t.attr == npos) {
            r.kind = Evaluated::Kind::Element;
            r.element = at;
            return r;
        }
        r.kind = Evaluated::Kind::Value;
        r.value = inst.attr_value(at, t.attr);
        r.cell_element = at;
        return r;
    }
    case Term::Kind::Apply: {
        const auto &sig = signature_of(t.function);
        std::vector<Value> args;
        for (std::size_t i = 0; i < t.arguments.size(); ++i) {
            auto a = evaluate(inst, t.arguments[i], binding);
            if (a.kind == Evaluated::Kind::Undefined) return a;
            AttrValue v = inst.resolve(*a.value);
            if (v.is_null()) {
                r.computed = true;
                return r;
            }
            args.push_back(v.constant().coerced_to(sig.arguments[i]));
        }
        r.computed = true;
        auto v = typeside::apply(t.function, args);
        if (!v) return r;
        r.kind = Evaluated::Kind::Value;
        r.value = AttrValue(*v);
        return r;
    }
    }
    return r;
}

bool premise_holds(const Instance &inst, const CAtom &a, const Binding &binding)
{
    auto l = evaluate(inst, a.lhs, binding);
    auto r = evaluate(inst, a.rhs, binding);
    if (l.kind == Evaluated::Kind::Undefined || r.kind == Evaluated::Kind::Undefined) return false;
    if (l.kind == Evaluated::Kind::Element) return r.kind == Evaluated::Kind::Element && inst.same(l.element, r.element);
    AttrValue lv = inst.resolve(*l.value), rv = inst.resolve(*r.value);
    if (lv.is_null() || rv.is_null()) return false;
    return typeside::compare(a.op, lv.constant(), rv.constant());
}

bool equation_holds(const Instance &inst, const CAtom &a, const Binding &binding)
{
    auto l = evaluate(inst, a.lhs, binding);
    auto r = evaluate(inst, a.rhs, binding);
    if (l.kind == Evaluated::Kind::Undefined || r.kind == Evaluated::Kind::Undefined) return false;
    if (l.kind == Evaluated::Kind::Element) return r.kind == Evaluated::Kind::Element && inst.same(l.element, r.element);
    AttrValue lv = inst.resolve(*l.value), rv = inst.resolve(*r.value);
    if (lv.is_null() != rv.is_null()) return false;
    if (lv.is_null()) return lv.label() == rv.label();
    return typeside::compare(Comparison::Eq, lv.constant(), rv.constant());
}

std::string value_key(const Instance &inst, const AttrValue &v)
{
    AttrValue r = inst.resolve(v);
    if (r.is_null()) return "n" + std::to_string(r.label().value);
    const Value &c = r.constant();
    return std::string(1, "sidb"[static_cast<int>(c.type())]) + render_literal(c);
}

Matcher::Matcher(const Instance &inst, std::span<const CAtom> atoms, std::span<const std::size_t> var_entity,
                 Holds holds, bool use_index)
    : inst_(inst), atoms_(atoms), var_entity_(var_entity), holds_(holds), use_index_(use_index),
      strict_values_(holds == &premise_holds)
{
    std::size_t n = var_entity.size();
    checks_.resize(n);
    all_.resize(n);
    index_.resize(n);
    for (const auto &a : atoms_) {
        if (a.max_var == npos)
            ground_.push_back(&a);
        else
            checks_[a.max_var].push_back(&a);
    }
    for (std::size_t s = 0; s < n; ++s) {
        all_[s] = inst.elements(var_entity[s]);
        pins_.push_back(plan_slot(s));
    }
}

Matcher::Pin Matcher::plan_slot(std::size_t slot) const
{
    auto earlier = [slot](const CTerm &t) {
        auto m = t.max_var();
        return m == npos || m < slot;
    };
    Pin index_pin;
    for (const auto *a : checks_[slot]) {
        if (a->op != Comparison::Eq) continue;
        for (int side = 0; side < 2; ++side) {
            const CTerm &self = side == 0 ? a->lhs : a->rhs;
            const CTerm &other = side == 0 ? a->rhs : a->lhs;
            if (self.kind != Term::Kind::Path || self.var != slot || !earlier(other)) continue;
            if (self.entity_valued()) {
                if (self.fks.empty() && other.kind == Term::Kind::Path) return Pin{Pin::Kind::Element, &other, &self};
                continue;
            }
            if (use_index_ && index_pin.kind == Pin::Kind::None && self.sort == other.sort)
                index_pin = Pin{Pin::Kind::Index, &other, &self};
        }
    }
    return index_pin;
}

std::vector<ElementId> Matcher::candidates(const Binding &binding, std::size_t slot)
{
    const Pin &pin = pins_[slot];
    switch (pin.kind) {
    case Pin::Kind::None: return all_[slot];
    case Pin::Kind::Element: {
        auto k = evaluate(inst_, *pin.key, binding);
        if (k.kind != Evaluated::Kind::Element) return {};
        return {inst_.canonical(k.element)};
    }
    case Pin::Kind::Index: {
        auto k = evaluate(inst_, *pin.key, binding);
        if (k.kind != Evaluated::Kind::Value) return {};
        if (strict_values_ && inst_.resolve(*k.value).is_null()) return {};
        if (!index_[slot]) {
            auto &idx = index_[slot].emplace();
            Binding probe(var_entity_.size(), ElementId{kNoElement});
            for (auto e : all_[slot]) {
                probe[slot] = e;
                auto v = evaluate(inst_, *pin.probe, probe);
                if (v.kind != Evaluated::Kind::Value) continue;
                if (strict_values_ && inst_.resolve(*v.value).is_null()) continue;
                idx[value_key(inst_, *v.value)].push_back(e);
            }
        }
        auto it = index_[slot]->find(value_key(inst_, *k.value));
        if (it == index_[slot]->end()) return {};
        return it->second;
    }
    }
    return {};
}

bool Matcher::search(Binding &binding, std::size_t slot, std::size_t last,
                     const std::function<bool(const Binding &)> &visit)
{
    if (slot == last) return visit(binding);
    for (auto e : candidates(binding, slot)) {
        binding[slot] = e;
        bool ok = true;
        for (const auto *a : checks_[slot])
            if (!holds_(inst_, *a, binding)) {
                ok = false;
                break;
            }
        if (ok && !search(binding, slot + 1, last, visit)) {
            binding[slot] = ElementId{kNoElement};
            return false;
        }
    }
    binding[slot] = ElementId{kNoElement};
    return true;
}

void Matcher::run(Binding binding, std::size_t first, std::size_t last,
                  const std::function<bool(const Binding &)> &visit)
{
    binding.resize(var_entity_.size(), ElementId{kNoElement});
    for (const auto *a : ground_)
        if (!holds_(inst_, *a, binding)) return;
    for (std::size_t s = 0; s < first; ++s)
        for (const auto *a : checks_[s])
            if (!holds_(inst_, *a, binding)) return;
    search(binding, first, last, visit);
}

std::string describe_binding(const Instance &inst, const CConstraint &c, const Binding &b)
{
    std::string out = "{";
    for (std::size_t i = 0; i < c.universal_count && i < b.size(); ++i) {
        if (i) out += ", ";
        out += c.var_names[i] + "=" + inst.export_id(b[i]);
    }
    return out + "}";
}

} // namespace catamerge::detail

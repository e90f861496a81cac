#include <deque>
#include <map>
#include <set>

#include "catamerge/chase.hpp"

namespace catamerge {

namespace {

struct Mapping
{
    std::map<std::uint32_t, std::uint32_t> fwd, back;     // class roots
    std::map<std::uint32_t, std::uint32_t> nfwd, nback;   // null roots
};

class IsoSearch
{
  public:
    IsoSearch(const Instance &a, const Instance &b) : a_(a), b_(b) { }

    std::string failure;

    bool bind(Mapping &m, ElementId x, ElementId y, std::deque<std::pair<ElementId, ElementId>> &queue)
    {
        x = a_.canonical(x);
        y = b_.canonical(y);
        if (a_.entity_of(x) != b_.entity_of(y)) return fail("entity mismatch at '" + a_.export_id(x) + "'");
        auto f = m.fwd.find(x.value);
        auto g = m.back.find(y.value);
        if (f != m.fwd.end() || g != m.back.end()) {
            if (f != m.fwd.end() && f->second == y.value) return true;
            return fail("'" + a_.export_id(x) + "' cannot correspond to '" + b_.export_id(y) + "'");
        }
        m.fwd[x.value] = y.value;
        m.back[y.value] = x.value;
        queue.emplace_back(x, y);
        return true;
    }

    bool bind_value(Mapping &m, const AttrValue &u, const AttrValue &v, const std::string &where)
    {
        AttrValue ru = a_.resolve(u), rv = b_.resolve(v);
        if (ru.is_null() != rv.is_null()) return fail("value of " + where + " is known on one side only");
        if (!ru.is_null()) return ru == rv || fail("value of " + where + " differs");
        auto f = m.nfwd.find(ru.label().value);
        auto g = m.nback.find(rv.label().value);
        if (f != m.nfwd.end() || g != m.nback.end())
            return (f != m.nfwd.end() && f->second == rv.label().value) || fail("nulls of " + where + " do not correspond");
        m.nfwd[ru.label().value] = rv.label().value;
        m.nback[rv.label().value] = ru.label().value;
        return true;
    }

    bool propagate(Mapping &m, std::deque<std::pair<ElementId, ElementId>> queue)
    {
        const auto &schema = a_.schema();
        while (!queue.empty()) {
            auto [x, y] = queue.front();
            queue.pop_front();
            std::size_t e = a_.entity_of(x);
            for (auto fk : schema.foreign_keys_of(e)) {
                auto fx = a_.fk_value(x, fk);
                auto fy = b_.fk_value(y, fk);
                std::string where = "'" + a_.export_id(x) + "." + schema.foreign_keys()[fk].name + "'";
                if (fx.has_value() != fy.has_value()) return fail(where + " is defined on one side only");
                if (fx && !bind(m, *fx, *fy, queue)) return false;
            }
            for (auto at : schema.attributes_of(e))
                if (!bind_value(m, a_.attr_value(x, at), b_.attr_value(y, at),
                                "'" + a_.export_id(x) + "." + schema.attributes()[at].name + "'"))
                    return false;
        }
        return true;
    }

    bool search(Mapping &m)
    {
        const auto &schema = a_.schema();
        for (std::size_t e = 0; e < schema.entities().size(); ++e)
            for (auto x : a_.elements(e)) {
                if (m.fwd.count(x.value)) continue;
                for (auto y : b_.elements(e)) {
                    if (m.back.count(y.value)) continue;
                    Mapping trial = m;
                    std::deque<std::pair<ElementId, ElementId>> queue;
                    if (bind(trial, x, y, queue) && propagate(trial, std::move(queue)) && search(trial)) {
                        m = std::move(trial);
                        return true;
                    }
                }
                return fail("no counterpart for '" + a_.export_id(x) + "'");
            }
        return true;
    }

  private:
    bool fail(std::string why)
    {
        failure = std::move(why);
        return false;
    }

    const Instance &a_;
    const Instance &b_;
};

std::set<std::string> user_labels(const Instance &inst, ElementId e)
{
    std::set<std::string> out;
    for (auto m : inst.class_members(e))
        if (inst.is_user_declared(m)) out.insert(inst.label_of(m));
    return out;
}

} // namespace

UniversalityResult verify_universality(const Instance &sat, const Instance &alt)
{
    auto counter = [](std::string why) { return UniversalityResult{UniversalityVerdict::CounterExample, std::move(why)}; };
    if (!(sat.schema() == alt.schema())) return counter("instances are over different schemas");
    const auto &schema = sat.schema();
    for (std::size_t e = 0; e < schema.entities().size(); ++e)
        if (sat.class_count(e) != alt.class_count(e))
            return counter("entity '" + schema.entities()[e] + "' has " + std::to_string(sat.class_count(e)) + " vs " +
                           std::to_string(alt.class_count(e)) + " elements");

    IsoSearch iso(sat, alt);
    Mapping m;
    std::deque<std::pair<ElementId, ElementId>> queue;
    for (std::size_t e = 0; e < schema.entities().size(); ++e)
        for (auto x : sat.elements(e)) {
            auto users = user_labels(sat, x);
            if (users.empty()) continue;
            auto y = alt.find(*users.begin());
            if (!y || !alt.is_user_declared(*y)) return counter("user element '" + *users.begin() + "' is missing");
            if (user_labels(alt, *y) != users)
                return counter("user elements grouped with '" + *users.begin() + "' differ");
            if (!iso.bind(m, x, *y, queue)) return counter(iso.failure);
        }
    for (std::size_t e = 0; e < schema.entities().size(); ++e)
        for (auto y : alt.elements(e))
            if (!user_labels(alt, y).empty() && !m.back.count(y.value))
                return counter("user element '" + alt.export_id(y) + "' has no counterpart");
    if (!iso.propagate(m, std::move(queue))) return counter(iso.failure);
    if (!iso.search(m)) return counter(iso.failure);
    return {};
}

} // namespace catamerge

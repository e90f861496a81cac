#include "catamerge/acyclicity.hpp"

#include <deque>
#include <map>
#include <set>

namespace catamerge {

namespace {

void collect_path_edges(const Term &t, const std::map<std::string, std::string> &sorts, const Schema &schema,
                        const std::string &label, std::vector<DependencyEdge> &edges)
{
    if (t.kind == Term::Kind::Apply) {
        for (const auto &a : t.arguments)
            collect_path_edges(a, sorts, schema, label, edges);
        return;
    }
    if (t.kind != Term::Kind::Path) return;
    auto it = sorts.find(t.variable);
    if (it == sorts.end()) return;
    std::string at = it->second;
    std::string walked = t.variable;
    for (const auto &step : t.steps) {
        auto m = schema.member(at, step);
        if (!m || m->kind != Member::Kind::ForeignKey) return;
        const auto &fk = schema.foreign_keys()[m->index];
        walked += "." + step;
        edges.push_back({at, fk.target, DependencyEdge::Kind::Existential, label + ": " + walked});
        at = fk.target;
    }
}

} // namespace

std::vector<DependencyEdge> dependency_graph(const std::vector<Constraint> &constraints, const Schema &schema)
{
    std::vector<DependencyEdge> edges;
    for (const auto &c : constraints) {
        std::map<std::string, std::string> sorts;
        for (const auto &v : c.universals)
            sorts[v.name] = v.entity;
        for (const auto &v : c.existentials)
            sorts[v.name] = v.entity;
        for (const auto &a : c.premise) {
            collect_path_edges(a.lhs, sorts, schema, c.label, edges);
            collect_path_edges(a.rhs, sorts, schema, c.label, edges);
        }
        for (const auto &e : c.conclusion) {
            collect_path_edges(e.lhs, sorts, schema, c.label, edges);
            collect_path_edges(e.rhs, sorts, schema, c.label, edges);
        }
        for (const auto &u : c.existentials)
            for (const auto &x : c.universals)
                edges.push_back({x.entity, u.entity, DependencyEdge::Kind::Existential,
                                 c.label + ": exists " + u.name + " for each " + x.name});
    }
    return edges;
}

AcyclicityResult check_weak_acyclicity(const std::vector<Constraint> &constraints, const Schema &schema)
{
    auto edges = dependency_graph(constraints, schema);
    std::map<std::string, std::vector<std::size_t>> out;
    for (std::size_t i = 0; i < edges.size(); ++i)
        out[edges[i].from].push_back(i);

    // For each existential edge u => v, look for a path v ~> u.
    for (std::size_t start = 0; start < edges.size(); ++start) {
        if (edges[start].kind != DependencyEdge::Kind::Existential) continue;
        const std::string &goal = edges[start].from;
        std::map<std::string, std::size_t> via; // node -> edge that reached it
        std::deque<std::string> queue{edges[start].to};
        via[edges[start].to] = start;
        bool found = edges[start].to == goal;
        while (!queue.empty() && !found) {
            auto node = queue.front();
            queue.pop_front();
            for (auto ei : out[node]) {
                const auto &next = edges[ei].to;
                if (via.count(next)) continue;
                via[next] = ei;
                if (next == goal) {
                    found = true;
                    break;
                }
                queue.push_back(next);
            }
        }
        if (!found) continue;
        AcyclicityResult result{false, {}};
        std::string node = goal;
        if (edges[start].to != goal) {
            while (node != edges[start].to) {
                result.witness.insert(result.witness.begin(), edges[via[node]]);
                node = edges[via[node]].from;
            }
        }
        result.witness.insert(result.witness.begin(), edges[start]);
        return result;
    }
    return {};
}

std::string AcyclicityResult::describe() const
{
    if (acyclic) return "acyclic";
    std::string out = "cycle through an existential edge:";
    for (const auto &e : witness)
        out += "\n  " + e.from + (e.kind == DependencyEdge::Kind::Existential ? " => " : " -> ") + e.to + "  (" + e.cause + ")";
    return out;
}

} // namespace catamerge

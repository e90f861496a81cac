#pragma once

#include <string>
#include <vector>

#include "catamerge/schema.hpp"

namespace catamerge {

/// Edge of the chase dependency graph. Nodes are entities; an existential
/// edge A => B means an element of A can cause a fresh element of B to be
/// created, either because a TGD quantifies over A and invents a B, or
/// because a constraint mentions a path step f : A -> B whose value the chase
/// materializes when it is missing.
struct DependencyEdge
{
    enum class Kind { Regular, Existential };

    std::string from;
    std::string to;
    Kind kind = Kind::Existential;
    std::string cause;
};

std::vector<DependencyEdge> dependency_graph(const std::vector<Constraint> &constraints, const Schema &schema);

struct AcyclicityResult
{
    bool acyclic = true;
    std::vector<DependencyEdge> witness; // a cycle through an existential edge, in order

    std::string describe() const;
};

AcyclicityResult check_weak_acyclicity(const std::vector<Constraint> &constraints, const Schema &schema);

} // namespace catamerge

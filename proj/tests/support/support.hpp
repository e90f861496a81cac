#pragma once

#include <random>
#include <string>
#include <vector>

#include "catamerge/chase.hpp"
#include "catamerge/parser.hpp"
#include "catamerge/query.hpp"

namespace testing_support {

using namespace catamerge;

std::string fixture_path(const std::string &name);
std::string read_file(const std::string &path);

/// Loads fixture files by name; aborts the test run on diagnostics.
Workspace load_fixtures(const std::vector<std::string> &names);
Workspace load_texts(const std::vector<std::pair<std::string, std::string>> &named_texts);

std::vector<std::string> example1_files();
std::vector<std::string> example2_files();
std::vector<std::string> clash_files();

/// Σ-inserts every instance over an included schema and runs the chase.
Instance pre_instance(const Workspace &ws, const std::string &extension);
ChaseResult integrate(const Workspace &ws, const std::string &extension, ChaseConfig cfg = {});

/// Example 1 IFC instance text scaled to `rooms` rooms.
std::string scaled_ifc_instance(std::size_t rooms);

/// Naive evaluation: full cross product of the from-variables, every where
/// atom checked per tuple by walking the instance directly.
std::vector<std::vector<std::string>> oracle_rows(const QuerySpec &q, const Instance &inst);

/// Unordered comparison of result rows.
bool same_multiset(std::vector<std::vector<std::string>> a, std::vector<std::vector<std::string>> b);

struct RandomCase
{
    std::shared_ptr<const Schema> schema;
    Instance instance;
    std::vector<Constraint> constraints;
};

/// Random schema (at most 4 entities), instance (at most 30 elements) and a
/// weakly acyclic, well-typed constraint set. Constants are drawn so that
/// no two distinct constants of a type ever meet, which makes every set
/// satisfiable.
RandomCase random_case(std::mt19937 &rng);

} // namespace testing_support

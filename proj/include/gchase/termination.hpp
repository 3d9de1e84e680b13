#pragma once

#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "gchase/core.hpp"

namespace gchase {

/// (relation, attribute ordinal) vertex of the termination graphs; 1-based.
struct Position {
    std::string relation;
    int index = 1;

    friend bool operator==(const Position&, const Position&) = default;
    friend bool operator<(const Position& a, const Position& b) {
        return std::tie(a.relation, a.index) < std::tie(b.relation, b.index);
    }
};

using PositionEdge = std::pair<Position, Position>;

/// Dependency graph over attribute positions. Regular edges copy values,
/// special edges point at positions where fresh terms are invented.
struct PositionGraph {
    std::set<Position> nodes;
    std::set<PositionEdge> regular_edges;
    std::set<PositionEdge> special_edges;
};

enum class GraphVariant { Weak, Rich };

enum class Criterion { Rich, Weak, Safe, Rewriting, RewritingEgd };

struct Diagnostic {
    std::string dependency_id;
    std::string message;

    friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

/// Well-formedness of every dependency against the schema: arity agreement,
/// no nulls, no existential variables in bodies, head universal variables
/// covered by the body, egd terms in the body, s-t disjointness when
/// flagged. Empty result means all constraints are defined correctly.
std::vector<Diagnostic> validate_constraints(const std::vector<Dependency>& sigma,
                                             const Schema& schema);

/// Builds the weak or rich position graph of the tgds in `sigma` (egds
/// contribute nothing here). Weak draws edges only from the body positions
/// of universal variables that occur in the head; Rich lets special edges
/// start from every body position of every universal variable.
PositionGraph build_position_graph(const std::vector<Dependency>& sigma, GraphVariant variant);

/// Least fixpoint of positions that may carry invented terms: existential
/// head positions, plus head positions a universal variable is exported to
/// once all of its body positions are affected.
std::set<Position> affected_positions(const std::vector<Dependency>& sigma);

/// Runs one termination criterion and returns (verdict, explanation line).
/// An empty `sigma` is vacuously acyclic.
std::pair<bool, std::string> check_termination(const std::vector<Dependency>& sigma,
                                               Criterion criterion);

}  // namespace gchase

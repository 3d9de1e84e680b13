#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gchase/core.hpp"
#include "gchase/homomorphism.hpp"

namespace gchase {

enum class ChaseStatus { Fixpoint, FailedBottom, EmptyQuery, StepLimit };

enum class StepAction { AddedAtoms, Substituted, Conflict };

struct StepEntry {
    int step = 0;  // consecutive from 1
    std::string dependency_id;
    std::string binding;  // rendered trigger binding
    StepAction action = StepAction::AddedAtoms;
    std::string payload;

    friend bool operator==(const StepEntry&, const StepEntry&) = default;
};

/// Replayable record of a run: the termination-check lines that preceded it
/// (when checks were run) and one entry per chase step.
struct StepLog {
    std::vector<std::string> preamble;
    std::vector<StepEntry> entries;

    friend bool operator==(const StepLog&, const StepLog&) = default;
};

struct ChaseOutcome {
    ChaseStatus status = ChaseStatus::Fixpoint;
    GeneralizedInstance result;  // meaningful for Fixpoint; final state otherwise
    std::optional<Query> query;  // Fixpoint on a query object
    Substitution accumulated;    // composition of all egd substitutions
    StepLog log;
    int steps = 0;
};

/// One tgd step: extends the trigger binding by a fresh term per head
/// existential variable (a null for instance objects, an existential
/// variable for query objects; labels derive from the schema attribute at
/// the variable's position) and adds every instantiated head atom.
GeneralizedInstance apply_tgd_step(const GeneralizedInstance& i, const Dependency& d,
                                   const Trigger& t, FreshRegistry& reg);

struct EgdStepResult {
    enum class Kind { NewInstance, Bottom, Empty } kind = Kind::NewInstance;
    GeneralizedInstance instance;    // NewInstance only
    Substitution substitution;       // the single equated pair
};

/// One egd step. Two distinct constants fail the object (Bottom for
/// instances, Empty for queries); otherwise the lower-priority term is
/// replaced by the higher-priority one throughout the instance. Priority:
/// constant > universal variable > existential variable > null, ties to the
/// smaller (label, index).
EgdStepResult apply_egd_step(const GeneralizedInstance& i, const Dependency& d, const Trigger& t);

/// Runs the chase: scans the dependencies in input order, applies the first
/// active trigger per iteration, and stops at fixpoint, failure, or the
/// step limit. When every dependency is an s-t tgd, the fixpoint result is
/// the target instance (atoms over the head relations). For query objects
/// the fixpoint also carries the reconstructed query, provided `query_head`.
ChaseOutcome chase(const std::vector<Dependency>& sigma, const GeneralizedInstance& i0,
                   int max_steps, const std::optional<Atom>& query_head = std::nullopt,
                   const Schema* schema = nullptr);

}  // namespace gchase

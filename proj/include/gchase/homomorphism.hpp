#pragma once

#include <string>
#include <vector>

#include "gchase/core.hpp"

namespace gchase {

/// A homomorphism from a dependency body into a generalized instance:
/// applying `binding` to the k-th body atom yields `matched_atoms[k]`.
struct Trigger {
    std::string dependency_id;
    Substitution binding;             // rule set BodyHom
    std::vector<Atom> matched_atoms;  // one per body atom

    friend bool operator==(const Trigger&, const Trigger&) = default;
};

/// All body homomorphisms of `d` into `i`, found by backtracking over the
/// body atoms; candidates per atom are the instance atoms with the same
/// relation name. Returned in lexicographic order of the matched-atom list.
std::vector<Trigger> find_triggers(const Dependency& d, const GeneralizedInstance& i);

/// Tgd: true iff the binding has no HeadHom extension mapping every head
/// atom into `i`. Egd: true iff the images of the two equated terms differ.
bool is_active_trigger(const Trigger& t, const Dependency& d, const GeneralizedInstance& i);

/// True iff a single InstanceHom substitution maps every atom of `a` onto
/// some atom of `b`.
bool instance_hom_exists(const GeneralizedInstance& a, const GeneralizedInstance& b);

}  // namespace gchase

#include "gchase/homomorphism.hpp"

#include <functional>

namespace gchase {

namespace {

// Extends `binding` so that `pattern` maps onto `candidate`; false (binding
// possibly half-extended, callers keep a copy) when no consistent extension
// within the binding's rule set exists.
bool match_atom(Substitution& binding, const Atom& pattern, const Atom& candidate) {
    if (pattern.relation != candidate.relation || pattern.terms.size() != candidate.terms.size())
        return false;
    for (std::size_t k = 0; k < pattern.terms.size(); ++k) {
        const Term& from = pattern.terms[k];
        const Term& to = candidate.terms[k];
        if (from.is_constant()) {
            if (!(from == to)) return false;
            continue;
        }
        auto it = binding.mapping.find(from);
        if (it != binding.mapping.end()) {
            if (!(it->second == to)) return false;
            continue;
        }
        if (!rule_allows(binding.rule_set, from, to)) return false;
        binding.mapping.emplace(from, to);
    }
    return true;
}

// Backtracking search for one substitution mapping every pattern atom into
// the instance. `on_match` fires per complete match; returning true stops
// the search (existence queries), false enumerates on.
bool search_all(const std::vector<Atom>& patterns, const GeneralizedInstance& inst,
                Substitution binding, std::vector<Atom>& matched,
                const std::function<bool(const Substitution&, const std::vector<Atom>&)>& on_match) {
    if (matched.size() == patterns.size()) return on_match(binding, matched);
    const Atom& pattern = patterns[matched.size()];
    for (const Atom& candidate : inst.atoms) {
        if (candidate.relation != pattern.relation) continue;
        Substitution extended = binding;
        if (!match_atom(extended, pattern, candidate)) continue;
        matched.push_back(candidate);
        if (search_all(patterns, inst, std::move(extended), matched, on_match)) return true;
        matched.pop_back();
    }
    return false;
}

}  // namespace

std::vector<Trigger> find_triggers(const Dependency& d, const GeneralizedInstance& i) {
    std::vector<Trigger> out;
    Substitution binding;
    binding.rule_set = RuleSet::BodyHom;
    std::vector<Atom> matched;
    search_all(d.body, i, binding, matched,
               [&](const Substitution& b, const std::vector<Atom>& atoms) {
                   out.push_back(Trigger{d.id, b, atoms});
                   return false;
               });
    return out;
}

bool is_active_trigger(const Trigger& t, const Dependency& d, const GeneralizedInstance& i) {
    if (d.kind() == DependencyKind::Egd) {
        const EgdHead& eq = d.egd_head();
        return !(t.binding.apply(eq.left) == t.binding.apply(eq.right));
    }
    Substitution extension = t.binding;
    extension.rule_set = RuleSet::HeadHom;
    std::vector<Atom> matched;
    const bool extension_exists =
        search_all(d.tgd_head(), i, std::move(extension), matched,
                   [](const Substitution&, const std::vector<Atom>&) { return true; });
    return !extension_exists;
}

bool instance_hom_exists(const GeneralizedInstance& a, const GeneralizedInstance& b) {
    std::vector<Atom> patterns(a.atoms.begin(), a.atoms.end());
    Substitution hom;
    hom.rule_set = RuleSet::InstanceHom;
    std::vector<Atom> matched;
    return search_all(patterns, b, std::move(hom), matched,
                      [](const Substitution&, const std::vector<Atom>&) { return true; });
}

}  // namespace gchase

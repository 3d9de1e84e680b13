#include "gchase/chase.hpp"

#include <algorithm>
#include <tuple>

#include "gchase/termination.hpp"

namespace gchase {

namespace {

int priority(const Term& t) {
    switch (t.kind) {
        case TermKind::Constant: return 3;
        case TermKind::UniversalVar: return 2;
        case TermKind::ExistentialVar: return 1;
        case TermKind::Null: return 0;
    }
    return -1;
}

// Higher priority survives; within a kind the smaller (label, index) does.
bool survives_over(const Term& a, const Term& b) {
    if (priority(a) != priority(b)) return priority(a) > priority(b);
    return std::tie(a.label, a.index) < std::tie(b.label, b.index);
}

Atom replace_term(const Atom& a, const Term& from, const Term& to) {
    Atom out = a;
    for (Term& t : out.terms)
        if (t == from) t = to;
    return out;
}

// For runs where every dependency is an s-t tgd the result is the target
// instance; everything else keeps the full atom set.
GeneralizedInstance finalize_result(const std::vector<Dependency>& sigma,
                                    const GeneralizedInstance& final_state) {
    const bool all_source_target =
        !sigma.empty() && std::all_of(sigma.begin(), sigma.end(), [](const Dependency& d) {
            return d.kind() == DependencyKind::Tgd && d.source_target;
        });
    if (!all_source_target) return final_state;
    std::set<std::string> target_relations;
    for (const Dependency& d : sigma)
        for (const Atom& a : d.tgd_head()) target_relations.insert(a.relation);
    GeneralizedInstance out;
    out.object_kind = final_state.object_kind;
    for (const Atom& a : final_state.atoms)
        if (target_relations.count(a.relation) != 0) out.insert(a);
    return out;
}

std::string render_atoms(const std::vector<Atom>& atoms) {
    std::vector<std::string> parts;
    parts.reserve(atoms.size());
    for (const Atom& a : atoms) parts.push_back(a.render());
    return detail::join(parts, ", ");
}

}  // namespace

GeneralizedInstance apply_tgd_step(const GeneralizedInstance& i, const Dependency& d,
                                   const Trigger& t, FreshRegistry& reg) {
    if (d.kind() != DependencyKind::Tgd)
        throw ValidationError("apply_tgd_step requires a tgd");
    if (!is_active_trigger(t, d, i))
        throw InactiveTrigger("trigger " + t.binding.render() + " is not active for " + d.id);

    Substitution extension = t.binding;
    extension.rule_set = RuleSet::HeadHom;
    const TermKind fresh_kind = i.object_kind == ObjectKind::InstanceObject
                                    ? TermKind::Null
                                    : TermKind::ExistentialVar;
    for (const Atom& h : d.tgd_head())
        for (std::size_t k = 0; k < h.terms.size(); ++k) {
            const Term& term = h.terms[k];
            if (term.kind != TermKind::ExistentialVar || extension.maps(term)) continue;
            extension.mapping.emplace(term,
                                      reg.fresh(fresh_kind, reg.attribute_label(h.relation, k, term.label)));
        }

    GeneralizedInstance out = i;
    for (const Atom& h : d.tgd_head()) {
        Atom instantiated = apply_substitution(extension, h);
        for (const Term& t : instantiated.terms) {
            const bool ok = i.object_kind == ObjectKind::InstanceObject
                                ? (t.kind == TermKind::Constant || t.kind == TermKind::Null)
                                : t.kind != TermKind::Null;
            if (!ok)
                throw ValidationError("step would place " + t.render() + " from " +
                                      instantiated.render() + " into the object");
        }
        out.insert(std::move(instantiated));
    }
    return out;
}

EgdStepResult apply_egd_step(const GeneralizedInstance& i, const Dependency& d, const Trigger& t) {
    if (d.kind() != DependencyKind::Egd)
        throw ValidationError("apply_egd_step requires an egd");
    const Term u = t.binding.apply(d.egd_head().left);
    const Term v = t.binding.apply(d.egd_head().right);
    if (u == v)
        throw InactiveTrigger("trigger " + t.binding.render() + " is not active for " + d.id);

    EgdStepResult result;
    if (u.is_constant() && v.is_constant()) {
        result.kind = i.object_kind == ObjectKind::InstanceObject ? EgdStepResult::Kind::Bottom
                                                                  : EgdStepResult::Kind::Empty;
        return result;
    }

    const Term& survivor = survives_over(u, v) ? u : v;
    const Term& loser = survives_over(u, v) ? v : u;
    result.kind = EgdStepResult::Kind::NewInstance;
    result.substitution.rule_set = i.object_kind == ObjectKind::InstanceObject
                                       ? RuleSet::InstanceHom
                                       : RuleSet::HeadHom;
    result.substitution.mapping.emplace(loser, survivor);
    result.instance.object_kind = i.object_kind;
    for (const Atom& a : i.atoms) result.instance.insert(replace_term(a, loser, survivor));
    return result;
}

ChaseOutcome chase(const std::vector<Dependency>& sigma, const GeneralizedInstance& i0,
                   int max_steps, const std::optional<Atom>& query_head, const Schema* schema) {
    if (max_steps <= 0) throw ValidationError("max_steps must be positive");
    if (auto bad = i0.invariant_violation()) throw ValidationError(*bad);
    {
        const auto diagnostics = validate_constraints(sigma, schema ? *schema : Schema{});
        if (!diagnostics.empty())
            throw ValidationError(diagnostics.front().dependency_id + ": " +
                                  diagnostics.front().message);
    }

    FreshRegistry registry(schema ? *schema : Schema{});
    registry.observe(i0);
    for (const Dependency& d : sigma) registry.observe(d);
    if (query_head) registry.observe(*query_head);

    ChaseOutcome out;
    out.accumulated.rule_set = i0.object_kind == ObjectKind::InstanceObject ? RuleSet::InstanceHom
                                                                            : RuleSet::HeadHom;
    GeneralizedInstance current = i0;
    int steps = 0;

    for (;;) {
        const Dependency* fired = nullptr;
        Trigger trigger;
        for (const Dependency& d : sigma) {
            for (Trigger& t : find_triggers(d, current)) {
                if (is_active_trigger(t, d, current)) {
                    fired = &d;
                    trigger = std::move(t);
                    break;
                }
            }
            if (fired != nullptr) break;
        }

        if (fired == nullptr) {
            out.status = ChaseStatus::Fixpoint;
            out.steps = steps;
            out.result = finalize_result(sigma, current);
            if (current.object_kind == ObjectKind::QueryObject && query_head)
                out.query = unfreeze_query(out.result, *query_head, out.accumulated);
            return out;
        }
        if (steps == max_steps) {
            out.status = ChaseStatus::StepLimit;
            out.steps = steps;
            out.result = std::move(current);
            return out;
        }

        if (fired->kind() == DependencyKind::Tgd) {
            GeneralizedInstance next = apply_tgd_step(current, *fired, trigger, registry);
            std::vector<Atom> added;
            for (const Atom& a : next.atoms)
                if (current.atoms.count(a) == 0) added.push_back(a);
            out.log.entries.push_back(StepEntry{steps + 1, fired->id, trigger.binding.render(),
                                                StepAction::AddedAtoms, render_atoms(added)});
            current = std::move(next);
        } else {
            EgdStepResult step = apply_egd_step(current, *fired, trigger);
            const Term u = trigger.binding.apply(fired->egd_head().left);
            const Term v = trigger.binding.apply(fired->egd_head().right);
            if (step.kind != EgdStepResult::Kind::NewInstance) {
                out.log.entries.push_back(StepEntry{steps + 1, fired->id, trigger.binding.render(),
                                                    StepAction::Conflict,
                                                    u.render() + " != " + v.render()});
                out.status = step.kind == EgdStepResult::Kind::Bottom ? ChaseStatus::FailedBottom
                                                                      : ChaseStatus::EmptyQuery;
                out.steps = steps + 1;
                out.result = std::move(current);
                return out;
            }
            const auto& [loser, survivor] = *step.substitution.mapping.begin();
            out.log.entries.push_back(StepEntry{steps + 1, fired->id, trigger.binding.render(),
                                                StepAction::Substituted,
                                                loser.render() + " -> " + survivor.render()});
            out.accumulated = compose(step.substitution, out.accumulated);
            current = std::move(step.instance);
        }
        ++steps;
    }
}

}  // namespace gchase

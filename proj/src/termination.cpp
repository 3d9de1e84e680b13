#include "gchase/termination.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <string>

namespace gchase {

namespace {

std::vector<const Dependency*> tgds_of(const std::vector<Dependency>& sigma) {
    std::vector<const Dependency*> out;
    for (const Dependency& d : sigma)
        if (d.kind() == DependencyKind::Tgd) out.push_back(&d);
    return out;
}

// Occurrences of each universal variable, as 1-based positions.
std::map<Term, std::vector<Position>> universal_positions(const std::vector<Atom>& atoms) {
    std::map<Term, std::vector<Position>> out;
    for (const Atom& a : atoms)
        for (std::size_t k = 0; k < a.terms.size(); ++k)
            if (a.terms[k].kind == TermKind::UniversalVar)
                out[a.terms[k]].push_back(Position{a.relation, static_cast<int>(k + 1)});
    return out;
}

std::vector<Position> existential_head_positions(const std::vector<Atom>& head) {
    std::vector<Position> out;
    for (const Atom& a : head)
        for (std::size_t k = 0; k < a.terms.size(); ++k)
            if (a.terms[k].kind == TermKind::ExistentialVar)
                out.push_back(Position{a.relation, static_cast<int>(k + 1)});
    return out;
}

void add_atom_positions(std::set<Position>& nodes, const std::vector<Atom>& atoms) {
    for (const Atom& a : atoms)
        for (std::size_t k = 0; k < a.terms.size(); ++k)
            nodes.insert(Position{a.relation, static_cast<int>(k + 1)});
}

// Exact test: a cycle passes through a special edge iff some special edge
// has both endpoints in one strongly connected component.
bool has_special_cycle(const PositionGraph& g) {
    std::vector<Position> nodes(g.nodes.begin(), g.nodes.end());
    std::map<Position, int> id;
    for (std::size_t k = 0; k < nodes.size(); ++k) id[nodes[k]] = static_cast<int>(k);
    std::vector<std::vector<int>> adj(nodes.size());
    auto add_edges = [&](const std::set<PositionEdge>& edges) {
        for (const auto& [u, v] : edges) adj[id.at(u)].push_back(id.at(v));
    };
    add_edges(g.regular_edges);
    add_edges(g.special_edges);

    // Tarjan
    const int n = static_cast<int>(nodes.size());
    std::vector<int> order(n, -1), low(n, 0), comp(n, -1), stack;
    std::vector<bool> on_stack(n, false);
    int counter = 0, components = 0;
    std::function<void(int)> strongconnect = [&](int v) {
        order[v] = low[v] = counter++;
        stack.push_back(v);
        on_stack[v] = true;
        for (int w : adj[v]) {
            if (order[w] == -1) {
                strongconnect(w);
                low[v] = std::min(low[v], low[w]);
            } else if (on_stack[w]) {
                low[v] = std::min(low[v], order[w]);
            }
        }
        if (low[v] == order[v]) {
            for (;;) {
                int w = stack.back();
                stack.pop_back();
                on_stack[w] = false;
                comp[w] = components;
                if (w == v) break;
            }
            ++components;
        }
    };
    for (int v = 0; v < n; ++v)
        if (order[v] == -1) strongconnect(v);

    for (const auto& [u, v] : g.special_edges)
        if (comp[id.at(u)] == comp[id.at(v)]) return true;
    return false;
}

// Weak-style graph restricted to variables whose body positions are all
// affected; the only variables that can ever carry an invented term.
PositionGraph safe_graph(const std::vector<Dependency>& sigma) {
    const std::set<Position> affected = affected_positions(sigma);
    PositionGraph g;
    for (const Dependency* d : tgds_of(sigma)) {
        add_atom_positions(g.nodes, d->body);
        add_atom_positions(g.nodes, d->tgd_head());
        auto body_pos = universal_positions(d->body);
        auto head_pos = universal_positions(d->tgd_head());
        auto special_targets = existential_head_positions(d->tgd_head());
        for (const auto& [var, sources] : body_pos) {
            auto in_head = head_pos.find(var);
            if (in_head == head_pos.end()) continue;
            const bool all_affected = std::all_of(sources.begin(), sources.end(),
                                                  [&](const Position& p) { return affected.count(p) != 0; });
            if (!all_affected) continue;
            for (const Position& p : sources) {
                for (const Position& q : in_head->second) g.regular_edges.insert({p, q});
                for (const Position& q : special_targets) g.special_edges.insert({p, q});
            }
        }
    }
    return g;
}

// --- adornment-based rewriting ---------------------------------------------
//
// Relations are specialized by {b,f} adornments starting from the all-bound
// base; an 'f' position may carry an invented term. A body variable is bound
// as soon as one of its occurrences sits at a bound position. Head positions
// of existential variables and of free universal variables are adorned 'f'.
// The adorned copies of the tgds freeze bound variables to a constant, so
// the weak acyclicity test of the adorned set only tracks terms that can
// actually be invented.

using AdornmentMap = std::map<std::string, std::set<std::string>>;

std::string adorned_name(const std::string& relation, const std::string& adornment) {
    return relation + "#" + adornment;
}

bool variable_bound(const Term& var, const std::vector<Atom>& body,
                    const std::vector<std::string>& adornments) {
    for (std::size_t a = 0; a < body.size(); ++a)
        for (std::size_t k = 0; k < body[a].terms.size(); ++k)
            if (body[a].terms[k] == var && adornments[a][k] == 'b') return true;
    return false;
}

// Enumerates every combination of generated adornments for the body atoms.
void for_each_combo(const std::vector<Atom>& body, const AdornmentMap& generated,
                    const std::function<void(const std::vector<std::string>&)>& fn) {
    std::vector<std::vector<std::string>> options;
    for (const Atom& a : body) {
        auto it = generated.find(a.relation);
        if (it == generated.end() || it->second.empty()) return;  // no match possible
        options.emplace_back(it->second.begin(), it->second.end());
    }
    std::vector<std::string> combo(body.size());
    std::function<void(std::size_t)> rec = [&](std::size_t k) {
        if (k == body.size()) {
            fn(combo);
            return;
        }
        for (const std::string& adornment : options[k]) {
            combo[k] = adornment;
            rec(k + 1);
        }
    };
    rec(0);
}

std::string head_adornment(const Atom& head_atom, const Dependency& d,
                           const std::vector<std::string>& body_adornments) {
    std::string out(head_atom.terms.size(), 'b');
    for (std::size_t k = 0; k < head_atom.terms.size(); ++k) {
        const Term& t = head_atom.terms[k];
        if (t.kind == TermKind::ExistentialVar) {
            out[k] = 'f';
        } else if (t.kind == TermKind::UniversalVar &&
                   !variable_bound(t, d.body, body_adornments)) {
            out[k] = 'f';
        }
    }
    return out;
}

AdornmentMap propagate_adornments(const std::vector<Dependency>& sigma) {
    AdornmentMap generated;
    for (const Dependency& d : sigma) {
        auto seed = [&](const std::vector<Atom>& atoms) {
            for (const Atom& a : atoms) generated[a.relation].insert(std::string(a.terms.size(), 'b'));
        };
        seed(d.body);
        if (d.kind() == DependencyKind::Tgd) seed(d.tgd_head());
    }
    bool changed = true;
    while (changed) {
        changed = false;
        for (const Dependency& d : sigma) {
            if (d.kind() != DependencyKind::Tgd) continue;
            for_each_combo(d.body, generated, [&](const std::vector<std::string>& combo) {
                for (const Atom& h : d.tgd_head()) {
                    std::string adornment = head_adornment(h, d, combo);
                    if (generated[h.relation].insert(adornment).second) changed = true;
                }
            });
        }
    }
    return generated;
}

std::vector<Dependency> adorned_copies(const std::vector<Dependency>& sigma,
                                       const AdornmentMap& generated) {
    const Term frozen = Term::text("!");
    std::vector<Dependency> copies;
    for (const Dependency& d : sigma) {
        if (d.kind() != DependencyKind::Tgd) continue;
        for_each_combo(d.body, generated, [&](const std::vector<std::string>& combo) {
            Dependency copy;
            copy.id = d.id;
            for (std::size_t a = 0; a < d.body.size(); ++a) {
                Atom atom{adorned_name(d.body[a].relation, combo[a]), d.body[a].terms};
                for (Term& t : atom.terms)
                    if (t.kind == TermKind::UniversalVar && variable_bound(t, d.body, combo))
                        t = frozen;
                copy.body.push_back(std::move(atom));
            }
            std::vector<Atom> head;
            for (const Atom& h : d.tgd_head()) {
                Atom atom{adorned_name(h.relation, head_adornment(h, d, combo)), h.terms};
                for (Term& t : atom.terms)
                    if (t.kind == TermKind::UniversalVar && variable_bound(t, d.body, combo))
                        t = frozen;
                head.push_back(std::move(atom));
            }
            copy.head = std::move(head);
            copies.push_back(std::move(copy));
        });
    }
    return copies;
}

// Egd-equated positions whose variables may both carry invented terms are
// contracted before the cycle test; a merge of two nulls lets either one
// travel along the other's paths.
PositionGraph contract_egd_equalities(PositionGraph g, const std::vector<Dependency>& sigma,
                                      const AdornmentMap& generated) {
    std::map<Position, Position> parent;
    std::function<Position(Position)> find = [&](Position p) -> Position {
        auto it = parent.find(p);
        if (it == parent.end() || it->second == p) return p;
        Position root = find(it->second);
        parent[p] = root;
        return root;
    };
    auto unite = [&](const Position& a, const Position& b) {
        Position ra = find(a), rb = find(b);
        if (!(ra == rb)) parent[ra] = rb;
    };

    for (const Dependency& d : sigma) {
        if (d.kind() != DependencyKind::Egd) continue;
        const EgdHead& eq = d.egd_head();
        if (eq.left.kind != TermKind::UniversalVar || eq.right.kind != TermKind::UniversalVar)
            continue;
        if (eq.left == eq.right) continue;  // never an active trigger
        for_each_combo(d.body, generated, [&](const std::vector<std::string>& combo) {
            if (variable_bound(eq.left, d.body, combo) || variable_bound(eq.right, d.body, combo))
                return;
            std::vector<Position> equated;
            for (std::size_t a = 0; a < d.body.size(); ++a)
                for (std::size_t k = 0; k < d.body[a].terms.size(); ++k)
                    if (d.body[a].terms[k] == eq.left || d.body[a].terms[k] == eq.right)
                        equated.push_back(Position{adorned_name(d.body[a].relation, combo[a]),
                                                   static_cast<int>(k + 1)});
            for (std::size_t k = 1; k < equated.size(); ++k) unite(equated[0], equated[k]);
            for (const Position& p : equated) g.nodes.insert(p);
        });
    }

    PositionGraph contracted;
    for (const Position& p : g.nodes) contracted.nodes.insert(find(p));
    for (const auto& [u, v] : g.regular_edges) contracted.regular_edges.insert({find(u), find(v)});
    for (const auto& [u, v] : g.special_edges) contracted.special_edges.insert({find(u), find(v)});
    return contracted;
}

bool rewriting_acyclic(const std::vector<Dependency>& sigma, bool with_egds) {
    AdornmentMap generated = propagate_adornments(sigma);
    PositionGraph graph = build_position_graph(adorned_copies(sigma, generated), GraphVariant::Weak);
    if (with_egds) graph = contract_egd_equalities(std::move(graph), sigma, generated);
    return !has_special_cycle(graph);
}

}  // namespace

std::vector<Diagnostic> validate_constraints(const std::vector<Dependency>& sigma,
                                             const Schema& schema) {
    std::vector<Diagnostic> out;
    for (const Dependency& d : sigma) {
        auto report = [&](std::string message) {
            out.push_back(Diagnostic{d.id, std::move(message)});
        };

        auto check_atoms = [&](const std::vector<Atom>& atoms, const char* part) {
            for (const Atom& a : atoms) {
                if (!schema.relations.empty()) {
                    const RelationSchema* r = schema.find(a.relation);
                    if (r == nullptr) {
                        report(std::string(part) + " atom " + a.render() +
                               " uses undeclared relation " + a.relation);
                    } else if (r->arity() != a.terms.size()) {
                        report(std::string(part) + " atom " + a.render() + " has arity " +
                               std::to_string(a.terms.size()) + ", schema declares " +
                               std::to_string(r->arity()));
                    }
                }
                for (const Term& t : a.terms)
                    if (t.kind == TermKind::Null)
                        report(std::string(part) + " atom " + a.render() +
                               " contains null " + t.render());
            }
        };
        check_atoms(d.body, "body");

        std::set<Term> body_universals;
        for (const Atom& a : d.body)
            for (const Term& t : a.terms) {
                if (t.kind == TermKind::ExistentialVar)
                    report("body contains existential variable " + t.render());
                if (t.kind == TermKind::UniversalVar) body_universals.insert(t);
            }

        if (d.kind() == DependencyKind::Tgd) {
            check_atoms(d.tgd_head(), "head");
            for (const Atom& a : d.tgd_head())
                for (const Term& t : a.terms)
                    if (t.kind == TermKind::UniversalVar && body_universals.count(t) == 0)
                        report("head variable " + t.render() + " does not occur in the body");
            if (d.source_target) {
                std::set<std::string> body_rels, head_rels;
                for (const Atom& a : d.body) body_rels.insert(a.relation);
                for (const Atom& a : d.tgd_head()) head_rels.insert(a.relation);
                for (const std::string& r : head_rels)
                    if (body_rels.count(r) != 0)
                        report("s-t tgd uses relation " + r + " in both body and head");
            }
        } else {
            std::set<Term> body_terms;
            for (const Atom& a : d.body)
                for (const Term& t : a.terms) body_terms.insert(t);
            for (const Term& t : {d.egd_head().left, d.egd_head().right}) {
                if (t.kind == TermKind::Null || t.kind == TermKind::ExistentialVar)
                    report("egd equates inadmissible term " + t.render());
                else if (body_terms.count(t) == 0)
                    report("equated term " + t.render() + " does not occur in the body");
            }
            if (d.source_target) report("egds cannot be flagged source-to-target");
        }
    }
    return out;
}

PositionGraph build_position_graph(const std::vector<Dependency>& sigma, GraphVariant variant) {
    PositionGraph g;
    for (const Dependency* d : tgds_of(sigma)) {
        add_atom_positions(g.nodes, d->body);
        add_atom_positions(g.nodes, d->tgd_head());
        auto body_pos = universal_positions(d->body);
        auto head_pos = universal_positions(d->tgd_head());
        auto special_targets = existential_head_positions(d->tgd_head());
        for (const auto& [var, sources] : body_pos) {
            auto in_head = head_pos.find(var);
            const bool exported = in_head != head_pos.end();
            if (!exported && variant == GraphVariant::Weak) continue;
            for (const Position& p : sources) {
                if (exported)
                    for (const Position& q : in_head->second) g.regular_edges.insert({p, q});
                for (const Position& q : special_targets) g.special_edges.insert({p, q});
            }
        }
    }
    return g;
}

std::set<Position> affected_positions(const std::vector<Dependency>& sigma) {
    std::set<Position> affected;
    const auto tgds = tgds_of(sigma);
    for (const Dependency* d : tgds)
        for (const Position& p : existential_head_positions(d->tgd_head())) affected.insert(p);

    bool changed = true;
    while (changed) {
        changed = false;
        for (const Dependency* d : tgds) {
            auto body_pos = universal_positions(d->body);
            auto head_pos = universal_positions(d->tgd_head());
            for (const auto& [var, targets] : head_pos) {
                auto in_body = body_pos.find(var);
                if (in_body == body_pos.end()) continue;
                const bool all_affected =
                    std::all_of(in_body->second.begin(), in_body->second.end(),
                                [&](const Position& p) { return affected.count(p) != 0; });
                if (!all_affected) continue;
                for (const Position& q : targets)
                    if (affected.insert(q).second) changed = true;
            }
        }
    }
    return affected;
}

std::pair<bool, std::string> check_termination(const std::vector<Dependency>& sigma,
                                               Criterion criterion) {
    if (sigma.empty()) return {true, "vacuously acyclic"};
    switch (criterion) {
        case Criterion::Rich: {
            const bool ok = !has_special_cycle(build_position_graph(sigma, GraphVariant::Rich));
            return {ok, ok ? "tgds are richly acyclic -> Standard Chase will definitely terminate."
                           : "tgds are not richly acyclic -> Standard Chase may not terminate."};
        }
        case Criterion::Weak: {
            const bool ok = !has_special_cycle(build_position_graph(sigma, GraphVariant::Weak));
            return {ok, ok ? "tgds are weakly acyclic -> Standard Chase will definitely terminate."
                           : "tgds are not weakly acyclic -> Standard Chase may not terminate."};
        }
        case Criterion::Safe: {
            const bool ok = !has_special_cycle(safe_graph(sigma));
            return {ok, ok ? "tgds are safe -> Standard Chase will definitely terminate."
                           : "tgds are not safe -> Standard Chase may not terminate."};
        }
        case Criterion::Rewriting: {
            const bool ok = rewriting_acyclic(sigma, false);
            return {ok, ok ? "Constraint rewriting shows that tgds are acyclic -> Chase will "
                             "definitely terminate."
                           : "Constraint rewriting does not show that tgds are acyclic -> Chase "
                             "may not terminate."};
        }
        case Criterion::RewritingEgd: {
            const bool ok = rewriting_acyclic(sigma, true);
            return {ok, ok ? "Constraint rewriting shows that tgds/egds are acyclic -> Chase "
                             "will definitely terminate."
                           : "Constraint rewriting does not show that tgds/egds are acyclic -> "
                             "Chase may not terminate."};
        }
    }
    return {false, "unknown criterion"};
}

}  // namespace gchase

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace gchase {

/// Base class of every error the library throws.
struct ChaseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A substitution tried to replace a term outside its active rule set.
struct RuleViolation : ChaseError {
    using ChaseError::ChaseError;
};

/// A dependency, instance, or query breaks a structural invariant.
struct ValidationError : ChaseError {
    using ChaseError::ChaseError;
};

/// A step was requested for a trigger that is not active.
struct InactiveTrigger : ChaseError {
    using ChaseError::ChaseError;
};

/// Arity or relation mismatch against the active schema. Parsing fills in
/// the 1-based source location; API-level throwers leave it at 0.
struct SchemaMismatch : ChaseError {
    int line = 0;
    int column = 0;
    explicit SchemaMismatch(const std::string& msg, int line = 0, int column = 0)
        : ChaseError(msg), line(line), column(column) {}
};

enum class TermKind { Constant, Null, UniversalVar, ExistentialVar };

/// A term of a generalized tuple: a typed constant (integer or text), a
/// labeled null, or a universally/existentially quantified variable.
/// Constants are identified by value, everything else by (kind, label,
/// index); integer and text constants never compare equal.
struct Term {
    TermKind kind = TermKind::Constant;
    std::variant<std::monostate, std::int64_t, std::string> value;  // constants only
    std::string label;                                              // nulls and variables
    std::uint32_t index = 0;

    static Term integer(std::int64_t v);
    static Term text(std::string v);
    static Term null(std::string label, std::uint32_t index);
    static Term universal(std::string label, std::uint32_t index);
    static Term existential(std::string label, std::uint32_t index);

    bool is_constant() const { return kind == TermKind::Constant; }
    bool is_int() const { return std::holds_alternative<std::int64_t>(value); }
    bool is_text() const { return std::holds_alternative<std::string>(value); }

    /// `'text'`, an integer literal, or `#V_`/`#E_`/`#N_<label>_<index>`.
    std::string render() const;

    /// Inverse of render(); nullopt when `s` is not a valid term token.
    static std::optional<Term> parse(std::string_view s);

    friend bool operator==(const Term&, const Term&) = default;
};

/// Canonical order: by rendered form. Every container and every piece of
/// output in the library sorts with this, which keeps results reproducible.
bool operator<(const Term& a, const Term& b);

struct Atom {
    std::string relation;
    std::vector<Term> terms;

    std::string render() const;

    friend bool operator==(const Atom&, const Atom&) = default;
};

/// Lexicographic by (relation name, rendered terms).
bool operator<(const Atom& a, const Atom& b);

struct RelationSchema {
    std::string name;
    std::vector<std::string> attributes;

    std::size_t arity() const { return attributes.size(); }

    friend bool operator==(const RelationSchema&, const RelationSchema&) = default;
};

struct Schema {
    std::vector<RelationSchema> relations;

    const RelationSchema* find(std::string_view name) const;

    friend bool operator==(const Schema&, const Schema&) = default;
};

enum class ObjectKind { InstanceObject, QueryObject };

/// A set of atoms that uniformly represents either a database instance
/// (constants and nulls) or a frozen query body (constants and variables).
struct GeneralizedInstance {
    ObjectKind object_kind = ObjectKind::InstanceObject;
    std::set<Atom> atoms;

    /// Set semantics: duplicates are absorbed. Returns true if inserted.
    bool insert(Atom a) { return atoms.insert(std::move(a)).second; }

    /// One-pass check of the kind-specific term restrictions; nullopt when
    /// the invariant holds.
    std::optional<std::string> invariant_violation() const;

    friend bool operator==(const GeneralizedInstance&, const GeneralizedInstance&) = default;
};

enum class DependencyKind { Tgd, Egd };

struct EgdHead {
    Term left;
    Term right;

    friend bool operator==(const EgdHead&, const EgdHead&) = default;
};

/// A tuple-generating or equality-generating dependency. Tgds carry a list
/// of head atoms, egds a pair of terms to equate; `source_target` flags
/// s-t tgds whose body and head relations are disjoint.
struct Dependency {
    std::string id;
    bool source_target = false;
    std::vector<Atom> body;
    std::variant<std::vector<Atom>, EgdHead> head;

    DependencyKind kind() const {
        return head.index() == 0 ? DependencyKind::Tgd : DependencyKind::Egd;
    }
    const std::vector<Atom>& tgd_head() const { return std::get<std::vector<Atom>>(head); }
    const EgdHead& egd_head() const { return std::get<EgdHead>(head); }

    friend bool operator==(const Dependency&, const Dependency&) = default;
};

/// Name of the distinguished answer relation a query head ranges over.
/// Starts with '_' so it can never collide with a parsed relation name.
inline constexpr std::string_view kAnswerRelation = "_ans";

struct Query {
    std::vector<Atom> body;
    Atom head;  // over kAnswerRelation

    friend bool operator==(const Query&, const Query&) = default;
};

/// Which substitution rules a mapping may use:
///   BodyHom      dependency body -> generalized instance
///   HeadHom      dependency head -> generalized instance
///   InstanceHom  generalized instance -> generalized instance
enum class RuleSet { BodyHom, HeadHom, InstanceHom };

/// A finite term mapping restricted by a rule set. Terms outside the
/// mapping are treated as fixed, so the empty mapping is the identity.
struct Substitution {
    RuleSet rule_set = RuleSet::InstanceHom;
    std::map<Term, Term> mapping;

    const Term& apply(const Term& t) const;
    bool maps(const Term& t) const { return mapping.count(t) != 0; }
    bool is_identity() const { return mapping.empty(); }

    /// `{a -> b, c -> d}`, sorted by domain term.
    std::string render() const;

    friend bool operator==(const Substitution&, const Substitution&) = default;
};

/// Whether `from -> to` is admissible under the rule set:
///   BodyHom      constants fixed; a universal variable may take a constant,
///                a null, or any variable.
///   HeadHom      BodyHom plus: an existential variable may take a constant,
///                a null, or any variable.
///   InstanceHom  constants fixed; nulls may take constants or nulls;
///                existential variables constants or variables (no nulls);
///                universal variables only constants or themselves.
bool rule_allows(RuleSet rs, const Term& from, const Term& to);

/// Replaces every term of `a` by its image; throws RuleViolation if any
/// single replacement (identity included) is outside the rule set.
Atom apply_substitution(const Substitution& s, const Atom& a);

/// Pointwise composition: compose(outer, inner)(t) = outer(inner(t)).
/// Both arguments must carry the same rule set, which the composite must
/// still satisfy.
Substitution compose(const Substitution& outer, const Substitution& inner);

/// Tracks every (kind, label, index) seen in a problem so freshly issued
/// nulls and existential variables never collide with user-supplied ones.
/// The only mutable state of a chase run; one registry per run.
class FreshRegistry {
public:
    FreshRegistry() = default;
    explicit FreshRegistry(Schema schema) : schema_(std::move(schema)) {}

    void observe(const Term& t);
    void observe(const Atom& a);
    void observe(const GeneralizedInstance& i);
    void observe(const Dependency& d);

    /// Smallest index not yet used for (kind, label); registers the result.
    /// `kind` must be Null or ExistentialVar.
    Term fresh(TermKind kind, const std::string& label);

    /// Attribute name at a 0-based position of a relation, used to derive
    /// labels for fresh terms; `fallback` when the relation is unknown.
    std::string attribute_label(const std::string& relation, std::size_t position,
                                const std::string& fallback) const;

private:
    Schema schema_;
    std::map<std::pair<TermKind, std::string>, std::set<std::uint32_t>> used_;
};

/// Materializes a query body as a QueryObject instance, variables carried
/// over verbatim; returns the frozen instance and the preserved head.
std::pair<GeneralizedInstance, Atom> freeze_query(const Query& q, const Schema& schema);

/// Rebuilds a query from a chased QueryObject: body in canonical atom
/// order, head rewritten by the accumulated substitution. Throws
/// RuleViolation if an existential variable would surface in the head.
Query unfreeze_query(const GeneralizedInstance& i, const Atom& head, const Substitution& acc);

namespace detail {
std::string join(const std::vector<std::string>& parts, std::string_view sep);
}

}  // namespace gchase

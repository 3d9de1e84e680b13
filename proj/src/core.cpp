#include "gchase/core.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

namespace gchase {

namespace detail {

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i > 0) out += sep;
        out += parts[i];
    }
    return out;
}

}  // namespace detail

Term Term::integer(std::int64_t v) {
    Term t;
    t.kind = TermKind::Constant;
    t.value = v;
    return t;
}

Term Term::text(std::string v) {
    Term t;
    t.kind = TermKind::Constant;
    t.value = std::move(v);
    return t;
}

static Term labeled(TermKind kind, std::string label, std::uint32_t index) {
    Term t;
    t.kind = kind;
    t.label = std::move(label);
    t.index = index;
    return t;
}

Term Term::null(std::string label, std::uint32_t index) {
    return labeled(TermKind::Null, std::move(label), index);
}

Term Term::universal(std::string label, std::uint32_t index) {
    return labeled(TermKind::UniversalVar, std::move(label), index);
}

Term Term::existential(std::string label, std::uint32_t index) {
    return labeled(TermKind::ExistentialVar, std::move(label), index);
}

std::string Term::render() const {
    switch (kind) {
        case TermKind::Constant:
            if (is_int()) return std::to_string(std::get<std::int64_t>(value));
            return "'" + std::get<std::string>(value) + "'";
        case TermKind::Null:
            return "#N_" + label + "_" + std::to_string(index);
        case TermKind::UniversalVar:
            return "#V_" + label + "_" + std::to_string(index);
        case TermKind::ExistentialVar:
            return "#E_" + label + "_" + std::to_string(index);
    }
    return {};
}

static bool valid_label(std::string_view s) {
    if (s.empty() || !std::isalpha(static_cast<unsigned char>(s.front()))) return false;
    return std::all_of(s.begin(), s.end(), [](unsigned char c) {
        return std::isalnum(c) || c == '_';
    });
}

std::optional<Term> Term::parse(std::string_view s) {
    if (s.empty()) return std::nullopt;
    if (s.front() == '\'') {
        if (s.size() < 2 || s.back() != '\'') return std::nullopt;
        std::string_view body = s.substr(1, s.size() - 2);
        if (body.find('\'') != std::string_view::npos) return std::nullopt;
        return Term::text(std::string(body));
    }
    if (s.front() == '#') {
        if (s.size() < 4 || s[2] != '_') return std::nullopt;
        TermKind kind;
        switch (s[1]) {
            case 'V': kind = TermKind::UniversalVar; break;
            case 'E': kind = TermKind::ExistentialVar; break;
            case 'N': kind = TermKind::Null; break;
            default: return std::nullopt;
        }
        std::string_view rest = s.substr(3);
        std::size_t split = rest.rfind('_');
        if (split == std::string_view::npos) return std::nullopt;
        std::string_view label = rest.substr(0, split);
        std::string_view digits = rest.substr(split + 1);
        if (!valid_label(label) || digits.empty()) return std::nullopt;
        std::uint32_t index = 0;
        auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), index);
        if (ec != std::errc{} || ptr != digits.data() + digits.size() || index == 0)
            return std::nullopt;
        return labeled(kind, std::string(label), index);
    }
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return Term::integer(v);
}

bool operator<(const Term& a, const Term& b) {
    return a.render() < b.render();
}

std::string Atom::render() const {
    std::vector<std::string> parts;
    parts.reserve(terms.size());
    for (const Term& t : terms) parts.push_back(t.render());
    return relation + "(" + detail::join(parts, ",") + ")";
}

bool operator<(const Atom& a, const Atom& b) {
    if (a.relation != b.relation) return a.relation < b.relation;
    const std::size_t n = std::min(a.terms.size(), b.terms.size());
    for (std::size_t i = 0; i < n; ++i) {
        std::string ra = a.terms[i].render();
        std::string rb = b.terms[i].render();
        if (ra != rb) return ra < rb;
    }
    return a.terms.size() < b.terms.size();
}

const RelationSchema* Schema::find(std::string_view name) const {
    for (const RelationSchema& r : relations)
        if (r.name == name) return &r;
    return nullptr;
}

std::optional<std::string> GeneralizedInstance::invariant_violation() const {
    for (const Atom& a : atoms) {
        for (const Term& t : a.terms) {
            const bool ok = object_kind == ObjectKind::InstanceObject
                                ? (t.kind == TermKind::Constant || t.kind == TermKind::Null)
                                : t.kind != TermKind::Null;
            if (!ok) {
                const char* where = object_kind == ObjectKind::InstanceObject
                                        ? "an instance object"
                                        : "a query object";
                return "term " + t.render() + " in " + a.render() + " is not allowed in " + where;
            }
        }
    }
    return std::nullopt;
}

const Term& Substitution::apply(const Term& t) const {
    auto it = mapping.find(t);
    return it == mapping.end() ? t : it->second;
}

std::string Substitution::render() const {
    std::string out = "{";
    bool first = true;
    for (const auto& [from, to] : mapping) {
        if (!first) out += ", ";
        first = false;
        out += from.render() + " -> " + to.render();
    }
    return out + "}";
}

bool rule_allows(RuleSet rs, const Term& from, const Term& to) {
    switch (from.kind) {
        case TermKind::Constant:
            return to == from;
        case TermKind::Null:
            return rs == RuleSet::InstanceHom &&
                   (to.is_constant() || to.kind == TermKind::Null);
        case TermKind::ExistentialVar:
            if (rs == RuleSet::HeadHom) return true;
            if (rs == RuleSet::InstanceHom) return to.kind != TermKind::Null;
            return false;
        case TermKind::UniversalVar:
            if (rs == RuleSet::InstanceHom) return to.is_constant() || to == from;
            return true;
    }
    return false;
}

Atom apply_substitution(const Substitution& s, const Atom& a) {
    Atom out;
    out.relation = a.relation;
    out.terms.reserve(a.terms.size());
    for (const Term& t : a.terms) {
        const Term& img = s.apply(t);
        if (!rule_allows(s.rule_set, t, img))
            throw RuleViolation("substitution maps " + t.render() + " to " + img.render() +
                                " outside the active rule set");
        out.terms.push_back(img);
    }
    return out;
}

Substitution compose(const Substitution& outer, const Substitution& inner) {
    if (outer.rule_set != inner.rule_set)
        throw RuleViolation("compose requires substitutions with the same rule set");
    Substitution out;
    out.rule_set = outer.rule_set;
    for (const auto& [from, mid] : inner.mapping) out.mapping.emplace(from, outer.apply(mid));
    for (const auto& [from, to] : outer.mapping) out.mapping.try_emplace(from, to);
    for (const auto& [from, to] : out.mapping) {
        if (!rule_allows(out.rule_set, from, to))
            throw RuleViolation("composition maps " + from.render() + " to " + to.render() +
                                " outside the active rule set");
    }
    return out;
}

void FreshRegistry::observe(const Term& t) {
    if (t.kind == TermKind::Constant) return;
    used_[{t.kind, t.label}].insert(t.index);
}

void FreshRegistry::observe(const Atom& a) {
    for (const Term& t : a.terms) observe(t);
}

void FreshRegistry::observe(const GeneralizedInstance& i) {
    for (const Atom& a : i.atoms) observe(a);
}

void FreshRegistry::observe(const Dependency& d) {
    for (const Atom& a : d.body) observe(a);
    if (d.kind() == DependencyKind::Tgd) {
        for (const Atom& a : d.tgd_head()) observe(a);
    } else {
        observe(d.egd_head().left);
        observe(d.egd_head().right);
    }
}

Term FreshRegistry::fresh(TermKind kind, const std::string& label) {
    if (kind != TermKind::Null && kind != TermKind::ExistentialVar)
        throw ValidationError("fresh terms are nulls or existential variables");
    std::set<std::uint32_t>& taken = used_[{kind, label}];
    std::uint32_t index = 1;
    while (taken.count(index) != 0) ++index;
    taken.insert(index);
    return kind == TermKind::Null ? Term::null(label, index) : Term::existential(label, index);
}

std::string FreshRegistry::attribute_label(const std::string& relation, std::size_t position,
                                           const std::string& fallback) const {
    if (const RelationSchema* r = schema_.find(relation))
        if (position < r->attributes.size()) return r->attributes[position];
    return fallback;
}

std::pair<GeneralizedInstance, Atom> freeze_query(const Query& q, const Schema& schema) {
    GeneralizedInstance frozen;
    frozen.object_kind = ObjectKind::QueryObject;
    for (const Atom& a : q.body) {
        if (const RelationSchema* r = schema.find(a.relation)) {
            if (r->arity() != a.terms.size())
                throw SchemaMismatch("atom " + a.render() + " has arity " +
                                     std::to_string(a.terms.size()) + ", schema declares " +
                                     std::to_string(r->arity()));
        } else if (!schema.relations.empty()) {
            throw SchemaMismatch("unknown relation " + a.relation);
        }
        frozen.insert(a);
    }
    if (auto bad = frozen.invariant_violation()) throw ValidationError(*bad);
    return {std::move(frozen), q.head};
}

Query unfreeze_query(const GeneralizedInstance& i, const Atom& head, const Substitution& acc) {
    Query q;
    q.body.assign(i.atoms.begin(), i.atoms.end());
    q.head = apply_substitution(acc, head);
    for (const Term& t : q.head.terms)
        if (t.kind == TermKind::ExistentialVar)
            throw RuleViolation("accumulated substitution surfaces " + t.render() +
                                " in the query head");
    return q;
}

}  // namespace gchase

#include "gchase/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <set>

namespace gchase {

namespace {

enum class TokenKind { Section, Ident, TermTok, Arrow, LParen, RParen, Comma, Equals, End };

struct Token {
    TokenKind kind = TokenKind::End;
    std::string text;  // section or ident name
    Term term;         // TermTok payload
    int line = 1;
    int column = 1;
};

class Lexer {
public:
    explicit Lexer(std::string_view text) : text_(text) { advance(); }

    const Token& peek() const { return current_; }

    Token take() {
        Token t = current_;
        advance();
        return t;
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw SyntaxError(location() + ": " + msg, current_.line, current_.column);
    }

    std::string location() const {
        return "line " + std::to_string(current_.line) + ", column " +
               std::to_string(current_.column);
    }

private:
    void advance() {
        skip_blank();
        current_ = Token{};
        current_.line = line_;
        current_.column = column_;
        if (pos_ >= text_.size()) {
            current_.kind = TokenKind::End;
            return;
        }
        const char c = text_[pos_];
        if (c == '[') return lex_section();
        if (c == '\'') return lex_text_constant();
        if (c == '#') return lex_hash_term();
        if (c == '(') return lex_symbol(TokenKind::LParen);
        if (c == ')') return lex_symbol(TokenKind::RParen);
        if (c == ',') return lex_symbol(TokenKind::Comma);
        if (c == '=') return lex_symbol(TokenKind::Equals);
        if (c == '-') {
            if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '>') {
                current_.kind = TokenKind::Arrow;
                consume(2);
                return;
            }
            if (pos_ + 1 < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_ + 1])))
                return lex_integer();
            error("unexpected character '-'");
        }
        if (std::isdigit(static_cast<unsigned char>(c))) return lex_integer();
        if (std::isalpha(static_cast<unsigned char>(c))) return lex_ident();
        error(std::string("unexpected character '") + c + "'");
    }

    void skip_blank() {
        for (;;) {
            while (pos_ < text_.size() &&
                   std::isspace(static_cast<unsigned char>(text_[pos_])))
                consume(1);
            if (pos_ + 1 < text_.size() && text_[pos_] == '-' && text_[pos_ + 1] == '-') {
                while (pos_ < text_.size() && text_[pos_] != '\n') consume(1);
                continue;
            }
            return;
        }
    }

    void lex_section() {
        consume(1);  // '['
        std::string name = read_ident_chars();
        if (pos_ >= text_.size() || text_[pos_] != ']') error("expected ']' after section name");
        consume(1);
        if (name != "schema" && name != "dependencies" && name != "instance" && name != "query")
            error("unknown section [" + name + "]");
        current_.kind = TokenKind::Section;
        current_.text = std::move(name);
    }

    void lex_text_constant() {
        consume(1);  // opening quote
        std::string body;
        while (pos_ < text_.size() && text_[pos_] != '\'') {
            if (text_[pos_] == '\n') error("unterminated text constant");
            body += text_[pos_];
            consume(1);
        }
        if (pos_ >= text_.size()) error("unterminated text constant");
        consume(1);  // closing quote
        current_.kind = TokenKind::TermTok;
        current_.term = Term::text(std::move(body));
    }

    void lex_hash_term() {
        std::string token = "#";
        consume(1);
        token += read_ident_chars();
        auto term = Term::parse(token);
        if (!term) error("malformed term token " + token);
        current_.kind = TokenKind::TermTok;
        current_.term = *term;
    }

    void lex_integer() {
        std::string digits;
        if (text_[pos_] == '-') {
            digits += '-';
            consume(1);
        }
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
            digits += text_[pos_];
            consume(1);
        }
        std::int64_t v = 0;
        auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v);
        if (ec != std::errc{} || ptr != digits.data() + digits.size())
            error("integer constant out of range: " + digits);
        current_.kind = TokenKind::TermTok;
        current_.term = Term::integer(v);
    }

    void lex_ident() {
        current_.kind = TokenKind::Ident;
        current_.text = read_ident_chars();
    }

    void lex_symbol(TokenKind kind) {
        current_.kind = kind;
        consume(1);
    }

    std::string read_ident_chars() {
        std::string out;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
            out += text_[pos_];
            consume(1);
        }
        if (out.empty()) error("expected an identifier");
        return out;
    }

    void consume(std::size_t n) {
        for (std::size_t k = 0; k < n && pos_ < text_.size(); ++k) {
            if (text_[pos_] == '\n') {
                ++line_;
                column_ = 1;
            } else {
                ++column_;
            }
            ++pos_;
        }
    }

    [[noreturn]] void error(const std::string& msg) {
        throw SyntaxError("line " + std::to_string(current_.line) + ", column " +
                              std::to_string(current_.column) + ": " + msg,
                          current_.line, current_.column);
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int column_ = 1;
    Token current_;
};

class Parser {
public:
    explicit Parser(std::string_view text) : lex_(text) {}

    ChaseProblem run() {
        while (lex_.peek().kind != TokenKind::End) {
            Token section = expect(TokenKind::Section, "expected a section header");
            if (!seen_.insert(section.text).second)
                throw DuplicateSection("line " + std::to_string(section.line) + ", column " +
                                           std::to_string(section.column) + ": duplicate [" +
                                           section.text + "] section",
                                       section.line, section.column);
            if (section.text == "schema") parse_schema();
            else if (section.text == "dependencies") parse_dependencies();
            else if (section.text == "instance") parse_instance(section);
            else parse_query(section);
        }
        if (!has_instance_ && !has_query_)
            throw ValidationError("problem defines neither an instance nor a query");
        return std::move(problem_);
    }

private:
    Token expect(TokenKind kind, const std::string& what) {
        if (lex_.peek().kind != kind) lex_.fail(what);
        return lex_.take();
    }

    void parse_schema() {
        while (lex_.peek().kind == TokenKind::Ident) {
            Token name = lex_.take();
            if (problem_.schema.find(name.text) != nullptr)
                lex_.fail("relation " + name.text + " declared twice");
            RelationSchema rel;
            rel.name = name.text;
            expect(TokenKind::LParen, "expected '(' in relation declaration");
            for (;;) {
                Token attr = expect(TokenKind::Ident, "expected an attribute name");
                if (std::find(rel.attributes.begin(), rel.attributes.end(), attr.text) !=
                    rel.attributes.end())
                    throw SyntaxError("line " + std::to_string(attr.line) + ", column " +
                                          std::to_string(attr.column) + ": duplicate attribute " +
                                          attr.text + " in relation " + rel.name,
                                      attr.line, attr.column);
                rel.attributes.push_back(attr.text);
                if (lex_.peek().kind != TokenKind::Comma) break;
                lex_.take();
            }
            expect(TokenKind::RParen, "expected ')' in relation declaration");
            problem_.schema.relations.push_back(std::move(rel));
        }
    }

    Atom parse_atom(bool check_arity) {
        Token name = expect(TokenKind::Ident, "expected a relation name");
        return parse_atom_with_name(std::move(name), check_arity);
    }

    Atom parse_atom_with_name(Token name, bool check_arity) {
        Atom atom;
        atom.relation = name.text;
        expect(TokenKind::LParen, "expected '(' after relation name");
        for (;;) {
            Token t = expect(TokenKind::TermTok, "expected a term");
            atom.terms.push_back(t.term);
            if (lex_.peek().kind != TokenKind::Comma) break;
            lex_.take();
        }
        expect(TokenKind::RParen, "expected ')' after terms");
        if (check_arity) {
            const RelationSchema* rel = problem_.schema.find(atom.relation);
            if (rel == nullptr)
                throw SchemaMismatch("line " + std::to_string(name.line) + ", column " +
                                         std::to_string(name.column) + ": unknown relation " +
                                         atom.relation,
                                     name.line, name.column);
            if (rel->arity() != atom.terms.size())
                throw SchemaMismatch("line " + std::to_string(name.line) + ", column " +
                                         std::to_string(name.column) + ": atom " + atom.render() +
                                         " has arity " + std::to_string(atom.terms.size()) +
                                         ", schema declares " + std::to_string(rel->arity()),
                                     name.line, name.column);
        }
        return atom;
    }

    std::vector<Atom> parse_atoms() {
        std::vector<Atom> out;
        out.push_back(parse_atom(true));
        while (lex_.peek().kind == TokenKind::Comma) {
            lex_.take();
            out.push_back(parse_atom(true));
        }
        return out;
    }

    void parse_dependencies() {
        while (lex_.peek().kind == TokenKind::Ident) {
            Dependency dep;
            dep.id = "d" + std::to_string(problem_.dependencies.size() + 1);
            // "st" flags an s-t tgd unless it is itself a relation name.
            Token first = lex_.take();
            if (first.text == "st" && lex_.peek().kind == TokenKind::Ident) {
                dep.source_target = true;
                first = lex_.take();
            }
            dep.body.push_back(parse_atom_with_name(std::move(first), true));
            while (lex_.peek().kind == TokenKind::Comma) {
                lex_.take();
                dep.body.push_back(parse_atom(true));
            }
            expect(TokenKind::Arrow, "expected '->' in dependency");
            if (lex_.peek().kind == TokenKind::Ident) {
                dep.head = parse_atoms();
            } else {
                Token left = expect(TokenKind::TermTok, "expected a term or head atoms");
                expect(TokenKind::Equals, "expected '=' in egd head");
                Token right = expect(TokenKind::TermTok, "expected a term after '='");
                dep.head = EgdHead{left.term, right.term};
            }
            problem_.dependencies.push_back(std::move(dep));
        }
    }

    void parse_instance(const Token& section) {
        claim_object(section, false);
        problem_.object.object_kind = ObjectKind::InstanceObject;
        while (lex_.peek().kind == TokenKind::Ident) {
            Token at = lex_.peek();
            Atom atom = parse_atom(true);
            for (const Term& t : atom.terms)
                if (t.kind != TermKind::Constant && t.kind != TermKind::Null)
                    throw ValidationError("line " + std::to_string(at.line) + ": instance atom " +
                                          atom.render() + " contains variable " + t.render());
            problem_.object.insert(std::move(atom));
        }
    }

    void parse_query(const Token& section) {
        claim_object(section, true);
        Query query;
        query.body = parse_atoms();
        expect(TokenKind::Arrow, "expected '->' in query");
        expect(TokenKind::LParen, "expected '(' before query head terms");
        query.head.relation = std::string(kAnswerRelation);
        for (;;) {
            Token t = expect(TokenKind::TermTok, "expected a head term");
            query.head.terms.push_back(t.term);
            if (lex_.peek().kind != TokenKind::Comma) break;
            lex_.take();
        }
        expect(TokenKind::RParen, "expected ')' after query head terms");

        std::set<Term> body_universals;
        for (const Atom& a : query.body)
            for (const Term& t : a.terms) {
                if (t.kind == TermKind::Null)
                    throw ValidationError("query body contains null " + t.render());
                if (t.kind == TermKind::UniversalVar) body_universals.insert(t);
            }
        for (const Term& t : query.head.terms) {
            if (t.kind == TermKind::ExistentialVar)
                throw ValidationError("query head contains existential variable " + t.render());
            if (t.kind == TermKind::UniversalVar && body_universals.count(t) == 0)
                throw ValidationError("query head variable " + t.render() +
                                      " does not occur in the body");
        }

        auto [frozen, head] = freeze_query(query, problem_.schema);
        problem_.object = std::move(frozen);
        problem_.query_head = std::move(head);
    }

    void claim_object(const Token& section, bool is_query) {
        const bool other = is_query ? has_instance_ : has_query_;
        if (other)
            throw MixedObject("line " + std::to_string(section.line) + ", column " +
                                  std::to_string(section.column) +
                                  ": both [instance] and [query] present",
                              section.line, section.column);
        (is_query ? has_query_ : has_instance_) = true;
    }

    Lexer lex_;
    ChaseProblem problem_;
    std::set<std::string> seen_;
    bool has_instance_ = false;
    bool has_query_ = false;
};

std::string render_dependency(const Dependency& d) {
    std::vector<std::string> body;
    for (const Atom& a : d.body) body.push_back(a.render());
    std::string out = d.source_target ? "st " : "";
    out += detail::join(body, ", ") + " -> ";
    if (d.kind() == DependencyKind::Tgd) {
        std::vector<std::string> head;
        for (const Atom& a : d.tgd_head()) head.push_back(a.render());
        out += detail::join(head, ", ");
    } else {
        out += d.egd_head().left.render() + " = " + d.egd_head().right.render();
    }
    return out;
}

std::string render_query_line(const std::vector<Atom>& body, const Atom& head) {
    std::vector<std::string> parts;
    for (const Atom& a : body) parts.push_back(a.render());
    std::vector<std::string> head_terms;
    for (const Term& t : head.terms) head_terms.push_back(t.render());
    return detail::join(parts, ", ") + " -> (" + detail::join(head_terms, ",") + ")";
}

}  // namespace

ChaseProblem parse_problem(std::string_view text) {
    return Parser(text).run();
}

std::string render_problem(const ChaseProblem& problem) {
    std::string out = "[schema]\n";
    for (const RelationSchema& r : problem.schema.relations) {
        std::vector<std::string> attrs(r.attributes.begin(), r.attributes.end());
        out += r.name + "(" + detail::join(attrs, ",") + ")\n";
    }
    out += "\n[dependencies]\n";
    for (const Dependency& d : problem.dependencies) out += render_dependency(d) + "\n";
    if (problem.object.object_kind == ObjectKind::InstanceObject) {
        out += "\n[instance]\n";
        for (const Atom& a : problem.object.atoms) out += a.render() + "\n";
    } else {
        out += "\n[query]\n";
        std::vector<Atom> body(problem.object.atoms.begin(), problem.object.atoms.end());
        out += render_query_line(body, problem.query_head.value()) + "\n";
    }
    return out;
}

std::string render_result(const ChaseOutcome& outcome) {
    switch (outcome.status) {
        case ChaseStatus::FailedBottom:
            return "_|_\n";
        case ChaseStatus::EmptyQuery:
            return "{}\n";
        case ChaseStatus::StepLimit:
            return "STEP-LIMIT(" + std::to_string(outcome.steps) + ")\n";
        case ChaseStatus::Fixpoint:
            break;
    }
    if (outcome.query) {
        return render_query_line(outcome.query->body, outcome.query->head) + "\n";
    }
    std::string out;
    for (const Atom& a : outcome.result.atoms) out += a.render() + "\n";
    return out;
}

std::string write_log(const StepLog& log) {
    std::string out;
    for (const std::string& line : log.preamble) out += line + "\n";
    for (const StepEntry& e : log.entries) {
        const char* action = e.action == StepAction::AddedAtoms    ? "AddedAtoms"
                             : e.action == StepAction::Substituted ? "Substituted"
                                                                   : "Conflict";
        out += "step " + std::to_string(e.step) + ": " + e.dependency_id + " via " + e.binding +
               " => " + action + ": " + e.payload + "\n";
    }
    return out;
}

}  // namespace gchase

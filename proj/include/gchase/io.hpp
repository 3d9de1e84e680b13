#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gchase/chase.hpp"
#include "gchase/core.hpp"

namespace gchase {

/// Malformed input text; positions are 1-based and point at the offending
/// token.
struct SyntaxError : ChaseError {
    int line = 0;
    int column = 0;
    SyntaxError(const std::string& msg, int line, int column)
        : ChaseError(msg), line(line), column(column) {}
};

struct DuplicateSection : ChaseError {
    int line = 0;
    int column = 0;
    DuplicateSection(const std::string& msg, int line, int column)
        : ChaseError(msg), line(line), column(column) {}
};

/// Both an [instance] and a [query] section are present.
struct MixedObject : ChaseError {
    int line = 0;
    int column = 0;
    MixedObject(const std::string& msg, int line, int column)
        : ChaseError(msg), line(line), column(column) {}
};

/// A parsed problem file: schema, dependencies, and exactly one chase
/// object. `query_head` is present iff the object is a query.
struct ChaseProblem {
    Schema schema;
    std::vector<Dependency> dependencies;
    GeneralizedInstance object;
    std::optional<Atom> query_head;

    friend bool operator==(const ChaseProblem&, const ChaseProblem&) = default;
};

/// Parses the problem grammar:
///
///   file       = { section } ;
///   section    = "[schema]" {reldecl} | "[dependencies]" {dep}
///              | "[instance]" {atom} | "[query]" query ;
///   reldecl    = IDENT "(" IDENT {"," IDENT} ")" ;
///   dep        = ["st"] atoms "->" ( atoms | term "=" term ) ;
///   query      = atoms "->" "(" term {"," term} ")" ;
///   atoms      = atom {"," atom} ;
///   atom       = IDENT "(" term {"," term} ")" ;
///   term       = "'" TEXT "'" | INTEGER
///              | "#V_" IDENT "_" INTEGER | "#E_" IDENT "_" INTEGER
///              | "#N_" IDENT "_" INTEGER ;
///
/// Whitespace is insignificant outside quoted text; `--` starts a line
/// comment. Dependencies are assigned ids d1, d2, ... in file order.
ChaseProblem parse_problem(std::string_view text);

/// Canonical text form of a problem; parsing it back yields an identical
/// ChaseProblem.
std::string render_problem(const ChaseProblem& problem);

/// Result text: fixpoint instances one atom per line in canonical order,
/// fixpoint queries as `body -> (head terms)`, `_|_` for failure, `{}` for
/// the empty query, `STEP-LIMIT(<n>)` when the step limit was hit.
std::string render_result(const ChaseOutcome& outcome);

/// Check preamble lines followed by one line per step:
/// `step <n>: <dep-id> via {<binding>} => <action>: <payload>`.
std::string write_log(const StepLog& log);

}  // namespace gchase

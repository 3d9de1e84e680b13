#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gchase {

/// Command-line entry point. `args` excludes the program name.
///
/// Subcommands:
///   check <file>   print criterion verdicts and the constraint status
///   run   <file>   validate, check, then chase the problem
///
/// Flags: --criteria <comma list of rich,weak,safe,rewriting,rewriting-egd>
/// (default all), --max-steps <n> (default 1000), --force, -o <path>,
/// --log <path>.
///
/// Exit codes: 0 fixpoint / all checks passed, 2 failed instance or empty
/// query, 3 step limit, 4 checks failed (without --force for run), 5 parse
/// or validation error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gchase

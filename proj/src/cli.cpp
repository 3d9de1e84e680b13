#include "gchase/cli.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "gchase/chase.hpp"
#include "gchase/io.hpp"
#include "gchase/termination.hpp"

namespace gchase {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailed = 2;     // FailedBottom / EmptyQuery
constexpr int kExitStepLimit = 3;
constexpr int kExitChecks = 4;     // checks failed (and no --force for run)
constexpr int kExitBadInput = 5;   // parse/validation error

const std::vector<std::pair<std::string, Criterion>>& criterion_names() {
    static const std::vector<std::pair<std::string, Criterion>> names = {
        {"rich", Criterion::Rich},
        {"weak", Criterion::Weak},
        {"safe", Criterion::Safe},
        {"rewriting", Criterion::Rewriting},
        {"rewriting-egd", Criterion::RewritingEgd},
    };
    return names;
}

// Comma list -> criteria in canonical order, independent of input order.
std::vector<Criterion> parse_criteria(const std::string& list) {
    std::set<std::string> wanted;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) wanted.insert(item);
    }
    if (wanted.empty()) throw CLI::ValidationError("--criteria", "criteria list is empty");
    std::vector<Criterion> out;
    for (const auto& [name, criterion] : criterion_names()) {
        if (wanted.erase(name) != 0) out.push_back(criterion);
    }
    if (!wanted.empty())
        throw CLI::ValidationError("--criteria", "unknown criterion " + *wanted.begin());
    return out;
}

struct CheckReport {
    std::vector<std::string> lines;
    bool all_passed = true;
};

CheckReport run_checks(const ChaseProblem& problem, const std::vector<Criterion>& criteria) {
    CheckReport report;
    for (Criterion c : criteria) {
        auto [ok, explanation] = check_termination(problem.dependencies, c);
        report.lines.push_back(explanation);
        report.all_passed = report.all_passed && ok;
    }
    return report;
}

ChaseProblem load_problem(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ChaseError("cannot open " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_problem(buffer.str());
}

bool write_file(const std::string& path, const std::string& content, std::ostream& err) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        err << "cannot write " << path << "\n";
        return false;
    }
    out << content;
    return true;
}

int do_check(const std::string& input, const std::vector<Criterion>& criteria, std::ostream& out,
             std::ostream& err) {
    ChaseProblem problem;
    try {
        problem = load_problem(input);
    } catch (const ChaseError& e) {
        err << e.what() << "\n";
        return kExitBadInput;
    }
    const CheckReport report = run_checks(problem, criteria);
    for (const std::string& line : report.lines) out << line << "\n";
    const auto diagnostics = validate_constraints(problem.dependencies, problem.schema);
    if (diagnostics.empty()) {
        out << "Constraints are defined correctly.\n";
    } else {
        out << "Constraints are defined incorrectly.\n";
        for (const Diagnostic& d : diagnostics) out << d.dependency_id << ": " << d.message << "\n";
    }
    return report.all_passed && diagnostics.empty() ? kExitOk : kExitChecks;
}

int do_run(const std::string& input, const std::vector<Criterion>& criteria, int max_steps,
           bool force, const std::string& out_path, const std::string& log_path, std::ostream& out,
           std::ostream& err) {
    ChaseProblem problem;
    try {
        problem = load_problem(input);
    } catch (const ChaseError& e) {
        err << e.what() << "\n";
        return kExitBadInput;
    }

    const auto diagnostics = validate_constraints(problem.dependencies, problem.schema);
    if (!diagnostics.empty()) {
        for (const Diagnostic& d : diagnostics)
            err << d.dependency_id << ": " << d.message << "\n";
        return kExitBadInput;
    }

    const CheckReport report = run_checks(problem, criteria);
    if (!report.all_passed) {
        if (!force) {
            for (const std::string& line : report.lines) err << line << "\n";
            err << "termination checks failed; pass --force to chase anyway\n";
            return kExitChecks;
        }
        err << "warning: termination checks failed, chasing anyway (--force)\n";
    }

    ChaseOutcome outcome;
    try {
        outcome = chase(problem.dependencies, problem.object, max_steps, problem.query_head,
                        &problem.schema);
    } catch (const ChaseError& e) {
        err << e.what() << "\n";
        return kExitBadInput;
    }
    outcome.log.preamble = report.lines;

    const std::string result = render_result(outcome);
    if (out_path.empty()) {
        out << result;
    } else if (!write_file(out_path, result, err)) {
        return kExitBadInput;
    }
    if (!log_path.empty() && !write_file(log_path, write_log(outcome.log), err))
        return kExitBadInput;

    switch (outcome.status) {
        case ChaseStatus::Fixpoint: return kExitOk;
        case ChaseStatus::FailedBottom:
        case ChaseStatus::EmptyQuery: return kExitFailed;
        case ChaseStatus::StepLimit: return kExitStepLimit;
    }
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"generalized chase over instances and conjunctive queries"};
    app.require_subcommand(1);

    std::string check_input, run_input;
    std::string criteria_list = "rich,weak,safe,rewriting,rewriting-egd";
    int max_steps = 1000;
    bool force = false;
    std::string out_path, log_path;

    CLI::App* check = app.add_subcommand("check", "run constraint and termination checks");
    check->add_option("input", check_input, "problem file")->required();
    check->add_option("--criteria", criteria_list, "comma list of criteria");

    CLI::App* run = app.add_subcommand("run", "check, then chase the problem");
    run->add_option("input", run_input, "problem file")->required();
    run->add_option("--criteria", criteria_list, "comma list of criteria");
    run->add_option("--max-steps", max_steps, "step limit")->check(CLI::PositiveNumber);
    run->add_flag("--force", force, "chase even when termination checks fail");
    run->add_option("-o", out_path, "write the result here instead of stdout");
    run->add_option("--log", log_path, "write the step log here");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    std::vector<Criterion> criteria;
    try {
        app.parse(reversed);
        criteria = parse_criteria(criteria_list);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::Error& e) {
        err << e.what() << "\n";
        return kExitBadInput;
    }

    if (check->parsed()) return do_check(check_input, criteria, out, err);
    return do_run(run_input, criteria, max_steps, force, out_path, log_path, out, err);
}

}  // namespace gchase

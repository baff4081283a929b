// hankel-saturate: command-line front end for the hsat library.
//
// Exit codes: 0 ok, 1 bad input or config, 2 hypotheses/domain, 3 grid
// resolution, 4 undecided with --require-decision, 5 examples failed.

#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

#include "CLI11.hpp"
#include "hsat/errors.hpp"
#include "hsat/io.hpp"

namespace {

enum Exit { kOk = 0, kInput = 1, kHypothesis = 2, kResolution = 3, kUndecided = 4, kExamples = 5 };

hsat::json read_input(const std::string& path) {
    std::string text;
    if (path == "-") {
        text.assign(std::istreambuf_iterator<char>(std::cin), {});
    } else {
        std::ifstream in(path);
        if (!in) throw hsat::ConfigError("cannot open '" + path + "'");
        text.assign(std::istreambuf_iterator<char>(in), {});
    }
    try {
        return hsat::json::parse(text);
    } catch (const hsat::json::parse_error& e) {
        throw hsat::ParseError(std::string("invalid JSON: ") + e.what(), "");
    }
}

void error(const std::string& kind, const std::string& what) {
    std::cerr << "hankel-saturate: " << kind << ": " << what << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hankel norms and saturation of bounded symbols"};
    app.set_version_flag("--version", hsat::version());
    app.require_subcommand(1);

    hsat::RunConfig cfg;
    std::string input = "-", output, format = "json";
    int grid_exp = 0, max_depth = 0;
    double epsilon = 0.0;
    bool no_timings = false;

    auto common = [&](CLI::App* sub, bool takes_input) {
        if (takes_input) sub->add_option("input", input, "Spec file, '-' for stdin")->required();
        sub->add_option("--grid-exp", grid_exp, "Grid exponent m (M = 2^m nodes)")->check(CLI::Range(6, 24));
        sub->add_option("--format", format, "Output format")->check(CLI::IsMember({"json", "csv"}));
        sub->add_option("-o,--output", output, "Write the report here instead of stdout");
        sub->add_flag("--no-timings", no_timings, "Omit wall-clock timings (byte-stable output)");
        sub->add_flag("--require-decision", cfg.require_decision, "Exit 4 when the result is undecided");
    };

    auto* norm = app.add_subcommand("norm", "Hankel norm and gap report");
    common(norm, true);
    norm->add_option("--n-min", cfg.n_min, "Smallest truncation size");
    norm->add_option("--n-max", cfg.n_max, "Largest truncation size");
    norm->add_option("--tol-rel", cfg.tol_rel, "Relative stopping tolerance");
    norm->add_option("--tol-gap", cfg.tol_gap, "Gap classification tolerance");
    norm->add_option("--seed", cfg.seed, "Lanczos start vector seed");

    auto* sat = app.add_subcommand("saturation", "Saturation verdict");
    common(sat, true);
    sat->add_option("--delta-grid", cfg.delta_grid, "Levels for the badly-approximable check")->delimiter(',');
    sat->add_option("--thetas", cfg.thetas, "Arc family radii for the outer check")->delimiter(',');
    sat->add_option("--arc-base", cfg.arc_base, "Arc family base angle");

    auto* wts = app.add_subcommand("weights", "A2 trend, apical certificate and thinness of a weight");
    common(wts, true);
    wts->add_option("--delta", cfg.delta, "Upper level delta");
    wts->add_option("--epsilon", epsilon, "Lower level epsilon (default delta/2)");
    wts->add_option("--margin", cfg.margin, "Required margin below pi/2");
    wts->add_option("--max-depth", max_depth, "Deepest dyadic level for A2");

    auto* claim = app.add_subcommand("claim", "Verify the w_kappa construction on a thin set");
    common(claim, true);
    claim->add_option("--kappa", cfg.kappa, "Exponent kappa");
    claim->add_option("--epsilon", epsilon, "Level epsilon (default 0.01)");
    claim->add_option("--margin", cfg.margin, "Required margin below pi/2");

    auto* ex = app.add_subcommand("examples", "Run the built-in examples battery");
    common(ex, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kInput;
    }

    CLI::App* chosen = app.get_subcommands().front();
    const std::string command = chosen->get_name();
    if (grid_exp) cfg.grid_exponent = grid_exp;
    if (max_depth) cfg.max_depth = max_depth;
    if (epsilon > 0.0) cfg.epsilon = epsilon;
    cfg.timings = !no_timings;

    hsat::Outcome outcome;
    try {
        const hsat::json spec = command == "examples" ? hsat::json(nullptr) : read_input(input);
        outcome = hsat::run_command(command, spec, cfg);
    } catch (const hsat::ParseError& e) {
        error("parse error", e.what());
        return kInput;
    } catch (const hsat::ConfigError& e) {
        error("config error", e.what());
        return kInput;
    } catch (const hsat::PreconditionError& e) {
        error("precondition failed", e.what());
        return kHypothesis;
    } catch (const hsat::InapplicableError& e) {
        error("inapplicable", e.what());
        return kHypothesis;
    } catch (const hsat::DomainError& e) {
        error("domain error", e.what());
        return kHypothesis;
    } catch (const hsat::ResolutionError& e) {
        error("resolution", std::string(e.what()) + " (try --grid-exp " + std::to_string(e.required_grid_exponent()) + ")");
        return kResolution;
    } catch (const hsat::GridError& e) {
        error("grid", std::string(e.what()) + " (try --grid-exp " + std::to_string(e.suggested_grid_exponent()) + ")");
        return kResolution;
    } catch (const hsat::Error& e) {
        error("error", e.what());
        return kHypothesis;
    }

    const std::string text = format == "csv" ? hsat::to_csv(outcome.report) : outcome.report.dump(2) + "\n";
    if (output.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(output);
        if (!out) {
            error("config error", "cannot write '" + output + "'");
            return kInput;
        }
        out << text;
    }

    if (command == "examples") return outcome.decided ? kOk : kExamples;
    if (cfg.require_decision && !outcome.decided) return kUndecided;
    return kOk;
}

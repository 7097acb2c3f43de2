// biharm: scenario-driven front end
// exit codes: 0 pass, 2 numeric verdict failure, 3 validation error, 4 internal error

#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>

#include "biharm/report.hpp"

using namespace biharm;

namespace {

int run(const std::string& cmd, const std::string& path, const RunOptions& o, const std::string& report_path,
        const std::string& csv_path, bool quiet) {
    auto t0 = std::chrono::steady_clock::now();
    Scenario sc;
    try {
        sc = bind_scenario(read_file(path), path);
        if (o.has_seed) sc.seed = o.seed;
        validate(sc);
    } catch (const ScenarioError& e) {
        std::fprintf(stderr, "%s: parse error: %s\n", path.c_str(), e.what());
        return 3;
    } catch (const ValidationError& e) {
        std::fprintf(stderr, "%s: validation failed: %s\n", path.c_str(), e.what());
        return 3;
    }
    CommandResult res;
    try {
        res = run_command(cmd, sc, o);
    } catch (const IncompatibleError& e) {
        std::fprintf(stderr, "%s: %s\n", path.c_str(), e.what());
        return 3;
    } catch (const SpaceError& e) {
        // abstract ambients and chart exits surface here
        std::fprintf(stderr, "%s: %s\n", path.c_str(), e.what());
        return 3;
    }
    double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    json rep = make_report(cmd, sc, o, res, wall);
    if (!report_path.empty()) {
        std::ofstream out(report_path);
        if (!out) throw std::runtime_error("cannot write report '" + report_path + "'");
        out << rep.dump(2) << "\n";
    }
    if (!csv_path.empty()) {
        std::ofstream out(csv_path);
        if (!out) throw std::runtime_error("cannot write csv '" + csv_path + "'");
        out << csv_text(res);
    }
    if (!quiet) {
        std::printf("%s %s  [%s, digest %s, %zu samples, errata %s]\n", cmd.c_str(),
                    sc.name.empty() ? path.c_str() : sc.name.c_str(), sc.imm.ambient->label().c_str(),
                    sc.digest.c_str(), sc.samples.size(), rep["settings"]["errata"].get<bool>() ? "on" : "off");
        for (const auto& l : res.summary) std::printf("%s\n", l.c_str());
        std::printf("%s\n", res.pass ? "PASS" : "FAIL");
    }
    return res.pass ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"biharm: f-biharmonic and bi-f-harmonic residual workbench"};
    app.require_subcommand(1);
    app.fallthrough();
    RunOptions o;
    std::string report, csv, errata;
    bool quiet = false;
    long long seed = -1;
    app.add_option("--mode", o.mode, "direct | theorem | both | theorem or corollary id");
    app.add_option("--tol", o.tol, "override residual, agreement, identity and audit tolerances");
    app.add_option("--errata", errata, "on | off (default: scenario setting)")->check(CLI::IsMember({"on", "off"}));
    app.add_option("--seed", seed, "seed for random sample points");
    app.add_option("--report", report, "write the JSON report here");
    app.add_option("--csv", csv, "write per-point norms as CSV here");
    app.add_option("--threads", o.threads, "worker threads (0 = auto)");
    app.add_flag("--quiet", quiet, "no human-readable output");

    std::string path;
    std::string chosen;
    const std::vector<std::pair<const char*, const char*>> cmds = {
        {"check", "residuals in the requested modes with the mode-agreement verdict"},
        {"audit", "lemma audits"},
        {"variation", "first-variation checks of the five functionals"},
        {"props", "proposition checkers"},
        {"energy", "the five functionals"},
        {"sweep", "refinement table for another command"}};
    for (const auto& [name, help] : cmds) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("scenario", path, "scenario file")->required();
        if (std::string(name) == "sweep")
            sub->add_option("--of", o.sweep_of, "check | audit | props | energy | variation")
                ->check(CLI::IsMember({"check", "audit", "props", "energy", "variation"}));
        sub->callback([&chosen, n = std::string(name)] { chosen = n; });
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 3;
    }
    if (!errata.empty()) o.errata = errata == "on" ? 1 : 0;
    if (seed >= 0) {
        o.seed = static_cast<std::uint64_t>(seed);
        o.has_seed = true;
    }
    try {
        return run(chosen, path, o, report, csv, quiet);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return 4;
    }
}

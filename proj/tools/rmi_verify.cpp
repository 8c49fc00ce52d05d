// Command-line driver for the identity verification sweep.
//
//   rmi-verify                          run the full default suite
//   rmi-verify --identity qybe --m 2    one identity on a chosen grid
//   rmi-verify --list                   print the available identity names
//
// Exit codes: 0 all checks pass, 1 any check failed or errored,
// 2 configuration error.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "rmi/sweep.hpp"

namespace {

// "re,im" or "random"
bool parse_param(const std::string& text, rmi::ParamSpec& out, std::string& err) {
    if (text == "random") {
        out.random = true;
        return true;
    }
    double re = 0.0, im = 0.0;
    char comma = 0;
    std::istringstream is(text);
    if (!(is >> re >> comma >> im) || comma != ',') {
        err = "expected 're,im' or 'random', got '" + text + "'";
        return false;
    }
    out.random = false;
    out.value = rmi::cplx{re, im};
    return true;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical verification of elliptic R-matrix identities"};

    rmi::SweepConfig config;
    std::vector<std::string> identities;
    std::string tau_text = "random", hbar_text = "random", eta_text = "random";
    std::string k_text = "all";
    std::string format = "json";
    std::string out_path;
    bool list_only = false;

    app.add_option("--identity", identities,
                   "identity names to run (default: the full suite)")
        ->delimiter(',');
    app.add_option("--m", config.m_list, "local dimensions M")->delimiter(',');
    app.add_option("--n", config.n_list, "site counts N")->delimiter(',');
    app.add_option("--k", k_text, "'all' or a comma list of levels k");
    app.add_option("--tau", tau_text, "modular parameter: 're,im' or 'random'");
    app.add_option("--hbar", hbar_text, "Planck parameter: 're,im' or 'random'");
    app.add_option("--eta", eta_text, "shift parameter: 're,im' or 'random'");
    app.add_option("--trials", config.trials, "trials per cell")->check(CLI::PositiveNumber);
    app.add_option("--tol", config.tolerance,
                   "tolerance override (default: per-identity)");
    app.add_option("--seed", config.seed, "base seed (fixes all sampled points)");
    app.add_option("--format", format, "report format: json or text")
        ->check(CLI::IsMember({"json", "text"}));
    app.add_option("--out", out_path, "write the report to this file");
    app.add_option("--dimension-cap", config.dimension_cap,
                   "largest admissible tensor dimension");
    app.add_option("--workers", config.workers, "concurrent cells")
        ->check(CLI::PositiveNumber);
    app.add_flag("--timings", config.timings, "include wall-clock fields in JSON");
    app.add_flag("--list", list_only, "list identity names and exit");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (list_only) {
        for (const std::string& name : rmi::identity_names()) std::cout << name << "\n";
        return 0;
    }

    std::string err;
    if (!parse_param(tau_text, config.tau, err) || !parse_param(hbar_text, config.hbar, err) ||
        !parse_param(eta_text, config.eta, err)) {
        std::cerr << "config error: " << err << "\n";
        return 2;
    }
    if (k_text != "all") {
        std::istringstream is(k_text);
        std::string piece;
        while (std::getline(is, piece, ',')) {
            try {
                config.k_list.push_back(std::stoi(piece));
            } catch (...) {
                std::cerr << "config error: bad k value '" << piece << "'\n";
                return 2;
            }
        }
    }
    config.identities = identities;

    rmi::RunReport report;
    try {
        report = rmi::run_sweep(config);
    } catch (const rmi::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }

    std::ofstream file;
    std::ostream* os = &std::cout;
    if (!out_path.empty()) {
        file.open(out_path);
        if (!file) {
            std::cerr << "cannot write " << out_path << "\n";
            return 2;
        }
        os = &file;
    }
    if (format == "json")
        rmi::emit_json(report, *os, config.timings);
    else
        rmi::emit_text(report, *os);

    return report.all_pass() ? 0 : 1;
}

#include "lepage/experiment.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <iostream>

using namespace lepage;

namespace {

// CLI11 leaves unset optionals empty; seed 0 is a valid seed so track it apart
struct Globals {
    std::uint64_t seed = 0;
    bool seed_given = false;
    std::string out;
    int threads = 1;
};

ExperimentConfig load(const std::string& file, const Globals& g) {
    auto cfg = load_config(file, g.seed_given ? std::optional(g.seed) : std::nullopt);
    if (!g.out.empty()) cfg.output.dir = g.out;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"LePage-series simulation of time-stable processes"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand
    Globals g;
    auto* seed_opt = app.add_option("--seed", g.seed, "Master seed (overrides the config)");
    app.add_option("--out", g.out, "Output directory (overrides the config)");
    app.add_option("--threads", g.threads, "Worker threads")->check(CLI::PositiveNumber);

    std::string file;
    auto* sim = app.add_subcommand("simulate", "Sample paths; writes paths.csv, jumps.csv and meta.json");
    sim->add_option("config", file, "Experiment JSON")->required()->check(CLI::ExistingFile);
    auto* test = app.add_subcommand("test", "Sample paths and run the configured tests; adds report.json");
    test->add_option("config", file, "Experiment JSON")->required()->check(CLI::ExistingFile);
    auto* desc = app.add_subcommand("describe", "Print the construction tree, claims and integrability verdicts");
    desc->add_option("config", file, "Experiment JSON")->required()->check(CLI::ExistingFile);
    auto* cum = app.add_subcommand("cumulant", "Evaluate the cumulant and marginal CF of the configured epsilon");
    cum->add_option("config", file, "Experiment JSON")->required()->check(CLI::ExistingFile);
    std::vector<double> lambdas{1.0};
    double t = 1.0;
    std::size_t draws = 10000;
    cum->add_option("--lambda", lambdas, "Frequencies")->delimiter(',');
    cum->add_option("-t,--time", t, "Time for the marginal CF");
    cum->add_option("--draws", draws, "Monte Carlo draws of epsilon");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    g.seed_given = seed_opt->count() > 0;

    try {
        const ExperimentConfig cfg = load(file, g);
        if (desc->parsed()) {
            std::cout << describe(cfg);
            return 0;
        }
        if (cum->parsed()) {
            const BuiltNode root = build_construction(cfg.construction, cfg.engine);
            const auto eps = query_epsilon(cfg, root);
            if (!eps) throw SchemaError("cumulant: config has no epsilon and the construction root is not a LePage node");
            QuadratureBudget b;
            b.draws = draws;
            const double drift = cfg.epsilon ? 0.0 : cfg.engine.drift_c;
            const auto psi = cumulant_curve(*eps, lambdas, drift, b);
            json out = json::array();
            for (std::size_t i = 0; i < lambdas.size(); ++i) {
                const auto cf = std::exp(-t * psi[i]);
                out.push_back({{"lambda", lambdas[i]},
                               {"t", t},
                               {"psi", {psi[i].real(), psi[i].imag()}},
                               {"cf", {cf.real(), cf.imag()}}});
            }
            std::cout << out.dump(2) << '\n';
            return 0;
        }
        const bool with_tests = test->parsed();
        const RunResult r = run_experiment(cfg, with_tests, g.threads);
        write_artifacts(r, cfg.output.dir, cfg.output, with_tests);
        if (with_tests) {
            if (cfg.tests.empty()) std::cout << "no tests configured\n";
            for (const auto& rep : r.reports)
                std::cout << rep.name << ": p=" << format_double(rep.p_value) << " stat=" << format_double(rep.statistic)
                          << " -> " << to_string(rep.decision) << '\n';
            return r.all_passed() ? 0 : 1;
        }
        return 0;
    } catch (const SchemaError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}

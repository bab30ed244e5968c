// Acceptance battery: one PASS/FAIL line per criterion. Every tolerance,
// sample size and runtime budget is fixed below.
#include "lepage/experiment.hpp"
#include "lepage/io.hpp"
#include "lepage/jumps.hpp"
#include "lepage/levy_bridge.hpp"
#include "lepage/processes.hpp"
#include "lepage/series.hpp"
#include "lepage/stats.hpp"

#include "oracles/oracle_values.hpp"

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

using namespace lepage;

namespace {

constexpr std::uint64_t master_seed = 20240917;

struct Outcome {
    bool pass = false;
    std::string summary;
    std::string fingerprint;  // sample paths.csv + every statistic, for the rerun check
    double seconds = 0.0;
};

struct Fingerprint {
    std::string text;
    void stat(double x) { text += format_double(x) + ";"; }
    void paths(std::span<const PathSample> ps) {
        std::ostringstream os;
        write_paths_csv(os, ps.subspan(0, std::min<std::size_t>(ps.size(), 20)));
        text += os.str();
    }
};

std::string fmt(const char* f, double a) {
    char b[128];
    std::snprintf(b, sizeof b, f, a);
    return b;
}

std::vector<double> finals(const std::vector<PathSample>& ps) {
    std::vector<double> v(ps.size());
    for (std::size_t i = 0; i < ps.size(); ++i) v[i] = ps[i].values.back();
    return v;
}

const EpsilonSpec& poisson_spec() {
    static const EpsilonSpec s = EpsilonSpec::single_jump(ScalarLaw::constant(1), ScalarLaw::constant(1));
    return s;
}

ProcessSampler gamma_bridge() {
    const auto m = gamma_levy_measure(1.0, 1.0, 12);
    return lepage_process(levy_measure_to_epsilon(m, ShellWeighting::proportional));
}

// 1 ---------------------------------------------------------------------------
Outcome poisson_exactness(int threads) {
    Outcome o;
    Fingerprint fp;
    const RandomStream root(master_seed + 1);
    std::vector<double> grid(1000);
    for (std::size_t j = 0; j < grid.size(); ++j) grid[j] = 10.0 * static_cast<double>(j) / 999.0;

    std::size_t mismatches = 0;
    std::vector<PathSample> kept;
    for (std::uint64_t i = 0; i < 100; ++i) {
        const RandomStream s = root.child(0).child(i);
        auto ps = simulate_plain(poisson_spec(), grid, {}, s);
        ArrivalStream a(s.child(0));
        a.extend_past(10.0);
        std::size_t k = 0;
        for (std::size_t j = 0; j < grid.size(); ++j) {
            while (k < a.size() && a[k] <= grid[j]) ++k;
            if (ps.values[j] != static_cast<double>(k)) ++mismatches;
        }
        kept.push_back(std::move(ps));
    }
    fp.paths(kept);

    const auto p = lepage_process(poisson_spec());
    const double t1[1] = {1.0};
    int passes = 0;
    for (std::uint64_t r = 0; r < 20; ++r) {
        const auto ps = sample_batch(p, t1, 100000, root.child(1).child(r), threads);
        const auto rep = poisson_gof_test(finals(ps), 1.0, 0.01);
        fp.stat(rep.statistic);
        fp.stat(rep.p_value);
        passes += rep.passed();
        if (r == 0) fp.paths(ps);
    }
    o.pass = mismatches == 0 && passes >= 19;
    o.summary = "pathwise mismatches " + std::to_string(mismatches) + "/100000 grid values, GOF passes " +
                std::to_string(passes) + "/20 (need 19)";
    o.fingerprint = fp.text;
    return o;
}

// 2 ---------------------------------------------------------------------------
Outcome time_stability(int threads) {
    Outcome o;
    Fingerprint fp;
    const RandomStream root(master_seed + 2);
    const std::vector<double> grid = {0.5, 1.0, 2.0};
    EnergyOptions opts;
    opts.threads = threads;
    struct Arm {
        std::string name;
        ProcessSampler p;
        bool expect_pass;
    };
    const std::vector<Arm> arms = {
        {"poisson", lepage_process(poisson_spec()), true},
        {"jump_at_eta", lepage_process(EpsilonSpec::jump_at_eta(ScalarLaw::uniform(0.5, 2.0))), true},
        {"poisson(gamma bridge)", subordinate(poisson_process(), gamma_bridge()), true},
        {"fbm(0.75)", fbm_process(0.75), false},
    };
    o.pass = true;
    for (std::size_t a = 0; a < arms.size(); ++a) {
        int hits = 0;
        for (std::uint64_t r = 0; r < 20; ++r) {
            const auto rep = time_stability_test(arms[a].p, 3, grid, 10000, opts, root.child(a).child(r));
            fp.stat(rep.statistic);
            fp.stat(rep.p_value);
            hits += rep.passed() == arms[a].expect_pass;
        }
        const double g[1] = {2.0};
        fp.paths(sample_batch(arms[a].p, g, 20, root.child(a).child(99), threads));
        o.pass = o.pass && hits >= 18;
        o.summary += arms[a].name + (arms[a].expect_pass ? " pass " : " reject ") + std::to_string(hits) + "/20; ";
    }
    o.summary += "need 18/20 each";
    o.fingerprint = fp.text;
    return o;
}

// 3 ---------------------------------------------------------------------------
Outcome ab_stability(int threads) {
    Outcome o;
    Fingerprint fp;
    const RandomStream root(master_seed + 3);
    const std::vector<double> grid = {0.5, 1.0, 2.0};
    EnergyOptions opts;
    opts.threads = threads;
    const auto p = lepage_process(poisson_spec());
    int passes = 0;
    for (std::uint64_t r = 0; r < 20; ++r) {
        const auto rep = ab_stability_test(p, 0.5, 1.5, grid, 10000, opts, root.child(r));
        fp.stat(rep.statistic);
        fp.stat(rep.p_value);
        passes += rep.passed();
    }
    fp.paths(sample_batch(p, grid, 20, root.child(99), threads));
    o.pass = passes >= 18;
    o.summary = "poisson (a,b)=(0.5,1.5) passes " + std::to_string(passes) + "/20 (need 18)";
    o.fingerprint = fp.text;
    return o;
}

// 4 ---------------------------------------------------------------------------
Outcome stable_laplace(int threads) {
    Outcome o;
    Fingerprint fp;
    LePageConfig cfg;
    cfg.truncation.kind = Truncation::Kind::fixed;
    cfg.truncation.terms = 2048;
    const auto p = lepage_process(EpsilonSpec::power_scaled(0.5, ScalarLaw::constant(1.0)), cfg);
    const double t1[1] = {1.0};
    const auto ps = sample_batch(p, t1, 100000, RandomStream(master_seed + 4), threads);
    fp.paths(ps);
    const auto x = finals(ps);
    const double lam[3] = {0.5, 1.0, 2.0};
    const double closed[3] = {oracle::lepage_half_laplace_closed_0_5, oracle::lepage_half_laplace_closed_1_0,
                              oracle::lepage_half_laplace_closed_2_0};
    const double quad[3] = {oracle::lepage_half_laplace_0_5, oracle::lepage_half_laplace_1_0,
                            oracle::lepage_half_laplace_2_0};
    double worst = 0.0, oracle_gap = 0.0;
    for (int k = 0; k < 3; ++k) {
        double e = 0.0;
        for (double v : x) e += std::exp(-lam[k] * v);
        e /= static_cast<double>(x.size());
        fp.stat(e);
        worst = std::max(worst, std::fabs(e - closed[k]));
        oracle_gap = std::max(oracle_gap, std::fabs(quad[k] - closed[k]));
    }
    o.pass = worst <= 0.01 && oracle_gap <= 1e-9;
    o.summary = fmt("max |Laplace - exp(-sqrt(pi lambda))| = %.5f (tol 0.01)", worst) +
                fmt(", quadrature vs closed form %.1e", oracle_gap);
    o.fingerprint = fp.text;
    return o;
}

// 5 ---------------------------------------------------------------------------
Outcome cauchy_compensated(int threads) {
    Outcome o;
    Fingerprint fp;
    LePageConfig cfg;
    cfg.mode = SeriesMode::compensated;
    const auto p = lepage_process(EpsilonSpec::power_scaled(1.0, ScalarLaw::rademacher()), cfg);
    const double t1[1] = {1.0};
    const auto ps = sample_batch(p, t1, 100000, RandomStream(master_seed + 5), threads);
    fp.paths(ps);
    const auto x = finals(ps);
    const double lam[3] = {0.5, 1.0, 2.0};
    double worst = 0.0;
    for (int k = 0; k < 3; ++k) {
        std::complex<double> e = 0.0;
        for (double v : x) e += std::exp(std::complex<double>(0.0, lam[k] * v));
        e /= static_cast<double>(x.size());
        fp.stat(e.real());
        fp.stat(e.imag());
        worst = std::max(worst, std::abs(e - std::exp(-oracle::half_pi_by_quadrature * lam[k])));
    }
    const double quad_gap = std::fabs(oracle::half_pi_by_quadrature - std::numbers::pi / 2);
    o.pass = worst <= 0.01 && quad_gap <= 1e-9;
    o.summary = fmt("max |ecf - exp(-pi|lambda|/2)| = %.5f (tol 0.01)", worst) +
                fmt(", quadrature pi/2 error %.1e", quad_gap);
    o.fingerprint = fp.text;
    return o;
}

// 6 ---------------------------------------------------------------------------
Outcome cumulant_match(int threads) {
    Outcome o;
    Fingerprint fp;
    const auto spec = EpsilonSpec::single_jump(ScalarLaw::rademacher(), ScalarLaw::constant(1.0));
    const auto p = lepage_process(spec);
    const double freqs[3] = {0.5, 1.0, 2.0};
    CfMatchOptions co;
    co.threads = threads;
    o.pass = true;
    std::uint64_t i = 0;
    for (double t : {0.5, 2.0}) {
        const auto rep = cf_match_test(p, spec, t, freqs, 100000, 0.02, RandomStream(master_seed + 6).child(i++), co);
        fp.stat(rep.statistic);
        o.pass = o.pass && rep.passed() && rep.statistic < 0.02;
        o.summary += fmt("t=%.1f", t) + fmt(" sup error %.5f; ", rep.statistic);
    }
    fp.paths(sample_batch(p, freqs, 20, RandomStream(master_seed + 6).child(9), threads));
    o.summary += "need < 0.02";
    o.fingerprint = fp.text;
    return o;
}

// 7 ---------------------------------------------------------------------------
Outcome first_jump_exponential(int) {
    Outcome o;
    Fingerprint fp;
    const RandomStream root(master_seed + 7);
    const auto spec = EpsilonSpec::integer_part();
    const double horizon[2] = {0.0, 25.0};
    int passes = 0, rate_ok = 0;
    std::size_t not_gamma1 = 0;
    double worst_rate = 0.0;
    for (std::uint64_t r = 0; r < 20; ++r) {
        std::vector<double> first(10000);
        std::vector<PathSample> kept;
        for (std::uint64_t i = 0; i < first.size(); ++i) {
            const RandomStream s = root.child(r).child(i);
            auto ps = simulate_plain(spec, horizon, {}, s);
            first[i] = *first_jump_time(extract_jumps(ps));
            if (first[i] != poisson_arrivals(s.child(0), 1)[0]) ++not_gamma1;
            if (r == 0 && i < 20) kept.push_back(std::move(ps));
        }
        if (r == 0) fp.paths(kept);
        const auto rep = exponentiality_test(first);
        double mean = 0.0;
        for (double f : first) mean += f;
        const double rate = static_cast<double>(first.size()) / mean;
        fp.stat(rep.statistic);
        fp.stat(rep.p_value);
        fp.stat(rate);
        passes += rep.passed();
        rate_ok += std::fabs(rate - 1.0) <= 0.03;
        worst_rate = std::max(worst_rate, std::fabs(rate - 1.0));
    }
    o.pass = passes >= 19 && rate_ok == 20 && not_gamma1 == 0;
    o.summary = "KS passes " + std::to_string(passes) + "/20 (need 19), fitted rate within 1 +- 0.03 in " +
                std::to_string(rate_ok) + "/20" + fmt(" (worst %.4f)", worst_rate) + ", first jump != Gamma_1 in " +
                std::to_string(not_gamma1) + " paths";
    o.fingerprint = fp.text;
    return o;
}

// 8 ---------------------------------------------------------------------------
Outcome bridge_compound_poisson(int) {
    Outcome o;
    Fingerprint fp;
    const auto m = atomic_levy_measure({1.0, 2.0}, {0.6, 0.4});
    const double t1[1] = {1.0};
    const RandomStream root(master_seed + 8);
    const std::size_t n = 1000000;
    std::vector<double> counts(11, 0.0);
    std::vector<PathSample> kept;
    for (std::uint64_t i = 0; i < n; ++i) {
        auto ps = bounded_variation_series(m, t1, {}, root.child(i));
        const double v = ps.values.back();
        if (v >= 0.0 && v <= 10.0) counts[static_cast<std::size_t>(std::lround(v))] += 1.0;
        if (i < 20) kept.push_back(std::move(ps));
    }
    fp.paths(kept);
    double tv = 0.0;
    for (std::size_t k = 0; k <= 10; ++k) {
        fp.stat(counts[k]);
        tv += std::fabs(counts[k] / static_cast<double>(n) - oracle::compound_pmf_06_04[k]);
    }
    tv *= 0.5;
    o.pass = tv <= 0.005;
    o.summary = fmt("total variation on k=0..10 = %.5f (tol 0.005), 10^6 paths", tv);
    o.fingerprint = fp.text;
    return o;
}

// 9 ---------------------------------------------------------------------------
Outcome variance_gamma(int threads) {
    Outcome o;
    Fingerprint fp;
    const auto m = gamma_levy_measure(1.0, 1.0, 12);
    const auto p = subordinate(brownian_motion(), gamma_bridge());
    const double t1[1] = {1.0};
    const auto ps = sample_batch(p, t1, 100000, RandomStream(master_seed + 9), threads);
    fp.paths(ps);
    const auto x = finals(ps);
    double a = 0.0, b = 0.0;
    for (double v : x) {
        a += v;
        b += v * v;
    }
    const double n = static_cast<double>(x.size());
    const double var = (b - a * a / n) / (n - 1.0);
    fp.stat(var);
    const double rel = std::fabs(var / m.first_moment() - 1.0);
    o.pass = rel <= 0.03 && std::fabs(m.first_moment() - oracle::gamma_mean_k12) <= 1e-8;
    o.summary = fmt("Var W(xi(1)) = %.5f", var) + fmt(" vs E xi(1) = %.5f", m.first_moment()) +
                fmt(", relative error %.4f (tol 0.03)", rel);
    o.fingerprint = fp.text;
    return o;
}

// 10: the artifact pipeline itself, run twice
std::string pipeline_bytes(const std::filesystem::path& dir, int threads) {
    const json doc = json::parse(R"({
        "seed": 20240917,
        "construction": {"type": "lepage", "epsilon": {"family": "SingleJump", "params": {"height": 1, "inverse_time": 1}}},
        "grid": {"start": 0, "stop": 10, "points": 1000},
        "n_paths": 100,
        "tests": [{"type": "marginal_gof", "dist": "poisson", "mean": 1, "n": 100000}]
    })");
    const auto cfg = parse_config(doc);
    const auto r = run_experiment(cfg, true, threads);
    write_artifacts(r, dir, cfg.output, true);
    std::ifstream a(dir / "paths.csv", std::ios::binary), b(dir / "report.json", std::ios::binary);
    std::ostringstream os;
    os << a.rdbuf() << b.rdbuf();
    return os.str();
}

double elapsed(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        std::string name;
        std::function<Outcome(int)> run;
        double budget_s;  // 0: no budget stated
    };
    const std::vector<Criterion> criteria = {
        {1, "Poisson exactness", poisson_exactness, 10.0},
        {2, "time-stability identity", time_stability, 120.0},
        {3, "(a,b)-stability identity", ab_stability, 0.0},
        {4, "1/2-stable marginal via plain series", stable_laplace, 30.0},
        {5, "Cauchy marginal via compensated series", cauchy_compensated, 0.0},
        {6, "cumulant oracle", cumulant_match, 0.0},
        {7, "first-jump exponentiality", first_jump_exponential, 0.0},
        {8, "Levy bridge compound Poisson", bridge_compound_poisson, 0.0},
        {9, "variance gamma", variance_gamma, 0.0},
    };

    int failed = 0;
    std::vector<Outcome> first;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o = c.run(1);
        o.seconds = elapsed(t0);
        const bool in_budget = c.budget_s == 0.0 || o.seconds < c.budget_s;
        const bool ok = o.pass && in_budget;
        failed += !ok;
        std::printf("[%s] criterion %d: %s | %s | %.1f s%s\n", ok ? "PASS" : "FAIL", c.id, c.name.c_str(),
                    o.summary.c_str(), o.seconds,
                    c.budget_s > 0 ? (in_budget ? fmt(" (budget %.0f s)", c.budget_s).c_str()
                                                : fmt(" (over budget %.0f s)", c.budget_s).c_str())
                                   : "");
        std::fflush(stdout);
        first.push_back(std::move(o));
    }

    // rerun everything with the same seeds (and a different worker count)
    const auto t0 = std::chrono::steady_clock::now();
    std::string diff;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const Outcome again = criteria[i].run(2);
        if (again.fingerprint != first[i].fingerprint || again.pass != first[i].pass)
            diff += " " + std::to_string(criteria[i].id);
    }
    const auto tmp = std::filesystem::temp_directory_path() / "lepage_acceptance";
    std::filesystem::remove_all(tmp);
    const bool pipeline_same = pipeline_bytes(tmp / "a", 1) == pipeline_bytes(tmp / "b", 2);
    std::filesystem::remove_all(tmp);
    const bool ok10 = diff.empty() && pipeline_same;
    failed += !ok10;
    std::printf("[%s] criterion 10: determinism | reruns of 1-9 %s, artifact pipeline paths.csv/report.json %s | %.1f s\n",
                ok10 ? "PASS" : "FAIL", diff.empty() ? "identical" : ("differ in" + diff).c_str(),
                pipeline_same ? "byte-identical" : "differ", elapsed(t0));
    return failed == 0 ? 0 : 1;
}

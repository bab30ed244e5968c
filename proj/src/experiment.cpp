#include "lepage/experiment.hpp"

#include "lepage/jumps.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace lepage {

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw SchemaError(where + ": " + what);
}

const json& need(const json& j, const char* key, const std::string& where) {
    if (!j.is_object()) fail(where, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) fail(where, std::string("missing field '") + key + "'");
    return *it;
}

double num(const json& j, const std::string& where) {
    if (!j.is_number()) fail(where, "expected a number");
    return j.get<double>();
}

double num(const json& j, const char* key, const std::string& where) {
    return num(need(j, key, where), where + "." + key);
}

double num_or(const json& j, const char* key, double dflt, const std::string& where) {
    if (!j.is_object() || !j.contains(key)) return dflt;
    return num(j.at(key), where + "." + key);
}

std::size_t count_or(const json& j, const char* key, std::size_t dflt, const std::string& where) {
    if (!j.is_object() || !j.contains(key)) return dflt;
    const auto& v = j.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0) fail(where + "." + key, "expected a nonnegative integer");
    return v.get<std::size_t>();
}

bool flag_or(const json& j, const char* key, bool dflt, const std::string& where) {
    if (!j.is_object() || !j.contains(key)) return dflt;
    const auto& v = j.at(key);
    if (!v.is_boolean()) fail(where + "." + key, "expected true or false");
    return v.get<bool>();
}

std::string str(const json& j, const char* key, const std::string& where) {
    const auto& v = need(j, key, where);
    if (!v.is_string()) fail(where + "." + key, "expected a string");
    return v.get<std::string>();
}

std::vector<double> nums(const json& j, const std::string& where) {
    if (!j.is_array()) fail(where, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(num(j[i], where + "[" + std::to_string(i) + "]"));
    return out;
}

const json& params_of(const json& j) {
    static const json empty = json::object();
    if (j.is_object() && j.contains("params")) return j.at("params");
    return empty;
}

ShellWeighting parse_weighting(const json& j, const std::string& where) {
    if (!j.is_object() || !j.contains("weighting")) return ShellWeighting::geometric;
    const std::string w = str(j, "weighting", where);
    if (w == "geometric") return ShellWeighting::geometric;
    if (w == "proportional") return ShellWeighting::proportional;
    fail(where + ".weighting", "unknown weighting '" + w + "'");
}

// invalid_argument from constructors is a schema problem of the node at hand
template <class F> auto guarded(const std::string& where, F&& f) {
    try {
        return f();
    } catch (const SchemaError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        fail(where, e.what());
    }
}

BuiltNode build(const json& node, const LePageConfig& engine, const std::string& where);

}  // namespace

ScalarLaw parse_law(const json& j) {
    const std::string where = "law";
    if (j.is_number()) return ScalarLaw::constant(j.get<double>());
    const std::string d = str(j, "dist", where);
    return guarded(where + "(" + d + ")", [&] {
        if (d == "constant") return ScalarLaw::constant(num(j, "value", where));
        if (d == "rademacher") return ScalarLaw::rademacher(num_or(j, "magnitude", 1.0, where));
        if (d == "uniform") return ScalarLaw::uniform(num(j, "low", where), num(j, "high", where));
        if (d == "discrete")
            return ScalarLaw::discrete(nums(need(j, "values", where), where + ".values"),
                                       nums(need(j, "probs", where), where + ".probs"));
        if (d == "normal") return ScalarLaw::normal(num_or(j, "mean", 0.0, where), num_or(j, "sd", 1.0, where));
        if (d == "exponential") return ScalarLaw::exponential(num_or(j, "rate", 1.0, where));
        fail(where, "unknown dist '" + d + "'");
    });
}

LePageConfig parse_engine(const json& j, LePageConfig cfg) {
    const std::string where = "engine";
    if (j.is_null()) return cfg;
    if (!j.is_object()) fail(where, "expected an object");
    if (j.contains("mode")) {
        const std::string m = str(j, "mode", where);
        if (m == "plain") cfg.mode = SeriesMode::plain;
        else if (m == "compensated") cfg.mode = SeriesMode::compensated;
        else if (m == "symmetric") cfg.mode = SeriesMode::symmetric;
        else fail(where + ".mode", "unknown mode '" + m + "'");
    }
    cfg.drift_c = num_or(j, "drift_c", cfg.drift_c, where);
    if (j.contains("truncation")) {
        const auto& t = j.at("truncation");
        const std::string tw = where + ".truncation";
        const std::string kind = t.contains("kind") ? str(t, "kind", tw) : "adaptive";
        if (kind == "fixed") cfg.truncation.kind = Truncation::Kind::fixed;
        else if (kind == "adaptive") cfg.truncation.kind = Truncation::Kind::adaptive;
        else fail(tw + ".kind", "unknown truncation '" + kind + "'");
        cfg.truncation.terms = count_or(t, "terms", cfg.truncation.terms, tw);
        cfg.truncation.tolerance = num_or(t, "tolerance", cfg.truncation.tolerance, tw);
        cfg.truncation.initial_terms = count_or(t, "initial_terms", cfg.truncation.initial_terms, tw);
        cfg.truncation.max_terms = count_or(t, "max_terms", cfg.truncation.max_terms, tw);
    }
    if (j.contains("r_sequence")) cfg.r_sequence = nums(j.at("r_sequence"), where + ".r_sequence");
    cfg.compensator_budget = count_or(j, "compensator_budget", cfg.compensator_budget, where);
    cfg.compensator_nodes = count_or(j, "compensator_nodes", cfg.compensator_nodes, where);
    cfg.compensator_seed = count_or(j, "compensator_seed", cfg.compensator_seed, where);
    cfg.r_tolerance = num_or(j, "r_tolerance", cfg.r_tolerance, where);
    cfg.strict_convergence = flag_or(j, "strict_convergence", cfg.strict_convergence, where);
    cfg.require_certificate = flag_or(j, "require_certificate", cfg.require_certificate, where);
    guarded(where, [&] {
        cfg.validate();
        return 0;
    });
    return cfg;
}

DiscretizedLevyMeasure parse_levy_measure(const json& j) {
    const std::string where = "levy_measure";
    const std::string kind = str(j, "kind", where);
    return guarded(where + "(" + kind + ")", [&] {
        const int k_max = static_cast<int>(count_or(j, "k_max", 12, where));
        if (kind == "gamma") return gamma_levy_measure(num_or(j, "a", 1.0, where), num_or(j, "b", 1.0, where), k_max);
        if (kind == "symmetric_stable")
            return symmetric_stable_levy_measure(num(j, "alpha", where), num_or(j, "c", 1.0, where), k_max);
        if (kind == "atomic")
            return atomic_levy_measure(nums(need(j, "atoms", where), where + ".atoms"),
                                       nums(need(j, "weights", where), where + ".weights"));
        if (kind == "shells") {
            // tabulated: each shell gives its mass and the law of a jump inside it
            DiscretizedLevyMeasure m;
            m.description = "tabulated";
            m.nonnegative = true;
            const auto& arr = need(j, "shells", where);
            if (!arr.is_array() || arr.empty()) fail(where + ".shells", "expected a nonempty array");
            for (std::size_t i = 0; i < arr.size(); ++i) {
                const std::string sw = where + ".shells[" + std::to_string(i) + "]";
                LevyShell s;
                s.k = static_cast<int>(count_or(arr[i], "k", 0, sw));
                s.mass = num(arr[i], "mass", sw);
                const ScalarLaw law = parse_law(need(arr[i], "law", sw));
                s.sample = [law](RandomStream& r) { return law.sample(r); };
                // shell moments by a fixed-seed average; only reported, never simulated
                RandomStream r(0x5E11 + i);
                double am = 0.0, sm = 0.0;
                constexpr int draws = 4096;
                for (int d = 0; d < draws; ++d) {
                    const double x = law.sample(r);
                    if (shell_index(x) != s.k) fail(sw, "law puts jumps outside shell " + std::to_string(s.k));
                    am += std::abs(x);
                    sm += std::min(1.0, x * x);
                }
                s.first_moment = s.mass * law.mean();
                s.abs_moment = s.mass * am / draws;
                s.square_moment = s.mass * sm / draws;
                if (law.lower() < 0.0) m.nonnegative = false;
                m.shells.push_back(std::move(s));
            }
            m.validate();
            return m;
        }
        fail(where, "unknown kind '" + kind + "'");
    });
}

EpsilonSpec parse_epsilon(const json& j, const LePageConfig& engine) {
    const std::string where = "epsilon";
    const std::string family = str(j, "family", where);
    const json& p = params_of(j);
    const std::string fw = where + "(" + family + ")";
    return guarded(fw, [&]() -> EpsilonSpec {
        if (family == "SingleJump") {
            if (p.contains("levy_measure"))
                return levy_measure_to_epsilon(parse_levy_measure(p.at("levy_measure")), parse_weighting(p, fw));
            return EpsilonSpec::single_jump(parse_law(need(p, "height", fw)), parse_law(need(p, "inverse_time", fw)));
        }
        if (family == "JumpAtEta") return EpsilonSpec::jump_at_eta(parse_law(need(p, "eta", fw)));
        if (family == "PowerScaled")
            return EpsilonSpec::power_scaled(num(p, "alpha", fw), p.contains("eta") ? parse_law(p.at("eta"))
                                                                                     : ScalarLaw::constant(1.0));
        if (family == "FBMSpectral") return EpsilonSpec::fbm(num(p, "hurst", fw));
        if (family == "DeterministicPower") {
            const std::string v = p.contains("variant") ? str(p, "variant", fw) : "shifted_power";
            PowerVariant pv;
            if (v == "power_minus_one") pv = PowerVariant::power_minus_one;
            else if (v == "shifted_power") pv = PowerVariant::shifted_power;
            else fail(fw + ".variant", "unknown variant '" + v + "'");
            return EpsilonSpec::deterministic_power(num(p, "beta", fw), pv);
        }
        if (family == "IntegerPart") return EpsilonSpec::integer_part();
        if (family == "CustomStep") {
            const auto& paths = need(p, "paths", fw);
            if (!paths.is_array()) fail(fw + ".paths", "expected an array of jump lists");
            std::vector<std::vector<Jump>> lists;
            for (const auto& path : paths) {
                std::vector<Jump> js;
                for (const auto& jump : path) {
                    const auto v = nums(jump, fw + ".paths");
                    if (v.size() != 2) fail(fw + ".paths", "each jump is [time, height]");
                    js.push_back({v[0], v[1]});
                }
                lists.push_back(std::move(js));
            }
            std::vector<double> w = p.contains("weights") ? nums(p.at("weights"), fw + ".weights")
                                                          : std::vector<double>(lists.size(), 1.0);
            return EpsilonSpec::custom_step(std::move(lists), std::move(w));
        }
        if (family == "Composed") {
            const BuiltNode inner = build(need(p, "inner", fw), engine, fw + ".inner");
            const ProcessSampler sampler = inner.sampler;
            InnerSampler f = [sampler](std::span<const double> times, RandomStream& s) {
                return sampler.values_at(times, s);
            };
            return EpsilonSpec::composed(std::move(f), sampler.label(), num(p, "alpha", fw),
                                         flag_or(p, "finite_mean", false, fw),
                                         flag_or(p, "inner_symmetric", false, fw));
        }
        fail(where, "unknown family '" + family + "'");
    });
}

std::vector<double> parse_grid(const json& j) {
    const std::string where = "grid";
    std::vector<double> g;
    if (j.is_array()) {
        g = nums(j, where);
    } else if (j.is_object()) {
        const double a = num_or(j, "start", 0.0, where), b = num(j, "stop", where);
        const std::size_t n = count_or(j, "points", 0, where);
        if (n < 2 || !(b > a)) fail(where, "need stop > start and at least 2 points");
        for (std::size_t i = 0; i < n; ++i)
            g.push_back(i + 1 == n ? b : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
    } else {
        fail(where, "expected an array or {start, stop, points}");
    }
    if (g.empty()) fail(where, "empty");
    for (double t : g)
        if (!(t >= 0.0) || !std::isfinite(t)) fail(where, "times must be finite and nonnegative");
    return g;
}

ExperimentConfig parse_config(const json& doc, std::optional<std::uint64_t> seed) {
    if (!doc.is_object()) fail("config", "expected a JSON object");
    ExperimentConfig c;
    if (seed) {
        c.seed = *seed;
    } else {
        if (!doc.contains("seed")) fail("config", "missing field 'seed' (no default seed is used)");
        const auto& s = doc.at("seed");
        if (!s.is_number_unsigned()) fail("config.seed", "expected a nonnegative integer");
        c.seed = s.get<std::uint64_t>();
    }
    c.construction = need(doc, "construction", "config");
    if (doc.contains("epsilon")) c.epsilon = doc.at("epsilon");
    c.grid = parse_grid(need(doc, "grid", "config"));
    c.n_paths = count_or(doc, "n_paths", 0, "config");
    if (c.n_paths == 0) fail("config.n_paths", "must be a positive integer");
    if (doc.contains("engine")) c.engine = parse_engine(doc.at("engine"));
    if (doc.contains("tests")) {
        const auto& t = doc.at("tests");
        if (!t.is_array()) fail("config.tests", "expected an array");
        for (std::size_t i = 0; i < t.size(); ++i)
            c.tests.push_back({str(t[i], "type", "tests[" + std::to_string(i) + "]"), t[i]});
    }
    if (doc.contains("output")) {
        const auto& o = doc.at("output");
        const std::string w = "config.output";
        if (o.contains("dir")) c.output.dir = str(o, "dir", w);
        c.output.paths_csv = flag_or(o, "paths_csv", true, w);
        c.output.jumps_csv = flag_or(o, "jumps_csv", true, w);
        c.output.trace = flag_or(o, "trace", false, w);
    }
    // build once so construction errors surface as schema errors
    build(c.construction, c.engine, "construction");
    if (c.epsilon) parse_epsilon(*c.epsilon, c.engine);
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& file, std::optional<std::uint64_t> seed) {
    std::ifstream in(file);
    if (!in) throw SchemaError("cannot open config " + file.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw SchemaError(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_config(doc, seed);
}

namespace {

BuiltNode build(const json& node, const LePageConfig& engine, const std::string& where) {
    const std::string type = str(node, "type", where);
    const std::string tw = where + "(" + type + ")";
    return guarded(tw, [&]() -> BuiltNode {
        auto sub = [&](const char* key) { return build(need(node, key, tw), engine, tw + "." + key); };
        if (type == "lepage" || type == "levy_bridge") {
            const LePageConfig cfg = node.contains("engine") ? parse_engine(node.at("engine"), engine) : engine;
            EpsilonSpec spec = type == "lepage"
                                   ? parse_epsilon(need(node, "epsilon", tw), cfg)
                                   : levy_measure_to_epsilon(parse_levy_measure(need(node, "measure", tw)),
                                                             parse_weighting(node, tw));
            return {lepage_process(spec, cfg), spec, {}};
        }
        if (type == "poisson") return {poisson_process(num_or(node, "rate", 1.0, tw)), std::nullopt, {}};
        if (type == "brownian") return {brownian_motion(num_or(node, "sigma", 1.0, tw)), std::nullopt, {}};
        if (type == "drift") return {drift_process(num(node, "c", tw)), std::nullopt, {}};
        if (type == "fbm") return {fbm_process(num(node, "hurst", tw)), std::nullopt, {}};
        if (type == "gamma")
            return {gamma_process(num_or(node, "a", 1.0, tw), num_or(node, "b", 1.0, tw)), std::nullopt, {}};
        if (type == "scale_combination") {
            BuiltNode c = sub("process");
            auto p = scale_combination(c.sampler, nums(need(node, "coeffs", tw), tw + ".coeffs"),
                                       nums(need(node, "scales", tw), tw + ".scales"));
            return {p, std::nullopt, {std::move(c)}};
        }
        if (type == "stable_scaled") {
            std::vector<StableTerm> terms;
            const auto& arr = need(node, "terms", tw);
            if (!arr.is_array()) fail(tw + ".terms", "expected an array");
            for (const auto& t : arr) {
                StableTerm st;
                st.coeff = num_or(t, "coeff", 1.0, tw);
                st.alpha = num(t, "alpha", tw);
                st.scale = num_or(t, "scale", 1.0, tw);
                const std::string law = t.contains("law") ? str(t, "law", tw) : "symmetric";
                if (law == "symmetric") st.law = StableTerm::Law::symmetric;
                else if (law == "positive") st.law = StableTerm::Law::positive;
                else fail(tw + ".law", "unknown law '" + law + "'");
                terms.push_back(st);
            }
            return {stable_scaled(std::move(terms)), std::nullopt, {}};
        }
        if (type == "sub_stable") {
            BuiltNode c = sub("process");
            auto p = sub_stable(c.sampler, num(node, "alpha", tw));
            return {p, std::nullopt, {std::move(c)}};
        }
        if (type == "subordinate") {
            BuiltNode l = sub("levy"), s = sub("subordinator");
            auto p = subordinate(l.sampler, s.sampler);
            return {p, std::nullopt, {std::move(l), std::move(s)}};
        }
        if (type == "sub_gaussian")
            return {sub_gaussian(num(node, "hurst", tw), num(node, "alpha", tw)), std::nullopt, {}};
        if (type == "power_time_change") {
            BuiltNode c = sub("process");
            auto p = power_time_change(c.sampler, num(node, "a", tw), num(node, "b", tw),
                                       flag_or(node, "time_stable", true, tw));
            return {p, std::nullopt, {std::move(c)}};
        }
        fail(where, "unknown construction type '" + type + "'");
    });
}

}  // namespace

BuiltNode build_construction(const json& node, const LePageConfig& engine) {
    return build(node, engine, "construction");
}

std::optional<EpsilonSpec> query_epsilon(const ExperimentConfig& cfg, const BuiltNode& root) {
    if (cfg.epsilon) return parse_epsilon(*cfg.epsilon, cfg.engine);
    return root.epsilon;
}

bool RunResult::all_passed() const {
    for (const auto& r : reports)
        if (!r.passed()) return false;
    return true;
}

namespace {

EnergyOptions energy_options(const json& b, int threads) {
    EnergyOptions o;
    o.permutations = count_or(b, "permutations", o.permutations, "test");
    o.alpha = num_or(b, "alpha", o.alpha, "test");
    o.random_directions = count_or(b, "random_directions", o.random_directions, "test");
    o.heavy_tail_guard = flag_or(b, "heavy_tail_guard", o.heavy_tail_guard, "test");
    o.threads = threads;
    return o;
}

std::vector<double> marginal(const ProcessSampler& p, double t, std::size_t n, const RandomStream& s, int threads) {
    const double grid[1] = {t};
    const auto paths = sample_batch(p, grid, n, s, threads);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = paths[i].values.back();
    return out;
}

}  // namespace

TestReport run_test(const TestBlock& block, const BuiltNode& root, const ExperimentConfig& cfg,
                    const RandomStream& stream, int threads) {
    const json& b = block.params;
    const std::string w = "test(" + block.type + ")";
    const ProcessSampler& p = root.sampler;
    return guarded(w, [&]() -> TestReport {
        if (block.type == "marginal_gof") {
            const double t = num_or(b, "t", 1.0, w);
            const std::size_t n = count_or(b, "n", 10000, w);
            const double alpha = num_or(b, "alpha", 0.01, w);
            const auto xs = marginal(p, t, n, stream, threads);
            const std::string dist = b.contains("dist") ? str(b, "dist", w) : "poisson";
            TestReport r;
            if (dist == "poisson") {
                r = poisson_gof_test(xs, num(b, "mean", w), alpha);
            } else if (dist == "pmf") {
                const auto probs = nums(need(b, "probs", w), w + ".probs");
                r = discrete_gof_test(
                    xs, [probs](int k) { return k >= 0 && k < static_cast<int>(probs.size()) ? probs[k] : 0.0; },
                    "marginal_gof(pmf)", alpha);
            } else {
                fail(w + ".dist", "unknown dist '" + dist + "'");
            }
            r.provenance.seed = stream.seed();
            r.provenance.lineage.assign(stream.lineage().begin(), stream.lineage().end());
            return r;
        }
        if (block.type == "time_stability") {
            const auto grid = nums(need(b, "grid", w), w + ".grid");
            return time_stability_test(p, count_or(b, "n", 2, w), grid, count_or(b, "paths_per_arm", 10000, w),
                                       energy_options(b, threads), stream);
        }
        if (block.type == "ab_stability") {
            const auto grid = nums(need(b, "grid", w), w + ".grid");
            return ab_stability_test(p, num(b, "a", w), num(b, "b", w), grid, count_or(b, "paths_per_arm", 10000, w),
                                     energy_options(b, threads), stream);
        }
        if (block.type == "cf_match") {
            std::optional<EpsilonSpec> spec =
                b.contains("epsilon") ? std::optional(parse_epsilon(b.at("epsilon"), cfg.engine)) : query_epsilon(cfg, root);
            if (!spec) fail(w, "needs an epsilon: the root is not a LePage node and none is given");
            CfMatchOptions o;
            o.drift_c = num_or(b, "drift_c", root.epsilon ? cfg.engine.drift_c : 0.0, w);
            o.quad_budget.draws = count_or(b, "quad_draws", o.quad_budget.draws, w);
            o.threads = threads;
            const auto freqs = nums(need(b, "freqs", w), w + ".freqs");
            return cf_match_test(p, *spec, num_or(b, "t", 1.0, w), freqs, count_or(b, "n", 10000, w),
                                 num_or(b, "tol", 0.02, w), stream, o);
        }
        if (block.type == "exponentiality") {
            const double delta = num_or(b, "delta", 0.0, w);
            const double horizon = num_or(b, "horizon", 50.0, w);
            const std::size_t n = count_or(b, "n", 10000, w);
            const double grid[2] = {0.0, horizon};
            const auto paths = sample_batch(p, grid, n, stream, threads);
            std::vector<double> firsts;
            firsts.reserve(n);
            for (const auto& ps : paths) {
                const auto f = first_jump_time(extract_jumps(ps, delta));
                if (!f) fail(w, "a path has no jump above delta before the horizon; raise 'horizon'");
                firsts.push_back(*f);
            }
            ExponentialityOptions o;
            o.alpha = num_or(b, "alpha", o.alpha, w);
            o.bootstrap = count_or(b, "bootstrap", o.bootstrap, w);
            auto r = exponentiality_test(firsts, o);
            r.provenance.seed = stream.seed();
            r.provenance.lineage.assign(stream.lineage().begin(), stream.lineage().end());
            return r;
        }
        if (block.type == "cov_homogeneity") {
            std::vector<std::pair<double, double>> pairs;
            for (const auto& pr : need(b, "pairs", w)) {
                const auto v = nums(pr, w + ".pairs");
                if (v.size() != 2) fail(w + ".pairs", "each pair is [t, s]");
                pairs.emplace_back(v[0], v[1]);
            }
            return cov_homogeneity_test(p, pairs, num(b, "u", w), count_or(b, "n", 10000, w), num_or(b, "tol", 0.05, w),
                                        stream, threads);
        }
        fail(w, "unknown test type");
    });
}

RunResult run_experiment(const ExperimentConfig& cfg, bool run_tests, int threads) {
    const BuiltNode root = build_construction(cfg.construction, cfg.engine);
    const RandomStream base(cfg.seed);
    RunResult r;
    r.paths = sample_batch(root.sampler, cfg.grid, cfg.n_paths, base.child(0), threads);
    if (run_tests)
        for (std::size_t j = 0; j < cfg.tests.size(); ++j)
            r.reports.push_back(run_test(cfg.tests[j], root, cfg, base.child(1).child(j), threads));

    json& m = r.meta;
    m["versions"] = {{"lepage", "1.0.0"},
                     {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                           std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                           std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
                     {"compiler", __VERSION__}};
    m["seed"] = cfg.seed;
    m["path_stream"] = "RandomStream(seed).child(0).child(path_id)";
    m["test_stream"] = "RandomStream(seed).child(1).child(test_index)";
    m["n_paths"] = cfg.n_paths;
    m["grid_points"] = r.paths.empty() ? 0 : r.paths.front().grid.size();
    m["construction"] = root.sampler.label();
    m["claims"] = root.sampler.claims().names();
    m["notes"] = root.sampler.notes();
    const auto& e = cfg.engine;
    m["engine"] = {{"mode", e.mode == SeriesMode::plain ? "plain" : e.mode == SeriesMode::compensated ? "compensated" : "symmetric"},
                   {"drift_c", e.drift_c},
                   {"truncation",
                    {{"kind", e.truncation.kind == Truncation::Kind::fixed ? "fixed" : "adaptive"},
                     {"terms", e.truncation.terms},
                     {"tolerance", e.truncation.tolerance},
                     {"initial_terms", e.truncation.initial_terms},
                     {"max_terms", e.truncation.max_terms}}},
                   {"r_sequence", e.r_sequence},
                   {"compensator_budget", e.compensator_budget},
                   {"r_tolerance", e.r_tolerance}};
    json paths = json::array();
    for (std::size_t i = 0; i < r.paths.size(); ++i) {
        json pm = to_json(r.paths[i].meta, cfg.output.trace);
        pm["path_id"] = i;
        paths.push_back(std::move(pm));
    }
    m["paths"] = std::move(paths);
    return r;
}

void write_artifacts(const RunResult& r, const std::filesystem::path& dir, const OutputOptions& out, bool with_report) {
    std::filesystem::create_directories(dir);
    auto open = [&](const char* name) {
        std::ofstream f(dir / name, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + (dir / name).string());
        return f;
    };
    if (out.paths_csv) {
        auto f = open("paths.csv");
        write_paths_csv(f, r.paths);
    }
    const bool any_jumps = std::any_of(r.paths.begin(), r.paths.end(), [](const PathSample& p) { return p.jumps.has_value(); });
    if (out.jumps_csv && any_jumps) {
        auto f = open("jumps.csv");
        write_jumps_csv(f, r.paths);
    }
    if (with_report) {
        json rep = json::array();
        for (const auto& t : r.reports) rep.push_back(to_json(t));
        auto f = open("report.json");
        f << rep.dump(2) << '\n';
    }
    auto f = open("meta.json");
    f << r.meta.dump(2) << '\n';
}

namespace {

void describe_node(const BuiltNode& n, int depth, const QuadratureBudget& budget, std::ostringstream& os,
                   std::vector<std::string>& warnings) {
    const std::string pad(2 * static_cast<std::size_t>(depth), ' ');
    os << pad << "- " << n.sampler.label() << '\n';
    os << pad << "  claims: {";
    const auto names = n.sampler.claims().names();
    for (std::size_t i = 0; i < names.size(); ++i) os << (i ? ", " : "") << names[i];
    os << "}\n";
    for (const auto& note : n.sampler.notes()) os << pad << "  note: " << note << '\n';
    if (n.epsilon) {
        const auto& e = *n.epsilon;
        os << pad << "  epsilon: " << e.name() << (e.symmetric() ? " (symmetric)" : "") << '\n';
        if (const auto* c = std::get_if<Composed>(&e.family()); c && !c->finite_mean)
            warnings.push_back("Composed epsilon over " + c->inner_label +
                               " has no finite-mean certificate; E|inner(1)| < infinity is not established");
        for (auto mode : {IntegrabilityMode::abs, IntegrabilityMode::square}) {
            const auto v = check_integrability(e, mode, budget);
            os << pad << "  integrability(" << (mode == IntegrabilityMode::abs ? "abs" : "square")
               << "): estimate " << format_double(v.estimate) << " [" << to_string(v.verdict) << ", " << v.draws_used
               << " draws]\n";
        }
    }
    for (const auto& c : n.children) describe_node(c, depth + 1, budget, os, warnings);
}

}  // namespace

std::string describe(const ExperimentConfig& cfg, const QuadratureBudget& budget) {
    const BuiltNode root = build_construction(cfg.construction, cfg.engine);
    std::ostringstream os;
    std::vector<std::string> warnings;
    os << "seed: " << cfg.seed << '\n';
    os << "paths: " << cfg.n_paths << " on " << normalize_grid(cfg.grid).size() << " grid points\n";
    os << "construction:\n";
    describe_node(root, 1, budget, os, warnings);
    if (cfg.epsilon) {
        const auto e = parse_epsilon(*cfg.epsilon, cfg.engine);
        os << "query epsilon: " << e.name() << '\n';
        if (const auto* c = std::get_if<Composed>(&e.family()); c && !c->finite_mean)
            warnings.push_back("Composed epsilon over " + c->inner_label + " has no finite-mean certificate");
    }
    if (cfg.tests.empty()) {
        os << "tests: no tests configured\n";
    } else {
        os << "tests:\n";
        for (const auto& t : cfg.tests) os << "  - " << t.type << '\n';
    }
    for (const auto& w : warnings) os << "warning: " << w << '\n';
    return os.str();
}

}  // namespace lepage

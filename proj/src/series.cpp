#include "lepage/series.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace lepage {

double levy_function(double u) { return std::clamp(u, -1.0, 1.0); }

std::vector<double> default_r_sequence() {
    std::vector<double> r;
    for (int k = 0; k <= 12; ++k) r.push_back(std::ldexp(1.0, -k));
    return r;
}

void LePageConfig::validate() const {
    if (!std::isfinite(drift_c)) throw std::invalid_argument("drift must be finite");
    if (truncation.kind == Truncation::Kind::fixed && truncation.terms == 0) {
        throw std::invalid_argument("fixed truncation needs at least one term");
    }
    if (truncation.kind == Truncation::Kind::adaptive &&
        (!(truncation.tolerance > 0.0) || truncation.initial_terms == 0)) {
        throw std::invalid_argument("adaptive truncation needs positive tolerance and initial terms");
    }
    if (mode != SeriesMode::plain) {
        if (r_sequence.empty()) throw std::invalid_argument("r_sequence must not be empty");
        double prev = infinity;
        for (double r : r_sequence) {
            if (!(r > 0.0) || !(r < prev)) {
                throw std::invalid_argument("r_sequence must be positive and strictly decreasing");
            }
            prev = r;
        }
        if (!(r_tolerance > 0.0)) throw std::invalid_argument("r_tolerance must be positive");
        if (compensator_budget == 0 || compensator_nodes == 0) {
            throw std::invalid_argument("compensator budget must be positive");
        }
    }
}

std::vector<double> normalize_grid(std::span<const double> grid) {
    if (grid.empty()) throw std::invalid_argument("grid must not be empty");
    std::vector<double> g(grid.begin(), grid.end());
    for (double t : g) {
        if (!(t >= 0.0) || !std::isfinite(t)) throw std::invalid_argument("grid times must be finite and nonnegative");
    }
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end()), g.end());
    if (g.front() != 0.0) g.insert(g.begin(), 0.0);
    return g;
}

namespace {

// Drives the terms of one series path. `consume(values, draw, gamma)` sees the
// term values ε_i(t/Γ_i) on the grid; `target()` returns the partial sums that
// the adaptive rule watches.
template <class F> struct TermRunner {
    const F& family;
    const std::vector<double>& grid;
    double t_max;
    ArrivalStream arrivals;
    RandomStream terms;
    std::vector<double> buf;
    std::size_t used = 0;

    TermRunner(const F& f, const std::vector<double>& g, const RandomStream& stream)
        : family(f), grid(g), t_max(g.back()), arrivals(stream.child(0)), terms(stream.child(1)),
          buf(g.size()) {}

    bool evaluate = true;  // false: the consumer only needs the draw

    template <class Consume> void add(Consume&& consume) {
        arrivals.extend_to(used + 1);
        const double gamma = arrivals[used];
        RandomStream ts = terms.child(used);
        auto d = family.draw(ts, t_max / gamma);
        if (evaluate) family.eval(d, grid, gamma, buf);
        consume(buf, d, gamma);
        ++used;
    }

    // Exact truncation: terms with t_max/Γ < s_star vanish on the whole grid.
    template <class Consume> void run_exact(double s_star, std::size_t max_terms, Consume&& consume) {
        while (true) {
            arrivals.extend_to(used + 1);
            if (t_max / arrivals[used] < s_star) return;
            if (used >= max_terms) {
                throw ConvergenceError("series: exact truncation exceeds max_terms=" + std::to_string(max_terms));
            }
            add(consume);
        }
    }

    template <class Consume, class Target>
    void run_truncated(const Truncation& tr, Consume&& consume, Target&& target) {
        if (tr.kind == Truncation::Kind::fixed) {
            while (used < tr.terms) add(consume);
            return;
        }
        std::size_t n = tr.initial_terms;
        while (used < n) add(consume);
        std::vector<double> prev = target();
        while (true) {
            if (2 * n > tr.max_terms) {
                throw ConvergenceError("series: adaptive truncation did not reach tolerance within max_terms=" +
                                       std::to_string(tr.max_terms));
            }
            n *= 2;
            while (used < n) add(consume);
            std::vector<double> cur = target();
            double scale = 0.0, change = 0.0;
            for (std::size_t j = 0; j < cur.size(); ++j) {
                scale = std::max(scale, std::fabs(cur[j]));
                change = std::max(change, std::fabs(cur[j] - prev[j]));
            }
            if (change <= tr.tolerance * scale) return;
            prev = std::move(cur);
        }
    }
};

SampleMeta base_meta(const RandomStream& stream) {
    SampleMeta m;
    m.seed = stream.seed();
    const auto lin = stream.lineage();
    m.lineage.assign(lin.begin(), lin.end());
    return m;
}

}  // namespace

// Σ of sorted jumps with time <= t at each (sorted) grid time, in time order.
static std::vector<double> jump_sums(std::vector<Jump> jumps, const std::vector<double>& grid) {
    std::stable_sort(jumps.begin(), jumps.end(), [](const Jump& a, const Jump& b) { return a.time < b.time; });
    std::vector<double> out(grid.size(), 0.0);
    double v = 0.0;
    std::size_t k = 0;
    for (std::size_t j = 0; j < grid.size(); ++j) {
        while (k < jumps.size() && jumps[k].time <= grid[j]) v += jumps[k++].height;
        out[j] = v;
    }
    return out;
}

PathSample simulate_plain(const EpsilonSpec& spec, std::span<const double> grid_in, const LePageConfig& cfg,
                          const RandomStream& stream) {
    cfg.validate();
    if (cfg.require_certificate && !spec.abs_certified()) {
        throw std::invalid_argument(spec.name() +
                                    ": plain series needs E∫min(1,|ε(t)|)t⁻²dt < ∞; use compensated mode");
    }
    PathSample out;
    out.grid = normalize_grid(grid_in);
    out.meta = base_meta(stream);
    const std::size_t n = out.grid.size();
    std::vector<double> sum(n, 0.0);
    std::vector<Jump> jumps;
    const double t_max = out.grid.back();
    const double s_star = spec.activation(0.0);
    const bool exact = s_star > 0.0;
    const bool piecewise = spec.kind() == PathKind::piecewise_constant;

    if (t_max > 0.0) {
        std::visit(
            [&](const auto& f) {
                using F = std::decay_t<decltype(f)>;
                TermRunner<F> runner(f, out.grid, stream);
                std::vector<Jump> scratch;
                // Piecewise-constant paths are summed from the merged jump record
                // in time order, so the path and its jumps agree exactly.
                runner.evaluate = !piecewise;
                auto consume = [&](std::span<const double> v, auto& d, double gamma) {
                    if constexpr (F::kind == PathKind::piecewise_constant) {
                        scratch.clear();
                        f.jumps(d, t_max / gamma, scratch);
                        for (const auto& jp : scratch) jumps.push_back({gamma * jp.time, jp.height});
                    } else {
                        for (std::size_t j = 0; j < n; ++j) sum[j] += v[j];
                    }
                };
                if (exact) {
                    runner.run_exact(s_star, cfg.truncation.max_terms, consume);
                } else if (piecewise) {
                    runner.run_truncated(cfg.truncation, consume, [&] { return jump_sums(jumps, out.grid); });
                } else {
                    runner.run_truncated(cfg.truncation, consume, [&] { return sum; });
                }
                out.meta.terms_used = runner.used;
            },
            spec.family());
    }
    out.meta.exact_truncation = exact;
    if (piecewise) {
        std::stable_sort(jumps.begin(), jumps.end(), [](const Jump& a, const Jump& b) { return a.time < b.time; });
        while (!jumps.empty() && jumps.back().time > t_max) jumps.pop_back();
        sum = jump_sums(jumps, out.grid);
    }
    out.values.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        out.values[j] = out.grid[j] == 0.0 ? 0.0 : cfg.drift_c * out.grid[j] + sum[j];
    }
    if (piecewise && cfg.drift_c == 0.0) out.jumps = std::move(jumps);
    return out;
}

CompensatorTable compensator_table(const EpsilonSpec& spec, std::span<const double> r_sequence,
                                   const QuadratureBudget& budget) {
    const auto draws = discretize_draws(spec, budget);
    CompensatorTable table;
    table.r.assign(r_sequence.begin(), r_sequence.end());
    table.factor.assign(r_sequence.size(), 0.0);
    table.draws = draws.size();
    // symmetric laws: pair every draw with its mirror image, so the odd L cancels
    // exactly instead of leaving Monte Carlo noise of order 1/sqrt(draws)
    const bool mirror = spec.symmetric();
    for (const auto& d : draws) {
        for (const auto& p : d.pieces) {
            const double a = std::fabs(p.value);
            const double contrib =
                (mirror ? 0.5 * (levy_function(p.value) + levy_function(-p.value)) : levy_function(p.value)) * p.weight;
            for (std::size_t k = 0; k < table.r.size(); ++k) {
                if (a > table.r[k]) table.factor[k] += contrib;
            }
        }
    }
    for (auto& f : table.factor) f /= static_cast<double>(draws.size());
    return table;
}

CompensatorTable compensator_table(const EpsilonSpec& spec, const LePageConfig& cfg) {
    QuadratureBudget b;
    b.draws = cfg.compensator_budget;
    b.nodes = cfg.compensator_nodes;
    b.seed = cfg.compensator_seed;
    return compensator_table(spec, cfg.r_sequence, b);
}

PathSample simulate_compensated(const EpsilonSpec& spec, std::span<const double> grid_in,
                                const LePageConfig& cfg, const RandomStream& stream,
                                const CompensatorTable* table) {
    cfg.validate();
    const bool symmetric = cfg.mode == SeriesMode::symmetric;
    if (symmetric && !spec.symmetric()) {
        throw std::invalid_argument(spec.name() + ": symmetric mode needs a symmetric ε");
    }
    if (cfg.require_certificate && !spec.square_certified()) {
        throw std::invalid_argument(spec.name() + ": compensated series needs E∫min(1,ε(t)²)t⁻²dt < ∞");
    }
    const auto& rs = cfg.r_sequence;
    const std::size_t R = rs.size();
    CompensatorTable own;
    if (!symmetric && !table) {
        own = compensator_table(spec, cfg);
        table = &own;
    }
    if (table && table->r != rs) throw std::invalid_argument("compensator table built for another r_sequence");

    PathSample out;
    out.grid = normalize_grid(grid_in);
    out.meta = base_meta(stream);
    const std::size_t n = out.grid.size();
    const double t_max = out.grid.back();
    // sums[k][j] = Σ_i ε_i(t_j/Γ_i) 1{|ε_i| > r_k}
    std::vector<std::vector<double>> sums(R, std::vector<double>(n, 0.0));
    const double s_star = spec.activation(rs.back());
    const bool exact = s_star > 0.0;

    if (t_max > 0.0) {
        std::visit(
            [&](const auto& f) {
                using F = std::decay_t<decltype(f)>;
                TermRunner<F> runner(f, out.grid, stream);
                auto consume = [&](std::span<const double> v, auto&, double) {
                    for (std::size_t j = 0; j < n; ++j) {
                        const double a = std::fabs(v[j]);
                        for (std::size_t k = R; k-- > 0;) {
                            if (!(a > rs[k])) break;  // r decreasing: larger r fail too
                            sums[k][j] += v[j];
                        }
                    }
                };
                if (exact) {
                    runner.run_exact(s_star, cfg.truncation.max_terms, consume);
                } else {
                    runner.run_truncated(cfg.truncation, consume, [&] { return sums.back(); });
                }
                out.meta.terms_used = runner.used;
            },
            spec.family());
    }
    out.meta.exact_truncation = exact;
    if (table) out.meta.compensator = table->factor;
    else out.meta.compensator.assign(R, 0.0);

    out.meta.r_trace.assign(R, std::vector<double>(n, 0.0));
    for (std::size_t k = 0; k < R; ++k) {
        for (std::size_t j = 0; j < n; ++j) {
            const double t = out.grid[j];
            out.meta.r_trace[k][j] =
                t == 0.0 ? 0.0 : cfg.drift_c * t + sums[k][j] - t * out.meta.compensator[k];
        }
    }

    // Stable from converged_at onward: every later step moves the path by at
    // most r_tolerance relative (absolute below magnitude 1).
    std::size_t calm_from = R - 1;
    for (std::size_t k = R - 1; k >= 1; --k) {
        double worst = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double cur = out.meta.r_trace[k][j];
            const double d = std::fabs(cur - out.meta.r_trace[k - 1][j]);
            worst = std::max(worst, d / std::max(1.0, std::fabs(cur)));
        }
        if (worst > cfg.r_tolerance) break;
        calm_from = k - 1;
    }
    out.meta.converged = R == 1 || calm_from < R - 1;
    out.meta.converged_at = out.meta.converged ? (R == 1 ? 0 : calm_from) : R;
    if (!out.meta.converged && cfg.strict_convergence) {
        throw ConvergenceError(spec.name() + ": compensated series did not stabilize along the r-sequence");
    }
    out.values = out.meta.r_trace.back();
    return out;
}

PathSample simulate(const EpsilonSpec& spec, std::span<const double> grid, const LePageConfig& cfg,
                    const RandomStream& stream, const CompensatorTable* table) {
    if (cfg.mode == SeriesMode::plain) return simulate_plain(spec, grid, cfg, stream);
    return simulate_compensated(spec, grid, cfg, stream, table);
}

std::vector<std::complex<double>> cumulant_curve(const EpsilonSpec& spec, std::span<const double> lambdas,
                                                 double drift_c, const QuadratureBudget& budget) {
    const auto draws = discretize_draws(spec, budget);
    const bool sym = spec.symmetric();
    const double n = static_cast<double>(draws.size());
    std::vector<std::complex<double>> out;
    out.reserve(lambdas.size());
    for (double lambda : lambdas) {
        double re = 0.0, im = 0.0;
        for (const auto& d : draws) {
            for (const auto& p : d.pieces) {
                const double x = lambda * p.value;
                re += (1.0 - std::cos(x)) * p.weight;
                if (!sym) im -= std::sin(x) * p.weight;
            }
        }
        out.emplace_back(re / n, im / n - lambda * drift_c);
    }
    return out;
}

std::complex<double> cumulant(const EpsilonSpec& spec, const CumulantQuery& q) {
    const double l[1] = {q.lambda};
    return cumulant_curve(spec, l, q.drift_c, q.quad_budget).front();
}

std::complex<double> marginal_cf(const EpsilonSpec& spec, const CumulantQuery& q) {
    if (!(q.t >= 0.0)) throw std::invalid_argument("marginal_cf: t must be nonnegative");
    return std::exp(-q.t * cumulant(spec, q));
}

}  // namespace lepage

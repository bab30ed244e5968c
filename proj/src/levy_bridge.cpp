#include "lepage/levy_bridge.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace lepage {

namespace {

double e1(double x) { return -std::expint(-x); }

std::string fmt(double x) {
    std::ostringstream os;
    os << x;
    return os.str();
}

}  // namespace

int shell_index(double x) {
    const double a = std::fabs(x);
    if (!(a > 0.0) || !std::isfinite(a)) throw std::invalid_argument("shell_index: jump size must be finite and nonzero");
    if (a > 1.0) return 0;
    int k = static_cast<int>(std::floor(-std::log2(a))) + 1;
    // guard the floor against rounding at dyadic boundaries
    while (!(a > std::ldexp(1.0, -k))) ++k;
    while (k > 1 && a > std::ldexp(1.0, -k + 1)) --k;
    return k;
}

void DiscretizedLevyMeasure::validate() const {
    if (shells.empty()) throw std::invalid_argument("Lévy measure: no shell carries mass");
    int prev = -1;
    for (const auto& s : shells) {
        if (s.k <= prev) throw std::invalid_argument("Lévy measure: shells must have increasing indices");
        if (!(s.mass > 0.0) || !std::isfinite(s.mass)) throw std::invalid_argument("Lévy measure: shell masses must be positive and finite");
        if (!s.sample) throw std::invalid_argument("Lévy measure: shell without sampler");
        prev = s.k;
    }
}

double DiscretizedLevyMeasure::total_mass() const {
    double q = 0.0;
    for (const auto& s : shells) q += s.mass;
    return q;
}

double DiscretizedLevyMeasure::first_moment() const {
    double m = 0.0;
    for (const auto& s : shells) m += s.first_moment;
    return m;
}

double DiscretizedLevyMeasure::square_moment() const {
    double m = 0.0;
    for (const auto& s : shells) m += s.square_moment;
    return m;
}

DiscretizedLevyMeasure gamma_levy_measure(double a, double b, int k_max) {
    if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("gamma Lévy measure: a and b must be positive");
    if (k_max < 0 || k_max > 1000) throw std::invalid_argument("gamma Lévy measure: k_max out of range");
    DiscretizedLevyMeasure m;
    m.description = "gamma(a=" + fmt(a) + ", b=" + fmt(b) + ", k_max=" + std::to_string(k_max) + ")";
    m.nonnegative = true;
    {
        LevyShell s;
        s.k = 0;
        s.mass = a * e1(b);
        // x = 1 + Exp(b), accepted with probability 1/x
        s.sample = [b](RandomStream& r) {
            while (true) {
                const double x = 1.0 + r.exponential() / b;
                if (r.uniform() * x < 1.0) return x;
            }
        };
        s.first_moment = s.abs_moment = (a / b) * std::exp(-b);
        s.square_moment = s.mass;
        m.shells.push_back(std::move(s));
    }
    for (int k = 1; k <= k_max; ++k) {
        const double lo = std::ldexp(1.0, -k), hi = 2.0 * lo;
        LevyShell s;
        s.k = k;
        s.mass = a * (e1(b * lo) - e1(b * hi));
        // truncated Exp(b) on (lo, hi], accepted with probability lo/x >= 1/2
        const double span_mass = -std::expm1(-b * (hi - lo));
        s.sample = [b, lo, hi, span_mass](RandomStream& r) {
            while (true) {
                const double x = std::min(hi, lo - std::log1p(-r.uniform() * span_mass) / b);
                if (r.uniform() * x < lo) return x;
            }
        };
        s.first_moment = s.abs_moment = (a / b) * (std::exp(-b * lo) - std::exp(-b * hi));
        // a ∫ x e^{-bx} dx
        auto prim = [b](double x) { return -(x / b + 1.0 / (b * b)) * std::exp(-b * x); };
        s.square_moment = a * (prim(hi) - prim(lo));
        if (s.mass > 0.0) m.shells.push_back(std::move(s));
    }
    const double floor_x = std::ldexp(1.0, -k_max);
    m.neglected_mass = INFINITY;
    m.neglected_abs_moment = (a / b) * -std::expm1(-b * floor_x);
    auto prim = [b](double x) { return -(x / b + 1.0 / (b * b)) * std::exp(-b * x); };
    m.neglected_square_moment = a * (prim(floor_x) - prim(0.0));
    return m;
}

DiscretizedLevyMeasure symmetric_stable_levy_measure(double alpha, double c, int k_max) {
    if (!(alpha > 0.0 && alpha < 2.0)) throw std::invalid_argument("stable Lévy measure: alpha must lie in (0,2)");
    if (!(c > 0.0)) throw std::invalid_argument("stable Lévy measure: C must be positive");
    if (k_max < 0 || k_max > 1000) throw std::invalid_argument("stable Lévy measure: k_max out of range");
    DiscretizedLevyMeasure m;
    m.description = "symmetric_stable(alpha=" + fmt(alpha) + ", C=" + fmt(c) + ", k_max=" + std::to_string(k_max) + ")";
    auto pareto = [alpha](double lo, double hi) {
        // inverse CDF of x^{-1-α} on (lo, hi], hi may be infinite; random sign
        const double lo_a = std::pow(lo, -alpha), hi_a = std::isfinite(hi) ? std::pow(hi, -alpha) : 0.0;
        return [alpha, lo_a, hi_a](RandomStream& r) {
            const double sign = (r.next_u64() >> 63) ? 1.0 : -1.0;
            return sign * std::pow(lo_a - r.uniform() * (lo_a - hi_a), -1.0 / alpha);
        };
    };
    auto abs_int = [alpha, c](double lo, double hi) {  // 2C ∫ x^{-α}
        if (alpha == 1.0) return 2.0 * c * std::log(hi / lo);
        return 2.0 * c * (std::pow(hi, 1.0 - alpha) - std::pow(lo, 1.0 - alpha)) / (1.0 - alpha);
    };
    {
        LevyShell s;
        s.k = 0;
        s.mass = 2.0 * c / alpha;
        s.sample = pareto(1.0, INFINITY);
        s.first_moment = 0.0;
        s.abs_moment = alpha > 1.0 ? 2.0 * c / (alpha - 1.0) : INFINITY;
        s.square_moment = s.mass;
        m.shells.push_back(std::move(s));
    }
    for (int k = 1; k <= k_max; ++k) {
        const double lo = std::ldexp(1.0, -k), hi = 2.0 * lo;
        LevyShell s;
        s.k = k;
        s.mass = (2.0 * c / alpha) * (std::pow(lo, -alpha) - std::pow(hi, -alpha));
        s.sample = pareto(lo, hi);
        s.first_moment = 0.0;
        s.abs_moment = abs_int(lo, hi);
        s.square_moment = 2.0 * c * (std::pow(hi, 2.0 - alpha) - std::pow(lo, 2.0 - alpha)) / (2.0 - alpha);
        m.shells.push_back(std::move(s));
    }
    const double floor_x = std::ldexp(1.0, -k_max);
    m.neglected_mass = INFINITY;
    m.neglected_abs_moment = alpha < 1.0 ? 2.0 * c * std::pow(floor_x, 1.0 - alpha) / (1.0 - alpha) : INFINITY;
    m.neglected_square_moment = 2.0 * c * std::pow(floor_x, 2.0 - alpha) / (2.0 - alpha);
    return m;
}

DiscretizedLevyMeasure atomic_levy_measure(std::vector<double> atoms, std::vector<double> weights) {
    if (atoms.empty() || atoms.size() != weights.size()) {
        throw std::invalid_argument("atomic Lévy measure: need one weight per atom");
    }
    std::map<int, std::pair<std::vector<double>, std::vector<double>>> by_shell;
    DiscretizedLevyMeasure m;
    m.nonnegative = true;
    std::ostringstream desc;
    desc << "atomic(";
    for (std::size_t j = 0; j < atoms.size(); ++j) {
        if (!(weights[j] >= 0.0) || !std::isfinite(weights[j])) throw std::invalid_argument("atomic Lévy measure: weights must be nonnegative");
        desc << (j ? ", " : "") << weights[j] << "@" << atoms[j];
        if (weights[j] == 0.0) continue;
        const int k = shell_index(atoms[j]);
        by_shell[k].first.push_back(atoms[j]);
        by_shell[k].second.push_back(weights[j]);
        if (atoms[j] < 0.0) m.nonnegative = false;
    }
    desc << ")";
    m.description = desc.str();
    for (auto& [k, aw] : by_shell) {
        LevyShell s;
        s.k = k;
        s.mass = std::accumulate(aw.second.begin(), aw.second.end(), 0.0);
        for (std::size_t j = 0; j < aw.first.size(); ++j) {
            const double x = aw.first[j], w = aw.second[j];
            s.first_moment += x * w;
            s.abs_moment += std::fabs(x) * w;
            s.square_moment += std::min(1.0, x * x) * w;
        }
        if (aw.first.size() == 1) {
            const double x = aw.first.front();
            s.sample = [x](RandomStream&) { return x; };
        } else {
            const ScalarLaw law = ScalarLaw::discrete(aw.first, aw.second);
            s.sample = [law](RandomStream& r) { return law.sample(r); };
        }
        m.shells.push_back(std::move(s));
    }
    m.validate();
    return m;
}

std::vector<double> shell_probabilities(const DiscretizedLevyMeasure& m, ShellWeighting w) {
    m.validate();
    std::vector<double> p;
    for (const auto& s : m.shells) {
        p.push_back(w == ShellWeighting::geometric ? std::ldexp(1.0, -s.k - 1) : s.mass);
    }
    const double total = std::accumulate(p.begin(), p.end(), 0.0);
    for (auto& x : p) x /= total;
    return p;
}

namespace {

JumpLawPair make_pair(const DiscretizedLevyMeasure& m, ShellWeighting weighting) {
    const auto w = shell_probabilities(m, weighting);
    JumpLawPair pair;
    pair.source = m.description;
    pair.nonnegative_marks = m.nonnegative;
    double acc = 0.0;
    for (std::size_t i = 0; i < m.shells.size(); ++i) {
        const auto& s = m.shells[i];
        pair.shells.push_back({s.k, s.mass, w[i] / s.mass, s.sample});
        acc += w[i];
        pair.cumulative.push_back(acc);
    }
    pair.cumulative.back() = 1.0;
    return pair;
}

}  // namespace

EpsilonSpec levy_measure_to_epsilon(const DiscretizedLevyMeasure& m, ShellWeighting weighting) {
    return EpsilonSpec::single_jump(make_pair(m, weighting));
}

bool bounded_variation_surrogate(const DiscretizedLevyMeasure& m) {
    // b_k = 2^{-k+1} q_k over the finest consecutive shells must still decay
    const auto& sh = m.shells;
    if (sh.size() < 2) return true;
    const auto& last = sh[sh.size() - 1];
    const auto& prev = sh[sh.size() - 2];
    if (last.k == 0 || prev.k == 0 || last.k != prev.k + 1) return true;
    const double b_last = std::ldexp(last.mass, -last.k + 1), b_prev = std::ldexp(prev.mass, -prev.k + 1);
    return b_last < b_prev;
}

PathSample bounded_variation_series(const DiscretizedLevyMeasure& m, std::span<const double> grid_in,
                                    const LePageConfig& cfg, const RandomStream& stream, ShellWeighting weighting) {
    cfg.validate();
    if (!bounded_variation_surrogate(m)) {
        throw std::invalid_argument("bounded_variation_series: shell masses do not decay fast enough for bounded variation");
    }
    const JumpLawPair pair = make_pair(m, weighting);
    PathSample out;
    out.grid = normalize_grid(grid_in);
    out.meta.seed = stream.seed();
    const auto lin = stream.lineage();
    out.meta.lineage.assign(lin.begin(), lin.end());
    out.meta.exact_truncation = true;
    const std::size_t n = out.grid.size();
    const double t_max = out.grid.back();
    const double s_star = pair.min_weight();

    std::vector<Jump> jumps;
    if (t_max > 0.0) {
        ArrivalStream arrivals(stream.child(0));
        const RandomStream terms = stream.child(1);
        std::size_t used = 0;
        while (true) {
            arrivals.extend_to(used + 1);
            const double gamma = arrivals[used];
            const double horizon = t_max / gamma;
            if (horizon < s_star) break;
            if (used >= cfg.truncation.max_terms) {
                throw ConvergenceError("series: exact truncation exceeds max_terms=" + std::to_string(cfg.truncation.max_terms));
            }
            RandomStream ts = terms.child(used);
            const auto& shell = pair.shells[pair.pick(ts.uniform())];
            const double time = shell.weight;
            if (time <= horizon) {
                const double height = shell.sample(ts);
                if (height != 0.0) jumps.push_back({gamma * time, height});
            }
            ++used;
        }
        out.meta.terms_used = used;
    }
    std::stable_sort(jumps.begin(), jumps.end(), [](const Jump& a, const Jump& b) { return a.time < b.time; });
    while (!jumps.empty() && jumps.back().time > t_max) jumps.pop_back();
    out.values.assign(n, 0.0);
    double v = 0.0;
    std::size_t k = 0;
    for (std::size_t j = 0; j < n; ++j) {
        while (k < jumps.size() && jumps[k].time <= out.grid[j]) v += jumps[k++].height;
        out.values[j] = out.grid[j] == 0.0 ? 0.0 : cfg.drift_c * out.grid[j] + v;
    }
    if (cfg.drift_c == 0.0) out.jumps = std::move(jumps);
    return out;
}

}  // namespace lepage

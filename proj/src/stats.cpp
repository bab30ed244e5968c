#include "lepage/stats.hpp"

#include "lepage/kernels.hpp"
#include "lepage/series.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace lepage {

FDDSample::FDDSample(std::vector<double> g, std::vector<double> d) : grid(std::move(g)), data(std::move(d)) {
    if (grid.empty()) throw std::invalid_argument("FDDSample: grid must not be empty");
    if (data.size() % grid.size() != 0) throw std::invalid_argument("FDDSample: rows must have length k");
}

FDDSample FDDSample::scalar(std::vector<double> values, double t) { return FDDSample({t}, std::move(values)); }

void TestReport::decide() { decision = p_value < alpha ? Decision::reject : Decision::pass; }

double TestReport::detail(const std::string& key) const {
    for (const auto& [k, v] : details) {
        if (k == key) return v;
    }
    throw std::out_of_range("TestReport: no detail " + key);
}

std::string to_string(TestReport::Decision d) { return d == TestReport::Decision::pass ? "pass" : "reject"; }

double normal_two_sided(double z) { return std::erfc(std::fabs(z) / std::sqrt(2.0)); }

double kolmogorov_pvalue(double d, std::size_t n) {
    const double rn = std::sqrt(static_cast<double>(n));
    const double lambda = (rn + 0.12 + 0.11 / rn) * d;
    if (lambda < 0.2) return 1.0;
    double sum = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += (k % 2 ? 1.0 : -1.0) * term;
        if (term < 1e-16) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

std::vector<std::complex<double>> ecf(const FDDSample& s, const std::vector<std::vector<double>>& freqs) {
    if (s.n() == 0) throw std::invalid_argument("ecf: empty sample");
    std::vector<std::complex<double>> out;
    out.reserve(freqs.size());
    for (const auto& th : freqs) {
        if (th.size() != s.k()) throw std::invalid_argument("ecf: frequency length must equal k");
        double re = 0.0, im = 0.0;
        for (std::size_t i = 0; i < s.n(); ++i) {
            const auto r = s.row(i);
            double x = 0.0;
            for (std::size_t c = 0; c < s.k(); ++c) x += th[c] * r[c];
            re += std::cos(x);
            im += std::sin(x);
        }
        const double n = static_cast<double>(s.n());
        out.emplace_back(re / n, im / n);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Energy test

double max_square_share(const FDDSample& s) {
    const std::size_t n = s.n(), k = s.k();
    double worst = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
        double mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) mean += s.data[i * k + c];
        mean /= static_cast<double>(n);
        double total = 0.0, top = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = s.data[i * k + c] - mean;
            total += d * d;
            top = std::max(top, d * d);
        }
        if (total > 0.0) worst = std::max(worst, top / total);
    }
    return worst;
}

double heavy_tail_threshold(std::size_t n) {
    const double m = static_cast<double>(n);
    return std::min(0.5, std::max(0.05, 20.0 * std::log(m) / m));
}

namespace {

double median_of(std::vector<double> v) {
    const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
    std::nth_element(v.begin(), mid, v.end());
    double m = *mid;
    if (v.size() % 2 == 0) m = 0.5 * (m + *std::max_element(v.begin(), mid));
    return m;
}

// arctan((x - median)/MAD) per coordinate with pooled location and scale; the
// same injective map is applied to both arms.
void arctan_transform(std::vector<double>& rows, std::size_t k) {
    const std::size_t n = rows.size() / k;
    for (std::size_t c = 0; c < k; ++c) {
        std::vector<double> col(n);
        for (std::size_t i = 0; i < n; ++i) col[i] = rows[i * k + c];
        const double med = median_of(col);
        for (auto& x : col) x = std::fabs(x - med);
        double mad = median_of(col);
        if (!(mad > 0.0)) {
            mad = std::accumulate(col.begin(), col.end(), 0.0) / static_cast<double>(n);
            if (!(mad > 0.0)) mad = 1.0;
        }
        for (std::size_t i = 0; i < n; ++i) rows[i * k + c] = std::atan((rows[i * k + c] - med) / mad);
    }
}

std::vector<std::vector<double>> projection_directions(std::size_t k, std::size_t extra) {
    std::vector<std::vector<double>> dirs;
    for (std::size_t c = 0; c < k; ++c) {
        std::vector<double> e(k, 0.0);
        e[c] = 1.0;
        dirs.push_back(std::move(e));
    }
    if (k == 1) return dirs;
    const RandomStream root(0xD1EC7105);
    for (std::size_t d = 0; d < extra; ++d) {
        RandomStream s = root.child(k).child(d);
        std::vector<double> u(k);
        double norm = 0.0;
        for (auto& x : u) {
            x = s.normal();
            norm += x * x;
        }
        norm = std::sqrt(norm);
        for (auto& x : u) x /= norm;
        dirs.push_back(std::move(u));
    }
    return dirs;
}

Provenance provenance_of(const RandomStream& stream) {
    Provenance p;
    p.seed = stream.seed();
    const auto lin = stream.lineage();
    p.lineage.assign(lin.begin(), lin.end());
    return p;
}

template <class Fill>
std::vector<double> build_rows(std::size_t count, std::size_t k, int threads, Fill&& fill) {
    std::vector<double> rows(count * k);
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) fill(i, std::span<double>(rows.data() + i * k, k));
        return rows;
    }
    std::exception_ptr failure;
#pragma omp parallel for num_threads(threads) schedule(dynamic, 64)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(count); ++i) {
        try {
            const auto u = static_cast<std::size_t>(i);
            fill(u, std::span<double>(rows.data() + u * k, k));
        } catch (...) {
#pragma omp critical
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
    return rows;
}

std::string join(std::span<const double> xs) {
    std::ostringstream os;
    for (std::size_t i = 0; i < xs.size(); ++i) os << (i ? "," : "") << xs[i];
    return os.str();
}

}  // namespace

TestReport energy_two_sample(const FDDSample& x, const FDDSample& y, const EnergyOptions& opts,
                             const RandomStream& stream) {
    if (x.k() != y.k() || x.k() == 0) throw std::invalid_argument("energy_two_sample: samples need the same dimension");
    constexpr std::size_t min_n = 50;
    if (x.n() < min_n || y.n() < min_n) {
        throw std::invalid_argument("energy_two_sample: need at least 50 rows per arm");
    }
    if (opts.permutations == 0) throw std::invalid_argument("energy_two_sample: need at least one permutation");
    const std::size_t k = x.k();

    TestReport rep;
    rep.name = "energy_two_sample";
    rep.alpha = opts.alpha;
    rep.provenance = provenance_of(stream);
    rep.provenance.n_x = x.n();
    rep.provenance.n_y = y.n();
    rep.provenance.grid = x.grid;
    rep.provenance.permutations = opts.permutations;

    std::vector<double> rows(x.data);
    rows.insert(rows.end(), y.data.begin(), y.data.end());

    // snap to a relative grid so rounding noise between arms (e.g. 4·ct vs c·4t)
    // cannot separate degenerate samples
    for (std::size_t c = 0; c < k; ++c) {
        double top = 0.0;
        for (std::size_t i = c; i < rows.size(); i += k) top = std::max(top, std::fabs(rows[i]));
        if (!(top > 0.0) || !std::isfinite(top)) continue;
        const double q = 1e-12 * top;
        for (std::size_t i = c; i < rows.size(); i += k) rows[i] = std::round(rows[i] / q) * q;
    }
    const double share = std::max(max_square_share(x), max_square_share(y));
    const bool heavy = opts.heavy_tail_guard && (share > heavy_tail_threshold(x.n()) || share > heavy_tail_threshold(y.n()));
    if (heavy) arctan_transform(rows, k);
    if (k > 1) {
        // pooled standardization so random directions mix comparable scales
        const std::size_t n = rows.size() / k;
        for (std::size_t c = 0; c < k; ++c) {
            double mean = 0.0, sq = 0.0;
            for (std::size_t i = 0; i < n; ++i) mean += rows[i * k + c];
            mean /= static_cast<double>(n);
            for (std::size_t i = 0; i < n; ++i) sq += (rows[i * k + c] - mean) * (rows[i * k + c] - mean);
            double sd = std::sqrt(sq / static_cast<double>(n));
            if (!(sd > 0.0)) sd = 1.0;
            for (std::size_t i = 0; i < n; ++i) rows[i * k + c] = (rows[i * k + c] - mean) / sd;
        }
    }
    const auto dirs = projection_directions(k, opts.random_directions);
    const auto sp = SlicedProjections::build(rows, k, x.n(), dirs);

    std::vector<std::uint8_t> labels(sp.pooled(), 0);
    std::fill(labels.begin(), labels.begin() + static_cast<std::ptrdiff_t>(x.n()), std::uint8_t{1});
    rep.statistic = sliced_energy(sp, labels);

    const auto perm = opts.threads > 1 ? permutation_statistics_parallel(sp, opts.permutations, stream, opts.threads)
                                       : permutation_statistics_serial(sp, opts.permutations, stream);
    // relabelings within summation noise of the observed value count as ties
    double spread = 0.0;
    for (const auto& v : sp.sorted) spread = std::max(spread, v.back() - v.front());
    const double tie = 1e-10 * static_cast<double>(sp.pooled()) * spread;
    const auto b = static_cast<double>(std::count_if(perm.begin(), perm.end(), [&](double s) { return s >= rep.statistic - tie; }));
    rep.p_value = (b + 1.0) / (static_cast<double>(opts.permutations) + 1.0);
    rep.decide();
    rep.details = {{"directions", static_cast<double>(dirs.size())},
                   {"max_square_share", share},
                   {"arctan_transform", heavy ? 1.0 : 0.0}};
    return rep;
}

TestReport time_stability_test(const ProcessSampler& p, std::size_t n, std::span<const double> grid,
                               std::size_t paths_per_arm, const EnergyOptions& opts, const RandomStream& stream) {
    if (n == 0) throw std::invalid_argument("time_stability_test: n must be at least 1");
    if (grid.empty()) throw std::invalid_argument("time_stability_test: empty grid");
    const std::size_t k = grid.size();
    std::vector<double> big(grid.begin(), grid.end());
    for (auto& t : big) t *= static_cast<double>(n);
    const RandomStream sa = stream.child(0), sb = stream.child(1);

    auto arm_a = build_rows(paths_per_arm, k, opts.threads, [&](std::size_t j, std::span<double> out) {
        std::fill(out.begin(), out.end(), 0.0);
        for (std::size_t m = 0; m < n; ++m) {
            const auto v = p.values_at(grid, sa.child(j * n + m));
            for (std::size_t c = 0; c < k; ++c) out[c] += v[c];
        }
    });
    TestReport rep;
    if (n == 1) {
        // n·grid = grid: both arms are literally the same law; use the same paths
        FDDSample a(std::vector<double>(grid.begin(), grid.end()), arm_a);
        rep = energy_two_sample(a, a, opts, stream.child(2));
    } else {
        auto arm_b = build_rows(paths_per_arm, k, opts.threads, [&](std::size_t j, std::span<double> out) {
            const auto v = p.values_at(big, sb.child(j));
            std::copy(v.begin(), v.end(), out.begin());
        });
        FDDSample a(std::vector<double>(grid.begin(), grid.end()), std::move(arm_a));
        FDDSample b(std::vector<double>(grid.begin(), grid.end()), std::move(arm_b));
        rep = energy_two_sample(a, b, opts, stream.child(2));
    }
    rep.name = "time_stability_test";
    rep.provenance.seed = stream.seed();
    const auto lin = stream.lineage();
    rep.provenance.lineage.assign(lin.begin(), lin.end());
    rep.provenance.extra.emplace_back("process", p.label());
    rep.provenance.extra.emplace_back("n", std::to_string(n));
    return rep;
}

TestReport ab_stability_test(const ProcessSampler& p, double a, double b, std::span<const double> grid,
                             std::size_t paths_per_arm, const EnergyOptions& opts, const RandomStream& stream) {
    if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("ab_stability_test: a and b must be positive");
    if (grid.empty()) throw std::invalid_argument("ab_stability_test: empty grid");
    const std::size_t k = grid.size();
    std::vector<double> ga(grid.begin(), grid.end()), gb(ga), gab(ga);
    for (std::size_t c = 0; c < k; ++c) {
        ga[c] *= a;
        gb[c] *= b;
        gab[c] *= a + b;
    }
    const RandomStream sa = stream.child(0), sb = stream.child(1);
    auto arm_a = build_rows(paths_per_arm, k, opts.threads, [&](std::size_t j, std::span<double> out) {
        const auto v1 = p.values_at(ga, sa.child(2 * j));
        const auto v2 = p.values_at(gb, sa.child(2 * j + 1));
        for (std::size_t c = 0; c < k; ++c) out[c] = v1[c] + v2[c];
    });
    auto arm_b = build_rows(paths_per_arm, k, opts.threads, [&](std::size_t j, std::span<double> out) {
        const auto v = p.values_at(gab, sb.child(j));
        std::copy(v.begin(), v.end(), out.begin());
    });
    FDDSample xa(std::vector<double>(grid.begin(), grid.end()), std::move(arm_a));
    FDDSample xb(std::vector<double>(grid.begin(), grid.end()), std::move(arm_b));
    TestReport rep = energy_two_sample(xa, xb, opts, stream.child(2));
    rep.name = "ab_stability_test";
    rep.provenance.seed = stream.seed();
    const auto lin = stream.lineage();
    rep.provenance.lineage.assign(lin.begin(), lin.end());
    rep.provenance.extra.emplace_back("process", p.label());
    rep.provenance.extra.emplace_back("a", std::to_string(a));
    rep.provenance.extra.emplace_back("b", std::to_string(b));
    return rep;
}

// ---------------------------------------------------------------------------
// Characteristic functions

TestReport cf_match_samples(std::span<const double> samples, std::span<const double> freqs,
                            const std::function<std::complex<double>(double)>& model, double tol) {
    if (samples.empty()) throw std::invalid_argument("cf_match: empty sample");
    if (!(tol >= 0.0)) throw std::invalid_argument("cf_match: tolerance must be nonnegative");
    const FDDSample s = FDDSample::scalar(std::vector<double>(samples.begin(), samples.end()));
    std::vector<std::vector<double>> th;
    for (double l : freqs) th.push_back({l});
    const auto emp = ecf(s, th);
    TestReport rep;
    rep.name = "cf_match_test";
    rep.provenance.n_x = samples.size();
    double err = 0.0;
    for (std::size_t i = 0; i < freqs.size(); ++i) {
        const double e = std::abs(emp[i] - model(freqs[i]));
        rep.details.emplace_back("error@" + std::to_string(freqs[i]), e);
        err = std::max(err, e);
    }
    const double rn = std::sqrt(static_cast<double>(samples.size()));
    rep.statistic = err;
    rep.alpha = normal_two_sided(3.0);
    rep.p_value = normal_two_sided(std::max(0.0, err - tol) * rn);
    rep.details.emplace_back("tolerance", tol);
    rep.details.emplace_back("allowance", tol + 3.0 / rn);
    rep.decide();
    return rep;
}

TestReport cf_match_test(const ProcessSampler& p, const EpsilonSpec& spec, double t, std::span<const double> freqs,
                         std::size_t n, double tol, const RandomStream& stream, const CfMatchOptions& opts) {
    if (!(t >= 0.0)) throw std::invalid_argument("cf_match_test: t must be nonnegative");
    if (n == 0) throw std::invalid_argument("cf_match_test: n must be positive");
    const double times[1] = {t};
    const auto values = build_rows(n, 1, opts.threads, [&](std::size_t i, std::span<double> out) {
        out[0] = p.values_at(times, stream.child(i))[0];
    });
    const auto psi = cumulant_curve(spec, freqs, opts.drift_c, opts.quad_budget);
    std::map<double, std::complex<double>> model;
    for (std::size_t i = 0; i < freqs.size(); ++i) model[freqs[i]] = std::exp(-t * psi[i]);
    TestReport rep = cf_match_samples(values, freqs, [&](double l) { return model.at(l); }, tol);
    rep.provenance.seed = stream.seed();
    const auto lin = stream.lineage();
    rep.provenance.lineage.assign(lin.begin(), lin.end());
    rep.provenance.grid = {t};
    rep.provenance.extra.emplace_back("process", p.label());
    rep.provenance.extra.emplace_back("spec", spec.name());
    rep.provenance.extra.emplace_back("freqs", join(freqs));
    return rep;
}

// ---------------------------------------------------------------------------
// Exponentiality

double ks_exponential_statistic(std::span<const double> samples) {
    std::vector<double> x(samples.begin(), samples.end());
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(x.size());
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double f = -std::expm1(-x[i] / mean);
        d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
    }
    return d;
}

namespace {

// Bootstrap null of the fitted-rate KS statistic, cached per (n, B, seed).
const std::vector<double>& exponential_null(std::size_t n, std::size_t b, std::uint64_t seed) {
    static std::mutex mutex;
    static std::map<std::tuple<std::size_t, std::size_t, std::uint64_t>, std::vector<double>> cache;
    std::lock_guard lock(mutex);
    auto key = std::make_tuple(n, b, seed);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    std::vector<double> null(b);
    const RandomStream root(seed);
    std::vector<double> draw(n);
    for (std::size_t r = 0; r < b; ++r) {
        RandomStream s = root.child(n).child(r);
        for (auto& v : draw) v = s.exponential();
        null[r] = ks_exponential_statistic(draw);
    }
    return cache.emplace(key, std::move(null)).first->second;
}

}  // namespace

TestReport exponentiality_test(std::span<const double> samples, const ExponentialityOptions& opts) {
    if (samples.size() < 100) throw std::invalid_argument("exponentiality_test: need at least 100 samples");
    for (double v : samples) {
        if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument("exponentiality_test: samples must be positive");
    }
    if (opts.bootstrap == 0) throw std::invalid_argument("exponentiality_test: bootstrap size must be positive");
    TestReport rep;
    rep.name = "exponentiality_test";
    rep.alpha = opts.alpha;
    rep.statistic = ks_exponential_statistic(samples);
    const auto& null = exponential_null(samples.size(), opts.bootstrap, opts.calibration_seed);
    const auto b = static_cast<double>(std::count_if(null.begin(), null.end(), [&](double d) { return d >= rep.statistic; }));
    rep.p_value = (b + 1.0) / (static_cast<double>(opts.bootstrap) + 1.0);
    const double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(samples.size());
    rep.details = {{"rate", 1.0 / mean}, {"n", static_cast<double>(samples.size())}};
    rep.provenance.n_x = samples.size();
    rep.provenance.seed = opts.calibration_seed;
    rep.provenance.permutations = opts.bootstrap;
    rep.decide();
    return rep;
}

// ---------------------------------------------------------------------------
// Covariance homogeneity

TestReport cov_homogeneity_test(const ProcessSampler& p, const std::vector<std::pair<double, double>>& pairs,
                                double u, std::size_t n, double tol, const RandomStream& stream, int threads) {
    if (!p.claims().gaussian) throw std::invalid_argument("cov_homogeneity_test: process must claim to be Gaussian");
    if (!(u > 0.0)) throw std::invalid_argument("cov_homogeneity_test: u must be positive");
    if (pairs.empty() || n < 2) throw std::invalid_argument("cov_homogeneity_test: need pairs and n >= 2");
    std::vector<double> times;
    for (const auto& [t, s] : pairs) {
        if (!(t > 0.0) || !(s > 0.0)) throw std::invalid_argument("cov_homogeneity_test: times must be positive");
        times.insert(times.end(), {t, s, u * t, u * s});
    }
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());
    const std::size_t k = times.size();
    const auto rows = build_rows(n, k, threads, [&](std::size_t i, std::span<double> out) {
        const auto v = p.values_at(times, stream.child(i));
        std::copy(v.begin(), v.end(), out.begin());
    });
    const double nn = static_cast<double>(n);
    std::vector<double> mean(k, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t c = 0; c < k; ++c) mean[c] += rows[i * k + c];
    }
    for (auto& m : mean) m /= nn;
    auto col = [&](double t) { return static_cast<std::size_t>(std::lower_bound(times.begin(), times.end(), t) - times.begin()); };

    TestReport rep;
    rep.name = "cov_homogeneity_test";
    rep.alpha = normal_two_sided(3.0);
    rep.provenance.seed = stream.seed();
    const auto lin = stream.lineage();
    rep.provenance.lineage.assign(lin.begin(), lin.end());
    rep.provenance.n_x = n;
    rep.provenance.grid = times;
    rep.provenance.extra.emplace_back("process", p.label());
    rep.provenance.extra.emplace_back("u", std::to_string(u));
    double worst_rel = 0.0, worst_z = 0.0;
    for (const auto& [t, s] : pairs) {
        const std::size_t it = col(t), is = col(s), iut = col(u * t), ius = col(u * s);
        double dsum = 0.0, dsq = 0.0, base = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double* r = rows.data() + i * k;
            const double lhs = (r[iut] - mean[iut]) * (r[ius] - mean[ius]);
            const double rhs = u * ((r[it] - mean[it]) * (r[is] - mean[is]));
            dsum += lhs - rhs;
            dsq += (lhs - rhs) * (lhs - rhs);
            base += rhs;
        }
        const double d = dsum / nn, scale = std::fabs(base / nn);
        const double var = std::max(0.0, dsq / nn - d * d);
        const double se = std::sqrt(var / nn);
        const double rel = scale > 0.0 ? std::fabs(d) / scale : (d == 0.0 ? 0.0 : INFINITY);
        const double excess = std::fabs(d) - tol * scale;
        const double z = excess <= 0.0 ? 0.0 : (se > 0.0 ? excess / se : INFINITY);
        worst_rel = std::max(worst_rel, rel);
        worst_z = std::max(worst_z, z);
        rep.details.emplace_back("rel_error(" + std::to_string(t) + "," + std::to_string(s) + ")", rel);
    }
    rep.statistic = worst_rel;
    rep.p_value = std::isfinite(worst_z) ? normal_two_sided(worst_z) : 0.0;
    rep.details.emplace_back("tolerance", tol);
    rep.decide();
    return rep;
}

// ---------------------------------------------------------------------------
// Discrete goodness of fit

TestReport discrete_gof_test(std::span<const double> samples, const std::function<double(int)>& pmf,
                             const std::string& name, double alpha) {
    if (samples.empty()) throw std::invalid_argument("discrete_gof_test: empty sample");
    std::map<long, double> observed;
    long max_value = 0;
    for (double v : samples) {
        if (!(v >= 0.0) || v != std::floor(v) || v > 1e9) {
            throw std::invalid_argument("discrete_gof_test: samples must be nonnegative integers");
        }
        observed[static_cast<long>(v)] += 1.0;
        max_value = std::max(max_value, static_cast<long>(v));
    }
    const double n = static_cast<double>(samples.size());
    // Greedy cells from the left; the remainder (including the unbounded tail) joins the last cell.
    struct Cell { double expected = 0.0, observed = 0.0; };
    std::vector<Cell> cells;
    Cell cur;
    double cdf = 0.0;
    long k = 0;
    for (; k <= std::max<long>(max_value, 0) + 100000; ++k) {
        const double p = pmf(static_cast<int>(k));
        cdf += p;
        cur.expected += n * p;
        if (auto it = observed.find(k); it != observed.end()) cur.observed += it->second;
        if (cur.expected >= 5.0) {
            cells.push_back(cur);
            cur = {};
        }
        if (n * (1.0 - cdf) < 5.0 && k >= max_value) break;
    }
    // remaining tail: mass 1 - cdf and any observations above k
    cur.expected += std::max(0.0, n * (1.0 - cdf));
    for (auto it = observed.upper_bound(k); it != observed.end(); ++it) cur.observed += it->second;
    if (!cells.empty()) {
        cells.back().expected += cur.expected;
        cells.back().observed += cur.observed;
    } else {
        cells.push_back(cur);
    }
    double chi2 = 0.0;
    for (const auto& c : cells) {
        if (c.expected > 0.0) chi2 += (c.observed - c.expected) * (c.observed - c.expected) / c.expected;
        else if (c.observed > 0.0) chi2 = INFINITY;
    }
    TestReport rep;
    rep.name = name;
    rep.alpha = alpha;
    rep.statistic = chi2;
    const double df = static_cast<double>(cells.size()) - 1.0;
    if (df < 1.0) rep.p_value = 1.0;
    else rep.p_value = std::isfinite(chi2) ? boost::math::gamma_q(df / 2.0, chi2 / 2.0) : 0.0;
    rep.details = {{"cells", static_cast<double>(cells.size())}, {"df", df}};
    rep.provenance.n_x = samples.size();
    rep.decide();
    return rep;
}

TestReport poisson_gof_test(std::span<const double> samples, double mean, double alpha) {
    if (!(mean > 0.0)) throw std::invalid_argument("poisson_gof_test: mean must be positive");
    auto pmf = [mean](int k) { return std::exp(k * std::log(mean) - mean - std::lgamma(k + 1.0)); };
    TestReport rep = discrete_gof_test(samples, pmf, "poisson_gof_test", alpha);
    rep.details.emplace_back("mean", mean);
    return rep;
}

}  // namespace lepage

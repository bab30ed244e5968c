#include "lepage/epsilon.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

namespace lepage {

namespace {

template <class... Ts> struct overloaded : Ts... { using Ts::operator()...; };

bool strictly_positive_law(const ScalarLaw& law) {
    if (!(law.lower() >= 0.0)) return false;
    if (law.lower() > 0.0) return true;
    // lower bound 0 is fine for continuous laws, not for an atom at 0
    return std::holds_alternative<ScalarLaw::Exponential>(law.kind()) ||
           std::holds_alternative<ScalarLaw::Uniform>(law.kind());
}

double integer_power(double x, double p) {
    if (p == 1.0) return x;
    if (p == 2.0) return x * x;
    return std::pow(x, p);
}

}  // namespace

// ---------------------------------------------------------------------------
// SingleJump

SingleJump::Draw SingleJump::draw(RandomStream& stream, double s_max) const {
    Draw d;
    if (const auto* ind = std::get_if<IndependentJumpLaw>(&law)) {
        d.time = 1.0 / ind->inverse_time.sample(stream);
        if (d.time <= s_max) d.height = ind->height.sample(stream);
    } else {
        const auto& pair = std::get<JumpLawPair>(law);
        const auto& shell = pair.shells[pair.pick(stream.uniform())];
        d.time = shell.weight;
        if (d.time <= s_max) d.height = shell.sample(stream);
    }
    return d;
}

void SingleJump::eval(Draw& d, std::span<const double> base, double divisor,
                      std::span<double> out) const {
    for (std::size_t j = 0; j < base.size(); ++j) {
        out[j] = (base[j] / divisor >= d.time) ? d.height : 0.0;
    }
}

void SingleJump::jumps(const Draw& d, double horizon, std::vector<Jump>& out) const {
    if (d.time <= horizon && d.height != 0.0) out.push_back({d.time, d.height});
}

double SingleJump::activation(double) const {
    if (const auto* ind = std::get_if<IndependentJumpLaw>(&law)) {
        const double zmax = ind->inverse_time.upper();
        return std::isfinite(zmax) ? 1.0 / zmax : 0.0;
    }
    return std::get<JumpLawPair>(law).min_weight();
}

bool SingleJump::symmetric() const {
    if (const auto* ind = std::get_if<IndependentJumpLaw>(&law)) return ind->height.symmetric();
    return false;
}

bool SingleJump::deterministic() const {
    if (const auto* ind = std::get_if<IndependentJumpLaw>(&law)) {
        return ind->height.deterministic() && ind->inverse_time.deterministic();
    }
    return false;
}

// ---------------------------------------------------------------------------
// JumpAtEta

JumpAtEta::Draw JumpAtEta::draw(RandomStream& stream, double) const {
    return {eta.sample(stream)};
}

void JumpAtEta::eval(Draw& d, std::span<const double> base, double divisor,
                     std::span<double> out) const {
    for (std::size_t j = 0; j < base.size(); ++j) {
        out[j] = (base[j] / divisor >= d.height) ? d.height : 0.0;
    }
}

void JumpAtEta::jumps(const Draw& d, double horizon, std::vector<Jump>& out) const {
    if (d.height <= horizon) out.push_back({d.height, d.height});
}

double JumpAtEta::activation(double) const { return eta.lower(); }

// ---------------------------------------------------------------------------
// PowerScaled

PowerScaled::Draw PowerScaled::draw(RandomStream& stream, double) const {
    return {eta.sample(stream)};
}

void PowerScaled::eval(Draw& d, std::span<const double> base, double divisor,
                       std::span<double> out) const {
    const double p = 1.0 / alpha;
    for (std::size_t j = 0; j < base.size(); ++j) {
        out[j] = d.eta * integer_power(base[j] / divisor, p);
    }
}

double PowerScaled::activation(double level) const {
    const double m = eta.max_abs();
    if (!(level > 0.0) || !std::isfinite(m)) return 0.0;
    return std::pow(level / m, alpha);
}

// ---------------------------------------------------------------------------
// FbmSpectral

struct CholeskyCache {
    std::mutex mutex;
    std::map<std::vector<double>, std::shared_ptr<const Eigen::MatrixXd>> entries;
};

struct FbmSpectral::Realization {
    std::vector<double> times;  // actual times, in factorization order
    std::vector<double> z;      // standard normals, same order
    std::vector<double> values;
};

namespace {

constexpr std::size_t cholesky_cache_limit = 64;

// Lower Cholesky factor of the fBm covariance at the given positive times.
Eigen::MatrixXd fbm_factor(std::span<const double> times, double hurst) {
    const auto n = static_cast<Eigen::Index>(times.size());
    const double h2 = 2.0 * hurst;
    Eigen::MatrixXd corr(n, n);
    Eigen::VectorXd sd(n);
    for (Eigen::Index i = 0; i < n; ++i) sd(i) = std::pow(times[i], hurst);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j <= i; ++j) {
            const double s = times[i], t = times[j];
            const double cov =
                0.5 * (std::pow(s, h2) + std::pow(t, h2) - std::pow(std::fabs(s - t), h2));
            corr(i, j) = corr(j, i) = (i == j) ? 1.0 : cov / (sd(i) * sd(j));
        }
    }
    double jitter = 0.0;
    for (int attempt = 0; attempt < 8; ++attempt) {
        Eigen::MatrixXd m = corr;
        if (jitter > 0.0) m.diagonal().array() += jitter;
        Eigen::LLT<Eigen::MatrixXd> llt(m);
        if (llt.info() == Eigen::Success) {
            Eigen::MatrixXd l = llt.matrixL();
            return sd.asDiagonal() * l;
        }
        jitter = jitter == 0.0 ? 1e-14 : jitter * 100.0;
    }
    throw std::runtime_error("fbm: covariance factorization failed");
}

}  // namespace

FbmSpectral::Draw FbmSpectral::draw(RandomStream& stream, double) const {
    return {stream, nullptr};
}

void FbmSpectral::eval(Draw& d, std::span<const double> base, double divisor,
                       std::span<double> out) const {
    std::vector<double> unique;
    for (double b : base) {
        if (b > 0.0) unique.push_back(b);
    }
    std::sort(unique.begin(), unique.end());
    unique.erase(std::unique(unique.begin(), unique.end()), unique.end());

    auto lookup = [&](const Realization& r, double t) -> double {
        for (std::size_t k = 0; k < r.times.size(); ++k) {
            if (r.times[k] == t) return r.values[k];
        }
        throw std::logic_error("fbm: time not realized");
    };

    bool fresh_realization = false;
    if (!d.realized) {
        fresh_realization = true;
        // Self-similarity: ε(b/divisor) has the law of divisor^{-H} ε(b), so the
        // factor depends on the base times only and can be shared across draws.
        std::shared_ptr<const Eigen::MatrixXd> factor;
        {
            std::lock_guard lock(cache->mutex);
            auto it = cache->entries.find(unique);
            if (it != cache->entries.end()) factor = it->second;
        }
        if (!factor) {
            factor = std::make_shared<const Eigen::MatrixXd>(fbm_factor(unique, hurst));
            std::lock_guard lock(cache->mutex);
            if (cache->entries.size() >= cholesky_cache_limit) cache->entries.clear();
            cache->entries.emplace(unique, factor);
        }
        auto r = std::make_shared<Realization>();
        const auto n = unique.size();
        r->z.resize(n);
        for (auto& z : r->z) z = d.stream.normal();
        const double scale = std::pow(1.0 / divisor, hurst);
        const Eigen::Map<const Eigen::VectorXd> zv(r->z.data(), static_cast<Eigen::Index>(n));
        const Eigen::VectorXd x = (*factor) * zv;
        r->times.resize(n);
        r->values.resize(n);
        for (std::size_t k = 0; k < n; ++k) {
            r->times[k] = unique[k] / divisor;
            r->values[k] = scale * x(static_cast<Eigen::Index>(k));
        }
        d.realized = std::move(r);
    } else {
        // Extend an existing realization conditionally on the values already fixed.
        Realization& r = *d.realized;
        std::vector<double> fresh;
        for (double b : unique) {
            const double t = b / divisor;
            if (std::find(r.times.begin(), r.times.end(), t) == r.times.end()) fresh.push_back(t);
        }
        if (!fresh.empty()) {
            std::vector<double> all = r.times;
            all.insert(all.end(), fresh.begin(), fresh.end());
            const Eigen::MatrixXd l = fbm_factor(all, hurst);
            const std::size_t old = r.times.size();
            for (std::size_t k = 0; k < fresh.size(); ++k) r.z.push_back(d.stream.normal());
            const Eigen::Map<const Eigen::VectorXd> zv(r.z.data(),
                                                       static_cast<Eigen::Index>(all.size()));
            for (std::size_t k = 0; k < fresh.size(); ++k) {
                const auto row = static_cast<Eigen::Index>(old + k);
                r.times.push_back(fresh[k]);
                r.values.push_back(l.row(row).head(row + 1).dot(zv.head(row + 1)));
            }
        }
    }
    for (std::size_t j = 0; j < base.size(); ++j) {
        if (!(base[j] > 0.0)) {
            out[j] = 0.0;
        } else if (fresh_realization) {
            const auto k = std::lower_bound(unique.begin(), unique.end(), base[j]) - unique.begin();
            out[j] = d.realized->values[static_cast<std::size_t>(k)];
        } else {
            out[j] = lookup(*d.realized, base[j] / divisor);
        }
    }
}

std::vector<double> fbm_sample(double hurst, std::span<const double> times, RandomStream& stream) {
    if (!(hurst > 0.0 && hurst < 1.0)) throw std::invalid_argument("fbm: Hurst index must lie in (0,1)");
    std::vector<double> unique;
    for (double t : times) {
        if (!(t >= 0.0)) throw std::invalid_argument("fbm: times must be nonnegative");
        if (t > 0.0) unique.push_back(t);
    }
    std::sort(unique.begin(), unique.end());
    unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
    std::vector<double> out(times.size(), 0.0);
    if (unique.empty()) return out;
    const Eigen::MatrixXd l = fbm_factor(unique, hurst);
    Eigen::VectorXd z(static_cast<Eigen::Index>(unique.size()));
    for (Eigen::Index k = 0; k < z.size(); ++k) z(k) = stream.normal();
    const Eigen::VectorXd x = l * z;
    for (std::size_t j = 0; j < times.size(); ++j) {
        if (times[j] > 0.0) {
            const auto k = std::lower_bound(unique.begin(), unique.end(), times[j]) - unique.begin();
            out[j] = x(static_cast<Eigen::Index>(k));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// DeterministicPower, IntegerPart

void DeterministicPower::eval(Draw&, std::span<const double> base, double divisor,
                              std::span<double> out) const {
    for (std::size_t j = 0; j < base.size(); ++j) {
        const double s = base[j] / divisor;
        if (variant == PowerVariant::power_minus_one) {
            out[j] = std::max(0.0, integer_power(s, beta) - 1.0);
        } else {
            out[j] = s > 1.0 ? integer_power(s - 1.0, beta) : 0.0;
        }
    }
}

void IntegerPart::eval(Draw&, std::span<const double> base, double divisor,
                       std::span<double> out) const {
    for (std::size_t j = 0; j < base.size(); ++j) out[j] = std::floor(base[j] / divisor);
}

void IntegerPart::jumps(const Draw&, double horizon, std::vector<Jump>& out) const {
    const double last = std::min(std::floor(horizon), static_cast<double>(max_jumps));
    for (double k = 1.0; k <= last; k += 1.0) out.push_back({k, 1.0});
}

// ---------------------------------------------------------------------------
// CustomStep

CustomStep::Draw CustomStep::draw(RandomStream& stream, double) const {
    if (paths.size() == 1) return {0, true};
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), stream.uniform());
    return {std::min<std::size_t>(it - cumulative.begin(), paths.size() - 1), true};
}

void CustomStep::eval(Draw& d, std::span<const double> base, double divisor,
                      std::span<double> out) const {
    const auto& jl = paths[d.index];
    for (std::size_t j = 0; j < base.size(); ++j) {
        const double s = base[j] / divisor;
        double v = 0.0;
        for (const auto& jump : jl) {
            if (jump.time > s) break;
            v += jump.height;
        }
        out[j] = v;
    }
}

void CustomStep::jumps(const Draw& d, double horizon, std::vector<Jump>& out) const {
    for (const auto& jump : paths[d.index]) {
        if (jump.time > horizon) break;
        out.push_back(jump);
    }
}

double CustomStep::activation(double) const {
    double first = infinity;
    for (const auto& p : paths) first = std::min(first, p.front().time);
    return first;
}

// ---------------------------------------------------------------------------
// Composed

Composed::Draw Composed::draw(RandomStream& stream, double) const { return {stream, {}, {}, false}; }

void Composed::eval(Draw& d, std::span<const double> base, double divisor,
                    std::span<double> out) const {
    std::vector<double> times(base.size());
    for (std::size_t j = 0; j < base.size(); ++j) times[j] = std::pow(base[j] / divisor, 1.0 / alpha);
    if (!d.realized) {
        d.values = inner(times, d.stream);
        d.times = std::move(times);
        d.realized = true;
    } else if (times != d.times) {
        throw std::logic_error("composed: realization already fixed at other times");
    }
    std::copy(d.values.begin(), d.values.end(), out.begin());
}

// ---------------------------------------------------------------------------
// EpsilonSpec

EpsilonSpec EpsilonSpec::single_jump(ScalarLaw height, ScalarLaw inverse_time) {
    if (!strictly_positive_law(inverse_time)) {
        throw std::invalid_argument("SingleJump: inverse jump-time law must be positive");
    }
    return EpsilonSpec(SingleJump{IndependentJumpLaw{std::move(height), std::move(inverse_time)}});
}

EpsilonSpec EpsilonSpec::single_jump(JumpLawPair pair) {
    if (pair.shells.empty()) throw std::invalid_argument("SingleJump: empty jump law");
    for (const auto& s : pair.shells) {
        if (!(s.weight > 0.0) || !(s.mass > 0.0) || !s.sample) {
            throw std::invalid_argument("SingleJump: shells need positive mass, weight and a sampler");
        }
    }
    if (std::fabs(pair.total_probability() - 1.0) > 1e-9) {
        throw std::invalid_argument("SingleJump: shell weights do not form a probability law");
    }
    return EpsilonSpec(SingleJump{std::move(pair)});
}

EpsilonSpec EpsilonSpec::jump_at_eta(ScalarLaw eta) {
    if (!strictly_positive_law(eta)) throw std::invalid_argument("JumpAtEta: eta must be positive");
    return EpsilonSpec(JumpAtEta{std::move(eta)});
}

EpsilonSpec EpsilonSpec::power_scaled(double alpha, ScalarLaw eta) {
    if (!(alpha > 0.0 && alpha < 2.0)) throw std::invalid_argument("PowerScaled: alpha must lie in (0,2)");
    return EpsilonSpec(PowerScaled{alpha, std::move(eta)});
}

EpsilonSpec EpsilonSpec::fbm(double hurst) {
    if (!(hurst > 0.5 && hurst < 1.0)) throw std::invalid_argument("FBMSpectral: H must lie in (1/2,1)");
    return EpsilonSpec(FbmSpectral{hurst, std::make_shared<CholeskyCache>()});
}

EpsilonSpec EpsilonSpec::deterministic_power(double beta, PowerVariant variant) {
    if (!(beta >= 1.0) || !std::isfinite(beta)) {
        throw std::invalid_argument("DeterministicPower: beta must be >= 1");
    }
    return EpsilonSpec(DeterministicPower{beta, variant});
}

EpsilonSpec EpsilonSpec::integer_part() { return EpsilonSpec(IntegerPart{}); }

EpsilonSpec EpsilonSpec::custom_step(std::vector<std::vector<Jump>> paths, std::vector<double> weights) {
    if (paths.empty() || paths.size() != weights.size()) {
        throw std::invalid_argument("CustomStep: need one weight per jump list");
    }
    for (const auto& p : paths) {
        if (p.empty()) throw std::invalid_argument("CustomStep: jump list must not be empty");
        double prev = 0.0;
        for (const auto& j : p) {
            if (!(j.time > prev) || !std::isfinite(j.time)) {
                throw std::invalid_argument("CustomStep: jump times must be positive and strictly increasing");
            }
            if (j.height == 0.0 || !std::isfinite(j.height)) {
                throw std::invalid_argument("CustomStep: jump heights must be finite and nonzero");
            }
            prev = j.time;
        }
    }
    double total = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0)) throw std::invalid_argument("CustomStep: negative weight");
        total += w;
    }
    if (!(total > 0.0)) throw std::invalid_argument("CustomStep: weights sum to zero");
    std::vector<double> cumulative(weights.size());
    std::partial_sum(weights.begin(), weights.end(), cumulative.begin());
    for (auto& c : cumulative) c /= total;
    cumulative.back() = 1.0;
    return EpsilonSpec(CustomStep{std::move(paths), std::move(weights), std::move(cumulative)});
}

EpsilonSpec EpsilonSpec::composed(InnerSampler inner, std::string inner_label, double alpha,
                                  bool finite_mean, bool inner_symmetric) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("Composed: alpha must lie in (0,1)");
    if (!inner) throw std::invalid_argument("Composed: missing inner sampler");
    return EpsilonSpec(Composed{std::move(inner), std::move(inner_label), alpha, finite_mean,
                                inner_symmetric});
}

std::string EpsilonSpec::name() const {
    return std::visit(overloaded{
                          [](const SingleJump&) { return std::string("SingleJump"); },
                          [](const JumpAtEta&) { return std::string("JumpAtEta"); },
                          [](const PowerScaled&) { return std::string("PowerScaled"); },
                          [](const FbmSpectral&) { return std::string("FBMSpectral"); },
                          [](const DeterministicPower&) { return std::string("DeterministicPower"); },
                          [](const IntegerPart&) { return std::string("IntegerPart"); },
                          [](const CustomStep&) { return std::string("CustomStep"); },
                          [](const Composed&) { return std::string("Composed"); },
                      },
                      *family_);
}

PathKind EpsilonSpec::kind() const {
    return std::visit([](const auto& f) { return std::decay_t<decltype(f)>::kind; }, *family_);
}

double EpsilonSpec::activation(double level) const {
    return std::visit([&](const auto& f) { return f.activation(level); }, *family_);
}

bool EpsilonSpec::symmetric() const {
    return std::visit([](const auto& f) { return f.symmetric(); }, *family_);
}

bool EpsilonSpec::deterministic() const {
    return std::visit([](const auto& f) { return f.deterministic(); }, *family_);
}

bool EpsilonSpec::abs_certified() const {
    return std::visit(overloaded{
                          [](const PowerScaled& f) { return f.alpha < 1.0; },
                          [](const FbmSpectral&) { return false; },
                          [](const Composed& f) { return f.finite_mean; },
                          [](const auto&) { return true; },
                      },
                      *family_);
}

bool EpsilonSpec::square_certified() const {
    return std::visit(overloaded{
                          [](const Composed& f) { return f.finite_mean; },
                          [](const auto&) { return true; },
                      },
                      *family_);
}

bool EpsilonSpec::monotone_nonnegative() const {
    return std::visit(
        overloaded{
            [](const SingleJump& f) {
                if (const auto* ind = std::get_if<IndependentJumpLaw>(&f.law)) {
                    return ind->height.lower() >= 0.0;
                }
                return std::get<JumpLawPair>(f.law).nonnegative_marks;
            },
            [](const JumpAtEta&) { return true; },
            [](const PowerScaled& f) { return f.eta.lower() >= 0.0; },
            [](const FbmSpectral&) { return false; },
            [](const DeterministicPower&) { return true; },
            [](const IntegerPart&) { return true; },
            [](const CustomStep& f) {
                for (const auto& p : f.paths) {
                    for (const auto& j : p) {
                        if (j.height < 0.0) return false;
                    }
                }
                return true;
            },
            [](const Composed&) { return false; },
        },
        *family_);
}

// ---------------------------------------------------------------------------
// PathFn

struct PathFn::Impl {
    virtual ~Impl() = default;
    virtual void eval(std::span<const double> times, std::span<double> out) = 0;
    virtual PathKind kind() const = 0;
    virtual std::vector<Jump> jumps(double horizon) const = 0;
};

namespace {

template <class F> struct PathImpl final : PathFn::Impl {
    PathImpl(std::shared_ptr<const Family> keep, const F& f, typename F::Draw d)
        : keep_alive(std::move(keep)), family(f), draw(std::move(d)) {}

    void eval(std::span<const double> times, std::span<double> out) override {
        family.eval(draw, times, 1.0, out);
        for (std::size_t j = 0; j < times.size(); ++j) {
            if (times[j] == 0.0) out[j] = 0.0;
        }
    }
    PathKind kind() const override { return F::kind; }
    std::vector<Jump> jumps(double horizon) const override {
        if constexpr (F::kind != PathKind::piecewise_constant) {
            throw std::logic_error("jump_record: path is not piecewise constant");
        } else {
            std::vector<Jump> out;
            family.jumps(draw, horizon, out);
            return out;
        }
    }

    std::shared_ptr<const Family> keep_alive;
    const F& family;
    typename F::Draw draw;
};

}  // namespace

double PathFn::value(double t) {
    double out = 0.0;
    impl_->eval({&t, 1}, {&out, 1});
    return out;
}

std::vector<double> PathFn::values(std::span<const double> times) {
    for (double t : times) {
        if (!(t >= 0.0)) throw std::invalid_argument("PathFn: times must be nonnegative");
    }
    std::vector<double> out(times.size());
    impl_->eval(times, out);
    return out;
}

PathKind PathFn::kind() const { return impl_->kind(); }

std::vector<Jump> PathFn::jump_record(double horizon) const { return impl_->jumps(horizon); }

PathFn sample_path(const EpsilonSpec& spec, RandomStream stream) {
    auto keep = spec.family_ptr();
    const Family& fam = *keep;
    return std::visit(
        [&](const auto& f) {
            using F = std::decay_t<decltype(f)>;
            auto d = f.draw(stream, infinity);
            return PathFn(std::make_shared<PathImpl<F>>(keep, f, std::move(d)));
        },
        fam);
}

// ---------------------------------------------------------------------------
// Integration

double PathPieces::weight_within(const Piece& p, double a, double b) {
    if (p.node) return (p.lo >= a && p.lo <= b) ? p.weight : 0.0;
    const double lo = std::max(p.lo, a);
    const double hi = std::min(p.hi, b);
    if (!(hi > lo)) return 0.0;
    return 1.0 / lo - (std::isfinite(hi) ? 1.0 / hi : 0.0);
}

namespace {

template <class F>
PathPieces discretize_one(const F& f, const QuadratureBudget& budget, RandomStream stream,
                          std::span<const double> base) {
    PathPieces out;
    auto draw_stream = stream.child(0);
    auto d = f.draw(draw_stream, infinity);
    if constexpr (F::kind == PathKind::piecewise_constant) {
        std::vector<Jump> js;
        f.jumps(d, infinity, js);
        double v = 0.0;
        for (std::size_t k = 0; k < js.size(); ++k) {
            v += js[k].height;
            const double lo = js[k].time;
            const double hi = k + 1 < js.size() ? js[k + 1].time : infinity;
            if (v != 0.0 && hi > lo) {
                out.pieces.push_back({lo, hi, v, false, 1.0 / lo - (std::isfinite(hi) ? 1.0 / hi : 0.0)});
            }
        }
    } else {
        auto jitter_stream = stream.child(1);
        const double dx = (budget.log_hi - budget.log_lo) / static_cast<double>(budget.nodes);
        const double x0 = budget.log_lo + jitter_stream.uniform() * dx;
        const double divisor = std::exp(-x0);
        std::vector<double> vals(base.size());
        f.eval(d, base, divisor, vals);
        out.pieces.reserve(base.size());
        for (std::size_t j = 0; j < base.size(); ++j) {
            const double s = base[j] / divisor;
            out.pieces.push_back({s, s, vals[j], true, dx / s});
        }
    }
    return out;
}

}  // namespace

std::vector<PathPieces> discretize_draws(const EpsilonSpec& spec, const QuadratureBudget& budget) {
    if (budget.draws == 0 || budget.nodes == 0) throw std::invalid_argument("quadrature budget must be positive");
    const std::size_t n = spec.deterministic() ? 1 : budget.draws;
    const double dx = (budget.log_hi - budget.log_lo) / static_cast<double>(budget.nodes);
    std::vector<double> base(budget.nodes);
    for (std::size_t j = 0; j < base.size(); ++j) base[j] = std::exp(static_cast<double>(j) * dx);
    const RandomStream root(budget.seed);
    std::vector<PathPieces> out;
    out.reserve(n);
    std::visit(
        [&](const auto& f) {
            for (std::size_t i = 0; i < n; ++i) out.push_back(discretize_one(f, budget, root.child(i), base));
        },
        spec.family());
    return out;
}

IntegrabilityVerdict check_integrability(const EpsilonSpec& spec, IntegrabilityMode mode,
                                         const QuadratureBudget& budget) {
    const auto draws = discretize_draws(spec, budget);
    auto g = [mode](double v) {
        return mode == IntegrabilityMode::abs ? std::min(1.0, std::fabs(v)) : std::min(1.0, v * v);
    };
    const double n = static_cast<double>(draws.size());

    IntegrabilityVerdict verdict{mode, 0.0, 0.0, 0.0, IntegrabilityVerdict::Outcome::suspected_divergent,
                                 budget, draws.size(), {}, 0};
    for (const auto& d : draws) {
        for (const auto& p : d.pieces) {
            const double gv = g(p.value);
            if (gv == 0.0) continue;
            verdict.estimate += gv * p.weight;
            verdict.unit_interval += gv * PathPieces::weight_within(p, 0.0, 1.0);
        }
    }
    verdict.estimate /= n;
    verdict.unit_interval /= n;
    verdict.tail = verdict.estimate - verdict.unit_interval;

    constexpr int max_doublings = 60;
    constexpr double rel_tol = 0.005;
    int calm = 0;
    for (int j = 1; j <= max_doublings; ++j) {
        const double a = std::ldexp(1.0, -j), b = std::ldexp(1.0, j);
        double e = 0.0;
        for (const auto& d : draws) {
            for (const auto& p : d.pieces) {
                const double gv = g(p.value);
                if (gv != 0.0) e += gv * PathPieces::weight_within(p, a, b);
            }
        }
        e /= n;
        if (!verdict.horizon_trace.empty() && e > 0.0) {
            const double prev = verdict.horizon_trace.back();
            calm = (std::fabs(e - prev) < rel_tol * e) ? calm + 1 : 0;
            if (calm >= 2 && verdict.converged_at == 0) verdict.converged_at = static_cast<std::size_t>(j);
        }
        verdict.horizon_trace.push_back(e);
    }
    if (verdict.converged_at != 0) verdict.verdict = IntegrabilityVerdict::Outcome::finite;
    return verdict;
}

std::string to_string(IntegrabilityVerdict::Outcome o) {
    return o == IntegrabilityVerdict::Outcome::finite ? "finite" : "suspected-divergent";
}

}  // namespace lepage

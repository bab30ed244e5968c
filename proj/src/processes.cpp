#include "lepage/processes.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace lepage {

std::vector<std::string> Claims::names() const {
    std::vector<std::string> out;
    if (time_stable) out.emplace_back("time-stable");
    if (nonnegative) out.emplace_back("nonnegative");
    if (nondecreasing) out.emplace_back("nondecreasing");
    if (pure_jump) out.emplace_back("pure-jump");
    if (gaussian) out.emplace_back("gaussian");
    if (levy) out.emplace_back("levy");
    return out;
}

ProcessSampler::ProcessSampler(std::string label, Claims claims, Fn fn)
    : label_(std::move(label)), claims_(claims), fn_(std::make_shared<const Fn>(std::move(fn))) {}

PathSample ProcessSampler::sample(std::span<const double> grid, const RandomStream& stream) const {
    const auto g = normalize_grid(grid);
    PathSample ps = (*fn_)(g, stream);
    if (ps.grid.empty()) ps.grid = g;
    if (ps.values.size() != ps.grid.size()) throw std::logic_error(label_ + ": sampler returned misaligned values");
    return ps;
}

std::vector<double> ProcessSampler::values_at(std::span<const double> times, const RandomStream& stream) const {
    const PathSample ps = sample(times, stream);
    std::vector<double> out(times.size());
    for (std::size_t j = 0; j < times.size(); ++j) {
        const auto k = std::lower_bound(ps.grid.begin(), ps.grid.end(), times[j]) - ps.grid.begin();
        out[j] = ps.values[static_cast<std::size_t>(k)];
    }
    return out;
}

ProcessSampler ProcessSampler::with_note(std::string note) const {
    ProcessSampler p = *this;
    p.notes_.push_back(std::move(note));
    return p;
}

namespace {

std::string fmt(double x) {
    std::ostringstream os;
    os << x;
    return os.str();
}

PathSample plain_sample(const std::vector<double>& grid, std::vector<double> values) {
    PathSample ps;
    ps.grid = grid;
    ps.values = std::move(values);
    return ps;
}

}  // namespace

// ---------------------------------------------------------------------------
// Primitives

ProcessSampler lepage_process(const EpsilonSpec& spec, const LePageConfig& cfg) {
    cfg.validate();
    std::shared_ptr<const CompensatorTable> table;
    if (cfg.mode == SeriesMode::compensated) {
        table = std::make_shared<const CompensatorTable>(compensator_table(spec, cfg));
    }
    const bool plain = cfg.mode == SeriesMode::plain;
    Claims c;
    c.time_stable = true;
    c.nonnegative = c.nondecreasing = plain && spec.monotone_nonnegative() && cfg.drift_c >= 0.0;
    c.pure_jump = plain && spec.kind() == PathKind::piecewise_constant && cfg.drift_c == 0.0;
    c.levy = std::holds_alternative<SingleJump>(spec.family());
    const char* mode = plain ? "plain" : (cfg.mode == SeriesMode::compensated ? "compensated" : "symmetric");
    std::string label = "lepage(" + spec.name() + ", " + mode;
    if (cfg.drift_c != 0.0) label += ", c=" + fmt(cfg.drift_c);
    label += ")";
    ProcessSampler p(label, c, [spec, cfg, table](const std::vector<double>& grid, const RandomStream& s) {
        return simulate(spec, grid, cfg, s, table.get());
    });
    if (!plain && !spec.square_certified()) p = p.with_note("no square-integrability certificate");
    return p;
}

ProcessSampler poisson_process(double rate) {
    if (!(rate > 0.0) || !std::isfinite(rate)) throw std::invalid_argument("poisson: rate must be positive");
    const auto spec = EpsilonSpec::single_jump(ScalarLaw::constant(1.0), ScalarLaw::constant(rate));
    LePageConfig cfg;
    Claims c{true, true, true, true, false, true};
    ProcessSampler base = lepage_process(spec, cfg);
    // Beyond this time the series would need ~2^20 terms per path (random clocks
    // reach such times routinely); later grid points get independent Poisson
    // increments from child(2), which is exact in law but leaves no jump record.
    const double horizon = std::ldexp(1.0, 20) / rate;
    return ProcessSampler("poisson(" + fmt(rate) + ")", c,
                          [base, rate, horizon](const std::vector<double>& grid, const RandomStream& s) {
                              if (grid.back() <= horizon) return base.sample(grid, s);
                              const auto split = std::upper_bound(grid.begin(), grid.end(), horizon);
                              std::vector<double> near(grid.begin(), split);
                              PathSample ps = base.sample(near, s);
                              RandomStream inc = s.child(2);
                              double prev_t = ps.grid.back(), v = ps.values.back();
                              for (auto it = split; it != grid.end(); ++it) {
                                  v += static_cast<double>(inc.poisson(rate * (*it - prev_t)));
                                  prev_t = *it;
                                  ps.grid.push_back(*it);
                                  ps.values.push_back(v);
                              }
                              ps.jumps.reset();
                              return ps;
                          });
}

ProcessSampler brownian_motion(double sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("brownian: sigma must be positive");
    Claims c;
    c.time_stable = c.gaussian = c.levy = true;
    return ProcessSampler("brownian(" + fmt(sigma) + ")", c,
                          [sigma](const std::vector<double>& grid, const RandomStream& stream) {
                              RandomStream s = stream;
                              std::vector<double> v(grid.size(), 0.0);
                              for (std::size_t j = 1; j < grid.size(); ++j) {
                                  v[j] = v[j - 1] + sigma * std::sqrt(grid[j] - grid[j - 1]) * s.normal();
                              }
                              return plain_sample(grid, std::move(v));
                          });
}

ProcessSampler drift_process(double c) {
    if (!std::isfinite(c)) throw std::invalid_argument("drift: c must be finite");
    Claims cl;
    cl.time_stable = cl.levy = true;
    cl.nonnegative = cl.nondecreasing = c >= 0.0;
    return ProcessSampler("drift(" + fmt(c) + ")", cl, [c](const std::vector<double>& grid, const RandomStream&) {
        std::vector<double> v(grid.size());
        for (std::size_t j = 0; j < grid.size(); ++j) v[j] = c * grid[j];
        return plain_sample(grid, std::move(v));
    });
}

ProcessSampler fbm_process(double hurst) {
    if (!(hurst > 0.0 && hurst < 1.0)) throw std::invalid_argument("fbm: Hurst index must lie in (0,1)");
    Claims c;
    c.gaussian = true;
    c.time_stable = c.levy = hurst == 0.5;
    return ProcessSampler("fbm(" + fmt(hurst) + ")", c,
                          [hurst](const std::vector<double>& grid, const RandomStream& stream) {
                              RandomStream s = stream;
                              return plain_sample(grid, fbm_sample(hurst, grid, s));
                          });
}

ProcessSampler gamma_process(double a, double b) {
    if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("gamma process: a and b must be positive");
    Claims c{true, true, true, true, false, true};
    return ProcessSampler("gamma(" + fmt(a) + ", " + fmt(b) + ")", c,
                          [a, b](const std::vector<double>& grid, const RandomStream& stream) {
                              RandomStream s = stream;
                              std::vector<double> v(grid.size(), 0.0);
                              for (std::size_t j = 1; j < grid.size(); ++j) {
                                  v[j] = v[j - 1] + s.gamma(a * (grid[j] - grid[j - 1])) / b;
                              }
                              return plain_sample(grid, std::move(v));
                          });
}

// ---------------------------------------------------------------------------
// Constructions

ProcessSampler scale_combination(const ProcessSampler& p, std::vector<double> coeffs, std::vector<double> scales) {
    if (coeffs.empty() || coeffs.size() != scales.size()) {
        throw std::invalid_argument("scale_combination: need m >= 1 matching coefficients and scales");
    }
    for (double s : scales) {
        if (!(s >= 0.0) || !std::isfinite(s)) throw std::invalid_argument("scale_combination: scales must be nonnegative");
    }
    for (double c : coeffs) {
        if (!std::isfinite(c)) throw std::invalid_argument("scale_combination: coefficients must be finite");
    }
    const bool positive = std::all_of(coeffs.begin(), coeffs.end(), [](double c) { return c >= 0.0; });
    Claims c = p.claims();
    c.nonnegative = c.nonnegative && positive;
    c.nondecreasing = c.nondecreasing && positive;
    c.levy = c.levy && coeffs.size() == 1;
    std::string label = "scale_combination(" + p.label();
    for (std::size_t i = 0; i < coeffs.size(); ++i) label += ", " + fmt(coeffs[i]) + "@" + fmt(scales[i]);
    label += ")";
    return ProcessSampler(label, c, [p, coeffs, scales](const std::vector<double>& grid, const RandomStream& s) {
        const std::size_t n = grid.size(), m = coeffs.size();
        std::vector<double> times(n * m);
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < n; ++j) times[i * n + j] = grid[j] * scales[i];
        }
        const auto inner = p.values_at(times, s);
        std::vector<double> v(n, 0.0);
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < n; ++j) v[j] += coeffs[i] * inner[i * n + j];
        }
        return plain_sample(grid, std::move(v));
    });
}

ProcessSampler stable_scaled(std::vector<StableTerm> terms) {
    if (terms.empty()) throw std::invalid_argument("stable_scaled: need at least one term");
    Claims c;
    c.time_stable = true;
    c.nonnegative = c.nondecreasing = true;
    c.gaussian = true;
    std::string label = "stable_scaled(";
    for (const auto& t : terms) {
        if (t.law == StableTerm::Law::positive) {
            if (!(t.alpha > 0.0 && t.alpha < 1.0)) throw std::invalid_argument("stable_scaled: positive law needs alpha in (0,1)");
        } else if (!(t.alpha > 0.0 && t.alpha <= 2.0)) {
            throw std::invalid_argument("stable_scaled: alpha must lie in (0,2]");
        }
        if (!(t.scale > 0.0)) throw std::invalid_argument("stable_scaled: scale must be positive");
        const bool pos = t.law == StableTerm::Law::positive && t.coeff >= 0.0;
        c.nonnegative = c.nonnegative && pos;
        c.nondecreasing = c.nondecreasing && pos;
        c.gaussian = c.gaussian && t.law == StableTerm::Law::symmetric && t.alpha == 2.0;
        label += (label.back() == '(' ? "" : ", ") + fmt(t.coeff) + "·t^(1/" + fmt(t.alpha) + ")" +
                 (t.law == StableTerm::Law::positive ? "S+" : "S");
    }
    label += ")";
    return ProcessSampler(label, c, [terms](const std::vector<double>& grid, const RandomStream& stream) {
        std::vector<double> v(grid.size(), 0.0);
        for (std::size_t i = 0; i < terms.size(); ++i) {
            const auto& t = terms[i];
            RandomStream s = stream.child(i);
            const double z = t.law == StableTerm::Law::positive
                                 ? std::pow(t.scale, 1.0 / t.alpha) * stable_positive(t.alpha, s)
                                 : stable_symmetric(t.alpha, t.scale, s);
            for (std::size_t j = 0; j < grid.size(); ++j) {
                if (grid[j] > 0.0) v[j] += t.coeff * std::pow(grid[j], 1.0 / t.alpha) * z;
            }
        }
        return plain_sample(grid, std::move(v));
    });
}

ProcessSampler sub_stable(const ProcessSampler& p, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("sub_stable: alpha must lie in (0,1)");
    Claims c = p.claims();
    c.gaussian = false;
    c.levy = false;
    return ProcessSampler("sub_stable(" + p.label() + ", " + fmt(alpha) + ")", c,
                          [p, alpha](const std::vector<double>& grid, const RandomStream& stream) {
                              RandomStream zs = stream.child(0);
                              const double zeta = stable_positive(alpha, zs);
                              std::vector<double> times(grid.size());
                              for (std::size_t j = 0; j < grid.size(); ++j) {
                                  times[j] = std::pow(grid[j], 1.0 / alpha) * zeta;
                              }
                              auto v = p.values_at(times, stream.child(1));
                              v[0] = 0.0;
                              return plain_sample(grid, std::move(v));
                          });
}

ProcessSampler subordinate(const ProcessSampler& levy, const ProcessSampler& subordinator) {
    const auto& sc = subordinator.claims();
    if (!(sc.nonnegative && sc.nondecreasing)) {
        throw std::invalid_argument("subordinate: subordinator must claim nonnegative and nondecreasing paths");
    }
    if (!levy.claims().levy) throw std::invalid_argument("subordinate: outer process must be a Lévy process");
    Claims c;
    c.time_stable = sc.time_stable && levy.claims().time_stable;
    c.nonnegative = levy.claims().nonnegative;
    c.nondecreasing = levy.claims().nondecreasing;
    c.pure_jump = levy.claims().pure_jump;
    c.levy = sc.levy;
    return ProcessSampler("subordinate(" + levy.label() + ", " + subordinator.label() + ")", c,
                          [levy, subordinator](const std::vector<double>& grid, const RandomStream& stream) {
                              const auto clock = subordinator.sample(grid, stream.child(0));
                              for (double t : clock.values) {
                                  if (!(t >= 0.0)) throw std::runtime_error("subordinate: clock went negative");
                              }
                              // values_at samples the outer process on exactly these times
                              auto v = levy.values_at(clock.values, stream.child(1));
                              return plain_sample(grid, std::move(v));
                          });
}

ProcessSampler sub_gaussian(double hurst, double alpha) {
    if (!(hurst > 0.0 && hurst < 1.0)) throw std::invalid_argument("sub_gaussian: H must lie in (0,1)");
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("sub_gaussian: alpha must lie in (0,1)");
    Claims c;
    c.time_stable = true;
    const double power = 1.0 / (2.0 * alpha * hurst);
    return ProcessSampler("sub_gaussian(" + fmt(hurst) + ", " + fmt(alpha) + ")", c,
                          [hurst, alpha, power](const std::vector<double>& grid, const RandomStream& stream) {
                              RandomStream zs = stream.child(0);
                              const double root_z = std::sqrt(stable_positive(alpha, zs));
                              std::vector<double> times(grid.size());
                              for (std::size_t j = 0; j < grid.size(); ++j) times[j] = std::pow(grid[j], power);
                              RandomStream es = stream.child(1);
                              std::vector<double> v(grid.size(), 0.0);
                              if (hurst == 0.5) {
                                  // times are increasing along the sorted grid
                                  for (std::size_t j = 1; j < grid.size(); ++j) {
                                      v[j] = v[j - 1] + std::sqrt(times[j] - times[j - 1]) * es.normal();
                                  }
                              } else {
                                  v = fbm_sample(hurst, times, es);
                              }
                              for (auto& x : v) x *= root_z;
                              return plain_sample(grid, std::move(v));
                          });
}

ProcessSampler power_time_change(const ProcessSampler& p, double a, double b, bool time_stable) {
    if (b == 0.0 || !std::isfinite(b) || !std::isfinite(a)) {
        throw std::invalid_argument("power_time_change: b must be finite and nonzero");
    }
    Claims c = p.claims();
    c.time_stable = time_stable;
    c.levy = false;
    c.pure_jump = c.pure_jump && b > 0.0 && a == 0.0;
    c.nonnegative = c.nonnegative;
    c.nondecreasing = c.nondecreasing && a >= 0.0 && b > 0.0;
    auto fn = [p, a, b](const std::vector<double>& grid, const RandomStream& stream) {
        std::vector<double> times(grid.size(), 0.0);
        for (std::size_t j = 0; j < grid.size(); ++j) {
            if (grid[j] > 0.0) times[j] = std::pow(grid[j], b);
        }
        auto v = p.values_at(times, stream);
        for (std::size_t j = 0; j < grid.size(); ++j) v[j] = grid[j] > 0.0 ? std::pow(grid[j], a) * v[j] : 0.0;
        return plain_sample(grid, std::move(v));
    };
    const std::string label = "power_time_change(" + p.label() + ", a=" + fmt(a) + ", b=" + fmt(b) + ")";
    ProcessSampler out(label, c, fn);

    // Probe: median |value| must shrink between t = 2^-10 and t = 2^-20.
    constexpr std::size_t probes = 256;
    const double probe_times[3] = {std::ldexp(1.0, -20), std::ldexp(1.0, -10), 1.0};
    std::vector<double> small(probes), mid(probes);
    const RandomStream probe_root(0x9B0BE5);
    for (std::size_t i = 0; i < probes; ++i) {
        const auto v = out.values_at(probe_times, probe_root.child(i));
        small[i] = std::fabs(v[0]);
        mid[i] = std::fabs(v[1]);
    }
    std::nth_element(small.begin(), small.begin() + probes / 2, small.end());
    std::nth_element(mid.begin(), mid.begin() + probes / 2, mid.end());
    const double m_small = small[probes / 2], m_mid = mid[probes / 2];
    if (m_small > 0.0 && !(m_small < m_mid)) {
        Claims dropped = c;
        dropped.time_stable = false;
        ProcessSampler flagged(label, dropped, fn);
        return flagged.with_note("paths do not vanish as t -> 0 (median |value| " + fmt(m_small) + " at t=2^-20 vs " +
                                 fmt(m_mid) + " at t=2^-10); time-stability claim dropped");
    }
    return out;
}

// ---------------------------------------------------------------------------
// Batches

std::vector<PathSample> sample_batch(const ProcessSampler& p, std::span<const double> grid, std::size_t n,
                                     const RandomStream& stream, int threads) {
    std::vector<PathSample> out(n);
    const auto g = normalize_grid(grid);
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) out[i] = p.sample(g, stream.child(i));
        return out;
    }
    std::exception_ptr failure;
#pragma omp parallel for num_threads(threads) schedule(dynamic, 16)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
        try {
            out[static_cast<std::size_t>(i)] = p.sample(g, stream.child(static_cast<std::uint64_t>(i)));
        } catch (...) {
#pragma omp critical
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
    return out;
}

}  // namespace lepage

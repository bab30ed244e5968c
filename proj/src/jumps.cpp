#include "lepage/jumps.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace lepage {

MarkedPP::MarkedPP(std::vector<MarkedPoint> points) : points_(std::move(points)) {
    double prev = 0.0;
    for (const auto& p : points_) {
        if (!(p.tau > prev) || !std::isfinite(p.tau)) {
            throw std::invalid_argument("MarkedPP: times must be positive and strictly increasing");
        }
        if (p.mark == 0.0 || !std::isfinite(p.mark)) throw std::invalid_argument("MarkedPP: marks must be nonzero");
        prev = p.tau;
    }
}

MarkedPP extract_jumps(const PathSample& ps, double delta) {
    if (!(delta >= 0.0)) throw std::invalid_argument("extract_jumps: delta must be nonnegative");
    if (!ps.jumps) throw std::invalid_argument("extract_jumps: path carries no jump record (not pure jump)");
    std::vector<MarkedPoint> merged;
    for (const auto& j : *ps.jumps) {
        if (!merged.empty() && merged.back().tau == j.time) {
            merged.back().mark += j.height;
        } else {
            merged.push_back({j.time, j.height});
        }
    }
    std::vector<MarkedPoint> out;
    for (const auto& p : merged) {
        if (p.mark != 0.0 && std::fabs(p.mark) > delta) out.push_back(p);
    }
    return MarkedPP(std::move(out));
}

MarkedPP scale_mpp(const MarkedPP& m, double a) {
    if (!(a > 0.0) || !std::isfinite(a)) throw std::invalid_argument("scale_mpp: a must be positive");
    std::vector<MarkedPoint> out(m.points().begin(), m.points().end());
    for (auto& p : out) p.tau /= a;
    return MarkedPP(std::move(out));
}

MarkedPP superpose(std::span<const MarkedPP> ms) {
    std::vector<MarkedPoint> all;
    for (const auto& m : ms) all.insert(all.end(), m.points().begin(), m.points().end());
    std::stable_sort(all.begin(), all.end(), [](const MarkedPoint& a, const MarkedPoint& b) { return a.tau < b.tau; });
    for (std::size_t k = 1; k < all.size(); ++k) {
        if (all[k].tau == all[k - 1].tau) {
            throw TieError("superpose: two configurations share the jump time " + std::to_string(all[k].tau));
        }
    }
    return MarkedPP(std::move(all));
}

std::optional<double> first_jump_time(const MarkedPP& m, double delta) {
    for (const auto& p : m.points()) {
        if (std::fabs(p.mark) > delta) return p.tau;
    }
    return std::nullopt;
}

std::pair<MarkedPP, MarkedPP> decompose_pm(const MarkedPP& m) {
    std::vector<MarkedPoint> pos, neg;
    for (const auto& p : m.points()) {
        if (p.mark > 0.0) pos.push_back(p);
        else neg.push_back({p.tau, -p.mark});
    }
    return {MarkedPP(std::move(pos)), MarkedPP(std::move(neg))};
}

std::vector<double> reconstruct_path(const MarkedPP& m, std::span<const double> times) {
    const auto pts = m.points();
    std::vector<double> out(times.size());
    for (std::size_t j = 0; j < times.size(); ++j) {
        double v = 0.0;
        for (const auto& p : pts) {
            if (p.tau > times[j]) break;
            v += p.mark;
        }
        out[j] = v;
    }
    return out;
}

std::vector<double> gaps(const MarkedPP& m, std::size_t count) {
    std::vector<double> out;
    double prev = 0.0;
    for (const auto& p : m.points()) {
        if (out.size() == count) break;
        out.push_back(p.tau - prev);
        prev = p.tau;
    }
    return out;
}

}  // namespace lepage

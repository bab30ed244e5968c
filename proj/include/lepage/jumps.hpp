#pragma once

#include "lepage/series.hpp"

#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace lepage {

struct MarkedPoint {
    double tau;
    double mark;
    friend bool operator==(const MarkedPoint&, const MarkedPoint&) = default;
};

/// Jump configuration {(τ_k, m_k)}: strictly increasing positive times, nonzero marks.
class MarkedPP {
public:
    MarkedPP() = default;
    explicit MarkedPP(std::vector<MarkedPoint> points);

    std::span<const MarkedPoint> points() const { return points_; }
    std::size_t size() const { return points_.size(); }
    bool empty() const { return points_.empty(); }

    friend bool operator==(const MarkedPP&, const MarkedPP&) = default;

private:
    std::vector<MarkedPoint> points_;
};

class TieError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Jumps of a pure-jump path with |mark| > delta. Jumps recorded at the same
/// instant are one jump of the path and are merged.
MarkedPP extract_jumps(const PathSample& ps, double delta = 0.0);
/// {(τ/a, m)}.
MarkedPP scale_mpp(const MarkedPP& m, double a);
/// Sorted union; a shared time across inputs raises TieError.
MarkedPP superpose(std::span<const MarkedPP> ms);
std::optional<double> first_jump_time(const MarkedPP& m, double delta = 0.0);
/// (positive marks, absolute values of negative marks).
std::pair<MarkedPP, MarkedPP> decompose_pm(const MarkedPP& m);
/// Σ_{τ_k ≤ t} m_k at each time.
std::vector<double> reconstruct_path(const MarkedPP& m, std::span<const double> times);
/// First `count` inter-point gaps, starting with τ₁ - 0 (fewer if the configuration is short).
std::vector<double> gaps(const MarkedPP& m, std::size_t count);

}  // namespace lepage

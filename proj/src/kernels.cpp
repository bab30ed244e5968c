#include "lepage/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace lepage {

SlicedProjections SlicedProjections::build(std::span<const double> rows, std::size_t k, std::size_t n_x,
                                           const std::vector<std::vector<double>>& directions) {
    if (k == 0 || rows.size() % k != 0) throw std::invalid_argument("sliced projections: bad row layout");
    const std::size_t n = rows.size() / k;
    if (n_x > n) throw std::invalid_argument("sliced projections: n_x exceeds pooled size");
    if (n > std::numeric_limits<std::uint32_t>::max()) throw std::invalid_argument("sliced projections: too many rows");
    SlicedProjections sp;
    sp.n_x = n_x;
    sp.n_y = n - n_x;
    for (const auto& u : directions) {
        if (u.size() != k) throw std::invalid_argument("sliced projections: direction has wrong length");
        std::vector<double> proj(n);
        for (std::size_t i = 0; i < n; ++i) {
            double v = 0.0;
            for (std::size_t c = 0; c < k; ++c) v += u[c] * rows[i * k + c];
            proj[i] = v;
        }
        std::vector<std::uint32_t> order(n);
        std::iota(order.begin(), order.end(), 0u);
        std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) { return proj[a] < proj[b]; });
        std::vector<double> sorted(n);
        for (std::size_t j = 0; j < n; ++j) sorted[j] = proj[order[j]];
        double total = 0.0, prefix = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            total += sorted[j] * static_cast<double>(j) - prefix;
            prefix += sorted[j];
        }
        sp.sorted.push_back(std::move(sorted));
        sp.order.push_back(std::move(order));
        sp.pair_total.push_back(total);
    }
    return sp;
}

double sliced_energy(const SlicedProjections& sp, std::span<const std::uint8_t> is_x) {
    const std::size_t n = sp.pooled();
    const double nx = static_cast<double>(sp.n_x), ny = static_cast<double>(sp.n_y);
    const double npool = nx + ny;
    double acc = 0.0;
    for (std::size_t d = 0; d < sp.sorted.size(); ++d) {
        const auto& v = sp.sorted[d];
        const auto& ord = sp.order[d];
        // within-group Σ_{i<j}(v_j - v_i) by one ascending scan; branch-free
        // since labels are random
        double wx = 0.0, wy = 0.0, sx = 0.0, cx = 0.0, prefix = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double x = v[j];
            const double g = is_x[ord[j]];
            const double cy = static_cast<double>(j) - cx, sy = prefix - sx;
            wx += g * (x * cx - sx);
            wy += (1.0 - g) * (x * cy - sy);
            sx += g * x;
            cx += g;
            prefix += x;
        }
        const double cross = sp.pair_total[d] - wx - wy;
        double e = (nx * ny / npool) * (2.0 * cross / (nx * ny) - 2.0 * wx / (nx * nx) - 2.0 * wy / (ny * ny));
        // identical samples give 0 up to rounding; snap so they compare equal
        const double scale = 2.0 * sp.pair_total[d] / npool;
        const double noise = 64.0 * std::numeric_limits<double>::epsilon() * npool *
                             std::max(std::fabs(v.front()), std::fabs(v.back()));
        if (e < 1e-11 * scale + noise) e = 0.0;
        acc += e;
    }
    return acc / static_cast<double>(sp.sorted.size());
}

namespace {

double one_permutation(const SlicedProjections& sp, const RandomStream& root, std::size_t b,
                       std::vector<std::uint8_t>& labels) {
    const std::size_t n = sp.pooled();
    std::fill(labels.begin(), labels.begin() + static_cast<std::ptrdiff_t>(sp.n_x), std::uint8_t{1});
    std::fill(labels.begin() + static_cast<std::ptrdiff_t>(sp.n_x), labels.end(), std::uint8_t{0});
    RandomStream s = root.child(b);
    for (std::size_t i = n; i > 1; --i) {
        const auto j = static_cast<std::size_t>(s.below(i));
        std::swap(labels[i - 1], labels[j]);
    }
    return sliced_energy(sp, labels);
}

}  // namespace

std::vector<double> permutation_statistics_serial(const SlicedProjections& sp, std::size_t permutations,
                                                  const RandomStream& stream) {
    std::vector<double> out(permutations);
    std::vector<std::uint8_t> labels(sp.pooled());
    for (std::size_t b = 0; b < permutations; ++b) out[b] = one_permutation(sp, stream, b, labels);
    return out;
}

std::vector<double> permutation_statistics_parallel(const SlicedProjections& sp, std::size_t permutations,
                                                    const RandomStream& stream, int threads) {
    std::vector<double> out(permutations);
#pragma omp parallel num_threads(threads)
    {
        std::vector<std::uint8_t> labels(sp.pooled());
#pragma omp for schedule(static)
        for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(permutations); ++b) {
            out[static_cast<std::size_t>(b)] = one_permutation(sp, stream, static_cast<std::size_t>(b), labels);
        }
    }
    return out;
}

}  // namespace lepage

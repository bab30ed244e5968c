#pragma once

#include "lepage/random.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace lepage {

/// Pooled sample projected on a set of directions, each projection sorted once
/// so that any relabeling costs one linear scan per direction.
struct SlicedProjections {
    std::size_t n_x = 0, n_y = 0;
    std::vector<std::vector<double>> sorted;          // per direction, ascending
    std::vector<std::vector<std::uint32_t>> order;    // per direction, pooled row index
    std::vector<double> pair_total;                   // per direction Σ_{i<j}(v_j - v_i)

    /// rows: (n_x + n_y) × k row-major, first n_x rows belong to x.
    static SlicedProjections build(std::span<const double> rows, std::size_t k, std::size_t n_x,
                                   const std::vector<std::vector<double>>& directions);
    std::size_t pooled() const { return n_x + n_y; }
};

/// Mean over directions of the one-dimensional energy statistic for the
/// labeling `is_x` (indexed by pooled row).
double sliced_energy(const SlicedProjections& sp, std::span<const std::uint8_t> is_x);

/// Statistics of B random relabelings; relabeling b shuffles with stream.child(b).
std::vector<double> permutation_statistics_serial(const SlicedProjections& sp, std::size_t permutations,
                                                  const RandomStream& stream);
std::vector<double> permutation_statistics_parallel(const SlicedProjections& sp, std::size_t permutations,
                                                    const RandomStream& stream, int threads);

}  // namespace lepage

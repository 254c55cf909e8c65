#pragma once

#include "solo/core/dataset.hpp"
#include "solo/core/design.hpp"
#include "solo/core/rng.hpp"

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

namespace solo::sampling {

/// Row-major grid layout of a design vector. A flat vector is rows = 1.
struct GridShape {
    std::size_t rows = 1;
    std::size_t cols = 1;

    static GridShape grid(std::size_t rows, std::size_t cols);
    static GridShape flat(std::size_t n) { return grid(1, n); }
    std::size_t size() const noexcept { return rows * cols; }
};

enum class Operator { mutation, crossover, convolution, random, truss_mutation };

struct Disturbance {
    Operator op;
    std::size_t size; ///< submatrix edge for mutation/convolution, unused otherwise
    double probability;
};

struct DisturbanceTable {
    std::vector<Disturbance> entries;

    void validate() const;
    /// Index of the entry selected by a uniform draw u in [0,1).
    std::size_t pick(double u) const;

    /// 1x1, 2x2, 3x3, 4x4 mutation at 10/10/20/20 %, crossover 20 %, random 20 %.
    static DisturbanceTable compliance();
    /// As compliance() with crossover swapped for convolution (sizes 2..4).
    static DisturbanceTable heat();
    /// Truss mutation only.
    static DisturbanceTable truss();
};

SampleTag tag_of(Operator op) noexcept;

enum class BinaryInit { one_hot, bernoulli };

/// Space the sampler draws from: kind plus catalog for discrete designs.
struct SampleSpace {
    DesignKind kind = DesignKind::continuous;
    std::vector<double> catalog;
    BinaryInit binary_init = BinaryInit::bernoulli;
};

/// Continuous: uniform draws, volume-enforced when `c` is given.
/// Binary one-hot: the zero vector plus all N unit vectors (n is ignored).
/// Binary Bernoulli: uniform arrays thresholded by threshold_binary.
/// Discrete: uniform catalog draws.
std::vector<DesignVector> initial_batch(std::size_t n, std::size_t dim, const SampleSpace& space,
                                        const VolumeConstraint* c, RngStream& rng);

/// Replace a uniformly placed size x size block by uniform [0,1) draws.
std::vector<double> mutate(std::span<const double> base, GridShape shape, std::size_t size, RngStream& rng);
/// Permute k uniformly chosen positions by a uniform random permutation.
std::vector<double> crossover(std::span<const double> base, std::size_t k, RngStream& rng);
/// Draws k uniformly from 1..N, then crossover.
std::vector<double> crossover(std::span<const double> base, RngStream& rng);

using Kernel2 = std::array<std::array<double, 2>, 2>;

/// out(i,j) = sum_ab K(a,b) S(i-a, j-b) over the chosen block, zero outside it.
std::vector<double> convolve_block(std::span<const double> base, GridShape shape, std::size_t row0, std::size_t col0,
                                   std::size_t size, const Kernel2& kernel);
/// Random block placement and a kernel with uniform [0,1) entries.
std::vector<double> convolve_perturb(std::span<const double> base, GridShape shape, std::size_t size, RngStream& rng);

/// x_i >= threshold -> 1, else 0.
std::vector<double> threshold_at(std::span<const double> base, double threshold);
/// Threshold is beta^4 (beta uniform) or the element-wise mean, 50/50.
std::vector<double> threshold_binary(std::span<const double> base, RngStream& rng);

/// Adds gamma to ceil(beta2 N) distinct uniformly chosen entries and clamps
/// to [0,1]. Values are then snapped to the nearest `levels` entry when
/// levels is non-empty.
std::vector<double> truss_mutate(std::span<const double> base, double beta2, double gamma,
                                 const std::vector<double>& levels, RngStream& rng);
/// beta2 ~ U[0,1], gamma ~ U[-1,1]. `mutated`, when given, receives the count.
std::vector<double> truss_mutate(std::span<const double> base, const std::vector<double>& levels, RngStream& rng,
                                 std::size_t* mutated = nullptr);

struct Generated {
    DesignVector design;
    SampleTag tag;
    std::size_t entry; ///< index into the table
};

using DuplicateCheck = std::function<bool(const DesignVector&)>;

/// n disturbances of `base`. Each sample draws its own table entry and runs
/// on a stream derived from `rng`. Continuous samples are re-enforced to the
/// volume target when `c` is given; binary samples are thresholded;
/// discrete samples are snapped to the catalog. Samples flagged by
/// `is_duplicate` (or repeating one earlier in the batch) are redrawn up to
/// 10 times and then kept.
std::vector<Generated> generate_batch(const DesignVector& base, GridShape shape, const DisturbanceTable& table,
                                      std::size_t n, const VolumeConstraint* c, RngStream& rng,
                                      const DuplicateCheck& is_duplicate = {});

} // namespace solo::sampling

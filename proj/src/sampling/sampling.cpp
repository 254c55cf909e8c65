#include "solo/sampling/sampling.hpp"

#include "solo/core/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace solo::sampling {

GridShape GridShape::grid(std::size_t rows, std::size_t cols)
{
    require(rows >= 1 && cols >= 1, "grid shape needs rows, cols >= 1");
    return {rows, cols};
}

void DisturbanceTable::validate() const
{
    require(!entries.empty(), "disturbance table is empty");
    double total = 0.0;
    for (const auto& e : entries) {
        require(e.probability >= 0.0, "disturbance probabilities must be nonnegative");
        total += e.probability;
    }
    require(std::abs(total - 1.0) <= 1e-12, "disturbance probabilities must sum to 1");
}

std::size_t DisturbanceTable::pick(double u) const
{
    double acc = 0.0;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        acc += entries[i].probability;
        if (u < acc) return i;
    }
    return entries.size() - 1;
}

DisturbanceTable DisturbanceTable::compliance()
{
    return {{{Operator::mutation, 1, 0.1},
             {Operator::mutation, 2, 0.1},
             {Operator::mutation, 3, 0.2},
             {Operator::mutation, 4, 0.2},
             {Operator::crossover, 0, 0.2},
             {Operator::random, 0, 0.2}}};
}

DisturbanceTable DisturbanceTable::heat()
{
    // the 20 % convolution share is split over block sizes 2..4 in the 1:2:2
    // ratio the mutation sizes use
    return {{{Operator::mutation, 1, 0.1},
             {Operator::mutation, 2, 0.1},
             {Operator::mutation, 3, 0.2},
             {Operator::mutation, 4, 0.2},
             {Operator::convolution, 2, 0.04},
             {Operator::convolution, 3, 0.08},
             {Operator::convolution, 4, 0.08},
             {Operator::random, 0, 0.2}}};
}

DisturbanceTable DisturbanceTable::truss() { return {{{Operator::truss_mutation, 0, 1.0}}}; }

SampleTag tag_of(Operator op) noexcept
{
    switch (op) {
    case Operator::mutation:
    case Operator::truss_mutation: return SampleTag::mutation;
    case Operator::crossover: return SampleTag::crossover;
    case Operator::convolution: return SampleTag::convolution;
    case Operator::random: return SampleTag::random;
    }
    return SampleTag::mutation;
}

namespace {

std::vector<double> uniform_vector(std::size_t n, RngStream& rng)
{
    std::vector<double> v(n);
    for (auto& x : v) x = rng.uniform();
    return v;
}

std::vector<double> snap_to(std::vector<double> v, const std::vector<double>& catalog)
{
    for (auto& x : v) x = catalog[nearest_catalog_index(catalog, x)];
    return v;
}

} // namespace

std::vector<DesignVector> initial_batch(std::size_t n, std::size_t dim, const SampleSpace& space,
                                        const VolumeConstraint* c, RngStream& rng)
{
    require(dim >= 1, "initial_batch: dimension must be >= 1");
    std::vector<DesignVector> out;
    switch (space.kind) {
    case DesignKind::continuous:
        require(n >= 1, "initial_batch: n must be >= 1");
        for (std::size_t k = 0; k < n; ++k) {
            auto v = uniform_vector(dim, rng);
            if (c) v = enforce_volume_constraint(v, *c);
            out.push_back(DesignVector::continuous(std::move(v)));
        }
        break;
    case DesignKind::binary:
        if (space.binary_init == BinaryInit::one_hot) {
            out.push_back(DesignVector::binary(std::vector<double>(dim, 0.0)));
            for (std::size_t i = 0; i < dim; ++i) {
                std::vector<double> e(dim, 0.0);
                e[i] = 1.0;
                out.push_back(DesignVector::binary(std::move(e)));
            }
        }
        else {
            require(n >= 1, "initial_batch: n must be >= 1");
            for (std::size_t k = 0; k < n; ++k)
                out.push_back(DesignVector::binary(threshold_binary(uniform_vector(dim, rng), rng)));
        }
        break;
    case DesignKind::discrete:
        require(n >= 1, "initial_batch: n must be >= 1");
        require(!space.catalog.empty(), "initial_batch: discrete space needs a catalog");
        for (std::size_t k = 0; k < n; ++k) {
            std::vector<double> v(dim);
            for (auto& x : v) x = space.catalog[rng.index(space.catalog.size())];
            out.push_back(DesignVector::discrete(std::move(v), space.catalog));
        }
        break;
    }
    return out;
}

std::vector<double> mutate(std::span<const double> base, GridShape shape, std::size_t size, RngStream& rng)
{
    require(base.size() == shape.size(), "mutate: design length does not match grid shape");
    require(size >= 1 && size <= std::min(shape.rows, shape.cols), "mutate: block size exceeds the grid");
    std::vector<double> out(base.begin(), base.end());
    const std::size_t r0 = rng.index(shape.rows - size + 1);
    const std::size_t c0 = rng.index(shape.cols - size + 1);
    for (std::size_t r = r0; r < r0 + size; ++r)
        for (std::size_t c = c0; c < c0 + size; ++c) out[r * shape.cols + c] = rng.uniform();
    return out;
}

std::vector<double> crossover(std::span<const double> base, std::size_t k, RngStream& rng)
{
    const std::size_t n = base.size();
    require(k >= 1 && k <= n, "crossover: k must lie in 1..N");
    std::vector<double> out(base.begin(), base.end());
    // partial Fisher-Yates picks k distinct positions
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t i = 0; i < k; ++i) std::swap(idx[i], idx[i + rng.index(n - i)]);
    std::vector<std::size_t> perm(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k));
    for (std::size_t i = k; i > 1; --i) std::swap(perm[i - 1], perm[rng.index(i)]);
    for (std::size_t i = 0; i < k; ++i) out[idx[i]] = base[perm[i]];
    return out;
}

std::vector<double> crossover(std::span<const double> base, RngStream& rng)
{
    require(!base.empty(), "crossover: empty design");
    return crossover(base, 1 + rng.index(base.size()), rng);
}

std::vector<double> convolve_block(std::span<const double> base, GridShape shape, std::size_t row0, std::size_t col0,
                                   std::size_t size, const Kernel2& kernel)
{
    require(base.size() == shape.size(), "convolve: design length does not match grid shape");
    require(size >= 1 && row0 + size <= shape.rows && col0 + size <= shape.cols, "convolve: block outside the grid");
    std::vector<double> out(base.begin(), base.end());
    auto at = [&](std::size_t r, std::size_t c) { return base[(row0 + r) * shape.cols + col0 + c]; };
    for (std::size_t i = 0; i < size; ++i)
        for (std::size_t j = 0; j < size; ++j) {
            double s = 0.0;
            for (std::size_t a = 0; a < 2; ++a)
                for (std::size_t b = 0; b < 2; ++b)
                    if (i >= a && j >= b) s += kernel[a][b] * at(i - a, j - b);
            out[(row0 + i) * shape.cols + col0 + j] = s;
        }
    return out;
}

std::vector<double> convolve_perturb(std::span<const double> base, GridShape shape, std::size_t size, RngStream& rng)
{
    require(size >= 2 && size <= std::min(shape.rows, shape.cols), "convolve_perturb: block size must lie in 2..min(rows,cols)");
    const std::size_t r0 = rng.index(shape.rows - size + 1);
    const std::size_t c0 = rng.index(shape.cols - size + 1);
    Kernel2 k;
    for (auto& row : k)
        for (auto& x : row) x = rng.uniform();
    auto out = convolve_block(base, shape, r0, c0, size, k);
    for (auto& x : out) x = std::clamp(x, 0.0, 1.0);
    return out;
}

std::vector<double> threshold_at(std::span<const double> base, double threshold)
{
    std::vector<double> out(base.size());
    for (std::size_t i = 0; i < base.size(); ++i) out[i] = base[i] >= threshold ? 1.0 : 0.0;
    return out;
}

std::vector<double> threshold_binary(std::span<const double> base, RngStream& rng)
{
    require(!base.empty(), "threshold_binary: empty design");
    double threshold;
    if (rng.uniform() < 0.5) {
        const double b = rng.uniform();
        threshold = b * b * b * b;
    }
    else {
        threshold = std::accumulate(base.begin(), base.end(), 0.0) / static_cast<double>(base.size());
    }
    return threshold_at(base, threshold);
}

std::vector<double> truss_mutate(std::span<const double> base, double beta2, double gamma,
                                 const std::vector<double>& levels, RngStream& rng)
{
    const std::size_t n = base.size();
    require(n >= 1, "truss_mutate: empty design");
    const auto count = std::clamp<std::size_t>(static_cast<std::size_t>(std::ceil(beta2 * static_cast<double>(n))), 1, n);
    std::vector<double> out(base.begin(), base.end());
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t i = 0; i < count; ++i) {
        std::swap(idx[i], idx[i + rng.index(n - i)]);
        out[idx[i]] = std::clamp(out[idx[i]] + gamma, 0.0, 1.0);
    }
    if (!levels.empty()) out = snap_to(std::move(out), levels);
    return out;
}

std::vector<double> truss_mutate(std::span<const double> base, const std::vector<double>& levels, RngStream& rng,
                                 std::size_t* mutated)
{
    const double beta2 = rng.uniform();
    const double gamma = rng.uniform(-1.0, 1.0);
    if (mutated)
        *mutated = std::clamp<std::size_t>(static_cast<std::size_t>(std::ceil(beta2 * static_cast<double>(base.size()))),
                                           1, base.size());
    return truss_mutate(base, beta2, gamma, levels, rng);
}

namespace {

DesignVector apply_entry(const DesignVector& base, GridShape shape, const Disturbance& d, const VolumeConstraint* c,
                         RngStream& rng)
{
    const auto vals = base.values();
    std::vector<double> out;
    switch (d.op) {
    case Operator::mutation: out = mutate(vals, shape, d.size, rng); break;
    case Operator::crossover: out = crossover(vals, rng); break;
    case Operator::convolution: out = convolve_perturb(vals, shape, d.size, rng); break;
    case Operator::random:
        if (base.kind() == DesignKind::discrete) {
            out.resize(base.size());
            for (auto& x : out) x = base.catalog()[rng.index(base.catalog().size())];
        }
        else {
            out = uniform_vector(base.size(), rng);
        }
        break;
    case Operator::truss_mutation: out = truss_mutate(vals, base.catalog(), rng); break;
    }
    switch (base.kind()) {
    case DesignKind::continuous:
        if (c) out = enforce_volume_constraint(out, *c);
        return DesignVector::continuous(std::move(out));
    case DesignKind::binary:
        if (d.op != Operator::crossover) out = threshold_binary(out, rng);
        return DesignVector::binary(std::move(out));
    case DesignKind::discrete:
        return DesignVector::discrete(snap_to(std::move(out), base.catalog()), base.catalog());
    }
    return base;
}

} // namespace

std::vector<Generated> generate_batch(const DesignVector& base, GridShape shape, const DisturbanceTable& table,
                                      std::size_t n, const VolumeConstraint* c, RngStream& rng,
                                      const DuplicateCheck& is_duplicate)
{
    table.validate();
    require(base.size() == shape.size(), "generate_batch: design length does not match grid shape");
    std::vector<Generated> out;
    out.reserve(n);
    const std::uint64_t batch_key = rng.next_u64();
    for (std::size_t k = 0; k < n; ++k) {
        RngStream sub = rng.derive(batch_key + k);
        const std::size_t entry = table.pick(sub.uniform());
        const Disturbance& d = table.entries[entry];
        auto seen = [&](const DesignVector& v) {
            if (is_duplicate && is_duplicate(v)) return true;
            return std::any_of(out.begin(), out.end(), [&](const Generated& g) { return g.design == v; });
        };
        DesignVector v = apply_entry(base, shape, d, c, sub);
        for (int attempt = 0; attempt < 10 && seen(v); ++attempt) v = apply_entry(base, shape, d, c, sub);
        out.push_back({std::move(v), tag_of(d.op), entry});
    }
    return out;
}

} // namespace solo::sampling

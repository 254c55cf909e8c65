#include "solo/core/design.hpp"

#include "solo/core/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace solo {

std::string_view to_string(DesignKind kind) noexcept
{
    switch (kind) {
    case DesignKind::continuous: return "continuous";
    case DesignKind::binary: return "binary";
    case DesignKind::discrete: return "discrete";
    }
    return "unknown";
}

DesignKind design_kind_from_string(std::string_view text)
{
    if (text == "continuous") return DesignKind::continuous;
    if (text == "binary") return DesignKind::binary;
    if (text == "discrete") return DesignKind::discrete;
    throw ContractViolation("unknown design kind '" + std::string(text) + "'");
}

DesignVector::DesignVector(std::vector<double> values, DesignKind kind, std::vector<double> catalog)
    : values_(std::move(values)), kind_(kind), catalog_(std::move(catalog))
{
    require(!values_.empty(), "design vector must have at least one entry");
    switch (kind_) {
    case DesignKind::continuous:
        for (double v : values_)
            require(v >= 0.0 && v <= 1.0, "continuous design value " + std::to_string(v) + " outside [0,1]");
        break;
    case DesignKind::binary:
        for (double v : values_)
            require(v == 0.0 || v == 1.0, "binary design value " + std::to_string(v) + " not in {0,1}");
        break;
    case DesignKind::discrete:
        require(!catalog_.empty(), "discrete design needs a catalog");
        require(std::is_sorted(catalog_.begin(), catalog_.end()), "catalog must be increasing");
        for (double v : values_)
            require(std::binary_search(catalog_.begin(), catalog_.end(), v),
                    "discrete design value " + std::to_string(v) + " not in catalog");
        break;
    }
}

DesignVector DesignVector::continuous(std::vector<double> values)
{
    return DesignVector(std::move(values), DesignKind::continuous, {});
}

DesignVector DesignVector::binary(std::vector<double> values)
{
    return DesignVector(std::move(values), DesignKind::binary, {});
}

DesignVector DesignVector::discrete(std::vector<double> values, std::vector<double> catalog)
{
    return DesignVector(std::move(values), DesignKind::discrete, std::move(catalog));
}

bool DesignVector::same_space(const DesignVector& other) const noexcept
{
    return kind_ == other.kind_ && values_.size() == other.values_.size() && catalog_ == other.catalog_;
}

VolumeConstraint::VolumeConstraint(std::vector<double> w, double v0, ConstraintMode m)
    : weights(std::move(w)), limit(v0), mode(m)
{
    require(!weights.empty(), "volume constraint needs weights");
    for (double wi : weights) require(wi >= 0.0 && std::isfinite(wi), "volume weights must be nonnegative");
    require(total_weight() > 0.0, "volume weights must not all be zero");
}

double VolumeConstraint::total_weight() const noexcept
{
    return std::accumulate(weights.begin(), weights.end(), 0.0);
}

double VolumeConstraint::residual(std::span<const double> values) const
{
    return weighted_volume(values, *this) - limit;
}

bool VolumeConstraint::satisfied(std::span<const double> values, double tol) const
{
    const double r = residual(values);
    return mode == ConstraintMode::equality ? std::abs(r) <= tol : r <= tol;
}

double weighted_volume(std::span<const double> values, const VolumeConstraint& c)
{
    require(values.size() == c.weights.size(), "weighted_volume: length mismatch (" + std::to_string(values.size())
                                                   + " values, " + std::to_string(c.weights.size()) + " weights)");
    double s = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) s += c.weights[i] * values[i];
    return s;
}

std::vector<double> enforce_volume_constraint(std::span<const double> values, const VolumeConstraint& c)
{
    require(values.size() == c.weights.size(), "enforce_volume_constraint: length mismatch");
    const double total = c.total_weight();
    const double target = c.limit;
    if (!(target > 0.0) || target > total * (1.0 + 1e-12))
        throw InfeasibleConstraint("volume target " + std::to_string(target) + " outside (0, "
                                   + std::to_string(total) + "]");

    std::vector<double> v(values.begin(), values.end());
    for (double& x : v) {
        require(std::isfinite(x), "enforce_volume_constraint: non-finite entry");
        x = std::max(x, 0.0);
    }

    const bool in_range = std::all_of(v.begin(), v.end(), [](double x) { return x <= 1.0; });
    if (in_range && std::abs(weighted_volume(v, c) - target) <= 1e-12 * target) return v;

    // step 2: rescale
    const double vol = weighted_volume(v, c);
    if (vol > 0.0) {
        const double scale = target / vol;
        for (double& x : v) x *= scale;
    }
    else {
        std::fill(v.begin(), v.end(), target / total);
    }

    // step 3: clip and redistribute in proportion to headroom. One pass is
    // enough: with lambda = deficit / sum w_i (1 - v_i) <= 1 the update
    // v_i + lambda (1 - v_i) never exceeds one.
    for (double& x : v) x = std::min(x, 1.0);
    const double deficit = target - weighted_volume(v, c);
    if (deficit > 0.0) {
        double headroom = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) headroom += c.weights[i] * (1.0 - v[i]);
        if (headroom > 0.0) {
            const double lambda = std::min(deficit / headroom, 1.0);
            for (double& x : v) x = std::min(x + lambda * (1.0 - x), 1.0);
        }
    }
    else if (deficit < 0.0) {
        // only reachable through rounding in the rescale; shave uniformly
        const double factor = target / (target - deficit);
        for (double& x : v) x *= factor;
    }
    return v;
}

DesignVector enforce_volume_constraint(const DesignVector& v, const VolumeConstraint& c)
{
    require(v.kind() == DesignKind::continuous, "enforce_volume_constraint needs a continuous design");
    return DesignVector::continuous(enforce_volume_constraint(v.values(), c));
}

std::size_t nearest_catalog_index(std::span<const double> catalog, double x)
{
    require(!catalog.empty(), "empty catalog");
    auto it = std::lower_bound(catalog.begin(), catalog.end(), x);
    if (it == catalog.begin()) return 0;
    if (it == catalog.end()) return catalog.size() - 1;
    const auto hi = static_cast<std::size_t>(it - catalog.begin());
    return (x - catalog[hi - 1] <= catalog[hi] - x) ? hi - 1 : hi;
}

} // namespace solo

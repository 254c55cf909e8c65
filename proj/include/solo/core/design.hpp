#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace solo {

enum class DesignKind { continuous, binary, discrete };

std::string_view to_string(DesignKind kind) noexcept;
DesignKind design_kind_from_string(std::string_view text);

/// A candidate material distribution rho.
///
/// Continuous designs live in [0,1]^N, binary ones in {0,1}^N and discrete
/// ones take values from an ordered catalog. The invariant is checked once
/// at construction; afterwards the value is immutable.
class DesignVector {
public:
    static DesignVector continuous(std::vector<double> values);
    static DesignVector binary(std::vector<double> values);
    static DesignVector discrete(std::vector<double> values, std::vector<double> catalog);

    std::span<const double> values() const noexcept { return values_; }
    const std::vector<double>& data() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }
    DesignKind kind() const noexcept { return kind_; }
    const std::vector<double>& catalog() const noexcept { return catalog_; }
    double operator[](std::size_t i) const { return values_[i]; }

    /// Same length, kind and catalog.
    bool same_space(const DesignVector& other) const noexcept;

    friend bool operator==(const DesignVector& a, const DesignVector& b) noexcept
    {
        return a.kind_ == b.kind_ && a.values_ == b.values_ && a.catalog_ == b.catalog_;
    }

private:
    DesignVector(std::vector<double> values, DesignKind kind, std::vector<double> catalog);

    std::vector<double> values_;
    DesignKind kind_;
    std::vector<double> catalog_;
};

enum class ConstraintMode { inequality, equality };

/// Weighted volume constraint  sum_i w_i rho_i  (<= or ==)  V0.
struct VolumeConstraint {
    std::vector<double> weights;
    double limit = 0.0;
    ConstraintMode mode = ConstraintMode::inequality;

    VolumeConstraint() = default;
    VolumeConstraint(std::vector<double> w, double v0, ConstraintMode m = ConstraintMode::inequality);

    std::size_t size() const noexcept { return weights.size(); }
    double total_weight() const noexcept;
    /// Residual w.rho - V0.
    double residual(std::span<const double> values) const;
    bool satisfied(std::span<const double> values, double tol = 1e-9) const;
};

double weighted_volume(std::span<const double> values, const VolumeConstraint& c);
inline double weighted_volume(const DesignVector& v, const VolumeConstraint& c)
{
    return weighted_volume(v.values(), c);
}

/// Rescale to the target weighted volume, clip entries above one and hand
/// the clipped mass back to the unclipped entries in proportion to their
/// headroom (1 - v_i). The result hits V0 to within 1e-9 and is idempotent.
///
/// Throws InfeasibleConstraint when V0 <= 0 or V0 > sum(w).
std::vector<double> enforce_volume_constraint(std::span<const double> values, const VolumeConstraint& c);
DesignVector enforce_volume_constraint(const DesignVector& v, const VolumeConstraint& c);

/// Index of the catalog entry closest to `x` (ties go to the lower entry).
std::size_t nearest_catalog_index(std::span<const double> catalog, double x);

} // namespace solo

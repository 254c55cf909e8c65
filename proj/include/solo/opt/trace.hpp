#pragma once

#include "solo/opt/objective.hpp"

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <span>
#include <vector>

namespace solo::opt {

struct ScoredDesign {
    std::vector<double> design;
    double value;
};

/// The k lowest-valued pairwise-distinct designs seen so far
/// (distinct by exact equality of the vectors).
class TopK {
public:
    explicit TopK(std::size_t k = 10) : k_(k) {}

    void offer(std::span<const double> design, double value);
    const std::vector<ScoredDesign>& items() const noexcept { return items_; }
    std::size_t capacity() const noexcept { return k_; }

private:
    std::size_t k_;
    std::vector<ScoredDesign> items_; ///< sorted ascending by value
};

/// Record of one search: every evaluation of h appends its best-so-far.
struct SearchTrace {
    std::size_t evaluations = 0;
    std::vector<double> best_so_far;
    TopK top{10};

    double best() const noexcept
    {
        return best_so_far.empty() ? std::numeric_limits<double>::infinity() : best_so_far.back();
    }

    /// CSV: evaluation_index,best_h
    void write_csv(std::ostream& out) const;
};

struct SearchResult {
    std::vector<double> best;
    double best_value = std::numeric_limits<double>::infinity();
    SearchTrace trace;
};

/// Evaluates h, rejects non-finite values with SearchError and keeps the
/// trace and incumbent up to date. Shared by all minimizers.
class TracedObjective {
public:
    TracedObjective(const Objective& h, SearchResult& result, std::size_t max_evaluations, const char* who);

    double operator()(std::span<const double> x);
    bool exhausted() const noexcept { return budget_ != 0 && result_.trace.evaluations >= budget_; }
    std::size_t remaining() const noexcept;

private:
    const Objective& h_;
    SearchResult& result_;
    std::size_t budget_;
    const char* who_;
};

} // namespace solo::opt

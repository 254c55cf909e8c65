#include "solo/opt/trace.hpp"

#include "solo/core/error.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <string>

namespace solo::opt {

void TopK::offer(std::span<const double> design, double value)
{
    if (k_ == 0) return;
    if (items_.size() == k_ && value >= items_.back().value) return;
    const bool seen = std::any_of(items_.begin(), items_.end(), [&](const ScoredDesign& s) {
        return std::equal(s.design.begin(), s.design.end(), design.begin(), design.end());
    });
    if (seen) return;
    auto pos = std::upper_bound(items_.begin(), items_.end(), value,
                                [](double v, const ScoredDesign& s) { return v < s.value; });
    items_.insert(pos, ScoredDesign{std::vector<double>(design.begin(), design.end()), value});
    if (items_.size() > k_) items_.pop_back();
}

void SearchTrace::write_csv(std::ostream& out) const
{
    out << "evaluation_index,best_h\n";
    out << std::setprecision(17);
    for (std::size_t i = 0; i < best_so_far.size(); ++i) out << (i + 1) << ',' << best_so_far[i] << '\n';
}

TracedObjective::TracedObjective(const Objective& h, SearchResult& result, std::size_t max_evaluations, const char* who)
    : h_(h), result_(result), budget_(max_evaluations), who_(who)
{
}

std::size_t TracedObjective::remaining() const noexcept
{
    if (budget_ == 0) return std::numeric_limits<std::size_t>::max();
    return budget_ > result_.trace.evaluations ? budget_ - result_.trace.evaluations : 0;
}

double TracedObjective::operator()(std::span<const double> x)
{
    const double v = h_(x);
    auto& tr = result_.trace;
    ++tr.evaluations;
    if (!std::isfinite(v))
        throw SearchError(std::string(who_) + ": objective returned non-finite value at evaluation "
                          + std::to_string(tr.evaluations));
    if (v < result_.best_value) {
        result_.best_value = v;
        result_.best.assign(x.begin(), x.end());
    }
    tr.best_so_far.push_back(result_.best_value);
    tr.top.offer(x, v);
    return v;
}

} // namespace solo::opt

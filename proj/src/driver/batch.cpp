#include "solo/driver/batch.hpp"

#include <exception>

namespace solo::driver {

std::vector<Evaluation> evaluate_batch_serial(const Problem& p, const std::vector<DesignVector>& designs)
{
    std::vector<Evaluation> out;
    out.reserve(designs.size());
    for (const auto& d : designs) out.push_back(p.evaluate(d));
    return out;
}

std::vector<Evaluation> evaluate_batch(const Problem& p, const std::vector<DesignVector>& designs)
{
    const auto n = static_cast<std::ptrdiff_t>(designs.size());
    std::vector<Evaluation> out(designs.size());
    std::vector<std::exception_ptr> errors(designs.size());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        try {
            out[static_cast<std::size_t>(i)] = p.evaluate(designs[static_cast<std::size_t>(i)]);
        }
        catch (...) {
            errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

} // namespace solo::driver

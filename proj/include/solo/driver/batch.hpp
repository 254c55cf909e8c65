#pragma once

#include "solo/driver/problem.hpp"

#include <vector>

namespace solo::driver {

/// Expensive evaluations of a batch, one per design, in input order.
/// The OpenMP version splits the batch over threads; the serial one is the
/// reference the tests and the benchmark compare against. Both rethrow the
/// first evaluator failure (lowest index).
std::vector<Evaluation> evaluate_batch(const Problem& p, const std::vector<DesignVector>& designs);
std::vector<Evaluation> evaluate_batch_serial(const Problem& p, const std::vector<DesignVector>& designs);

} // namespace solo::driver

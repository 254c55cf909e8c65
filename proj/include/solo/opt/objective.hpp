#pragma once

#include <functional>
#include <span>

namespace solo::opt {

/// Scalar objective h over a flat design vector. Searches may call it from
/// one thread at a time, but implementations wrapping shared state (a
/// trained surrogate, an FEM model) are expected to be reentrant.
using Objective = std::function<double(std::span<const double>)>;

} // namespace solo::opt

#pragma once

#include "solo/driver/solo.hpp"

#include <iosfwd>

namespace solo::driver {

/// INI-style sections [solo] [net] [train] [search] [gsa] [ba] [bba] holding
/// every SoloConfig field. Keys absent from the input keep their current
/// value; unknown keys are rejected with ContractViolation.
void read_config(std::istream& in, SoloConfig& cfg);
void write_config(std::ostream& out, const SoloConfig& cfg);

} // namespace solo::driver

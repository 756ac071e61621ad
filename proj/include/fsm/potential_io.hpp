#pragma once

// Potential files: {"L": 1, "coeffs": {"0": [-10, 0], "1": [-5, 0]}} or the
// power-law family {"family": "Vt", "t": 1} (optional "v0", "amplitude", "L").

#include "fsm/planewave.hpp"

#include <string>

namespace fsm {

// `default_period` is used when the document has no "L". Throws ConfigError
// naming the offending field.
FourierPotential parse_potential(const std::string& json_text, double default_period = 1.0);
FourierPotential load_potential(const std::string& path, double default_period = 1.0);

}  // namespace fsm

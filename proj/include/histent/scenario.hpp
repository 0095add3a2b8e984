#pragma once

#include "histent/circuit.hpp"

#include <string>

namespace histent {

// Parses a scenario document (JSON) into a validated Circuit. Schema errors,
// non-isometric maps and bad mode indices all raise ScenarioError with a
// field-locating path.
Circuit load_circuit(const std::string& text);

Circuit load_circuit_file(const std::string& path);

// Serializes a circuit back into the scenario schema.
std::string save_circuit(const Circuit& circuit);

} // namespace histent

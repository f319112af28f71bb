// Deterministic number formatting for every artifact the tool writes.
#pragma once

#include <string>

namespace hjlab {

// Shortest decimal string that parses back to exactly the same double.
std::string format_shortest(double v);

// Fixed 17-significant-digit scientific-style formatting (profile dumps).
std::string format_17(double v);

} // namespace hjlab

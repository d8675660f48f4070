#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

namespace somchange {

// Stream-survey analogue: five physical site descriptors (P1 elevation, P2
// slope, P3 stream order, P4 embeddedness, P5 water temperature) paired with
// five invertebrate functional-group abundances (B1 shredders, B2 filtering
// collectors, B3 collector-gatherers, B4 scrapers, B5 predators). Embeddedness
// drives most of the biological response; scrapers respond non-monotonically.
// Returned as CSV text with header P1..P5,B1..B5.
std::string synthetic_stream_csv(std::size_t rows = 130, std::uint64_t seed = 2015);

}  // namespace somchange

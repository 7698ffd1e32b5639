#pragma once

#include <string>
#include <vector>

namespace harf {

// One phoneme label. After normalization a label is non-empty, contains no
// whitespace and no positional suffix, and belongs to the alphabet inventory.
using Phoneme = std::string;

// Ordered phoneme sequence; its length is the N used by the scorer.
using PhonemeSequence = std::vector<Phoneme>;

}  // namespace harf

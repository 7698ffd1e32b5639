#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "harf/phoneme.hpp"

namespace harf {

enum class EditKind { kMatch, kSubstitute, kDelete, kInsert };

// One step of an alignment. Match/substitute carry both indices, delete only
// a reference index, insert only a prediction index.
struct EditOp {
  EditKind kind;
  std::optional<std::size_t> ref_index;
  std::optional<std::size_t> pred_index;

  bool operator==(const EditOp&) const = default;
};

struct Alignment {
  std::vector<EditOp> ops;
  std::size_t match_count = 0;
  std::size_t s_count = 0;
  std::size_t d_count = 0;
  std::size_t i_count = 0;

  std::size_t distance() const { return s_count + d_count + i_count; }
};

// Levenshtein alignment (unit costs) of a predicted sequence against a
// reference. Among minimum-cost alignments the backtrace is deterministic:
// walking back from the end, it prefers match, then substitution, then
// deletion, then insertion.
Alignment align(const PhonemeSequence& reference, const PhonemeSequence& predicted);

// Length of the longest common subsequence of the two sequences.
std::size_t lcs_length(const PhonemeSequence& a, const PhonemeSequence& b);

}  // namespace harf

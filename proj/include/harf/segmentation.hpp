#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "harf/alignment.hpp"
#include "harf/phoneme.hpp"

namespace harf {

// One word of the reference transcript together with its slice of the
// normalized reference phoneme sequence. Boundaries listed in utterance
// order tile the full reference.
struct WordBoundary {
  std::string word_text;
  PhonemeSequence ref_phonemes;
};

// A word-aligned group of reference and predicted phonemes. Concatenating
// ref_phonemes across an utterance's groups reproduces the full reference;
// likewise pred_phonemes and the full prediction. The op counts are the
// word's share of the utterance alignment.
struct WordGroup {
  std::string word_text;
  PhonemeSequence ref_phonemes;
  PhonemeSequence pred_phonemes;
  std::size_t match_count = 0;
  std::size_t s_count = 0;
  std::size_t d_count = 0;
  std::size_t i_count = 0;
};

// Endpoint descriptor for an external segmentation service.
struct SegmenterHook {
  std::string endpoint;
  double timeout_s = 5.0;
  int retry_budget = 1;

  void validate() const;  // timeout > 0, retry_budget >= 0
};

// Distributes the utterance alignment over the given words. Matches,
// substitutions and deletions follow their reference phoneme's word;
// insertions attach to the word of the nearest preceding reference-carrying
// op (leading insertions to the first word). Throws PartitionError when the
// boundaries do not tile the aligned sequences.
std::vector<WordGroup> segment_by_projection(
    const std::vector<WordBoundary>& word_boundaries,
    const Alignment& full_alignment, const PhonemeSequence& predicted);

// Asks an external service to group the sequences. The response must tile
// both sequences exactly or a ValidationError is thrown; transport failures
// are retried up to the hook's budget and then surface as TransportError.
// Group op counts are filled by aligning each group's slices.
std::vector<WordGroup> segment_external(const SegmenterHook& hook,
                                        const std::string& text,
                                        const PhonemeSequence& reference,
                                        const PhonemeSequence& predicted);

// Tries the external service first and falls back to projection when the
// response fails validation. Transport errors still propagate.
std::vector<WordGroup> segment_with_fallback(
    const SegmenterHook& hook, const std::string& text,
    const std::vector<WordBoundary>& word_boundaries,
    const Alignment& full_alignment, const PhonemeSequence& predicted);

}  // namespace harf

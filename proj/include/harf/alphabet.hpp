#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "harf/phoneme.hpp"

namespace harf {

enum class GeminateMode {
  kCollapseToSingle,  // marker is dropped, geminate occupies one slot
  kExpandToDouble,    // marker becomes a second copy of the preceding phoneme
};

// Canonical phoneme inventory plus the rules that map raw phonetizer or
// model output into it. Immutable after load; safe to share across threads.
struct PhonemeAlphabet {
  std::set<std::string> inventory;
  std::vector<std::string> positional_suffixes;
  std::set<std::string> silence_tokens;
  GeminateMode geminate_mode = GeminateMode::kExpandToDouble;
  std::string geminate_marker;  // empty = no marker configured
  std::map<std::string, std::string> oov_map;

  bool contains(const std::string& symbol) const {
    return inventory.count(symbol) != 0;
  }

  // Throws InvariantViolation naming the offending entry.
  void validate() const;
};

// Parses a JSON alphabet config. Keys: inventory (array),
// positional_suffixes (array), silence_tokens (array),
// geminate ({mode, marker}), oov_map (object). Only inventory is required.
// Throws ParseError with a line location, or InvariantViolation.
PhonemeAlphabet load_alphabet(const std::string& config_text);
PhonemeAlphabet load_alphabet_file(const std::string& path);

enum class UnknownTokenPolicy {
  kError,  // unmappable token is a hard error
  kDrop,   // unmappable token is dropped and reported
};

// One surviving phoneme together with the raw-input index it came from.
// Geminate expansion copies inherit the marker's index, so a word grouping
// built from raw indices assigns the extra slot to the marker's word.
struct TracedPhoneme {
  Phoneme symbol;
  std::size_t raw_index;
};

struct DroppedToken {
  std::size_t raw_index;
  std::string token;
};

struct TracedNormalization {
  std::vector<TracedPhoneme> phonemes;
  std::vector<DroppedToken> dropped;  // only populated under kDrop

  PhonemeSequence symbols() const;
};

// Normalization pipeline, applied in this order:
//   drop silence -> strip positional suffixes -> resolve geminates -> oov remap.
// Suffix stripping only touches tokens that are not already inventory
// members, which makes the pipeline idempotent on its own output.
TracedNormalization normalize_traced(const std::vector<std::string>& raw_tokens,
                                     const PhonemeAlphabet& alphabet,
                                     UnknownTokenPolicy policy);

// Strict form: throws UnmappableTokenError carrying the token and its
// raw-input index.
PhonemeSequence normalize(const std::vector<std::string>& raw_tokens,
                          const PhonemeAlphabet& alphabet);

// Lenient form: unknown tokens are dropped and returned alongside the result.
std::pair<PhonemeSequence, std::vector<DroppedToken>> normalize_lenient(
    const std::vector<std::string>& raw_tokens, const PhonemeAlphabet& alphabet);

}  // namespace harf

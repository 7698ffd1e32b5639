#include "harf/alphabet.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "harf/errors.hpp"
#include "json.hpp"

namespace harf {

namespace {

using nlohmann::json;

bool has_whitespace(const std::string& s) {
  return std::any_of(s.begin(), s.end(),
                     [](unsigned char c) { return std::isspace(c); });
}

void check_token(const std::string& s, const std::string& role) {
  if (s.empty())
    throw InvariantViolation(role + " contains an empty token");
  if (has_whitespace(s))
    throw InvariantViolation(role + " token '" + s + "' contains whitespace");
}

std::size_t line_of_byte(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i)
    if (text[i] == '\n') ++line;
  return line;
}

std::vector<std::string> string_array(const json& j, const std::string& key) {
  std::vector<std::string> out;
  for (const auto& v : j.at(key)) {
    if (!v.is_string())
      throw ParseError("alphabet config: '" + key +
                       "' must be an array of strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

}  // namespace

void PhonemeAlphabet::validate() const {
  for (const auto& sym : inventory) check_token(sym, "inventory");
  for (const auto& tok : silence_tokens) check_token(tok, "silence_tokens");
  for (const auto& suf : positional_suffixes)
    check_token(suf, "positional_suffixes");

  for (const auto& tok : silence_tokens) {
    if (contains(tok))
      throw InvariantViolation("silence token '" + tok +
                               "' is also an inventory symbol");
  }

  if (!geminate_marker.empty()) {
    check_token(geminate_marker, "geminate marker");
    if (contains(geminate_marker))
      throw InvariantViolation("geminate marker '" + geminate_marker +
                               "' is also an inventory symbol");
    if (silence_tokens.count(geminate_marker))
      throw InvariantViolation("geminate marker '" + geminate_marker +
                               "' is also a silence token");
  }

  for (const auto& [key, value] : oov_map) {
    check_token(key, "oov_map key");
    if (!contains(value))
      throw InvariantViolation("oov_map target '" + value + "' for key '" +
                               key + "' is not in the inventory");
  }

  // Stripping a suffix from an inventory symbol must land back in the
  // inventory; otherwise suffixed raw tokens become ambiguous.
  for (const auto& sym : inventory) {
    for (const auto& suf : positional_suffixes) {
      if (sym.size() > suf.size() &&
          sym.compare(sym.size() - suf.size(), suf.size(), suf) == 0) {
        std::string base = sym.substr(0, sym.size() - suf.size());
        if (!contains(base))
          throw InvariantViolation("inventory symbol '" + sym +
                                   "' minus suffix '" + suf +
                                   "' yields '" + base +
                                   "' which is not in the inventory");
      }
    }
  }
}

PhonemeAlphabet load_alphabet(const std::string& config_text) {
  json doc;
  try {
    doc = json::parse(config_text);
  } catch (const json::parse_error& e) {
    std::size_t line = line_of_byte(config_text, e.byte);
    throw ParseError("alphabet config parse error at line " +
                         std::to_string(line) + ": " + e.what(),
                     line);
  }
  if (!doc.is_object()) throw ParseError("alphabet config must be an object");
  if (!doc.contains("inventory"))
    throw ParseError("alphabet config: missing 'inventory' section");

  PhonemeAlphabet a;
  try {
    for (const auto& sym : string_array(doc, "inventory")) a.inventory.insert(sym);
    if (doc.contains("positional_suffixes"))
      a.positional_suffixes = string_array(doc, "positional_suffixes");
    if (doc.contains("silence_tokens"))
      for (const auto& tok : string_array(doc, "silence_tokens"))
        a.silence_tokens.insert(tok);
    if (doc.contains("geminate") && !doc["geminate"].is_null()) {
      const json& g = doc["geminate"];
      if (g.contains("mode") && !g["mode"].is_null()) {
        std::string mode = g["mode"].get<std::string>();
        if (mode == "collapse-to-single")
          a.geminate_mode = GeminateMode::kCollapseToSingle;
        else if (mode == "expand-to-double")
          a.geminate_mode = GeminateMode::kExpandToDouble;
        else
          throw ParseError("alphabet config: unknown geminate mode '" + mode +
                           "' (expected 'collapse-to-single' or "
                           "'expand-to-double')");
      }
      if (g.contains("marker") && !g["marker"].is_null())
        a.geminate_marker = g["marker"].get<std::string>();
    }
    if (doc.contains("oov_map")) {
      const json& m = doc["oov_map"];
      if (!m.is_object())
        throw ParseError("alphabet config: 'oov_map' must be an object");
      for (auto it = m.begin(); it != m.end(); ++it) {
        if (!it.value().is_string())
          throw ParseError("alphabet config: oov_map value for '" + it.key() +
                           "' must be a string");
        a.oov_map[it.key()] = it.value().get<std::string>();
      }
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("alphabet config: ") + e.what());
  }

  a.validate();
  return a;
}

PhonemeAlphabet load_alphabet_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open alphabet config '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_alphabet(buf.str());
}

PhonemeSequence TracedNormalization::symbols() const {
  PhonemeSequence out;
  out.reserve(phonemes.size());
  for (const auto& p : phonemes) out.push_back(p.symbol);
  return out;
}

namespace {

// Strips the longest matching positional suffix, once. Returns nothing when
// no suffix matches or stripping would leave an empty token.
std::optional<std::string> strip_suffix(const std::string& token,
                                        const PhonemeAlphabet& a) {
  const std::string* best = nullptr;
  for (const auto& suf : a.positional_suffixes) {
    if (token.size() > suf.size() &&
        token.compare(token.size() - suf.size(), suf.size(), suf) == 0) {
      if (!best || suf.size() > best->size()) best = &suf;
    }
  }
  if (!best) return std::nullopt;
  return token.substr(0, token.size() - best->size());
}

}  // namespace

TracedNormalization normalize_traced(const std::vector<std::string>& raw_tokens,
                                     const PhonemeAlphabet& alphabet,
                                     UnknownTokenPolicy policy) {
  TracedNormalization result;
  const bool has_marker = !alphabet.geminate_marker.empty();

  auto reject = [&](const std::string& token, std::size_t raw_index) {
    if (policy == UnknownTokenPolicy::kError)
      throw UnmappableTokenError(token, raw_index);
    result.dropped.push_back({raw_index, token});
  };

  // Stage 1+2: drop silence, strip suffixes from non-inventory tokens.
  std::vector<TracedPhoneme> work;
  work.reserve(raw_tokens.size());
  for (std::size_t i = 0; i < raw_tokens.size(); ++i) {
    const std::string& tok = raw_tokens[i];
    if (alphabet.silence_tokens.count(tok)) continue;
    if (has_marker && tok == alphabet.geminate_marker) {
      work.push_back({tok, i});
      continue;
    }
    if (!alphabet.contains(tok)) {
      if (auto base = strip_suffix(tok, alphabet)) {
        work.push_back({*base, i});
        continue;
      }
    }
    work.push_back({tok, i});
  }

  // Stage 3: resolve geminate markers against the preceding phoneme.
  std::vector<TracedPhoneme> resolved;
  resolved.reserve(work.size() + 4);
  for (const auto& t : work) {
    if (has_marker && t.symbol == alphabet.geminate_marker) {
      if (resolved.empty()) {
        // Marker with nothing to geminate is unprocessable.
        reject(t.symbol, t.raw_index);
        continue;
      }
      if (alphabet.geminate_mode == GeminateMode::kExpandToDouble)
        resolved.push_back({resolved.back().symbol, t.raw_index});
      // collapse-to-single: marker dropped, single slot already present
      continue;
    }
    resolved.push_back(t);
  }

  // Stage 4: oov remap, then final inventory gate. Rejections report the
  // original surface token, not whatever intermediate form we produced.
  for (auto& t : resolved) {
    if (!alphabet.contains(t.symbol)) {
      auto it = alphabet.oov_map.find(t.symbol);
      if (it == alphabet.oov_map.end()) {
        reject(raw_tokens[t.raw_index], t.raw_index);
        continue;
      }
      t.symbol = it->second;
    }
    result.phonemes.push_back(std::move(t));
  }

  return result;
}

PhonemeSequence normalize(const std::vector<std::string>& raw_tokens,
                          const PhonemeAlphabet& alphabet) {
  return normalize_traced(raw_tokens, alphabet, UnknownTokenPolicy::kError)
      .symbols();
}

std::pair<PhonemeSequence, std::vector<DroppedToken>> normalize_lenient(
    const std::vector<std::string>& raw_tokens,
    const PhonemeAlphabet& alphabet) {
  TracedNormalization traced =
      normalize_traced(raw_tokens, alphabet, UnknownTokenPolicy::kDrop);
  return {traced.symbols(), std::move(traced.dropped)};
}

}  // namespace harf

#include "harf/segmentation.hpp"

#include <cmath>

#include "harf/errors.hpp"
#include "http_util.hpp"
#include "httplib.h"
#include "json.hpp"

namespace harf {

using nlohmann::json;

void SegmenterHook::validate() const {
  if (!(timeout_s > 0))
    throw InvariantViolation("segmenter timeout must be positive");
  if (retry_budget < 0)
    throw InvariantViolation("segmenter retry budget must be non-negative");
  if (endpoint.empty())
    throw InvariantViolation("segmenter endpoint is empty");
}

std::vector<WordGroup> segment_by_projection(
    const std::vector<WordBoundary>& word_boundaries,
    const Alignment& full_alignment, const PhonemeSequence& predicted) {
  std::size_t total_ref = 0;
  for (const auto& w : word_boundaries) total_ref += w.ref_phonemes.size();

  const std::size_t aligned_ref =
      full_alignment.match_count + full_alignment.s_count +
      full_alignment.d_count;
  const std::size_t aligned_pred =
      full_alignment.match_count + full_alignment.s_count +
      full_alignment.i_count;
  if (total_ref != aligned_ref)
    throw PartitionError("word boundaries cover " + std::to_string(total_ref) +
                         " reference phonemes but the alignment covers " +
                         std::to_string(aligned_ref));
  if (aligned_pred != predicted.size())
    throw PartitionError("alignment covers " + std::to_string(aligned_pred) +
                         " predicted phonemes but the prediction has " +
                         std::to_string(predicted.size()));
  if (word_boundaries.empty()) {
    if (total_ref == 0 && predicted.empty()) return {};
    throw PartitionError("no word boundaries to attach phonemes to");
  }

  // Map each reference index to its word.
  std::vector<std::size_t> word_of_ref(total_ref);
  {
    std::size_t idx = 0;
    for (std::size_t w = 0; w < word_boundaries.size(); ++w)
      for (std::size_t k = 0; k < word_boundaries[w].ref_phonemes.size(); ++k)
        word_of_ref[idx++] = w;
  }

  std::vector<WordGroup> groups(word_boundaries.size());
  for (std::size_t w = 0; w < word_boundaries.size(); ++w) {
    groups[w].word_text = word_boundaries[w].word_text;
    groups[w].ref_phonemes = word_boundaries[w].ref_phonemes;
  }

  std::size_t current = 0;  // leading insertions land on the first word
  for (const auto& op : full_alignment.ops) {
    if (op.ref_index) current = word_of_ref[*op.ref_index];
    WordGroup& g = groups[current];
    switch (op.kind) {
      case EditKind::kMatch:
        ++g.match_count;
        break;
      case EditKind::kSubstitute:
        ++g.s_count;
        break;
      case EditKind::kDelete:
        ++g.d_count;
        break;
      case EditKind::kInsert:
        ++g.i_count;
        break;
    }
    if (op.pred_index) g.pred_phonemes.push_back(predicted[*op.pred_index]);
  }
  return groups;
}

namespace {

std::size_t span_bound(const json& span, int which, const char* key) {
  const json& v = span[which];
  if (!v.is_number_unsigned())
    throw ValidationError(std::string("segmenter response: ") + key +
                          " bounds must be non-negative integers");
  return v.get<std::size_t>();
}

// Parses and checks the wire response: an ordered array of
// {word_text, ref_span: [b,e), pred_span: [b,e)} tiling both sequences.
std::vector<WordGroup> parse_external_response(
    const std::string& body, const PhonemeSequence& reference,
    const PhonemeSequence& predicted) {
  json doc;
  try {
    doc = json::parse(body);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("segmenter response is not JSON: ") +
                          e.what());
  }
  if (!doc.is_array())
    throw ValidationError("segmenter response must be a JSON array");

  std::vector<WordGroup> groups;
  std::size_t ref_cursor = 0, pred_cursor = 0;
  for (const auto& item : doc) {
    if (!item.is_object() || !item.contains("word_text") ||
        !item.contains("ref_span") || !item.contains("pred_span"))
      throw ValidationError(
          "segmenter response items need word_text, ref_span, pred_span");
    if (!item["word_text"].is_string())
      throw ValidationError("segmenter response: word_text must be a string");
    for (const char* key : {"ref_span", "pred_span"}) {
      if (!item[key].is_array() || item[key].size() != 2)
        throw ValidationError(std::string("segmenter response: ") + key +
                              " must be a [begin, end) pair");
    }

    std::size_t rb = span_bound(item["ref_span"], 0, "ref_span");
    std::size_t re = span_bound(item["ref_span"], 1, "ref_span");
    std::size_t pb = span_bound(item["pred_span"], 0, "pred_span");
    std::size_t pe = span_bound(item["pred_span"], 1, "pred_span");
    if (rb > re || pb > pe)
      throw ValidationError("segmenter response: span begin exceeds end");
    if (rb != ref_cursor)
      throw ValidationError("segmenter response: ref spans must tile the "
                            "reference without gaps or overlaps");
    if (pb != pred_cursor)
      throw ValidationError("segmenter response: pred spans must tile the "
                            "prediction without gaps or overlaps");
    if (re > reference.size() || pe > predicted.size())
      throw ValidationError("segmenter response: span exceeds sequence length");
    ref_cursor = re;
    pred_cursor = pe;

    WordGroup g;
    g.word_text = item["word_text"].get<std::string>();
    g.ref_phonemes.assign(reference.begin() + rb, reference.begin() + re);
    g.pred_phonemes.assign(predicted.begin() + pb, predicted.begin() + pe);
    groups.push_back(std::move(g));
  }
  if (ref_cursor != reference.size())
    throw ValidationError("segmenter response covers " +
                          std::to_string(ref_cursor) + " of " +
                          std::to_string(reference.size()) +
                          " reference phonemes");
  if (pred_cursor != predicted.size())
    throw ValidationError("segmenter response covers " +
                          std::to_string(pred_cursor) + " of " +
                          std::to_string(predicted.size()) +
                          " predicted phonemes");

  // The wire carries no alignment, so each group's counts come from aligning
  // its own slices.
  for (auto& g : groups) {
    Alignment a = align(g.ref_phonemes, g.pred_phonemes);
    g.match_count = a.match_count;
    g.s_count = a.s_count;
    g.d_count = a.d_count;
    g.i_count = a.i_count;
  }
  return groups;
}

}  // namespace

std::vector<WordGroup> segment_external(const SegmenterHook& hook,
                                        const std::string& text,
                                        const PhonemeSequence& reference,
                                        const PhonemeSequence& predicted) {
  hook.validate();
  detail::ParsedUrl url = detail::parse_http_url(hook.endpoint);

  json req = {{"text", text},
              {"ref_phonemes", reference},
              {"pred_phonemes", predicted}};
  const std::string body = req.dump();

  auto attempt = [&]() -> std::string {
    httplib::Client client(url.host, url.port);
    auto secs = static_cast<time_t>(hook.timeout_s);
    auto usecs = static_cast<time_t>((hook.timeout_s - double(secs)) * 1e6);
    client.set_connection_timeout(secs, usecs);
    client.set_read_timeout(secs, usecs);
    client.set_write_timeout(secs, usecs);

    auto res = client.Post(url.path, body, "application/json");
    if (!res)
      throw TransportError("segmenter request to " + hook.endpoint +
                           " failed: " + httplib::to_string(res.error()));
    if (res->status < 200 || res->status >= 300)
      throw TransportError("segmenter at " + hook.endpoint +
                           " answered HTTP " + std::to_string(res->status));
    return res->body;
  };

  std::string response =
      detail::with_retries(1 + hook.retry_budget, attempt);
  return parse_external_response(response, reference, predicted);
}

std::vector<WordGroup> segment_with_fallback(
    const SegmenterHook& hook, const std::string& text,
    const std::vector<WordBoundary>& word_boundaries,
    const Alignment& full_alignment, const PhonemeSequence& predicted) {
  PhonemeSequence reference;
  for (const auto& w : word_boundaries)
    reference.insert(reference.end(), w.ref_phonemes.begin(),
                     w.ref_phonemes.end());
  try {
    return segment_external(hook, text, reference, predicted);
  } catch (const ValidationError&) {
    return segment_by_projection(word_boundaries, full_alignment, predicted);
  }
}

}  // namespace harf

#include "harf/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "harf/errors.hpp"
#include "harf/eval_metrics.hpp"
#include "harf/segmentation.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace harf::cli {

namespace {

std::string fixed(double value, int places) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", places, value);
  return buf;
}

std::string compact(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", value);
  return buf;
}

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string join(const std::vector<std::string>& parts, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += sep;
    out += parts[i];
  }
  return out;
}

// Report filenames keep [A-Za-z0-9._-] of the utterance id; anything else
// becomes '_', and clashes get a numeric suffix in dataset order.
std::string report_name(const std::string& id, std::set<std::string>& used) {
  std::string base;
  for (char c : id) {
    bool safe = std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '.' ||
                c == '_' || c == '-';
    base += safe ? c : '_';
  }
  if (base.empty() || base == "." || base == "..") base = "utt";
  std::string name = base;
  for (int k = 2; !used.insert(name).second; ++k)
    name = base + "-" + std::to_string(k);
  return name;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << content;
  out.flush();
  if (!out) throw Error("failed while writing " + path.string());
}

// Runs fn(0..n-1) on up to `jobs` threads. fn must not throw; slots make
// the result assembly independent of scheduling.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t jobs, Fn&& fn) {
  std::size_t workers = std::max<std::size_t>(1, std::min(jobs, n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1))
        fn(i);
    });
  for (auto& t : pool) t.join();
}

const char* op_name(EditKind kind) {
  switch (kind) {
    case EditKind::kMatch:
      return "match";
    case EditKind::kSubstitute:
      return "substitute";
    case EditKind::kDelete:
      return "delete";
    case EditKind::kInsert:
      return "insert";
  }
  return "?";
}

json weights_json(const ScoreWeights& w) {
  return json{{"w_lcs", w.w_lcs},
              {"w_pron", w.w_pron},
              {"w_acc", w.w_acc},
              {"w_comp", w.w_comp}};
}

std::string weights_comment(const RunConfig& cfg) {
  std::ostringstream out;
  out << "# w_lcs=" << compact(cfg.weights.w_lcs)
      << " w_pron=" << compact(cfg.weights.w_pron)
      << " w_acc=" << compact(cfg.weights.w_acc)
      << " w_comp=" << compact(cfg.weights.w_comp)
      << " alphabet=" << cfg.alphabet_source;
  return out.str();
}

json report_json(const Utterance& utterance, const UtteranceScore& scored,
                 const RunConfig& cfg) {
  const ScoreReport& r = scored.report;
  json j;
  j["id"] = utterance.id;
  j["text"] = utterance.text;
  j["alphabet"] = cfg.alphabet_source;
  j["weights"] = weights_json(cfg.weights);
  j["n_ref"] = r.n_ref;
  j["s"] = r.s;
  j["d"] = r.d;
  j["i"] = r.i;
  j["lcs_ratio"] = r.lcs_ratio;
  j["accuracy"] = r.accuracy;
  j["completeness"] = r.completeness;
  j["pron_score"] = r.pron_score;
  j["harf_score"] = r.harf_score;
  j["clinical_score"] = r.clinical_score;

  json words = json::array();
  for (std::size_t k = 0; k < r.per_word.size(); ++k) {
    const WordScore& w = r.per_word[k];
    words.push_back(json{{"word", w.word_text},
                         {"n_ref", w.n_ref},
                         {"s", w.s},
                         {"d", w.d},
                         {"i", w.i},
                         {"lcs_ratio", w.lcs_ratio},
                         {"accuracy", w.accuracy},
                         {"completeness", w.completeness},
                         {"pron_score", w.pron_score},
                         {"harf_score", w.harf_score},
                         {"clinical_score", w.clinical_score},
                         {"flagged", scored.flagged[k]}});
  }
  j["words"] = std::move(words);

  json ops = json::array();
  for (const EditOp& op : scored.alignment.ops) {
    json jo{{"op", op_name(op.kind)}};
    if (op.ref_index) jo["ref_index"] = *op.ref_index;
    if (op.pred_index) jo["pred_index"] = *op.pred_index;
    ops.push_back(std::move(jo));
  }
  j["alignment"] = std::move(ops);
  return j;
}

}  // namespace

const char* default_alphabet_config() {
  // Buckwalter-style Modern Standard Arabic profile; the same content ships
  // as data/harf_msa.json for users who want to start from a copy.
  return R"({
  "inventory": ["'", "b", "t", "v", "j", "H", "x", "d", "*", "r", "z", "s",
                "$", "S", "D", "T", "Z", "E", "g", "f", "q", "k", "l", "m",
                "n", "h", "w", "y", "a", "u", "i", "aa", "uu", "ii", "ay", "aw"],
  "positional_suffixes": ["_i", "_m", "_f"],
  "silence_tokens": ["SIL", "sil", "sp", "<sil>"],
  "geminate": {"mode": "expand-to-double", "marker": "~"},
  "oov_map": {">": "'", "<": "'", "&": "'", "}": "'", "|": "aa",
              "A": "aa", "Y": "aa", "p": "t"}
}
)";
}

void RunConfig::validate() const {
  weights.validate();
  backend.validate();
  if (jobs < 1) throw InvariantViolation("parallelism must be at least 1");
  if (out_dir.empty())
    throw InvariantViolation("output directory must not be empty");
}

RunConfig make_run_config(const CommonOptions& options, bool need_alphabet) {
  RunConfig cfg;
  if (need_alphabet) {
    std::string path = options.alphabet_path;
    if (path.empty()) {
      if (const char* env = std::getenv("HARF_ALPHABET"); env != nullptr && *env != '\0')
        path = env;
    }
    if (path.empty()) {
      cfg.alphabet = load_alphabet(default_alphabet_config());
      cfg.alphabet_source = "built-in";
    } else {
      cfg.alphabet = load_alphabet_file(path);
      cfg.alphabet_source = path;
    }
  } else {
    cfg.alphabet_source = "unused";
  }

  cfg.weights.w_lcs = options.w_lcs;
  cfg.weights.w_pron = 1.0 - options.w_lcs;
  cfg.weights.w_acc = options.w_acc;
  cfg.weights.w_comp = 1.0 - options.w_acc;

  if (options.backend == "inline") {
    cfg.backend = PredictionBackend::make_inline();
  } else if (options.backend == "http") {
    if (options.endpoint.empty())
      throw InvariantViolation("--backend http requires --endpoint");
    HttpBackendConfig http;
    http.endpoint = options.endpoint;
    cfg.backend = PredictionBackend::make_http(std::move(http));
  } else {
    throw InvariantViolation("unknown backend '" + options.backend + "'");
  }

  if (options.rounding == "integer") {
    cfg.rounding = Rounding::kHalfUpInteger;
  } else if (options.rounding == "none") {
    cfg.rounding = Rounding::kNone;
  } else {
    throw InvariantViolation("unknown rounding mode '" + options.rounding + "'");
  }

  cfg.out_dir = options.out_dir;
  cfg.jobs = options.jobs;
  cfg.strict = options.strict;
  cfg.flag_threshold = options.flag_threshold;
  cfg.validate();
  return cfg;
}

UtteranceScore score_one(const Utterance& utterance,
                         const PhonemeAlphabet& alphabet,
                         const ScoreWeights& weights, double flag_threshold) {
  utterance.validate();
  if (!utterance.pred_tokens)
    throw InvariantViolation("utterance '" + utterance.id +
                             "' has no prediction");

  std::vector<std::string> raw_ref;
  std::vector<std::size_t> word_end;  // exclusive raw index per word
  for (const RefWord& w : utterance.ref_words) {
    raw_ref.insert(raw_ref.end(), w.phonemes.begin(), w.phonemes.end());
    word_end.push_back(raw_ref.size());
  }

  // Normalized phonemes keep their raw index, so cutting the traced stream
  // at each word's raw range rebuilds the word boundaries after silence,
  // suffix and geminate handling moved things around.
  TracedNormalization traced =
      normalize_traced(raw_ref, alphabet, UnknownTokenPolicy::kError);
  std::vector<WordBoundary> boundaries;
  std::size_t t = 0;
  for (std::size_t w = 0; w < utterance.ref_words.size(); ++w) {
    WordBoundary boundary{utterance.ref_words[w].word, {}};
    while (t < traced.phonemes.size() &&
           traced.phonemes[t].raw_index < word_end[w])
      boundary.ref_phonemes.push_back(traced.phonemes[t++].symbol);
    if (boundary.ref_phonemes.empty())
      throw DegenerateInputError("word '" + utterance.ref_words[w].word +
                                 "' normalizes to zero phonemes");
    boundaries.push_back(std::move(boundary));
  }

  PhonemeSequence reference = traced.symbols();
  PhonemeSequence predicted = normalize(*utterance.pred_tokens, alphabet);

  UtteranceScore out;
  out.alignment = align(reference, predicted);
  auto groups = segment_by_projection(boundaries, out.alignment, predicted);
  out.report = score_utterance(reference, predicted, groups, weights);
  out.flagged.reserve(out.report.per_word.size());
  for (const WordScore& w : out.report.per_word)
    out.flagged.push_back(w.harf_score < flag_threshold);
  return out;
}

namespace {

// Per-utterance outcome slot shared by cmd_score / cmd_eval.
template <typename Result>
struct Slot {
  std::string id;
  bool ok = false;
  std::string error;
  Result result{};
  const Utterance* utterance = nullptr;
};

template <typename Result>
std::map<std::string, std::size_t> index_slots(
    const std::vector<Utterance>& utterances, const FetchOutcome& outcome,
    std::vector<Slot<Result>>& slots) {
  slots.resize(utterances.size());
  std::map<std::string, std::size_t> index_of;
  for (std::size_t i = 0; i < utterances.size(); ++i) {
    slots[i].id = utterances[i].id;
    index_of[utterances[i].id] = i;
  }
  for (const FetchFailure& f : outcome.failed)
    slots[index_of.at(f.id)].error = f.message;
  return index_of;
}

}  // namespace

int cmd_score(const std::string& dataset_path, const CommonOptions& options) {
  RunConfig cfg = make_run_config(options);
  std::vector<Utterance> utterances = load_dataset(dataset_path);
  FetchOutcome outcome = fetch_predictions(cfg.backend, utterances, cfg.jobs);

  std::vector<Slot<UtteranceScore>> slots;
  auto index_of = index_slots(utterances, outcome, slots);

  parallel_for(outcome.ready.size(), cfg.jobs, [&](std::size_t k) {
    const Utterance& u = outcome.ready[k];
    Slot<UtteranceScore>& slot = slots[index_of.at(u.id)];
    slot.utterance = &u;
    try {
      slot.result = score_one(u, cfg.alphabet, cfg.weights, cfg.flag_threshold);
      slot.ok = true;
    } catch (const std::exception& e) {
      slot.error = e.what();
    }
  });

  fs::create_directories(fs::path(cfg.out_dir) / "reports");
  std::set<std::string> used_names;
  for (const auto& slot : slots) {
    if (!slot.ok) continue;
    std::string name = report_name(slot.id, used_names);
    fs::path path = fs::path(cfg.out_dir) / "reports" / (name + ".json");
    write_file(path, report_json(*slot.utterance, slot.result, cfg).dump(2) + "\n");
  }

  std::ostringstream csv;
  csv << weights_comment(cfg) << "\n";
  csv << "id,harf_score,clinical_score,n,s,d,i,status,error\n";
  std::size_t failed = 0;
  for (const auto& slot : slots) {
    if (slot.ok) {
      const ScoreReport& r = slot.result.report;
      csv << csv_field(slot.id) << ',' << fixed(r.harf_score, 2) << ','
          << fixed(r.clinical_score, 2) << ',' << r.n_ref << ',' << r.s << ','
          << r.d << ',' << r.i << ",ok,\n";
    } else {
      ++failed;
      csv << csv_field(slot.id) << ",,,,,,,failed," << csv_field(slot.error)
          << "\n";
    }
  }
  write_file(fs::path(cfg.out_dir) / "summary.csv", csv.str());

  std::cout << "scored " << (slots.size() - failed) << " of " << slots.size()
            << " utterances -> " << cfg.out_dir << "\n";
  if (failed > 0)
    std::cerr << failed << " utterance(s) failed; see summary.csv\n";
  return failed > 0 && cfg.strict ? 1 : 0;
}

int cmd_eval(const std::string& dataset_path, const CommonOptions& options) {
  RunConfig cfg = make_run_config(options);
  std::vector<Utterance> utterances = load_dataset(dataset_path);
  FetchOutcome outcome = fetch_predictions(cfg.backend, utterances, cfg.jobs);

  std::vector<Slot<EvalRecord>> slots;
  auto index_of = index_slots(utterances, outcome, slots);

  parallel_for(outcome.ready.size(), cfg.jobs, [&](std::size_t k) {
    const Utterance& u = outcome.ready[k];
    Slot<EvalRecord>& slot = slots[index_of.at(u.id)];
    slot.utterance = &u;
    try {
      u.validate();
      std::vector<std::string> raw_ref;
      for (const RefWord& w : u.ref_words)
        raw_ref.insert(raw_ref.end(), w.phonemes.begin(), w.phonemes.end());
      PhonemeSequence reference = normalize(raw_ref, cfg.alphabet);
      PhonemeSequence predicted = normalize(*u.pred_tokens, cfg.alphabet);
      Alignment a = align(reference, predicted);
      EvalRecord record;
      record.utterance_id = u.id;
      record.n_ref = reference.size();
      record.s = a.s_count;
      record.d = a.d_count;
      record.i = a.i_count;
      record.audio_duration_s = u.audio_duration_s;
      record.inference_time_s = u.inference_time_s;
      record.validate();
      slot.result = std::move(record);
      slot.ok = true;
    } catch (const std::exception& e) {
      slot.error = e.what();
    }
  });

  std::vector<EvalRecord> records;
  std::size_t failed = 0;
  for (const auto& slot : slots) {
    if (slot.ok)
      records.push_back(slot.result);
    else
      ++failed;
  }
  if (records.empty()) {
    std::cerr << "error: no utterance could be evaluated\n";
    return 2;
  }

  EvalSummary summary = summarize(records);

  fs::create_directories(cfg.out_dir);
  std::ostringstream csv;
  csv << "# alphabet=" << cfg.alphabet_source << "\n";
  csv << "id,n_ref,s,d,i,per,audio_duration_s,inference_time_s,rtf,status,"
         "error\n";
  for (const auto& slot : slots) {
    if (slot.ok) {
      const EvalRecord& r = slot.result;
      csv << csv_field(slot.id) << ',' << r.n_ref << ',' << r.s << ',' << r.d
          << ',' << r.i << ',';
      if (r.n_ref > 0) csv << fixed(utterance_per(r), 2);
      csv << ',';
      if (r.audio_duration_s) csv << compact(*r.audio_duration_s);
      csv << ',';
      if (r.inference_time_s) csv << compact(*r.inference_time_s);
      csv << ',';
      if (r.audio_duration_s && r.inference_time_s)
        csv << fixed(utterance_rtf(r), 3);
      csv << ",ok,\n";
    } else {
      csv << csv_field(slot.id) << ",,,,,,,,,failed," << csv_field(slot.error)
          << "\n";
    }
  }
  write_file(fs::path(cfg.out_dir) / "eval.csv", csv.str());

  json j;
  j["alphabet"] = cfg.alphabet_source;
  j["per"] = summary.per;
  if (summary.per_macro)
    j["per_macro"] = *summary.per_macro;
  else
    j["per_macro"] = nullptr;
  if (summary.rtf)
    j["rtf"] = *summary.rtf;
  else
    j["rtf"] = nullptr;
  j["utterance_count"] = summary.utterance_count;
  j["total_ref_phonemes"] = summary.total_ref_phonemes;
  j["total_audio_s"] = summary.total_audio_s;
  j["total_inference_s"] = summary.total_inference_s;
  j["missing_timing_ids"] = summary.missing_timing_ids;
  json failures = json::array();
  for (const auto& slot : slots)
    if (!slot.ok) failures.push_back(json{{"id", slot.id}, {"error", slot.error}});
  j["failed"] = std::move(failures);
  write_file(fs::path(cfg.out_dir) / "eval_summary.json", j.dump(2) + "\n");

  std::cout << "PER: " << fixed(summary.per, 2) << "%\n";
  if (summary.rtf) {
    std::cout << "RTF: " << fixed(*summary.rtf, 3) << "\n";
  } else {
    std::cout << "RTF: unavailable\n";
    std::cerr << "warning: " << summary.missing_timing_ids.size()
              << " utterance(s) lack timing; RTF unavailable\n";
  }
  std::cout << "evaluated " << records.size() << " of " << slots.size()
            << " utterances -> " << cfg.out_dir << "\n";
  if (failed > 0)
    std::cerr << failed << " utterance(s) failed; see eval.csv\n";
  return failed > 0 && cfg.strict ? 1 : 0;
}

namespace {

struct LoadedRaterCsv {
  RaterMatrix matrix;
  // Columns whose rater_id carried the "sys:" prefix, in file order.
  std::vector<std::pair<std::string, std::vector<double>>> systems;
};

std::string list_ids(const std::vector<std::string>& ids) {
  std::string out;
  for (std::size_t i = 0; i < ids.size() && i < 8; ++i) {
    if (i > 0) out += ", ";
    out += ids[i];
  }
  if (ids.size() > 8) out += ", ...";
  return out;
}

std::string trimmed(const std::string& line) {
  std::size_t begin = line.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  std::size_t end = line.find_last_not_of(" \t\r");
  return line.substr(begin, end - begin + 1);
}

double parse_score(const std::string& text, std::size_t line_no) {
  std::size_t consumed = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &consumed);
  } catch (const std::exception&) {
    throw ParseError("rater CSV line " + std::to_string(line_no) +
                         ": '" + text + "' is not a number",
                     line_no);
  }
  if (consumed != text.size())
    throw ParseError("rater CSV line " + std::to_string(line_no) + ": '" +
                         text + "' is not a number",
                     line_no);
  return value;
}

LoadedRaterCsv load_rater_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open rater CSV: " + path);

  struct RawRow {
    std::size_t line;
    std::string subject;
    std::string column;  // rater id, or system name after the sys: prefix
    double score;
  };
  std::vector<RawRow> rater_rows;
  std::vector<RawRow> system_rows;

  std::string line;
  std::size_t line_no = 0;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    std::string row = trimmed(line);
    if (row.empty()) continue;
    if (!saw_header) {
      if (row != "subject_id,rater_id,score")
        throw ParseError(
            "rater CSV must start with header 'subject_id,rater_id,score'",
            line_no);
      saw_header = true;
      continue;
    }
    std::size_t c1 = row.find(',');
    std::size_t c2 = c1 == std::string::npos ? c1 : row.find(',', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos ||
        row.find(',', c2 + 1) != std::string::npos)
      throw ParseError("rater CSV line " + std::to_string(line_no) +
                           ": expected exactly 3 comma-separated fields",
                       line_no);
    RawRow raw;
    raw.line = line_no;
    raw.subject = trimmed(row.substr(0, c1));
    std::string rater = trimmed(row.substr(c1 + 1, c2 - c1 - 1));
    raw.score = parse_score(trimmed(row.substr(c2 + 1)), line_no);
    if (raw.subject.empty())
      throw SchemaError("rater CSV line " + std::to_string(line_no) +
                        ": empty subject_id");
    if (rater.empty())
      throw SchemaError("rater CSV line " + std::to_string(line_no) +
                        ": empty rater_id");
    if (rater.rfind("sys:", 0) == 0) {
      raw.column = rater.substr(4);
      if (raw.column.empty())
        throw SchemaError("rater CSV line " + std::to_string(line_no) +
                          ": empty system name after 'sys:'");
      system_rows.push_back(std::move(raw));
    } else {
      raw.column = rater;
      rater_rows.push_back(std::move(raw));
    }
  }
  if (!saw_header) throw ParseError("rater CSV is empty", 0);
  if (rater_rows.empty())
    throw SchemaError("rater CSV contains no rater rows");

  LoadedRaterCsv out;
  std::map<std::string, std::size_t> subject_index;
  std::map<std::string, std::size_t> rater_index;
  for (const RawRow& r : rater_rows) {
    if (subject_index.emplace(r.subject, out.matrix.subject_ids.size()).second)
      out.matrix.subject_ids.push_back(r.subject);
    if (rater_index.emplace(r.column, out.matrix.rater_ids.size()).second)
      out.matrix.rater_ids.push_back(r.column);
  }

  const std::size_t n = out.matrix.subject_ids.size();
  const std::size_t k = out.matrix.rater_ids.size();
  out.matrix.scores.assign(n, std::vector<double>(k, 0.0));
  std::vector<std::vector<bool>> filled(n, std::vector<bool>(k, false));
  for (const RawRow& r : rater_rows) {
    std::size_t si = subject_index.at(r.subject);
    std::size_t ri = rater_index.at(r.column);
    if (filled[si][ri])
      throw SchemaError("rater CSV line " + std::to_string(r.line) +
                        ": duplicate score for subject '" + r.subject +
                        "' from rater '" + r.column + "'");
    filled[si][ri] = true;
    out.matrix.scores[si][ri] = r.score;
  }
  std::size_t missing = 0;
  std::string first_missing;
  for (std::size_t si = 0; si < n; ++si)
    for (std::size_t ri = 0; ri < k; ++ri)
      if (!filled[si][ri]) {
        ++missing;
        if (first_missing.empty())
          first_missing = "subject '" + out.matrix.subject_ids[si] +
                          "' from rater '" + out.matrix.rater_ids[ri] + "'";
      }
  if (missing > 0)
    throw SchemaError("rater CSV incomplete: " + std::to_string(missing) +
                      " missing cell(s), first is " + first_missing);
  out.matrix.validate();

  // Align each sys: column with the subject order of the rater grid.
  std::vector<std::string> sys_names;
  std::map<std::string, std::map<std::string, RawRow>> sys_cells;
  for (const RawRow& r : system_rows) {
    if (sys_cells.find(r.column) == sys_cells.end())
      sys_names.push_back(r.column);
    auto [it, inserted] = sys_cells[r.column].emplace(r.subject, r);
    if (!inserted)
      throw SchemaError("rater CSV line " + std::to_string(r.line) +
                        ": duplicate score for subject '" + r.subject +
                        "' from system '" + r.column + "'");
  }
  for (const std::string& name : sys_names) {
    const auto& cells = sys_cells.at(name);
    std::vector<double> scores;
    std::vector<std::string> missing_ids;
    for (const std::string& subject : out.matrix.subject_ids) {
      auto it = cells.find(subject);
      if (it == cells.end())
        missing_ids.push_back(subject);
      else
        scores.push_back(it->second.score);
    }
    std::size_t extra = cells.size() + missing_ids.size() - n;
    if (!missing_ids.empty() || extra > 0)
      throw SubjectMismatchError(
          "system '" + name + "' does not cover the rated subjects (" +
              std::to_string(missing_ids.size()) + " missing: " +
              list_ids(missing_ids) + "; " + std::to_string(extra) +
              " unknown)",
          missing_ids);
    out.systems.emplace_back(name, std::move(scores));
  }
  return out;
}

// Reads clinical scores out of score-report JSONs (a single file or every
// *.json in a directory) and aligns them with the rated subjects.
std::vector<double> load_system_reports(
    const std::string& name, const std::string& path,
    const std::vector<std::string>& subjects) {
  std::vector<fs::path> files;
  if (fs::is_directory(path)) {
    for (const auto& entry : fs::directory_iterator(path))
      if (entry.is_regular_file() && entry.path().extension() == ".json")
        files.push_back(entry.path());
    std::sort(files.begin(), files.end());
  } else if (fs::exists(path)) {
    files.push_back(path);
  } else {
    throw Error("system '" + name + "': no such file or directory: " + path);
  }
  if (files.empty())
    throw SchemaError("system '" + name + "': no report JSONs in " + path);

  std::map<std::string, double> score_of;
  for (const fs::path& file : files) {
    std::ifstream in(file);
    if (!in) throw Error("cannot open report: " + file.string());
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded())
      throw ParseError("report " + file.string() + " is not valid JSON");
    if (!j.is_object() || !j.contains("id") || !j["id"].is_string() ||
        !j.contains("clinical_score") || !j["clinical_score"].is_number())
      throw SchemaError("report " + file.string() +
                        " lacks string 'id' and numeric 'clinical_score'");
    std::string id = j["id"].get<std::string>();
    if (!score_of.emplace(id, j["clinical_score"].get<double>()).second)
      throw SchemaError("system '" + name + "': duplicate report for id '" +
                        id + "'");
  }

  std::vector<double> scores;
  std::vector<std::string> missing_ids;
  for (const std::string& subject : subjects) {
    auto it = score_of.find(subject);
    if (it == score_of.end())
      missing_ids.push_back(subject);
    else
      scores.push_back(it->second);
  }
  std::size_t extra = score_of.size() + missing_ids.size() - subjects.size();
  if (!missing_ids.empty() || extra > 0)
    throw SubjectMismatchError(
        "system '" + name + "' does not cover the rated subjects (" +
            std::to_string(missing_ids.size()) + " missing: " +
            list_ids(missing_ids) + "; " + std::to_string(extra) +
            " unknown)",
        missing_ids);
  return scores;
}

std::string opt_cell(const std::optional<double>& value, int places) {
  return value ? fixed(*value, places) : std::string("undefined");
}

json opt_json(const std::optional<double>& value) {
  return value ? json(*value) : json(nullptr);
}

}  // namespace

int cmd_agree(const std::string& rater_csv_path,
              const std::vector<std::string>& system_specs,
              const CommonOptions& options) {
  RunConfig cfg = make_run_config(options, /*need_alphabet=*/false);

  LoadedRaterCsv loaded = load_rater_csv(rater_csv_path);
  auto systems = loaded.systems;
  for (const std::string& spec : system_specs) {
    std::size_t eq = spec.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == spec.size())
      throw InvariantViolation("--system expects name=path, got '" + spec +
                               "'");
    std::string name = spec.substr(0, eq);
    std::string path = spec.substr(eq + 1);
    systems.emplace_back(
        name, load_system_reports(name, path, loaded.matrix.subject_ids));
  }

  if (loaded.matrix.subject_ids.size() < 2)
    throw DomainError("agreement statistics need at least 2 subjects");

  std::vector<AgreementRow> rows =
      pairwise_report(loaded.matrix, systems, cfg.rounding);

  // The same pairs in the same order, with their score vectors, for the
  // per-sample disagreement dump.
  struct PairVectors {
    std::vector<double> a;
    std::vector<double> b;
  };
  std::vector<PairVectors> vectors;
  const RaterMatrix& m = loaded.matrix;
  for (std::size_t a = 0; a < m.rater_ids.size(); ++a)
    for (std::size_t b = a + 1; b < m.rater_ids.size(); ++b)
      vectors.push_back({m.column(a), m.column(b)});
  for (std::size_t r = 0; r < m.rater_ids.size(); ++r)
    for (const auto& [id, scores] : systems)
      vectors.push_back({scores, m.column(r)});
  auto mean = m.mean_rater();
  for (const auto& [id, scores] : systems) vectors.push_back({scores, mean});
  if (vectors.size() != rows.size())
    throw InvariantViolation("agreement pair enumeration out of sync");

  const char* rounding_name =
      cfg.rounding == Rounding::kHalfUpInteger ? "integer" : "none";

  std::ostringstream csv;
  csv << "# rounding=" << rounding_name << "\n";
  csv << "group,a,b,pcc,scc,icc_2_1,mae,rmse,exact_pct,within1_pct\n";
  for (const AgreementRow& row : rows) {
    csv << csv_field(row.group) << ',' << csv_field(row.a) << ','
        << csv_field(row.b) << ',' << opt_cell(row.pcc, 3) << ','
        << opt_cell(row.scc, 3) << ',' << opt_cell(row.icc, 3) << ','
        << fixed(row.mae, 2) << ',' << fixed(row.rmse, 2) << ','
        << fixed(row.exact_pct, 1) << ',' << fixed(row.within1_pct, 1) << "\n";
  }
  fs::create_directories(cfg.out_dir);
  write_file(fs::path(cfg.out_dir) / "agreement.csv", csv.str());

  json j;
  j["rounding"] = rounding_name;
  json jrows = json::array();
  for (const AgreementRow& row : rows)
    jrows.push_back(json{{"group", row.group},
                         {"a", row.a},
                         {"b", row.b},
                         {"pcc", opt_json(row.pcc)},
                         {"scc", opt_json(row.scc)},
                         {"icc_2_1", opt_json(row.icc)},
                         {"mae", row.mae},
                         {"rmse", row.rmse},
                         {"exact_pct", row.exact_pct},
                         {"within1_pct", row.within1_pct}});
  j["rows"] = std::move(jrows);
  write_file(fs::path(cfg.out_dir) / "agreement.json", j.dump(2) + "\n");

  std::ostringstream dis;
  dis << "group,a,b,subject_id,score_a,score_b,diff\n";
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t s = 0; s < m.subject_ids.size(); ++s)
      dis << csv_field(rows[i].group) << ',' << csv_field(rows[i].a) << ','
          << csv_field(rows[i].b) << ',' << csv_field(m.subject_ids[s]) << ','
          << compact(vectors[i].a[s]) << ',' << compact(vectors[i].b[s]) << ','
          << compact(vectors[i].a[s] - vectors[i].b[s]) << "\n";
  write_file(fs::path(cfg.out_dir) / "disagreement.csv", dis.str());

  std::size_t group_w = 5, a_w = 1, b_w = 1;
  for (const AgreementRow& row : rows) {
    group_w = std::max(group_w, row.group.size());
    a_w = std::max(a_w, row.a.size());
    b_w = std::max(b_w, row.b.size());
  }
  std::ostringstream table;
  table << std::left << std::setw(static_cast<int>(group_w) + 2) << "group"
        << std::setw(static_cast<int>(a_w) + 2) << "a"
        << std::setw(static_cast<int>(b_w) + 2) << "b" << std::right
        << std::setw(10) << "pcc" << std::setw(10) << "scc" << std::setw(10)
        << "icc_2_1" << std::setw(8) << "mae" << std::setw(8) << "rmse"
        << std::setw(8) << "exact" << std::setw(9) << "within1" << "\n";
  for (const AgreementRow& row : rows) {
    table << std::left << std::setw(static_cast<int>(group_w) + 2) << row.group
          << std::setw(static_cast<int>(a_w) + 2) << row.a
          << std::setw(static_cast<int>(b_w) + 2) << row.b << std::right
          << std::setw(10) << opt_cell(row.pcc, 3) << std::setw(10)
          << opt_cell(row.scc, 3) << std::setw(10) << opt_cell(row.icc, 3)
          << std::setw(8) << fixed(row.mae, 2) << std::setw(8)
          << fixed(row.rmse, 2) << std::setw(8) << fixed(row.exact_pct, 1)
          << std::setw(9) << fixed(row.within1_pct, 1) << "\n";
  }
  std::cout << table.str();
  std::cout << rows.size() << " pair(s) over " << m.subject_ids.size()
            << " subject(s) -> " << cfg.out_dir << "\n";
  return 0;
}

int cmd_normalize(const std::vector<std::string>& tokens, bool lenient,
                  const CommonOptions& options) {
  RunConfig cfg = make_run_config(options);
  if (lenient) {
    auto [phonemes, dropped] = normalize_lenient(tokens, cfg.alphabet);
    for (const DroppedToken& d : dropped)
      std::cerr << "dropped unmappable token '" << d.token << "' at index "
                << d.raw_index << "\n";
    std::cout << join(phonemes, " ") << "\n";
  } else {
    std::cout << join(normalize(tokens, cfg.alphabet), " ") << "\n";
  }
  return 0;
}

int cmd_align(const std::vector<std::string>& ref_tokens,
              const std::vector<std::string>& pred_tokens) {
  Alignment a = align(ref_tokens, pred_tokens);
  std::cout << "ref:  " << join(ref_tokens, " ") << "\n";
  std::cout << "pred: " << join(pred_tokens, " ") << "\n";
  std::cout << "distance: " << a.distance() << " (S=" << a.s_count
            << " D=" << a.d_count << " I=" << a.i_count
            << " matches=" << a.match_count << ")\n";
  for (const EditOp& op : a.ops) {
    std::ostringstream ref_part, pred_part;
    if (op.ref_index)
      ref_part << "ref[" << *op.ref_index << "]='" << ref_tokens[*op.ref_index]
               << "'";
    if (op.pred_index)
      pred_part << "pred[" << *op.pred_index << "]='"
                << pred_tokens[*op.pred_index] << "'";
    std::cout << "  " << std::left << std::setw(11) << op_name(op.kind)
              << std::setw(18) << ref_part.str() << pred_part.str() << "\n";
  }
  return 0;
}

}  // namespace harf::cli

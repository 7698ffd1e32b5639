// Acceptance gate: one PASS/FAIL line per criterion, exit code = number of
// failed criteria. Every numeric check compares the library against an
// independently coded oracle or a hand-derived fixture.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "json.hpp"

#include "harf/agreement.hpp"
#include "harf/alignment.hpp"
#include "harf/alphabet.hpp"
#include "harf/cli.hpp"
#include "harf/errors.hpp"
#include "harf/eval_metrics.hpp"
#include "harf/scoring.hpp"
#include "harf/segmentation.hpp"

using namespace harf;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Criterion {
  bool ok = true;
  std::string detail;

  void expect(bool condition, const std::string& what) {
    if (!condition && ok) {
      ok = false;
      detail = what;
    }
  }
};

// ---------------------------------------------------------------- helpers

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

fs::path fresh_dir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / ("harf_acceptance_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_text(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

struct CliResult {
  int exit_code = -1;
  std::string out;
};

CliResult run_cli(const std::string& args, const fs::path& work) {
  fs::path out_file = work / "stdout.txt";
  std::string cmd = std::string(HARF_CLI_BIN) + " " + args + " > " +
                    out_file.string() + " 2> " + (work / "stderr.txt").string();
  int raw = std::system(cmd.c_str());
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, slurp(out_file)};
}

// ------------------------------------------------- independent oracles

std::size_t edit_distance_oracle(const PhonemeSequence& a,
                                 const PhonemeSequence& b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 0; i < a.size(); ++i) {
    cur[0] = i + 1;
    for (std::size_t j = 0; j < b.size(); ++j)
      cur[j + 1] = std::min({prev[j] + (a[i] == b[j] ? 0 : 1), prev[j + 1] + 1,
                             cur[j] + 1});
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

// Maximum-size subset of `a` that is also a subsequence of `b`, by trying
// every subset of positions of `a`.
std::size_t lcs_bruteforce(const PhonemeSequence& a, const PhonemeSequence& b) {
  std::size_t best = 0;
  for (unsigned mask = 0; mask < (1u << a.size()); ++mask) {
    std::size_t j = 0, picked = 0;
    bool embeds = true;
    for (std::size_t i = 0; i < a.size() && embeds; ++i) {
      if (!((mask >> i) & 1u)) continue;
      ++picked;
      while (j < b.size() && b[j] != a[i]) ++j;
      if (j == b.size())
        embeds = false;
      else
        ++j;
    }
    if (embeds) best = std::max(best, picked);
  }
  return best;
}

double pearson_oracle(const std::vector<double>& x,
                      const std::vector<double>& y) {
  const std::size_t n = x.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double num = 0.0, dx2 = 0.0, dy2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    num += (x[i] - mx) * (y[i] - my);
    dx2 += (x[i] - mx) * (x[i] - mx);
    dy2 += (y[i] - my) * (y[i] - my);
  }
  return num / (std::sqrt(dx2) * std::sqrt(dy2));
}

// 1-based midranks by direct counting.
std::vector<double> midranks_oracle(const std::vector<double>& v) {
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    std::size_t less = 0, equal = 0;
    for (std::size_t j = 0; j < v.size(); ++j) {
      if (v[j] < v[i]) ++less;
      if (v[j] == v[i]) ++equal;  // includes i itself
    }
    ranks[i] = static_cast<double>(less) +
               (1.0 + static_cast<double>(equal)) / 2.0;
  }
  return ranks;
}

// ICC(2,1) through the classic sum-of-squares decomposition
// SSE = SST - SSR - SSC, a different route than the production code.
double icc_anova_oracle(const std::vector<std::vector<double>>& grid) {
  const std::size_t n = grid.size();
  const std::size_t k = grid[0].size();
  double grand = 0.0;
  for (const auto& row : grid)
    for (double v : row) grand += v;
  grand /= static_cast<double>(n * k);

  std::vector<double> row_mean(n, 0.0), col_mean(k, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      row_mean[i] += grid[i][j];
      col_mean[j] += grid[i][j];
    }
    row_mean[i] /= static_cast<double>(k);
  }
  for (std::size_t j = 0; j < k; ++j) col_mean[j] /= static_cast<double>(n);

  double sst = 0.0, ssr = 0.0, ssc = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < k; ++j)
      sst += (grid[i][j] - grand) * (grid[i][j] - grand);
  for (std::size_t i = 0; i < n; ++i)
    ssr += (row_mean[i] - grand) * (row_mean[i] - grand);
  ssr *= static_cast<double>(k);
  for (std::size_t j = 0; j < k; ++j)
    ssc += (col_mean[j] - grand) * (col_mean[j] - grand);
  ssc *= static_cast<double>(n);
  double sse = sst - ssr - ssc;

  double msr = ssr / static_cast<double>(n - 1);
  double msc = ssc / static_cast<double>(k - 1);
  double mse = sse / static_cast<double>((n - 1) * (k - 1));
  double kd = static_cast<double>(k);
  double nd = static_cast<double>(n);
  return (msr - mse) / (msr + (kd - 1.0) * mse + (kd / nd) * (msc - mse));
}

// ------------------------------------------------------------- criteria

Criterion criterion_alignment_oracle() {
  Criterion c;
  auto start = std::chrono::steady_clock::now();

  const std::vector<Phoneme> symbols = {"a", "b", "c"};
  std::vector<PhonemeSequence> all{{}};
  std::size_t begin = 0;
  for (int len = 1; len <= 6; ++len) {
    std::size_t end = all.size();
    for (std::size_t i = begin; i < end; ++i)
      for (const Phoneme& s : symbols) {
        PhonemeSequence next = all[i];
        next.push_back(s);
        all.push_back(std::move(next));
      }
    begin = end;
  }
  // 1 + 3 + 9 + ... + 729 sequences over {a,b,c}
  c.expect(all.size() == 1093,
           "sequence enumeration produced " + std::to_string(all.size()));

  for (std::size_t i = 0; i < all.size() && c.ok; ++i) {
    for (std::size_t j = 0; j < all.size(); ++j) {
      Alignment al = align(all[i], all[j]);
      std::size_t claimed = al.s_count + al.d_count + al.i_count;
      std::size_t expected = edit_distance_oracle(all[i], all[j]);
      if (claimed != expected) {
        c.expect(false, "edit distance mismatch at pair (" +
                            std::to_string(i) + "," + std::to_string(j) +
                            "): got " + std::to_string(claimed) +
                            ", oracle " + std::to_string(expected));
        break;
      }
      std::size_t lcs = lcs_length(all[i], all[j]);
      std::size_t brute = lcs_bruteforce(all[i], all[j]);
      if (lcs != brute) {
        c.expect(false, "lcs mismatch at pair (" + std::to_string(i) + "," +
                            std::to_string(j) + "): got " +
                            std::to_string(lcs) + ", oracle " +
                            std::to_string(brute));
        break;
      }
    }
  }

  double elapsed = std::chrono::duration<double>(
                       std::chrono::steady_clock::now() - start)
                       .count();
  c.expect(elapsed < 60.0,
           "exhaustive sweep took " + fmt(elapsed) + "s (limit 60s)");
  return c;
}

Criterion criterion_scoring_formulas() {
  Criterion c;
  const double kTol = 1e-12;

  // Hand-derived worked example: n=5, S=1, D=1, I=0, LCS=3.
  PhonemeSequence ref = {"a", "b", "c", "d", "e"};
  PhonemeSequence pred = {"a", "x", "c", "d"};
  Alignment al = align(ref, pred);
  c.expect(al.s_count == 1 && al.d_count == 1 && al.i_count == 0,
           "worked example alignment gave S=" + std::to_string(al.s_count) +
               " D=" + std::to_string(al.d_count) +
               " I=" + std::to_string(al.i_count));
  c.expect(lcs_length(ref, pred) == 3, "worked example LCS is not 3");

  double acc = accuracy(5, 1, 1, 0);
  double comp = completeness(5, 1);
  double lcsr = lcs_ratio(ref, pred);
  double pron = pron_score(acc, comp);
  double harf = harf_score(lcsr, pron);
  double clinical = to_clinical(harf);
  c.expect(std::fabs(acc - 60.0) <= kTol, "accuracy " + fmt(acc));
  c.expect(std::fabs(comp - 80.0) <= kTol, "completeness " + fmt(comp));
  c.expect(std::fabs(lcsr - 60.0) <= kTol, "lcs_ratio " + fmt(lcsr));
  c.expect(std::fabs(pron - 68.0) <= kTol, "pron_score " + fmt(pron));
  c.expect(std::fabs(harf - 63.2) <= kTol, "harf_score " + fmt(harf));
  c.expect(std::fabs(clinical - 3.16) <= kTol, "clinical " + fmt(clinical));

  // Randomized properties: perfect-iff-equal and accuracy <= completeness.
  std::mt19937 rng(20260202);
  const std::vector<Phoneme> symbols = {"a", "b", "c"};
  std::uniform_int_distribution<std::size_t> ref_len(1, 8);
  std::uniform_int_distribution<std::size_t> pred_len(0, 8);
  std::uniform_int_distribution<std::size_t> pick(0, symbols.size() - 1);
  for (int iter = 0; iter < 10000 && c.ok; ++iter) {
    PhonemeSequence r(ref_len(rng)), p(pred_len(rng));
    for (auto& s : r) s = symbols[pick(rng)];
    for (auto& s : p) s = symbols[pick(rng)];

    Alignment a = align(r, p);
    double ac = accuracy(r.size(), a.s_count, a.d_count, a.i_count);
    double co = completeness(r.size(), a.d_count);
    c.expect(ac <= co, "iteration " + std::to_string(iter) + ": accuracy " +
                           fmt(ac) + " > completeness " + fmt(co));

    double h = harf_score(lcs_ratio(r, p), pron_score(ac, co));
    double cl = to_clinical(h);
    if (r == p)
      c.expect(h == 100.0 && cl == 5.0,
               "iteration " + std::to_string(iter) +
                   ": equal sequences scored " + fmt(h));
    else
      c.expect(h < 100.0, "iteration " + std::to_string(iter) +
                              ": unequal sequences scored " + fmt(h));
  }
  return c;
}

Criterion criterion_agreement_oracle() {
  Criterion c;
  std::mt19937 rng(20260303);
  std::uniform_real_distribution<double> score(0.0, 5.0);

  // ICC(2,1) against the ANOVA decomposition on 100 random 6x3 grids.
  for (int iter = 0; iter < 100 && c.ok; ++iter) {
    std::vector<std::vector<double>> grid(6, std::vector<double>(3));
    for (auto& row : grid)
      for (double& v : row) v = score(rng);
    double got = icc_2_1(grid);
    double want = icc_anova_oracle(grid);
    c.expect(std::fabs(got - want) <= 1e-9,
             "icc grid " + std::to_string(iter) + ": got " + fmt(got) +
                 ", oracle " + fmt(want));
  }

  // Correlations against definitional computations, ties included.
  std::uniform_int_distribution<std::size_t> len(3, 40);
  std::uniform_int_distribution<int> small(0, 5);
  for (int iter = 0; iter < 200 && c.ok; ++iter) {
    std::size_t n = len(rng);
    std::vector<double> x(n), y(n);
    bool integer_case = iter % 2 == 0;
    do {
      for (std::size_t i = 0; i < n; ++i) {
        x[i] = integer_case ? static_cast<double>(small(rng)) : score(rng);
        y[i] = integer_case ? static_cast<double>(small(rng)) : score(rng);
      }
    } while (std::equal(x.begin() + 1, x.end(), x.begin()) ||
             std::equal(y.begin() + 1, y.end(), y.begin()));

    double p_got = pearson(x, y);
    double p_want = pearson_oracle(x, y);
    c.expect(std::fabs(p_got - p_want) <= 1e-12,
             "pearson case " + std::to_string(iter) + ": got " + fmt(p_got) +
                 ", oracle " + fmt(p_want));

    double s_got = spearman(x, y);
    double s_want = pearson_oracle(midranks_oracle(x), midranks_oracle(y));
    c.expect(std::fabs(s_got - s_want) <= 1e-12,
             "spearman case " + std::to_string(iter) + ": got " + fmt(s_got) +
                 ", oracle " + fmt(s_want));
  }

  // Constant offset: perfect linear correlation, imperfect absolute
  // agreement.
  std::vector<double> base = {1, 4, 2, 5, 3, 0, 4, 1, 5, 2, 3, 0};
  std::vector<double> shifted(base);
  for (double& v : shifted) v += 1.0;
  double pcc = pearson(base, shifted);
  c.expect(std::fabs(pcc - 1.0) <= 1e-12, "offset PCC " + fmt(pcc));
  std::vector<std::vector<double>> offset_grid;
  for (std::size_t i = 0; i < base.size(); ++i)
    offset_grid.push_back({base[i], shifted[i]});
  double icc = icc_2_1(offset_grid);
  c.expect(icc < 1.0 && 1.0 - icc > 1e-9, "offset ICC " + fmt(icc));
  return c;
}

Criterion criterion_agree_cli_shape() {
  Criterion c;
  fs::path dir = fresh_dir("agree");

  std::mt19937 rng(20260404);
  std::uniform_real_distribution<double> quality(0.0, 5.0);
  std::normal_distribution<double> noise(0.0, 0.45);
  auto clamp05 = [](double v) { return std::min(5.0, std::max(0.0, v)); };

  std::ostringstream csv;
  csv << "subject_id,rater_id,score\n";
  for (int s = 0; s < 40; ++s) {
    double q = quality(rng);
    for (int r = 1; r <= 3; ++r)
      csv << "subj" << s << ",rater" << r << "," << clamp05(q + noise(rng))
          << "\n";
    csv << "subj" << s << ",sys:sysA," << clamp05(q + noise(rng) + 0.2)
        << "\n";
    csv << "subj" << s << ",sys:sysB," << clamp05(q + 1.5 * noise(rng))
        << "\n";
  }
  write_text(dir / "raters.csv", csv.str());

  CliResult run = run_cli("agree " + (dir / "raters.csv").string() +
                              " --out " + (dir / "out").string(),
                          dir);
  c.expect(run.exit_code == 0,
           "agree exited " + std::to_string(run.exit_code));
  if (!c.ok) return c;

  auto lines = lines_of(slurp(dir / "out" / "agreement.csv"));
  c.expect(lines.size() == 13, "agreement.csv has " +
                                   std::to_string(lines.size()) +
                                   " lines, expected 13");
  if (!c.ok) return c;

  const std::vector<std::string> expected_groups = {
      "inter-rater", "inter-rater", "inter-rater", "vs rater1", "vs rater1",
      "vs rater2",   "vs rater2",   "vs rater3",   "vs rater3", "vs mean-rater",
      "vs mean-rater"};
  for (std::size_t i = 0; i < expected_groups.size() && c.ok; ++i) {
    auto fields = split_csv(lines[i + 2]);
    c.expect(fields.size() == 10,
             "row " + std::to_string(i) + " has " +
                 std::to_string(fields.size()) + " fields");
    if (!c.ok) break;
    c.expect(fields[0] == expected_groups[i],
             "row " + std::to_string(i) + " group '" + fields[0] +
                 "', expected '" + expected_groups[i] + "'");
    for (std::size_t f = 3; f < 10 && c.ok; ++f)
      c.expect(!fields[f].empty() && fields[f] != "undefined",
               "row " + std::to_string(i) + " column " + std::to_string(f) +
                   " not populated: '" + fields[f] + "'");
    if (!c.ok) break;
    double mae = std::stod(fields[6]);
    double rmse = std::stod(fields[7]);
    double exact = std::stod(fields[8]);
    double within1 = std::stod(fields[9]);
    c.expect(rmse >= mae - 1e-9, "row " + std::to_string(i) + ": rmse " +
                                     fmt(rmse) + " < mae " + fmt(mae));
    c.expect(within1 >= exact - 1e-9,
             "row " + std::to_string(i) + ": within1 " + fmt(within1) +
                 " < exact " + fmt(exact));
  }
  return c;
}

Criterion criterion_per_rtf() {
  Criterion c;

  // Two-utterance fixture: 1 error in 30 plus 1 error in 10 -> 2/40 = 5%.
  EvalRecord long_utt{"long", 30, 1, 0, 0, {}, {}};
  EvalRecord short_utt{"short", 10, 0, 1, 0, {}, {}};
  double two = per({long_utt, short_utt});
  c.expect(two == 5.0, "two-utterance PER " + fmt(two));

  // Single-record timing fixture: 0.1s inference over 2.5s audio.
  EvalRecord timed{"timed", 20, 0, 0, 0, 2.5, 0.1};
  double r = rtf({timed});
  c.expect(std::fabs(r - 0.04) <= 1e-12, "RTF " + fmt(r));

  // All-correct corpus scores exactly zero.
  std::vector<EvalRecord> clean;
  for (std::size_t n : {3u, 17u, 40u, 1u, 9u})
    clean.push_back({"c" + std::to_string(n), n, 0, 0, 0, {}, {}});
  double zero = per(clean);
  c.expect(zero == 0.0, "all-correct PER " + fmt(zero));

  // Split invariance: pooled totals over any partition reproduce the
  // corpus PER bit for bit.
  std::mt19937 rng(20260505);
  std::uniform_int_distribution<std::size_t> n_dist(1, 40);
  std::uniform_int_distribution<std::size_t> err_dist(0, 6);
  std::vector<EvalRecord> corpus;
  for (int i = 0; i < 60; ++i) {
    EvalRecord rec;
    rec.utterance_id = "u" + std::to_string(i);
    rec.n_ref = n_dist(rng);
    rec.s = std::min(err_dist(rng), rec.n_ref);
    rec.d = std::min(err_dist(rng), rec.n_ref - rec.s);
    rec.i = err_dist(rng);
    corpus.push_back(rec);
  }
  const double reference = per(corpus);

  for (int iter = 0; iter < 1000 && c.ok; ++iter) {
    std::vector<EvalRecord> shuffled = corpus;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    std::size_t parts = 1 + rng() % 6;

    std::vector<std::vector<EvalRecord>> partition(parts);
    for (const EvalRecord& rec : shuffled)
      partition[rng() % parts].push_back(rec);

    // Recombining the per-part totals must reproduce the corpus PER.
    std::size_t errors = 0, total = 0;
    std::vector<EvalRecord> reassembled;
    for (const auto& part : partition) {
      for (const EvalRecord& rec : part) {
        errors += rec.s + rec.d + rec.i;
        total += rec.n_ref;
        reassembled.push_back(rec);
      }
    }
    double pooled = 100.0 * static_cast<double>(errors) /
                    static_cast<double>(total);
    c.expect(pooled == reference, "partition " + std::to_string(iter) +
                                      ": pooled " + fmt(pooled) + " vs " +
                                      fmt(reference));
    double reordered = per(reassembled);
    c.expect(reordered == reference,
             "partition " + std::to_string(iter) + ": reordered " +
                 fmt(reordered) + " vs " + fmt(reference));
  }
  return c;
}

Criterion criterion_normalization() {
  Criterion c;

  // The four hand examples.
  {
    PhonemeAlphabet a = load_alphabet(
        R"({"inventory":["k","a"],"silence_tokens":["SIL"]})");
    PhonemeSequence got = normalize({"k", "SIL", "a"}, a);
    c.expect(got == PhonemeSequence{"k", "a"}, "silence removal failed");
  }
  {
    PhonemeAlphabet a = load_alphabet(
        R"({"inventory":["k","a"],"positional_suffixes":["_i"]})");
    PhonemeSequence got = normalize({"k_i", "a"}, a);
    c.expect(got == PhonemeSequence{"k", "a"}, "suffix stripping failed");
  }
  {
    PhonemeAlphabet a = load_alphabet(
        R"({"inventory":["k","a"],
            "geminate":{"mode":"expand-to-double","marker":"GEM"}})");
    PhonemeSequence got = normalize({"k", "GEM", "a"}, a);
    c.expect(got == PhonemeSequence{"k", "k", "a"},
             "geminate expansion failed");
  }
  {
    PhonemeAlphabet a = load_alphabet(R"({"inventory":["a"]})");
    bool threw = false;
    try {
      normalize({"x", "a"}, a);
    } catch (const UnmappableTokenError& e) {
      threw = std::string(e.what()).find("index 0") != std::string::npos;
    }
    c.expect(threw, "unmappable token did not raise the indexed error");
  }

  // Randomized closure, idempotence, and order preservation in both
  // geminate modes.
  const char* config_template = R"({
    "inventory": ["a", "b", "k", "t", "s"],
    "positional_suffixes": ["_i", "_m"],
    "silence_tokens": ["SIL", "sp"],
    "geminate": {"mode": "%s", "marker": "~"},
    "oov_map": {"q": "k", "Z": "s"}
  })";
  const std::vector<std::string> pool = {
      "a",  "b",   "k",  "t",  "s",  "k_i", "t_m", "q",  "q_i",
      "SIL", "sp", "~",  "x",  "zz", "Z",   "b_m", "zz_i"};
  std::mt19937 rng(20260606);
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  std::uniform_int_distribution<std::size_t> len(0, 24);

  for (const char* mode : {"expand-to-double", "collapse-to-single"}) {
    char config[512];
    std::snprintf(config, sizeof config, config_template, mode);
    PhonemeAlphabet a = load_alphabet(config);

    for (int iter = 0; iter < 5000 && c.ok; ++iter) {
      std::vector<std::string> raw(len(rng));
      for (auto& t : raw) t = pool[pick(rng)];

      TracedNormalization traced =
          normalize_traced(raw, a, UnknownTokenPolicy::kDrop);
      PhonemeSequence seq = traced.symbols();

      for (const Phoneme& s : seq)
        c.expect(a.contains(s), "closure violated: output '" + s + "'");

      for (std::size_t i = 0; i + 1 < traced.phonemes.size(); ++i)
        c.expect(traced.phonemes[i].raw_index <=
                     traced.phonemes[i + 1].raw_index,
                 "order violated at iteration " + std::to_string(iter));

      PhonemeSequence again = normalize(seq, a);
      c.expect(again == seq,
               "idempotence violated at iteration " + std::to_string(iter));
    }
  }
  return c;
}

Criterion criterion_score_cli_determinism() {
  Criterion c;
  fs::path dir = fresh_dir("score");

  std::mt19937 rng(20260707);
  const std::vector<std::string> pool = {"b", "t", "k", "m", "n",
                                         "a", "u", "i", "s", "r"};
  auto pick = [&] { return pool[rng() % pool.size()]; };
  std::uniform_real_distribution<double> roll(0.0, 1.0);

  std::ostringstream dataset;
  for (int n = 0; n < 50; ++n) {
    json j;
    j["id"] = "utt-" + std::to_string(n);
    json words = json::array();
    std::string text;
    std::vector<std::string> flat;
    std::size_t word_count = 2 + rng() % 3;
    for (std::size_t w = 0; w < word_count; ++w) {
      std::vector<std::string> phonemes(2 + rng() % 4);
      for (auto& p : phonemes) p = pick();
      flat.insert(flat.end(), phonemes.begin(), phonemes.end());
      std::string word = "w" + std::to_string(w);
      if (!text.empty()) text += ' ';
      text += word;
      words.push_back(json{{"word", word}, {"phonemes", phonemes}});
    }
    j["text"] = text;
    j["ref_words"] = std::move(words);
    std::vector<std::string> pred;
    for (const std::string& ph : flat) {
      double r = roll(rng);
      if (r < 0.10) continue;
      if (r < 0.22) {
        pred.push_back(pick());
      } else {
        pred.push_back(ph);
        if (r > 0.93) pred.push_back(pick());
      }
    }
    if (n % 17 == 5) pred.insert(pred.begin() + pred.size() / 2, "??");
    j["pred_phonemes"] = pred;
    dataset << j.dump() << "\n";
  }
  write_text(dir / "ds.jsonl", dataset.str());

  unsetenv("HARF_ALPHABET");
  std::string base = "score " + (dir / "ds.jsonl").string();
  auto start = std::chrono::steady_clock::now();
  CliResult r1 = run_cli(base + " --jobs 1 --out " + (dir / "a").string(), dir);
  CliResult r2 = run_cli(base + " --jobs 8 --out " + (dir / "b").string(), dir);
  CliResult r3 = run_cli(base + " --jobs 8 --out " + (dir / "c").string(), dir);
  double elapsed = std::chrono::duration<double>(
                       std::chrono::steady_clock::now() - start)
                       .count();

  c.expect(r1.exit_code == 0 && r2.exit_code == 0 && r3.exit_code == 0,
           "score exited " + std::to_string(r1.exit_code) + "/" +
               std::to_string(r2.exit_code) + "/" +
               std::to_string(r3.exit_code));
  if (!c.ok) return c;

  std::string a = slurp(dir / "a" / "summary.csv");
  std::string b = slurp(dir / "b" / "summary.csv");
  std::string c3 = slurp(dir / "c" / "summary.csv");
  c.expect(!a.empty(), "summary.csv is empty");
  c.expect(a == b, "--jobs 1 and --jobs 8 summaries differ");
  c.expect(a == c3, "repeated --jobs 8 summaries differ");
  c.expect(lines_of(a).size() == 52,
           "summary has " + std::to_string(lines_of(a).size()) + " lines");
  c.expect(slurp(dir / "a" / "reports" / "utt-0.json") ==
               slurp(dir / "b" / "reports" / "utt-0.json"),
           "report JSONs differ between job counts");
  c.expect(elapsed < 5.0,
           "three runs took " + fmt(elapsed) + "s (limit 5s)");
  return c;
}

Criterion criterion_segmentation_conservation() {
  Criterion c;
  std::mt19937 rng(20260808);
  const std::vector<Phoneme> symbols = {"a", "b", "t", "k", "m", "s"};
  auto pick = [&] { return symbols[rng() % symbols.size()]; };
  std::uniform_real_distribution<double> roll(0.0, 1.0);

  for (int iter = 0; iter < 1000 && c.ok; ++iter) {
    std::vector<WordBoundary> boundaries;
    PhonemeSequence reference;
    std::size_t word_count = 1 + rng() % 6;
    for (std::size_t w = 0; w < word_count; ++w) {
      WordBoundary boundary{"w" + std::to_string(w), {}};
      std::size_t len = 1 + rng() % 5;
      for (std::size_t p = 0; p < len; ++p)
        boundary.ref_phonemes.push_back(pick());
      reference.insert(reference.end(), boundary.ref_phonemes.begin(),
                       boundary.ref_phonemes.end());
      boundaries.push_back(std::move(boundary));
    }

    PhonemeSequence predicted;
    for (const Phoneme& ph : reference) {
      double r = roll(rng);
      if (r < 0.12) continue;
      if (r < 0.27) {
        predicted.push_back(pick());
      } else {
        predicted.push_back(ph);
        if (r > 0.92) predicted.push_back(pick());
      }
    }

    Alignment al = align(reference, predicted);
    std::vector<WordGroup> groups =
        segment_by_projection(boundaries, al, predicted);

    c.expect(groups.size() == word_count,
             "iteration " + std::to_string(iter) + ": group count " +
                 std::to_string(groups.size()));

    PhonemeSequence ref_cat, pred_cat;
    std::size_t s = 0, d = 0, i = 0, m = 0;
    for (const WordGroup& g : groups) {
      ref_cat.insert(ref_cat.end(), g.ref_phonemes.begin(),
                     g.ref_phonemes.end());
      pred_cat.insert(pred_cat.end(), g.pred_phonemes.begin(),
                      g.pred_phonemes.end());
      s += g.s_count;
      d += g.d_count;
      i += g.i_count;
      m += g.match_count;
    }
    c.expect(ref_cat == reference,
             "iteration " + std::to_string(iter) +
                 ": reference concatenation broken");
    c.expect(pred_cat == predicted,
             "iteration " + std::to_string(iter) +
                 ": prediction concatenation broken");
    c.expect(s == al.s_count && d == al.d_count && i == al.i_count &&
                 m == al.match_count,
             "iteration " + std::to_string(iter) + ": op counts " +
                 std::to_string(s) + "/" + std::to_string(d) + "/" +
                 std::to_string(i) + "/" + std::to_string(m) +
                 " do not sum to the alignment's");
  }
  return c;
}

}  // namespace

int main() {
  struct Entry {
    const char* name;
    Criterion (*fn)();
  };
  const Entry entries[] = {
      {"alignment and LCS match exhaustive oracles", criterion_alignment_oracle},
      {"scoring formulas reproduce the worked example and properties",
       criterion_scoring_formulas},
      {"agreement statistics match definitional oracles",
       criterion_agreement_oracle},
      {"agree CLI emits the grouped pairwise table",
       criterion_agree_cli_shape},
      {"PER and RTF fixtures and split invariance", criterion_per_rtf},
      {"normalization hand examples and randomized properties",
       criterion_normalization},
      {"score CLI is deterministic across runs and job counts",
       criterion_score_cli_determinism},
      {"projection segmentation conserves sequences and counts",
       criterion_segmentation_conservation},
  };

  int failures = 0;
  int number = 1;
  for (const Entry& entry : entries) {
    Criterion c;
    try {
      c = entry.fn();
    } catch (const std::exception& e) {
      c.ok = false;
      c.detail = std::string("unexpected exception: ") + e.what();
    }
    if (c.ok) {
      std::printf("PASS  criterion %d: %s\n", number, entry.name);
    } else {
      std::printf("FAIL  criterion %d: %s -- %s\n", number, entry.name,
                  c.detail.c_str());
      ++failures;
    }
    std::fflush(stdout);
    ++number;
  }
  if (failures == 0)
    std::printf("all %d acceptance criteria passed\n", number - 1);
  else
    std::printf("%d of %d acceptance criteria FAILED\n", failures, number - 1);
  return failures;
}

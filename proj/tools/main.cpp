#include <cstddef>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "harf/cli.hpp"

namespace {

void add_common_options(CLI::App* cmd, harf::cli::CommonOptions& opt,
                        bool with_backend, bool with_weights) {
  cmd->add_option("--alphabet", opt.alphabet_path,
                  "Alphabet config JSON (default: $HARF_ALPHABET, then the "
                  "built-in Arabic profile)");
  if (with_weights) {
    cmd->add_option("--w-lcs", opt.w_lcs,
                    "Weight of the sequence-similarity term in the composite "
                    "score (the rest goes to pronunciation)")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    cmd->add_option("--w-acc", opt.w_acc,
                    "Weight of accuracy inside the pronunciation blend (the "
                    "rest goes to completeness)")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
  }
  if (with_backend) {
    cmd->add_option("--backend", opt.backend,
                    "Where predictions come from: the dataset itself or an "
                    "inference service")
        ->check(CLI::IsMember({"inline", "http"}))
        ->capture_default_str();
    cmd->add_option("--endpoint", opt.endpoint,
                    "Inference service URL (required with --backend http; "
                    "$HARF_BACKEND_TOKEN supplies the bearer token)");
  }
  cmd->add_option("--rounding", opt.rounding,
                  "Rounding applied before exact/within-1 agreement counts")
      ->check(CLI::IsMember({"integer", "none"}))
      ->capture_default_str();
  cmd->add_option("--out", opt.out_dir, "Output directory")
      ->capture_default_str();
  cmd->add_option("--jobs", opt.jobs, "Worker threads")
      ->check(CLI::Range(std::size_t{1}, std::size_t{256}))
      ->capture_default_str();
  cmd->add_flag("--strict,!--keep-going", opt.strict,
                "Exit nonzero when any utterance fails (default: record the "
                "failure and keep going)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Phoneme-level Arabic pronunciation assessment"};
  app.require_subcommand(1);

  harf::cli::CommonOptions opt;
  std::string dataset;
  std::string rater_csv;
  std::vector<std::string> system_specs;
  std::vector<std::string> tokens;
  std::vector<std::string> ref_tokens;
  std::vector<std::string> pred_tokens;
  bool lenient = false;

  CLI::App* score =
      app.add_subcommand("score", "Score a dataset; writes one report JSON "
                                  "per utterance plus a summary CSV");
  score->add_option("dataset", dataset, "Utterance JSONL file")->required();
  add_common_options(score, opt, /*with_backend=*/true, /*with_weights=*/true);
  score
      ->add_option("--flag-threshold", opt.flag_threshold,
                   "Words scoring below this are flagged for review")
      ->check(CLI::Range(0.0, 100.0))
      ->capture_default_str();

  CLI::App* eval =
      app.add_subcommand("eval", "Compute corpus PER and RTF for a dataset");
  eval->add_option("dataset", dataset, "Utterance JSONL file")->required();
  add_common_options(eval, opt, /*with_backend=*/true, /*with_weights=*/false);

  CLI::App* agree = app.add_subcommand(
      "agree", "Pairwise rater/system agreement statistics");
  agree
      ->add_option("raters", rater_csv,
                   "Rater CSV with header subject_id,rater_id,score; rater "
                   "ids prefixed 'sys:' become system columns")
      ->required();
  agree->add_option("--system", system_specs,
                    "System scores as name=path, where path is a score-report "
                    "JSON or a directory of them; repeatable");
  add_common_options(agree, opt, /*with_backend=*/false,
                     /*with_weights=*/false);

  CLI::App* normalize = app.add_subcommand(
      "normalize", "Map raw tokens onto the canonical phoneme inventory");
  normalize->add_option("tokens", tokens, "Raw tokens")->required();
  normalize->add_flag("--lenient", lenient,
                      "Drop unmappable tokens instead of failing");
  normalize->add_option("--alphabet", opt.alphabet_path,
                        "Alphabet config JSON");

  CLI::App* align_cmd = app.add_subcommand(
      "align", "Show the edit alignment between two phoneme sequences");
  align_cmd->add_option("--ref", ref_tokens, "Reference phonemes")->required();
  align_cmd->add_option("--pred", pred_tokens, "Predicted phonemes");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Fold CLI11's assorted parse-error codes into the documented contract:
    // 0 for --help/--version, 2 for everything a user got wrong.
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (score->parsed()) return harf::cli::cmd_score(dataset, opt);
    if (eval->parsed()) return harf::cli::cmd_eval(dataset, opt);
    if (agree->parsed())
      return harf::cli::cmd_agree(rater_csv, system_specs, opt);
    if (normalize->parsed())
      return harf::cli::cmd_normalize(tokens, lenient, opt);
    if (align_cmd->parsed())
      return harf::cli::cmd_align(ref_tokens, pred_tokens);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

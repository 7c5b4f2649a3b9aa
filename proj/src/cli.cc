// Copyright 2026 The cote Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cote/cli.h"

#include <algorithm>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "cote/chains.h"
#include "cote/corpus.h"
#include "cote/cote_builder.h"
#include "cote/error.h"
#include "cote/evaluator.h"
#include "cote/legacy.h"
#include "cote/refiner.h"

namespace cote {
namespace {

namespace fs = std::filesystem;

constexpr char kSchemaFile[] = "schema.json";
constexpr char kDialoguesFile[] = "dialogues.json";

std::set<std::string> split_list(const std::string& text) {
  std::set<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.insert(item);
  }
  return out;
}

// --corpus is a directory holding schema.json and dialogues*.json, or a
// dialogue file paired with --schema.
struct CorpusArgs {
  std::string corpus;
  std::string schema;
  std::string split;

  void add_to(CLI::App* cmd, bool with_split) {
    cmd->add_option("--corpus", corpus,
                    "corpus directory, or a dialogue file with --schema")
        ->required();
    cmd->add_option("--schema", schema, "schema file (when --corpus is a file)");
    if (with_split) {
      cmd->add_option("--split", split, "restrict to train, dev or test");
    }
  }

  Corpus load() const {
    fs::path root(corpus);
    fs::path schema_path;
    std::vector<fs::path> files;
    if (fs::is_directory(root)) {
      schema_path = schema.empty() ? root / kSchemaFile : fs::path(schema);
      for (const auto& entry : fs::directory_iterator(root)) {
        const std::string name = entry.path().filename().string();
        if (entry.is_regular_file() && name.rfind("dialogues", 0) == 0 &&
            entry.path().extension() == ".json") {
          files.push_back(entry.path());
        }
      }
      std::sort(files.begin(), files.end());
      if (files.empty()) {
        throw IoError("no dialogues*.json files in " + root.string());
      }
    } else {
      if (schema.empty()) {
        throw ValidationError("--schema is required when --corpus is a file");
      }
      schema_path = schema;
      files.push_back(root);
    }
    Corpus c = load_corpus(files, load_schema(schema_path));
    c.name = root.filename().string();
    if (!split.empty()) {
      const Split keep = parse_split(split);
      std::erase_if(c.dialogues,
                    [keep](const Dialogue& d) { return d.split != keep; });
    }
    return c;
  }
};

void write_corpus_dir(const Corpus& corpus, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  save_schema(corpus.schema, dir / kSchemaFile);
  save_corpus(corpus, dir / kDialoguesFile);
}

void write_output(const std::string& path, const std::string& data,
                  std::ostream& out) {
  if (path.empty() || path == "-") {
    out << data;
  } else {
    write_file_atomic(path, data);
  }
}

std::string split_table(const SplitCounts& counts) {
  std::ostringstream s;
  s << "train\t" << counts.train << "\n"
    << "dev\t" << counts.dev << "\n"
    << "test\t" << counts.test << "\n";
  return s.str();
}

}  // namespace

const char* version_string() { return "cote " COTE_VERSION; }

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Chain-of-thought explanation data tooling for dialogue state "
               "tracking",
               "cote"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", version_string());

  bool verbose = false;
  std::uint64_t seed = 13;
  std::string out_path;
  app.add_flag("--verbose", verbose, "progress messages on stderr");
  app.add_option("--seed", seed, "random seed")->capture_default_str();
  app.add_option("--out", out_path, "output path (default: stdout)");

  auto log = [&](const std::string& message) {
    if (verbose) err << message << "\n";
  };

  // ingest
  auto* ingest = app.add_subcommand(
      "ingest", "convert a dataset into a canonical corpus directory");
  std::string ingest_style = "canonical";
  std::vector<std::string> ingest_inputs;
  std::string ingest_schema;
  std::string ingest_exclude;
  std::string ingest_split;
  std::string ingest_domain;
  ingest->add_option("--style", ingest_style,
                     "canonical, multiwoz22, woz_belief or m2m_flat")
      ->check(CLI::IsMember({"canonical", "multiwoz22", "woz_belief",
                             "m2m_flat"}))
      ->capture_default_str();
  ingest
      ->add_option("--input", ingest_inputs,
                   "input file (legacy styles accept PATH@DOMAIN), or the "
                   "release directory for multiwoz22")
      ->required();
  ingest->add_option("--schema", ingest_schema, "schema file");
  ingest->add_option("--exclude-domains", ingest_exclude,
                     "comma-separated domains to drop (e.g. police,hospital)");
  ingest->add_option("--split", ingest_split,
                     "split for legacy inputs (default: from file name)");
  ingest->add_option("--domain", ingest_domain,
                     "domain hint for legacy slot names");

  // validate
  auto* validate = app.add_subcommand("validate", "check corpus invariants");
  CorpusArgs validate_args;
  validate_args.add_to(validate, false);

  // stats
  auto* stats = app.add_subcommand(
      "stats", "reasoning-step histogram (table on stdout, JSON to --out)");
  CorpusArgs stats_args;
  stats_args.add_to(stats, false);
  std::string stats_split = "train";
  stats->add_option("--split", stats_split, "split to count")
      ->capture_default_str();

  // build
  auto* build = app.add_subcommand("build", "render CoT training examples");
  CorpusArgs build_args;
  build_args.add_to(build, true);
  std::string template_file;
  std::string overrides_file;
  bool no_explanations = false;
  bool include_inactive = false;
  build->add_option("--template-file", template_file, "prompt template");
  build->add_option("--overrides-file", overrides_file,
                    "JSON object slot_id -> question");
  build->add_flag("--no-explanations", no_explanations,
                  "targets carry the value only");
  build->add_flag("--include-inactive", include_inactive,
                  "also emit slots without a value (target \"none\")");

  // refine
  auto* refine = app.add_subcommand(
      "refine", "rewrite coarse explanations as narrations");
  std::string refine_config;
  std::string refine_in;
  bool refine_offline = false;
  bool refine_all_splits = false;
  int refine_max_parallel = 0;
  refine->add_option("--config", refine_config, "refiner config JSON");
  refine->add_option("--in", refine_in, "examples JSONL")->required();
  refine->add_flag("--offline", refine_offline,
                   "strip speaker tags instead of calling the endpoint");
  refine->add_option("--max-parallel", refine_max_parallel,
                     "maximum requests in flight")
      ->check(CLI::PositiveNumber);
  refine->add_flag("--all-splits", refine_all_splits,
                   "refine dev/test examples too (default: train only)");

  // sample
  auto* sample = app.add_subcommand(
      "sample", "low-resource subset of the train split");
  CorpusArgs sample_args;
  sample_args.add_to(sample, false);
  double fraction = 1.0;
  sample->add_option("--fraction", fraction, "share of train dialogues")
      ->required();

  // eval
  auto* eval = app.add_subcommand("eval", "joint goal accuracy report");
  CorpusArgs eval_args;
  eval_args.add_to(eval, true);
  std::string predictions_file;
  std::string policy_file;
  std::vector<std::string> bucket_files;
  std::string preset = "multiwoz22";
  std::string eval_format = "json";
  eval->add_option("--predictions", predictions_file, "predictions JSONL")
      ->required();
  eval->add_option("--policy", policy_file, "normalization policy JSON");
  eval->add_option("--buckets", bucket_files, "bucket spec file(s)");
  eval->add_option("--preset", preset,
                   "bucket preset when no --buckets: multiwoz22, m2m, woz2")
      ->capture_default_str();
  eval->add_option("--format", eval_format, "json, markdown or csv")
      ->check(CLI::IsMember({"json", "markdown", "md", "csv"}))
      ->capture_default_str();

  // report
  auto* report = app.add_subcommand("report", "re-render a JSON report");
  std::string report_in;
  std::string report_format = "markdown";
  report->add_option("--in", report_in, "report JSON")->required();
  report->add_option("--format", report_format, "json, markdown or csv")
      ->check(CLI::IsMember({"json", "markdown", "md", "csv"}))
      ->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    if (e.get_exit_code() != 0) {
      err << app.help();
      return kExitUsage;
    }
    return kExitOk;
  }

  try {
    if (ingest->parsed()) {
      if (out_path.empty()) {
        throw ValidationError("ingest needs --out DIR");
      }
      const std::set<std::string> excluded = split_list(ingest_exclude);
      Corpus corpus;
      if (ingest_style == "multiwoz22") {
        if (ingest_inputs.size() != 1) {
          throw ValidationError("multiwoz22 ingest takes one release directory");
        }
        corpus = ingest_multiwoz22(ingest_inputs.front(), excluded);
      } else {
        if (ingest_schema.empty()) {
          throw ValidationError("--schema is required for style " +
                                ingest_style);
        }
        const Schema schema = load_schema(ingest_schema);
        if (ingest_style == "canonical") {
          std::vector<fs::path> files(ingest_inputs.begin(),
                                      ingest_inputs.end());
          corpus = load_corpus(files, schema, excluded);
        } else {
          const LegacyStyle style = parse_legacy_style(ingest_style);
          std::vector<Corpus> parts;
          for (const auto& input : ingest_inputs) {
            LegacyOptions options;
            options.domain_hint = ingest_domain;
            std::string path = input;
            if (auto at = input.rfind('@'); at != std::string::npos) {
              path = input.substr(0, at);
              options.domain_hint = input.substr(at + 1);
            }
            if (!ingest_split.empty()) options.split = parse_split(ingest_split);
            log("converting " + path);
            parts.push_back(ingest_legacy(path, style, schema, options));
          }
          corpus = exclude_domains(merge_corpora(std::move(parts), ""),
                                   excluded);
        }
      }
      corpus.name = fs::path(out_path).filename().string();
      write_corpus_dir(corpus, out_path);
      out << split_table(corpus.split_counts());
      return kExitOk;
    }

    if (validate->parsed()) {
      Corpus corpus = validate_args.load();
      const SplitCounts counts = corpus.split_counts();
      out << "ok: " << corpus.dialogues.size() << " dialogues, "
          << corpus.schema.size() << " slots, "
          << corpus.schema.domains().size() << " domains\n"
          << split_table(counts);
      return kExitOk;
    }

    if (stats->parsed()) {
      Corpus corpus = stats_args.load();
      StepHistogram histogram = step_histogram(corpus, parse_split(stats_split));
      out << histogram_to_table(histogram);
      if (!out_path.empty()) write_output(out_path, histogram_to_json(histogram), out);
      return kExitOk;
    }

    if (build->parsed()) {
      Corpus corpus = build_args.load();
      PromptTemplate prompt_template =
          template_file.empty() ? PromptTemplate() : load_template(template_file);
      QuestionOverrides overrides;
      if (!overrides_file.empty()) {
        overrides = load_overrides(overrides_file, corpus.schema);
      }
      BuildOptions options;
      options.include_explanations = !no_explanations;
      options.include_inactive = include_inactive;
      std::string jsonl;
      std::size_t n = 0;
      for_each_example(corpus, prompt_template, overrides, options,
                       [&](CoTExample&& e) {
                         jsonl += example_to_json(e);
                         jsonl += '\n';
                         ++n;
                       });
      write_output(out_path, jsonl, out);
      log("wrote " + std::to_string(n) + " examples");
      return kExitOk;
    }

    if (refine->parsed()) {
      RefineConfig config;
      if (!refine_config.empty()) {
        config = load_refine_config(refine_config);
      }
      if (refine_offline) config.offline = true;
      if (refine_max_parallel > 0) config.max_parallel = refine_max_parallel;
      validate_config(config);
      BatchOptions options;
      if (!refine_all_splits) options.splits = std::set<Split>{Split::kTrain};
      BatchOutcome outcome =
          refine_batch(read_examples(refine_in), config, options);
      write_output(out_path, examples_to_jsonl(outcome.examples), out);
      log("refined: api=" + std::to_string(outcome.from_api) +
          " cache=" + std::to_string(outcome.from_cache) +
          " offline=" + std::to_string(outcome.offline) +
          " untouched=" + std::to_string(outcome.untouched));
      for (const auto& failure : outcome.failures) {
        err << "warning: " << failure.example_id << ": " << failure.error
            << "\n";
      }
      if (outcome.partial_failure()) {
        err << outcome.failures.size()
            << " example(s) left unrefined\n";
        return kExitPartialRefine;
      }
      return kExitOk;
    }

    if (sample->parsed()) {
      if (out_path.empty()) throw ValidationError("sample needs --out DIR");
      Corpus corpus = sample_args.load();
      Corpus sampled = low_resource_sample(corpus, fraction, seed);
      write_corpus_dir(sampled, out_path);
      out << split_table(sampled.split_counts());
      return kExitOk;
    }

    if (eval->parsed()) {
      Corpus corpus = eval_args.load();
      NormalizationPolicy policy;
      if (!policy_file.empty()) {
        policy = policy_from_json(read_file(policy_file), policy_file);
      }
      std::vector<BucketSpec> specs;
      for (const auto& file : bucket_files) {
        for (auto& spec : load_bucket_specs(file)) specs.push_back(std::move(spec));
      }
      if (bucket_files.empty()) specs = bucket_preset(preset);
      EvalReport result = fine_grained_report(
          corpus, load_predictions(predictions_file), policy, specs);
      if (result.n_missing_predictions > 0) {
        err << "note: " << result.n_missing_predictions
            << " (turn, slot) predictions missing, scored as none\n";
      }
      write_output(out_path,
                   render_report(result, parse_report_format(eval_format)), out);
      return kExitOk;
    }

    if (report->parsed()) {
      EvalReport parsed = parse_report(read_file(report_in), report_in);
      write_output(out_path,
                   render_report(parsed, parse_report_format(report_format)),
                   out);
      return kExitOk;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitDataError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitDataError;
  }
  return kExitUsage;
}

}  // namespace cote

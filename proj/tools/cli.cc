#include "cli.h"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "textexplain/anchors.h"
#include "textexplain/corpus.h"
#include "textexplain/experiment.h"
#include "textexplain/lime.h"
#include "textexplain/metrics.h"
#include "textexplain/models.h"

namespace textexplain {
namespace {

struct Options {
  // Common.
  uint64_t seed = 0;
  std::string output;
  size_t jobs = 1;
  std::string format;
  std::string config;
  bool no_timing = false;

  // Inputs.
  std::string model;
  std::string text;
  std::string text_file;
  std::string corpus;
  int64_t doc_id = 0;

  std::string method;
  std::string anchor_mode = "auto";
  std::string ranking = "signed";
  size_t runs = 100;
  std::string csv_output;

  LimeConfig lime;
  AnchorConfig anchors;

  TrainConfig train;
  std::string vectorizer_output;
};

void AddCommonFlags(CLI::App* cmd, Options& o) {
  cmd->add_option("--config", o.config, "JSON file with flag values; flags given here win");
  cmd->add_option("--seed", o.seed, "Master seed");
  cmd->add_option("--output,-o", o.output, "Output path (default: stdout)");
}

void AddModelFlag(CLI::App* cmd, Options& o) {
  cmd->add_option("--model", o.model, "Model JSON file, or inline JSON")->required();
}

void AddDocumentFlags(CLI::App* cmd, Options& o) {
  auto* text = cmd->add_option("--text", o.text, "Document to explain");
  auto* file = cmd->add_option("--text-file", o.text_file, "File holding the document");
  text->excludes(file);
  cmd->add_option("--doc-id", o.doc_id, "Identifier echoed in the output");
}

void AddExplainerFlags(CLI::App* cmd, Options& o) {
  cmd->add_option("--n", o.lime.n, "LIME perturbed samples")->check(CLI::PositiveNumber);
  cmd->add_option("--kernel-width", o.lime.kernel_width, "LIME kernel width")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--ridge", o.lime.ridge, "LIME ridge penalty")->check(CLI::NonNegativeNumber);
  cmd->add_option("--epsilon", o.anchors.epsilon, "Anchors precision slack")
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--batch-size", o.anchors.batch_size, "Anchors samples per batch")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--delta", o.anchors.delta, "Anchors confidence level")
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--beam-width", o.anchors.beam_width, "Anchors beam width")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--max-batches", o.anchors.max_batches, "Anchors per-candidate budget")
      ->check(CLI::PositiveNumber);
  cmd->add_flag("--anchor-all-occurrences", o.anchors.anchor_all_occurrences,
                "Anchor every occurrence of a word instead of the first");
  cmd->add_option("--anchor-mode", o.anchor_mode, "exact, sampled or auto")
      ->check(CLI::IsMember({"auto", "exact", "sampled"}));
}

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::unique_ptr<Classifier> LoadModel(const std::string& spec) {
  const auto first = spec.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && spec[first] == '{') {
    try {
      return ClassifierFromJson(Json::parse(spec), std::filesystem::current_path());
    } catch (const nlohmann::json::parse_error& e) {
      throw std::runtime_error(std::string("inline model: ") + e.what());
    }
  }
  return LoadClassifier(spec);
}

Document LoadDocument(const Options& o) {
  if (!o.text_file.empty()) return Tokenize(ReadFile(o.text_file));
  if (o.text.empty()) throw std::runtime_error("one of --text or --text-file is required");
  return Tokenize(o.text);
}

// "auto" picks the exact search for DNF models small enough to enumerate.
AnchorMode ResolveAnchorMode(const std::string& name, const Classifier& f, const Document& doc,
                             AnchorMode fallback) {
  if (name != "auto") return ParseAnchorMode(name);
  if (fallback == AnchorMode::kExact && dynamic_cast<const DnfClassifier*>(&f) &&
      LocalDictionary(doc).size() <= kMaxExhaustiveAnchorWords) {
    return AnchorMode::kExact;
  }
  return AnchorMode::kSampled;
}

void WriteOutput(const Options& o, const std::string& content, std::ostream& out) {
  if (o.output.empty()) {
    out << content;
    return;
  }
  std::ofstream file(o.output, std::ios::binary);
  if (!file) throw std::runtime_error("cannot write " + o.output);
  file << content;
}

std::string DumpJson(const Json& j) { return j.dump(2) + "\n"; }

double SecondsSince(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void CmdExplain(const Options& o, std::ostream& out) {
  const auto f = LoadModel(o.model);
  const Document doc = LoadDocument(o);
  Json result;
  const auto start = std::chrono::steady_clock::now();
  if (o.method == "lime") {
    LimeConfig cfg = o.lime;
    cfg.seed = o.seed;
    const LimeExplanation exp = ExplainLime(*f, doc, cfg);
    result = exp.ToJson(o.doc_id, o.no_timing ? 0.0 : SecondsSince(start));
  } else {
    AnchorConfig cfg = o.anchors;
    cfg.seed = o.seed;
    const AnchorMode mode = ResolveAnchorMode(o.anchor_mode, *f, doc, AnchorMode::kSampled);
    const Anchor anchor = FindAnchor(*f, doc, cfg, mode);
    result = anchor.ToJson(doc, o.doc_id, o.seed, o.no_timing ? 0.0 : SecondsSince(start));
  }
  WriteOutput(o, DumpJson(result), out);
}

void CmdFigure(const Options& o, std::ostream& out) {
  const auto f = LoadModel(o.model);
  const Document doc = LoadDocument(o);
  FigureOptions opts;
  opts.lime = o.lime;
  opts.anchors = o.anchors;
  opts.runs = o.runs;
  opts.master_seed = o.seed;
  opts.jobs = o.jobs;
  opts.mode = ResolveAnchorMode(o.anchor_mode, *f, doc, AnchorMode::kExact);
  const FigureData data = RunFigure(*f, doc, opts);
  if (o.format == "json") {
    WriteOutput(o, DumpJson(FigureToJson(data)), out);
  } else {
    WriteOutput(o, FigureToCsv(data), out);
  }
}

void CmdCompare(const Options& o, std::ostream& out, std::ostream& err) {
  const auto model = LoadModel(o.model);
  const auto* f = dynamic_cast<const LogisticClassifier*>(model.get());
  if (!f)
    throw std::runtime_error("compare needs a logistic model (ground truth uses its coefficients)");
  if (o.corpus.empty()) throw std::runtime_error("--corpus is required");
  const Corpus corpus = LoadCorpusCsv(o.corpus);

  CompareOptions opts;
  opts.lime = o.lime;
  opts.anchors = o.anchors;
  opts.master_seed = o.seed;
  opts.jobs = o.jobs;
  opts.ranking = ParseRanking(o.ranking);
  opts.mode = o.anchor_mode == "auto" ? AnchorMode::kSampled : ParseAnchorMode(o.anchor_mode);
  const LIndexReport report = RunCompare(*f, corpus, opts);
  if (report.n_skipped_negative > 0) {
    err << "compare: skipped " << report.n_skipped_negative
        << " document(s) not predicted positive\n";
  }
  const bool timing = !o.no_timing;
  if (o.format == "csv") {
    WriteOutput(o, ReportToCsv(report, timing), out);
  } else {
    WriteOutput(o, DumpJson(ReportToJson(report, timing)), out);
  }
  if (!o.csv_output.empty()) {
    std::ofstream csv(o.csv_output, std::ios::binary);
    if (!csv) throw std::runtime_error("cannot write " + o.csv_output);
    csv << ReportToCsv(report, timing);
  }
}

void CmdTrain(const Options& o, std::ostream& out) {
  if (o.corpus.empty()) throw std::runtime_error("--corpus is required");
  const Corpus corpus = LoadCorpusCsv(o.corpus);
  TrainConfig cfg = o.train;
  cfg.seed = o.seed;
  const LogisticClassifier clf = TrainLogistic(corpus, cfg);
  Json j = clf.ToJson();
  if (!o.vectorizer_output.empty()) {
    std::ofstream vec(o.vectorizer_output, std::ios::binary);
    if (!vec) throw std::runtime_error("cannot write " + o.vectorizer_output);
    vec << DumpJson(clf.vectorizer().ToJson());
    j["vectorizer"] = o.vectorizer_output;
  }
  WriteOutput(o, DumpJson(j), out);
}

// Turns a flat JSON object into command-line tokens placed before the user's
// own flags, so later (user) values take precedence.
std::vector<std::string> ConfigArgs(const std::string& path) {
  Json j;
  try {
    j = Json::parse(ReadFile(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw CLI::ValidationError("--config", e.what());
  }
  if (!j.is_object()) throw CLI::ValidationError("--config", "config file must hold a JSON object");
  std::vector<std::string> args;
  for (const auto& [key, value] : j.items()) {
    if (key == "config") continue;
    const std::string flag = "--" + key;
    if (value.is_boolean()) {
      if (value.get<bool>()) args.push_back(flag);
    } else if (value.is_string()) {
      args.push_back(flag);
      args.push_back(value.get<std::string>());
    } else if (value.is_number()) {
      args.push_back(flag);
      args.push_back(value.dump());
    } else if (value.is_object() && key == "model") {
      args.push_back(flag);
      args.push_back(value.dump());
    } else {
      throw CLI::ValidationError("--config", "unsupported value for '" + key + "'");
    }
  }
  return args;
}

std::vector<std::string> ExpandConfig(const std::vector<std::string>& args) {
  if (args.empty()) return args;
  for (size_t i = 1; i < args.size(); ++i) {
    std::string path;
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      continue;
    }
    std::vector<std::string> expanded{args.front()};
    for (std::string& a : ConfigArgs(path)) expanded.push_back(std::move(a));
    expanded.insert(expanded.end(), args.begin() + 1, args.end());
    return expanded;
  }
  return args;
}

}  // namespace

int RunCli(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Local explanations for text classifiers: LIME, Anchors and the l-index"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  auto* explain = app.add_subcommand("explain", "Explain one document once");
  AddCommonFlags(explain, o);
  AddModelFlag(explain, o);
  AddDocumentFlags(explain, o);
  AddExplainerFlags(explain, o);
  explain->add_option("--method", o.method, "lime or anchors")
      ->required()
      ->check(CLI::IsMember({"lime", "anchors"}));
  explain->add_flag("--no-timing", o.no_timing, "Report wall times as 0");

  auto* figure = app.add_subcommand("figure", "Per-word aggregates over repeated runs");
  AddCommonFlags(figure, o);
  AddModelFlag(figure, o);
  AddDocumentFlags(figure, o);
  AddExplainerFlags(figure, o);
  figure->add_option("--runs", o.runs, "Number of runs")->check(CLI::PositiveNumber);
  figure->add_option("--jobs", o.jobs, "Worker threads")->check(CLI::PositiveNumber);
  figure->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

  auto* compare = app.add_subcommand("compare", "l-index and timing of LIME vs Anchors");
  AddCommonFlags(compare, o);
  AddModelFlag(compare, o);
  AddExplainerFlags(compare, o);
  compare->add_option("--corpus", o.corpus, "CSV corpus with header text,label")->required();
  compare->add_option("--jobs", o.jobs, "Worker threads")->check(CLI::PositiveNumber);
  compare->add_option("--format", o.format, "json or csv")->check(CLI::IsMember({"csv", "json"}));
  compare->add_option("--csv", o.csv_output, "Also write the per-document CSV here");
  compare->add_option("--ranking", o.ranking, "signed or absolute")
      ->check(CLI::IsMember({"signed", "absolute"}));
  compare->add_flag("--no-timing", o.no_timing, "Report wall times as 0");

  auto* train = app.add_subcommand("train", "Train a logistic model on a CSV corpus");
  AddCommonFlags(train, o);
  train->add_option("--corpus", o.corpus, "CSV corpus with header text,label")->required();
  train->add_option("--epochs", o.train.epochs, "Gradient descent epochs")
      ->check(CLI::NonNegativeNumber);
  train->add_option("--learning-rate", o.train.learning_rate, "Step size")
      ->check(CLI::PositiveNumber);
  train->add_option("--l2", o.train.l2_penalty, "L2 penalty")->check(CLI::NonNegativeNumber);
  train->add_option("--vectorizer-output", o.vectorizer_output,
                    "Write the vectorizer separately and reference it by path");

  std::vector<std::string> args;
  try {
    args = ExpandConfig(raw_args);
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (*explain) {
      CmdExplain(o, out);
    } else if (*figure) {
      CmdFigure(o, out);
    } else if (*compare) {
      CmdCompare(o, out, err);
    } else if (*train) {
      CmdTrain(o, out);
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntimeError;
  }
  return kExitOk;
}

}  // namespace textexplain

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.
// A limit of 0 means the criterion has no runtime bound.

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli.h"
#include "random_dnf.h"
#include "textexplain/anchors.h"
#include "textexplain/corpus.h"
#include "textexplain/experiment.h"
#include "textexplain/lime.h"
#include "textexplain/metrics.h"
#include "textexplain/models.h"

namespace textexplain {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  bool pass = true;
  std::string detail;

  // Records a sub-check; every failing one is listed in the detail.
  void Check(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "FAILED ") + what;
  }
};

std::string Fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

using Words = std::vector<std::string>;

Words AnchorWords(const Anchor& a, const Document& doc) { return a.WordSet(doc); }

Words ExhaustiveWords(const Classifier& f, const Document& doc, double epsilon = 0.05) {
  return AnchorWords(SearchAnchorExhaustive(doc, epsilon, ExactPrecisionFor(f)), doc);
}

size_t BeamHits(const Classifier& f, const Document& doc, const Words& expected, size_t seeds) {
  size_t hits = 0;
  for (uint64_t seed = 0; seed < seeds; ++seed) {
    AnchorConfig cfg;
    cfg.seed = seed;
    hits += AnchorWords(SearchAnchorBeam(f, doc, cfg), doc) == expected;
  }
  return hits;
}

// Mean LIME coefficient per word over runs with seeds 0..runs-1.
std::map<std::string, double> MeanLime(const Classifier& f, const Document& doc, size_t n,
                                       size_t runs) {
  std::map<std::string, double> mean;
  for (uint64_t seed = 0; seed < runs; ++seed) {
    LimeConfig cfg;
    cfg.n = n;
    cfg.seed = seed;
    for (const auto& [w, b] : ExplainLime(f, doc, cfg).coefficients) mean[w] += b / runs;
  }
  return mean;
}

std::string Join(const Words& words) {
  std::string s = "{";
  for (size_t i = 0; i < words.size(); ++i) s += (i ? "," : "") + words[i];
  return s + "}";
}

int failures = 0;

void Criterion(int id, const std::string& name, double limit_s,
               const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out.Check(false, std::string("exception: ") + e.what());
  }
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (limit_s <= 0) {
    out.Check(true, "runtime " + Fmt(elapsed, 3) + " s");
  } else {
    out.Check(elapsed < limit_s, "runtime " + Fmt(elapsed, 3) + " s < " + Fmt(limit_s) + " s");
  }
  if (!out.pass) ++failures;
  std::printf("%s criterion %d (%s): %s\n", out.pass ? "PASS" : "FAIL", id, name.c_str(),
              out.detail.c_str());
  std::fflush(stdout);
}

Outcome SingleWordRule() {
  Outcome out;
  const DnfClassifier f(std::vector<DnfClassifier::Clause>{{"good"}});
  const Document doc = Tokenize("the food at this place was really good last night");
  out.Check(doc.size() == 10, "document has 10 tokens");
  const Words exhaustive = ExhaustiveWords(f, doc);
  out.Check(exhaustive == Words{"good"}, "exhaustive anchor " + Join(exhaustive) + " == {good}");
  const size_t hits = BeamHits(f, doc, {"good"}, 100);
  out.Check(hits >= 95, "beam {good} in " + std::to_string(hits) + "/100 >= 95");

  const auto mean = MeanLime(f, doc, 1000, 100);
  double other = 0.0;
  for (const auto& [w, b] : mean) {
    if (w != "good") other = std::max(other, std::abs(b));
  }
  out.Check(mean.at("good") > 10 * other,
            "mean beta_good " + Fmt(mean.at("good")) + " > 10 x max other " + Fmt(other));
  return out;
}

Outcome DnfOr() {
  Outcome out;
  const DnfClassifier f({{"not", "bad"}, {"good"}});
  const Document doc = Tokenize("the waiter was not bad and the food was good");
  const Words exhaustive = ExhaustiveWords(f, doc);
  out.Check(exhaustive == Words{"good"}, "exhaustive anchor " + Join(exhaustive) + " == {good}");

  const auto mean = MeanLime(f, doc, 5000, 100);
  const double b_not = mean.at("not"), b_bad = mean.at("bad"), b_good = mean.at("good");
  const double rel = std::abs(b_not - b_bad) / std::max(std::abs(b_not), std::abs(b_bad));
  out.Check(rel <= 0.15, "beta_not " + Fmt(b_not) + " ~ beta_bad " + Fmt(b_bad) +
                             " (relative gap " + Fmt(rel, 3) + " <= 0.15)");
  out.Check(b_good > b_not, "beta_good " + Fmt(b_good) + " > beta_not");
  return out;
}

Outcome MultiplicityThreshold() {
  Outcome out;
  const DnfClassifier f(std::vector<DnfClassifier::Clause>{{"very", "good"}});
  const double expected[] = {0.9375, 0.96875};
  const Words anchors[] = {{"good", "very"}, {"good"}};
  for (int k = 0; k < 2; ++k) {
    const int m = 4 + k;
    std::vector<std::string> tokens(m, "very");
    tokens.push_back("good");
    const Document doc = FromTokens(tokens);
    const std::vector<size_t> good_only = {static_cast<size_t>(m)};
    const double closed = ExactPrecisionDnf(f, doc, good_only);
    const double brute = ExactPrecisionBruteforce(f, doc, good_only);
    const std::string tag = "m_very=" + std::to_string(m);
    out.Check(std::abs(closed - expected[k]) <= 1e-12 && std::abs(brute - expected[k]) <= 1e-12,
              tag + " precision({good}) closed " + Fmt(closed, 17) + ", brute " + Fmt(brute, 17) +
                  " == " + Fmt(expected[k], 17));
    const Words got = ExhaustiveWords(f, doc);
    out.Check(got == anchors[k], tag + " anchor " + Join(got));
  }
  return out;
}

Outcome DisjointSubsets() {
  Outcome out;
  const DnfClassifier f({{"not", "bad"}, {"very", "good"}});
  const Document one = Tokenize("not bad very good");
  const Document five = Tokenize("not bad very very very very very good");
  const Anchor a1 = SearchAnchorExhaustive(one, 0.05, ExactPrecisionFor(f));
  const Anchor a5 = SearchAnchorExhaustive(five, 0.05, ExactPrecisionFor(f));
  const Words w1 = AnchorWords(a1, one), w5 = AnchorWords(a5, five);
  out.Check(a1.length() == 2, "multiplicity-1 anchor " + Join(w1) + " has length 2");
  out.Check(w1 != w5, "m_very=5 anchor " + Join(w5) + " differs");

  const LimeConfig cfg;
  const LimeExplanation e1 = ExactExpectedExplanation(f, one, cfg.kernel_width, cfg.ridge);
  const LimeExplanation e5 = ExactExpectedExplanation(f, five, cfg.kernel_width, cfg.ridge);
  double diff = 0.0;
  for (const char* w : {"not", "bad"}) {
    diff = std::max(diff, std::abs(e1.coefficients.at(w) - e5.coefficients.at(w)));
  }
  out.Check(diff <= 1e-10, "exact LIME beta_not " + Fmt(e1.coefficients.at("not")) + ", beta_bad " +
                               Fmt(e1.coefficients.at("bad")) + " unchanged (max diff " +
                               Fmt(diff, 3) + " <= 1e-10)");
  return out;
}

Outcome LogisticCases() {
  Outcome out;
  Corpus corpus;
  corpus.Add("i love this place and the food is really good", 1);
  corpus.Add("the service was slow", 0);
  corpus.Add("good pasta", 1);
  corpus.Add("i do not love the decor", 0);
  auto vec = std::make_shared<const TfIdfVectorizer>(TfIdfVectorizer::Fit(corpus));
  const Document doc = Tokenize("i love this place and the food is really good");

  const LogisticClassifier sparse(vec, 0.1,
                                  std::map<std::string, double>{{"good", 5.0}, {"love", -1.0}});
  out.Check(sparse.Predict(doc) == 1, "sparse model predicts 1");
  const size_t sparse_hits = BeamHits(sparse, doc, {"good"}, 100);
  out.Check(sparse_hits >= 90, "sparse beam {good} in " + std::to_string(sparse_hits) + "/100");
  const auto mean = MeanLime(sparse, doc, 1000, 100);
  const double b_good = mean.at("good"), b_love = mean.at("love");
  double other = 0.0;
  for (const auto& [w, b] : mean) {
    if (w != "good" && w != "love") other = std::max(other, std::abs(b));
  }
  out.Check(b_good > 0 && 0 > b_love,
            "beta_good " + Fmt(b_good) + " > 0 > beta_love " + Fmt(b_love));
  out.Check(other < std::abs(b_love), "max other |beta| " + Fmt(other) + " < |beta_love|");

  std::mt19937_64 rng(2022);
  std::normal_distribution<double> normal;
  std::map<std::string, double> coefs;
  for (const std::string& w : vec->vocabulary().words()) coefs[w] = normal(rng);
  coefs["good"] = 10.0;
  const LogisticClassifier arbitrary(vec, 0.0, coefs);
  out.Check(arbitrary.Predict(doc) == 1, "arbitrary model predicts 1");
  const size_t hits = BeamHits(arbitrary, doc, {"good"}, 100);
  out.Check(hits >= 90, "arbitrary beam {good} in " + std::to_string(hits) + "/100");
  return out;
}

Outcome LIndexDirection() {
  Outcome out;
  const Corpus corpus = LoadCorpusCsv(fs::path(TEXTEXPLAIN_DATA_DIR) / "synthetic_reviews.csv");
  const LogisticClassifier clf = TrainLogistic(corpus, TrainConfig{});
  CompareOptions opts;
  opts.master_seed = 0;
  const LIndexReport report = RunCompare(clf, corpus, opts);
  out.Check(report.l_lime.mean >= 0.85, "l_LIME " + Fmt(report.l_lime.mean) + " >= 0.85");
  out.Check(report.l_anchors.mean <= report.l_lime.mean,
            "l_Anchors " + Fmt(report.l_anchors.mean) + " <= l_LIME");

  double lime = 0.0, anchors = 0.0;
  size_t long_docs = 0;
  for (const CompareRecord& r : report.records) {
    if (r.n_tokens < 30) continue;
    lime += r.time_lime_s;
    anchors += r.time_anchors_s;
    ++long_docs;
  }
  out.Check(long_docs > 0, std::to_string(long_docs) + " explained documents with b >= 30");
  if (long_docs > 0) {
    out.Check(lime <= anchors, "mean time LIME " + Fmt(lime / long_docs, 3) + " s <= Anchors " +
                                   Fmt(anchors / long_docs, 3) + " s");
  }
  return out;
}

Outcome OracleEquivalences() {
  Outcome out;
  std::mt19937_64 rng(7);
  Rng sampler(11);
  double closed_gap = 0.0, empirical_gap = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const testing::DnfInstance inst = testing::RandomDnfInstance(rng, 8);
    const double exact = ExactPrecisionDnf(inst.clf, inst.doc, inst.anchor);
    closed_gap = std::max(
        closed_gap, std::abs(exact - ExactPrecisionBruteforce(inst.clf, inst.doc, inst.anchor)));
    const PrecisionEstimate est =
        EmpiricalPrecision(inst.clf, inst.doc, inst.anchor, 10000, 0.1, sampler);
    empirical_gap = std::max(empirical_gap, std::abs(est.mean - exact));
  }
  out.Check(closed_gap <= 1e-12, "(a) closed form vs enumeration max gap " + Fmt(closed_gap, 3));
  out.Check(empirical_gap < 0.02, "(b) empirical precision max gap " + Fmt(empirical_gap, 3));

  double normal_gap = 0.0;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const size_t d = 1 + rng() % 8;
    const size_t n = 3 * d + rng() % 20;
    const double ridge = trial % 2 ? 1e-3 : 0.5;
    std::vector<LimeSample> samples(n);
    Eigen::MatrixXd x(n, d + 1);
    Eigen::VectorXd w(n), y(n);
    for (size_t i = 0; i < n; ++i) {
      samples[i].mask.resize(d);
      x(i, 0) = 1.0;
      for (size_t j = 0; j < d; ++j) {
        samples[i].mask[j] = rng() % 2;
        x(i, j + 1) = samples[i].mask[j];
      }
      samples[i].label = static_cast<int>(rng() % 2);
      samples[i].weight = unit(rng);
      y(i) = samples[i].label;
      w(i) = samples[i].weight;
    }
    const LinearSurrogate fit = FitSurrogate(samples, ridge);
    Eigen::VectorXd beta(d + 1);
    beta(0) = fit.intercept;
    for (size_t j = 0; j < d; ++j) beta(j + 1) = fit.coefficients[j];
    Eigen::VectorXd gradient = x.transpose() * w.asDiagonal() * (y - x * beta);
    gradient.tail(d) -= ridge * beta.tail(d);
    normal_gap = std::max(normal_gap, gradient.cwiseAbs().maxCoeff());
  }
  out.Check(normal_gap <= 1e-10, "(c) normal equation residual " + Fmt(normal_gap, 3));

  double lime_gap = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const testing::DnfInstance inst = testing::RandomDnfInstance(rng, 6);
    LimeConfig cfg;
    cfg.n = 10000;
    cfg.seed = trial;
    const LimeExplanation sampled = ExplainLime(inst.clf, inst.doc, cfg);
    const LimeExplanation exact =
        ExactExpectedExplanation(inst.clf, inst.doc, cfg.kernel_width, cfg.ridge);
    for (const auto& [word, b] : exact.coefficients) {
      lime_gap = std::max(lime_gap, std::abs(sampled.coefficients.at(word) - b));
    }
  }
  out.Check(lime_gap < 0.05, "(d) sampled vs exact LIME max gap " + Fmt(lime_gap, 3));

  size_t agree = 0;
  for (uint64_t seed = 0; seed < 100; ++seed) {
    std::mt19937_64 inst_rng(seed);
    const testing::DnfInstance inst = testing::RandomDnfInstance(inst_rng, 8);
    AnchorConfig cfg;
    cfg.seed = seed;
    agree += AnchorWords(SearchAnchorBeam(inst.clf, inst.doc, cfg), inst.doc) ==
             ExhaustiveWords(inst.clf, inst.doc);
  }
  out.Check(agree >= 90, "(e) beam == exhaustive in " + std::to_string(agree) + "/100 seeds");
  return out;
}

struct CliRun {
  int code;
  std::string out;
};

CliRun Cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = RunCli(args, out, err);
  return {code, out.str()};
}

std::string Slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<std::string> With(std::vector<std::string> args, const std::vector<std::string>& more) {
  args.insert(args.end(), more.begin(), more.end());
  return args;
}

Outcome CliDeterminism() {
  Outcome out;
  const fs::path dir = fs::temp_directory_path() / "textexplain_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string corpus = (fs::path(TEXTEXPLAIN_DATA_DIR) / "synthetic_reviews.csv").string();

  std::string models[2];
  for (int k = 0; k < 2; ++k) {
    models[k] = (dir / ("model" + std::to_string(k) + ".json")).string();
    const CliRun r = Cli({"train", "--corpus", corpus, "--seed", "5", "-o", models[k]});
    out.Check(r.code == kExitOk, "train run " + std::to_string(k + 1) + " exits 0");
  }
  out.Check(Slurp(models[0]) == Slurp(models[1]) && !Slurp(models[0]).empty(),
            "train output identical");

  const std::string dnf = R"({"type":"dnf","clauses":[["not","bad"],["very","good"]]})";
  const std::string text = "the food was not bad and the wine was very very good";
  const std::vector<std::pair<std::string, std::vector<std::string>>> serial_only = {
      {"explain lime",
       {"explain", "--method", "lime", "--model", dnf, "--text", text, "--seed", "3",
        "--no-timing"}},
      {"explain anchors (sampled)",
       {"explain", "--method", "anchors", "--model", dnf, "--text", text, "--seed", "3",
        "--no-timing"}},
      {"explain anchors (exact, trained model)",
       {"explain", "--method", "anchors", "--model", models[0], "--text", text, "--anchor-mode",
        "exact", "--no-timing"}},
  };
  for (const auto& [label, args] : serial_only) {
    const CliRun a = Cli(args), b = Cli(args);
    out.Check(a.code == kExitOk && a.out == b.out, label + " rerun identical");
  }

  const std::vector<std::vector<std::string>> parallel = {
      {"figure", "--model", dnf, "--text", text, "--runs", "20", "--seed", "8", "--anchor-mode",
       "sampled"},
      {"figure", "--model", models[0], "--text", text, "--runs", "10", "--seed", "8", "--format",
       "json"},
      {"compare", "--model", models[0], "--corpus", corpus, "--seed", "4", "--no-timing"},
  };
  for (const auto& args : parallel) {
    const CliRun a = Cli(args), b = Cli(args), p = Cli(With(args, {"--jobs", "4"}));
    out.Check(a.code == kExitOk && a.out == b.out, args[0] + " rerun identical");
    out.Check(p.code == kExitOk && p.out == a.out, args[0] + " --jobs 4 equals serial");
  }
  fs::remove_all(dir);
  return out;
}

}  // namespace
}  // namespace textexplain

int main() {
  using textexplain::Criterion;
  Criterion(1, "single-word rule", 30, textexplain::SingleWordRule);
  Criterion(2, "disjunction with a negated pair", 60, textexplain::DnfOr);
  Criterion(3, "multiplicity threshold", 5, textexplain::MultiplicityThreshold);
  Criterion(4, "disjoint-subsets dependence", 10, textexplain::DisjointSubsets);
  Criterion(5, "logistic models", 120, textexplain::LogisticCases);
  Criterion(6, "l-index direction", 600, textexplain::LIndexDirection);
  Criterion(7, "oracle equivalences", 0, textexplain::OracleEquivalences);
  Criterion(8, "CLI determinism", 0, textexplain::CliDeterminism);
  std::printf("%d criterion(s) failed\n", textexplain::failures);
  return textexplain::failures == 0 ? 0 : 1;
}

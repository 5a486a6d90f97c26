#include "textexplain/experiment.h"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <exception>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace textexplain {

AnchorMode ParseAnchorMode(const std::string& name) {
  if (name == "exact") return AnchorMode::kExact;
  if (name == "sampled") return AnchorMode::kSampled;
  throw std::invalid_argument("anchor mode must be 'exact' or 'sampled', got '" + name + "'");
}

std::string AnchorModeName(AnchorMode mode) {
  return mode == AnchorMode::kExact ? "exact" : "sampled";
}

Anchor FindAnchor(const Classifier& f, const Document& doc, const AnchorConfig& cfg,
                  AnchorMode mode) {
  if (mode == AnchorMode::kExact) {
    return SearchAnchorExhaustive(doc, cfg.epsilon, ExactPrecisionFor(f),
                                  cfg.anchor_all_occurrences);
  }
  return SearchAnchorBeam(f, doc, cfg);
}

void ParallelFor(size_t count, size_t jobs, const std::function<void(size_t)>& task) {
  jobs = std::max<size_t>(1, std::min(jobs, count));
  if (jobs == 1) {
    for (size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mu;
  auto worker = [&] {
    while (!failed.load()) {
      const size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        task(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!error) error = std::current_exception();
        failed.store(true);
      }
    }
  };
  std::vector<std::thread> threads;
  threads.reserve(jobs);
  for (size_t t = 0; t < jobs; ++t) threads.emplace_back(worker);
  for (std::thread& t : threads) t.join();
  if (error) std::rethrow_exception(error);
}

namespace {

double SecondsSince(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string JoinWords(const auto& words) {
  std::string out;
  for (const std::string& w : words) {
    if (!out.empty()) out.push_back(' ');
    out += w;
  }
  return out;
}

}  // namespace

std::string FormatDouble(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw std::runtime_error("cannot format number");
  return std::string(buf, end);
}

FigureData RunFigure(const Classifier& f, const Document& doc, const FigureOptions& opts) {
  if (opts.runs == 0) throw std::invalid_argument("runs must be >= 1");
  const LocalDictionary dict(doc);
  if (dict.empty()) throw std::invalid_argument("cannot explain an empty document");

  struct RunResult {
    std::vector<double> coefficients;
    std::vector<uint8_t> in_anchor;
  };
  std::vector<RunResult> results(opts.runs);
  ParallelFor(opts.runs, opts.jobs, [&](size_t i) {
    LimeConfig lime = opts.lime;
    lime.seed = opts.master_seed + i;
    AnchorConfig anchors = opts.anchors;
    anchors.seed = opts.master_seed + i;

    const LimeExplanation exp = ExplainLime(f, doc, lime);
    const Anchor anchor = FindAnchor(f, doc, anchors, opts.mode);
    RunResult& r = results[i];
    r.coefficients.resize(dict.size());
    r.in_anchor.assign(dict.size(), 0);
    for (size_t j = 0; j < dict.size(); ++j) r.coefficients[j] = exp.coefficients.at(dict[j].word);
    for (size_t pos : anchor.positions) r.in_anchor[*dict.IndexOf(doc.tokens[pos])] = 1;
  });

  FigureData data;
  data.runs = opts.runs;
  data.mode = opts.mode;
  for (size_t j = 0; j < dict.size(); ++j) {
    FigureRow row;
    row.word = dict[j].word;
    row.multiplicity = dict[j].multiplicity();
    std::vector<double> values;
    values.reserve(opts.runs);
    for (const RunResult& r : results) {
      values.push_back(r.coefficients[j]);
      row.anchor_count += r.in_anchor[j];
    }
    const MeanStd s = Summarize(values);
    row.lime_mean = s.mean;
    row.lime_std = s.std;
    data.rows.push_back(std::move(row));
  }
  return data;
}

std::string FigureToCsv(const FigureData& data) {
  std::ostringstream out;
  out << "word,multiplicity,lime_mean,lime_std,anchor_count,runs\n";
  for (const FigureRow& row : data.rows) {
    out << row.word << ',' << row.multiplicity << ',' << FormatDouble(row.lime_mean) << ','
        << FormatDouble(row.lime_std) << ',' << row.anchor_count << ',' << data.runs << '\n';
  }
  return out.str();
}

Json FigureToJson(const FigureData& data) {
  Json j;
  j["runs"] = data.runs;
  j["anchor_mode"] = AnchorModeName(data.mode);
  Json rows = Json::array();
  for (const FigureRow& row : data.rows) {
    Json r;
    r["word"] = row.word;
    r["multiplicity"] = row.multiplicity;
    r["lime_mean"] = row.lime_mean;
    r["lime_std"] = row.lime_std;
    r["anchor_count"] = row.anchor_count;
    rows.push_back(std::move(r));
  }
  j["words"] = std::move(rows);
  return j;
}

LIndexReport RunCompare(const LogisticClassifier& f, const Corpus& corpus,
                        const CompareOptions& opts) {
  std::vector<size_t> positives;
  for (size_t i = 0; i < corpus.size(); ++i) {
    if (!corpus.documents[i].empty() && f.Predict(corpus.documents[i]) == 1) {
      positives.push_back(i);
    }
  }
  if (positives.empty()) {
    throw std::runtime_error("no document in the corpus is predicted positive");
  }

  LIndexReport report;
  report.n_corpus = corpus.size();
  report.n_skipped_negative = corpus.size() - positives.size();
  report.ranking = opts.ranking;
  report.records.resize(positives.size());

  ParallelFor(positives.size(), opts.jobs, [&](size_t k) {
    const size_t doc_id = positives[k];
    const Document& doc = corpus.documents[doc_id];
    CompareRecord& rec = report.records[k];
    rec.doc_id = doc_id;
    rec.n_tokens = doc.size();
    rec.seed = DeriveSeed(opts.master_seed, doc_id);

    AnchorConfig anchors = opts.anchors;
    anchors.seed = rec.seed;
    auto start = std::chrono::steady_clock::now();
    const Anchor anchor = FindAnchor(f, doc, anchors, opts.mode);
    rec.time_anchors_s = SecondsSince(start);

    const std::vector<std::string> anchor_set = anchor.WordSet(doc);
    rec.anchor_words = anchor.Words(doc);
    rec.anchor_precision = anchor.precision;
    rec.anchor_converged = anchor.converged;
    rec.n = anchor_set.size();
    rec.empty_anchor = rec.n == 0;

    LimeConfig lime = opts.lime;
    lime.seed = rec.seed;
    start = std::chrono::steady_clock::now();
    const LimeExplanation exp = ExplainLime(f, doc, lime);
    rec.time_lime_s = SecondsSince(start);

    rec.gt_topn = GroundTruthTopN(f, doc, rec.n, opts.ranking);
    rec.lime_topn = LimeTopN(exp, rec.n, opts.ranking);
    rec.jaccard_anchors = Jaccard(WordSet(anchor_set.begin(), anchor_set.end()), rec.gt_topn);
    rec.jaccard_lime = Jaccard(rec.lime_topn, rec.gt_topn);
  });

  std::vector<double> jl, ja, tl, ta;
  for (const CompareRecord& rec : report.records) {
    jl.push_back(rec.jaccard_lime);
    ja.push_back(rec.jaccard_anchors);
    tl.push_back(rec.time_lime_s);
    ta.push_back(rec.time_anchors_s);
  }
  report.l_lime = Summarize(jl);
  report.l_anchors = Summarize(ja);
  report.time_lime = Summarize(tl);
  report.time_anchors = Summarize(ta);
  return report;
}

namespace {

Json MeanStdJson(const MeanStd& s) {
  Json j;
  j["mean"] = s.mean;
  j["std"] = s.std;
  return j;
}

}  // namespace

Json ReportToJson(const LIndexReport& report, bool include_timing) {
  const MeanStd zero;
  Json j;
  j["ranking"] = RankingName(report.ranking);
  j["std"] = "population";
  j["n_corpus"] = report.n_corpus;
  j["n_explained"] = report.records.size();
  j["n_skipped_negative"] = report.n_skipped_negative;
  j["lime"] = {{"l_index", MeanStdJson(report.l_lime)},
               {"time_s", MeanStdJson(include_timing ? report.time_lime : zero)}};
  j["anchors"] = {{"l_index", MeanStdJson(report.l_anchors)},
                  {"time_s", MeanStdJson(include_timing ? report.time_anchors : zero)}};
  Json records = Json::array();
  for (const CompareRecord& rec : report.records) {
    Json r;
    r["doc_id"] = rec.doc_id;
    r["n_tokens"] = rec.n_tokens;
    r["N"] = rec.n;
    r["anchor_words"] = rec.anchor_words;
    r["lime_topn"] = rec.lime_topn;
    r["gt_topn"] = rec.gt_topn;
    r["jaccard_anchors"] = rec.jaccard_anchors;
    r["jaccard_lime"] = rec.jaccard_lime;
    r["anchor_precision"] = rec.anchor_precision;
    r["anchor_converged"] = rec.anchor_converged;
    r["empty_anchor"] = rec.empty_anchor;
    r["seed"] = rec.seed;
    r["time_lime_s"] = include_timing ? rec.time_lime_s : 0.0;
    r["time_anchors_s"] = include_timing ? rec.time_anchors_s : 0.0;
    records.push_back(std::move(r));
  }
  j["records"] = std::move(records);
  return j;
}

std::string ReportToCsv(const LIndexReport& report, bool include_timing) {
  std::ostringstream out;
  out << "doc_id,N,anchor_words,lime_topn,gt_topn,jaccard_anchors,jaccard_lime,"
         "time_lime_s,time_anchors_s\n";
  for (const CompareRecord& rec : report.records) {
    out << rec.doc_id << ',' << rec.n << ',' << JoinWords(rec.anchor_words) << ','
        << JoinWords(rec.lime_topn) << ',' << JoinWords(rec.gt_topn) << ','
        << FormatDouble(rec.jaccard_anchors) << ',' << FormatDouble(rec.jaccard_lime) << ','
        << FormatDouble(include_timing ? rec.time_lime_s : 0.0) << ','
        << FormatDouble(include_timing ? rec.time_anchors_s : 0.0) << '\n';
  }
  return out.str();
}

}  // namespace textexplain

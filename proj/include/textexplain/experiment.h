// Repeated-seed experiments: per-word figure data over R runs of both
// explainers, and LIME-vs-Anchors l-index comparisons over a corpus.

#ifndef TEXTEXPLAIN_EXPERIMENT_H_
#define TEXTEXPLAIN_EXPERIMENT_H_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "textexplain/anchors.h"
#include "textexplain/corpus.h"
#include "textexplain/lime.h"
#include "textexplain/metrics.h"
#include "textexplain/models.h"

namespace textexplain {

// kExact: exhaustive search over exact precisions (closed form for DNF,
// enumeration otherwise). kSampled: Hoeffding beam search.
enum class AnchorMode { kExact, kSampled };

AnchorMode ParseAnchorMode(const std::string& name);
std::string AnchorModeName(AnchorMode mode);

// Runs the configured anchor search. For kExact only cfg.epsilon and
// cfg.anchor_all_occurrences are used.
Anchor FindAnchor(const Classifier& f, const Document& doc, const AnchorConfig& cfg,
                  AnchorMode mode);

// Runs task(i) for i in [0, count) on `jobs` threads. Results must be written
// to per-index slots; the first exception is rethrown after all workers stop.
void ParallelFor(size_t count, size_t jobs, const std::function<void(size_t)>& task);

struct FigureOptions {
  LimeConfig lime;
  AnchorConfig anchors;
  size_t runs = 100;
  uint64_t master_seed = 0;
  AnchorMode mode = AnchorMode::kExact;
  size_t jobs = 1;
};

struct FigureRow {
  std::string word;
  size_t multiplicity = 0;
  double lime_mean = 0.0;
  double lime_std = 0.0;
  // Runs whose anchor contains the word.
  size_t anchor_count = 0;
};

struct FigureData {
  std::vector<FigureRow> rows;  // local-dictionary order
  size_t runs = 0;
  AnchorMode mode = AnchorMode::kExact;
};

// Run i uses seed master_seed + i for both explainers.
FigureData RunFigure(const Classifier& f, const Document& doc, const FigureOptions& opts);
std::string FigureToCsv(const FigureData& data);
Json FigureToJson(const FigureData& data);

struct CompareOptions {
  LimeConfig lime;
  AnchorConfig anchors;
  uint64_t master_seed = 0;
  size_t jobs = 1;
  Ranking ranking = Ranking::kSigned;
  AnchorMode mode = AnchorMode::kSampled;
};

struct CompareRecord {
  size_t doc_id = 0;
  size_t n_tokens = 0;
  // N = number of distinct anchor words.
  size_t n = 0;
  std::vector<std::string> anchor_words;
  WordSet lime_topn;
  WordSet gt_topn;
  double jaccard_anchors = 0.0;
  double jaccard_lime = 0.0;
  double anchor_precision = 0.0;
  bool anchor_converged = true;
  bool empty_anchor = false;
  uint64_t seed = 0;
  double time_lime_s = 0.0;
  double time_anchors_s = 0.0;
};

struct LIndexReport {
  std::vector<CompareRecord> records;  // ascending doc_id
  size_t n_corpus = 0;
  size_t n_skipped_negative = 0;
  Ranking ranking = Ranking::kSigned;
  MeanStd l_lime;
  MeanStd l_anchors;
  MeanStd time_lime;
  MeanStd time_anchors;
};

// For each document with f(z) = 1: anchor A(z), N = |A(z)|, LIME top-N and
// ground-truth top-N, both Jaccard values and wall times. Documents are seeded
// with DeriveSeed(master_seed, doc_index) so results do not depend on `jobs`.
LIndexReport RunCompare(const LogisticClassifier& f, const Corpus& corpus,
                        const CompareOptions& opts);

// `include_timing = false` zeroes every wall-time field, for byte-level
// reproducibility checks.
Json ReportToJson(const LIndexReport& report, bool include_timing = true);
std::string ReportToCsv(const LIndexReport& report, bool include_timing = true);

// Shortest round-trip representation of a double.
std::string FormatDouble(double v);

}  // namespace textexplain

#endif  // TEXTEXPLAIN_EXPERIMENT_H_

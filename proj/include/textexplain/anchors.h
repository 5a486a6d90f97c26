// Anchors for text. An anchor is a set of token positions of the explained
// document; perturbed samples keep the anchored tokens and independently
// replace every other token with "unk" with probability 1/2. The precision of
// an anchor is the probability that the classifier output on such a sample
// matches its output on the original document.

#ifndef TEXTEXPLAIN_ANCHORS_H_
#define TEXTEXPLAIN_ANCHORS_H_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "textexplain/corpus.h"
#include "textexplain/models.h"
#include "textexplain/random.h"

namespace textexplain {

// Replacement token for masked positions. It is never emitted by the
// tokenizer for a real word unless the text literally contains "unk".
inline constexpr const char* kUnkToken = "unk";

struct Anchor {
  // Ascending token indices into the explained document.
  std::vector<size_t> positions;
  double precision = 1.0;
  bool converged = true;
  // Model evaluations spent while searching (0 for exact searches).
  size_t n_model_calls = 0;

  size_t length() const { return positions.size(); }
  // Tokens at `positions`, in position order.
  std::vector<std::string> Words(const Document& doc) const;
  // Distinct words of the anchor, sorted.
  std::vector<std::string> WordSet(const Document& doc) const;

  Json ToJson(const Document& doc, const Json& doc_id, uint64_t seed, double wall_time_s) const;
};

struct AnchorConfig {
  double epsilon = 0.05;
  // Samples per batch.
  size_t batch_size = 10;
  // Confidence level for the Hoeffding bounds.
  double delta = 0.1;
  size_t beam_width = 4;
  // Per-candidate sampling budget, in batches.
  size_t max_batches = 200;
  uint64_t seed = 0;
  // When false a candidate word anchors only its first occurrence; when true
  // it anchors every occurrence.
  bool anchor_all_occurrences = false;

  void Validate() const;
};

struct PrecisionEstimate {
  double mean = 0.0;
  size_t n_samples = 0;
  double lower = 0.0;
  double upper = 1.0;
};

// Hoeffding half-width sqrt(ln(2/delta) / (2 n)).
double HoeffdingRadius(size_t n_samples, double delta);

// n perturbed copies of `doc` with the anchored positions kept.
std::vector<Document> SampleConditioned(const Document& doc,
                                        const std::vector<size_t>& anchor_positions, size_t n,
                                        Rng& rng);

// Mean of 1{f(x) = f(doc)} over n_samples conditioned samples, with
// Hoeffding bounds at level delta clipped to [0, 1].
PrecisionEstimate EmpiricalPrecision(const Classifier& f, const Document& doc,
                                     const std::vector<size_t>& anchor_positions, size_t n_samples,
                                     double delta, Rng& rng);

// Closed-form precision for a DNF classifier. Word j is present in a sample
// with probability 1 if one of its positions is anchored and 1 - 2^-m_j
// otherwise, independently across words; P(DNF = 1) follows by
// inclusion-exclusion over clauses. Supports up to 24 clauses.
double ExactPrecisionDnf(const DnfClassifier& clf, const Document& doc,
                         const std::vector<size_t>& anchor_positions);

// Averages 1{f(x) = f(doc)} over all 2^free masking patterns. Supports at
// most 20 free positions.
double ExactPrecisionBruteforce(const Classifier& f, const Document& doc,
                                const std::vector<size_t>& anchor_positions);

inline constexpr size_t kMaxBruteforceFreePositions = 20;
inline constexpr size_t kMaxExhaustiveAnchorWords = 12;

using PrecisionFn =
    std::function<double(const Document& doc, const std::vector<size_t>& positions)>;

// Precision function backed by ExactPrecisionDnf when `f` is a DNF and by
// ExactPrecisionBruteforce otherwise.
PrecisionFn ExactPrecisionFor(const Classifier& f);

// Anchor positions for a set of local-dictionary word indices.
std::vector<size_t> CandidatePositions(const LocalDictionary& dict,
                                       const std::vector<size_t>& word_indices,
                                       bool all_occurrences);

// Shortest anchor with precision >= 1 - epsilon over all word subsets
// (d <= 12). Ties go to the highest precision, then the lexicographically
// smallest positions. Falls back to anchoring every position when no word
// subset qualifies.
Anchor SearchAnchorExhaustive(const Document& doc, double epsilon, const PrecisionFn& precision_fn,
                              bool anchor_all_occurrences = false);

// Beam search with Hoeffding-bounded adaptive sampling. Candidates of one
// length are sampled batch by batch; a candidate is accepted once its lower
// bound reaches 1 - epsilon and dropped from sampling once its upper bound
// falls below it. The first length with an accepted candidate wins. When no
// candidate is ever accepted the one with the best lower bound is returned
// with converged = false.
Anchor SearchAnchorBeam(const Classifier& f, const Document& doc, const AnchorConfig& cfg);

}  // namespace textexplain

#endif  // TEXTEXPLAIN_ANCHORS_H_

// LIME for text: perturb a document by deleting whole word types, query the
// classifier, and fit a weighted linear surrogate on word presence.

#ifndef TEXTEXPLAIN_LIME_H_
#define TEXTEXPLAIN_LIME_H_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "textexplain/corpus.h"
#include "textexplain/linalg.h"
#include "textexplain/models.h"
#include "textexplain/random.h"

namespace textexplain {

struct LimeConfig {
  size_t n = 1000;
  // Width of the exponential kernel on cosine distance.
  double kernel_width = 0.25;
  double ridge = 1e-8;
  uint64_t seed = 0;

  void Validate() const;
};

// One perturbed sample. `mask[j]` is 1 when local-dictionary word j is kept;
// `deleted` lists the removed word indices in ascending order.
struct LimeSample {
  std::vector<uint8_t> mask;
  std::vector<size_t> deleted;
  int label = -1;
  double weight = 0.0;
};

// Intercept and one coefficient per local-dictionary word (dictionary order).
struct LinearSurrogate {
  double intercept = 0.0;
  std::vector<double> coefficients;
};

struct LimeExplanation {
  std::map<std::string, double> coefficients;
  double intercept = 0.0;
  size_t n_samples = 0;
  uint64_t seed = 0;

  Json ToJson(const Json& doc_id, double wall_time_s) const;
};

// Draws cfg.n deletion sets: the size s is uniform on {1..d}, then a uniform
// subset of that size. Labels and weights are left unset.
std::vector<LimeSample> SampleLime(const Document& doc, const LimeConfig& cfg, Rng& rng);

// Removes every occurrence of each deleted word, preserving token order.
Document ApplyMask(const Document& doc, const std::vector<std::string>& deleted);
Document ApplyMask(const Document& doc, const LocalDictionary& dict,
                   std::span<const size_t> deleted);

// exp(-D^2 / (2 width^2)) with D the cosine distance between the all-ones
// vector and `mask`; an all-zero mask has distance 1.
double SampleWeight(std::span<const uint8_t> mask, double kernel_width);

// Minimizes sum_i w_i (y_i - b0 - b.mask_i)^2 + ridge |b|^2 through the
// weighted normal equations. Throws SingularSystemError when the system is
// singular.
LinearSurrogate FitSurrogate(std::span<const LimeSample> samples, double ridge);

// Left- and right-hand sides of the normal equations FitSurrogate solves, for
// residual checks.
struct NormalEquations {
  SquareMatrix lhs{0};
  std::vector<double> rhs;
};
NormalEquations BuildNormalEquations(std::span<const LimeSample> samples, double ridge);

LimeExplanation ExplainLime(const Classifier& f, const Document& doc, const LimeConfig& cfg);

// Population version of ExplainLime: enumerates every deletion set S with its
// exact probability (1/d) / C(d, |S|) and solves the resulting weighted least
// squares problem. Requires d <= 15.
LimeExplanation ExactExpectedExplanation(const Classifier& f, const Document& doc,
                                         double kernel_width, double ridge);

inline constexpr size_t kMaxExactLimeWords = 15;

}  // namespace textexplain

#endif  // TEXTEXPLAIN_LIME_H_

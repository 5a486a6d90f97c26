#include "textexplain/lime.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

namespace textexplain {

void LimeConfig::Validate() const {
  if (n == 0) throw std::invalid_argument("LIME sample count must be positive");
  if (!(kernel_width > 0.0)) throw std::invalid_argument("kernel width must be positive");
  if (ridge < 0.0) throw std::invalid_argument("ridge must be nonnegative");
}

Json LimeExplanation::ToJson(const Json& doc_id, double wall_time_s) const {
  Json j;
  j["method"] = "lime";
  j["doc_id"] = doc_id;
  j["intercept"] = intercept;
  Json coefs = Json::object();
  for (const auto& [word, value] : coefficients) coefs[word] = value;
  j["coefficients"] = std::move(coefs);
  j["n"] = n_samples;
  j["seed"] = seed;
  j["wall_time_s"] = wall_time_s;
  return j;
}

std::vector<LimeSample> SampleLime(const Document& doc, const LimeConfig& cfg, Rng& rng) {
  cfg.Validate();
  const LocalDictionary dict(doc);
  const size_t d = dict.size();
  if (d == 0) throw std::invalid_argument("cannot explain an empty document");

  std::uniform_int_distribution<size_t> size_dist(1, d);
  std::vector<size_t> order(d);
  std::vector<LimeSample> samples(cfg.n);
  for (LimeSample& sample : samples) {
    const size_t s = size_dist(rng);
    std::iota(order.begin(), order.end(), size_t{0});
    // Partial Fisher-Yates: the first s entries form a uniform s-subset.
    for (size_t i = 0; i < s; ++i) {
      std::uniform_int_distribution<size_t> pick(i, d - 1);
      std::swap(order[i], order[pick(rng)]);
    }
    sample.deleted.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(s));
    std::sort(sample.deleted.begin(), sample.deleted.end());
    sample.mask.assign(d, 1);
    for (size_t j : sample.deleted) sample.mask[j] = 0;
  }
  return samples;
}

Document ApplyMask(const Document& doc, const LocalDictionary& dict,
                   std::span<const size_t> deleted) {
  std::vector<uint8_t> drop(doc.tokens.size(), 0);
  for (size_t j : deleted) {
    if (j >= dict.size()) throw std::out_of_range("deleted word index out of range");
    for (size_t pos : dict[j].positions) drop[pos] = 1;
  }
  std::vector<std::string> kept;
  kept.reserve(doc.tokens.size());
  for (size_t pos = 0; pos < doc.tokens.size(); ++pos) {
    if (!drop[pos]) kept.push_back(doc.tokens[pos]);
  }
  return FromTokens(std::move(kept));
}

Document ApplyMask(const Document& doc, const std::vector<std::string>& deleted) {
  const LocalDictionary dict(doc);
  std::vector<size_t> indices;
  for (const std::string& w : deleted) {
    auto idx = dict.IndexOf(w);
    if (!idx) throw std::invalid_argument("word '" + w + "' is not in the document");
    indices.push_back(*idx);
  }
  return ApplyMask(doc, dict, indices);
}

double SampleWeight(std::span<const uint8_t> mask, double kernel_width) {
  if (mask.empty()) throw std::invalid_argument("mask must have length >= 1");
  const size_t kept = static_cast<size_t>(std::count(mask.begin(), mask.end(), uint8_t{1}));
  double distance = 1.0;
  if (kept > 0) {
    // cos(1, mask) = kept / (sqrt(d) sqrt(kept)).
    distance = 1.0 - std::sqrt(static_cast<double>(kept) / static_cast<double>(mask.size()));
  }
  return std::exp(-distance * distance / (2.0 * kernel_width * kernel_width));
}

namespace {

// Accumulates X^T W X and X^T W y for the design [1, mask].
class NormalEquationAccumulator {
 public:
  explicit NormalEquationAccumulator(size_t d) : d_(d), lhs_(d + 1), rhs_(d + 1, 0.0) {}

  void Add(std::span<const uint8_t> mask, double y, double w) {
    if (mask.size() != d_) throw std::invalid_argument("inconsistent mask lengths");
    if (w == 0.0) return;
    active_.clear();
    active_.push_back(0);
    for (size_t j = 0; j < d_; ++j) {
      if (mask[j]) active_.push_back(j + 1);
    }
    for (size_t r : active_) {
      rhs_[r] += w * y;
      for (size_t c : active_) lhs_(r, c) += w;
    }
  }

  NormalEquations Finish(double ridge) const {
    NormalEquations eq{lhs_, rhs_};
    for (size_t j = 1; j <= d_; ++j) eq.lhs(j, j) += ridge;
    return eq;
  }

 private:
  size_t d_;
  SquareMatrix lhs_;
  std::vector<double> rhs_;
  std::vector<size_t> active_;
};

LinearSurrogate Solve(const NormalEquations& eq, double ridge) {
  std::vector<double> beta;
  try {
    beta = SolveSpd(eq.lhs, eq.rhs);
  } catch (const SingularSystemError&) {
    throw SingularSystemError(ridge > 0.0
                                  ? "surrogate normal equations are singular"
                                  : "surrogate normal equations are singular; use ridge > 0");
  }
  LinearSurrogate fit;
  fit.intercept = beta[0];
  fit.coefficients.assign(beta.begin() + 1, beta.end());
  return fit;
}

LimeExplanation ToExplanation(const LocalDictionary& dict, const LinearSurrogate& fit) {
  LimeExplanation exp;
  exp.intercept = fit.intercept;
  for (size_t j = 0; j < dict.size(); ++j) {
    exp.coefficients[dict[j].word] = fit.coefficients[j];
  }
  return exp;
}

}  // namespace

NormalEquations BuildNormalEquations(std::span<const LimeSample> samples, double ridge) {
  if (samples.empty()) throw std::invalid_argument("surrogate fit needs at least one sample");
  if (ridge < 0.0) throw std::invalid_argument("ridge must be nonnegative");
  NormalEquationAccumulator acc(samples.front().mask.size());
  for (const LimeSample& s : samples) {
    if (s.label != 0 && s.label != 1) throw std::invalid_argument("sample label not set");
    if (s.weight < 0.0) throw std::invalid_argument("sample weights must be nonnegative");
    acc.Add(s.mask, static_cast<double>(s.label), s.weight);
  }
  return acc.Finish(ridge);
}

LinearSurrogate FitSurrogate(std::span<const LimeSample> samples, double ridge) {
  return Solve(BuildNormalEquations(samples, ridge), ridge);
}

LimeExplanation ExplainLime(const Classifier& f, const Document& doc, const LimeConfig& cfg) {
  Rng rng(cfg.seed);
  std::vector<LimeSample> samples = SampleLime(doc, cfg, rng);
  const LocalDictionary dict(doc);
  for (LimeSample& s : samples) {
    s.label = f.Predict(ApplyMask(doc, dict, s.deleted));
    s.weight = SampleWeight(s.mask, cfg.kernel_width);
  }
  LimeExplanation exp = ToExplanation(dict, FitSurrogate(samples, cfg.ridge));
  exp.n_samples = cfg.n;
  exp.seed = cfg.seed;
  return exp;
}

LimeExplanation ExactExpectedExplanation(const Classifier& f, const Document& doc,
                                         double kernel_width, double ridge) {
  const LocalDictionary dict(doc);
  const size_t d = dict.size();
  if (d == 0) throw std::invalid_argument("cannot explain an empty document");
  if (d > kMaxExactLimeWords) {
    throw std::invalid_argument("exact LIME expectation supports at most " +
                                std::to_string(kMaxExactLimeWords) + " distinct words");
  }
  if (!(kernel_width > 0.0)) throw std::invalid_argument("kernel width must be positive");
  if (ridge < 0.0) throw std::invalid_argument("ridge must be nonnegative");

  // P(S) = P(|S| = s) / C(d, s) = 1 / (d C(d, s)).
  std::vector<double> binom(d + 1, 1.0);
  for (size_t s = 1; s <= d; ++s) {
    binom[s] = binom[s - 1] * static_cast<double>(d - s + 1) / static_cast<double>(s);
  }

  NormalEquationAccumulator acc(d);
  std::vector<uint8_t> mask(d);
  std::vector<size_t> deleted;
  for (uint32_t bits = 1; bits < (uint32_t{1} << d); ++bits) {
    deleted.clear();
    for (size_t j = 0; j < d; ++j) {
      const bool gone = (bits >> j) & 1U;
      mask[j] = gone ? 0 : 1;
      if (gone) deleted.push_back(j);
    }
    const double prob = 1.0 / (static_cast<double>(d) * binom[deleted.size()]);
    const double y = static_cast<double>(f.Predict(ApplyMask(doc, dict, deleted)));
    acc.Add(mask, y, prob * SampleWeight(mask, kernel_width));
  }
  LimeExplanation exp = ToExplanation(dict, Solve(acc.Finish(ridge), ridge));
  exp.n_samples = (size_t{1} << d) - 1;
  return exp;
}

}  // namespace textexplain

// Transparent binary text classifiers: DNF rules over word presence and
// thresholded logistic models on TF-IDF features.

#ifndef TEXTEXPLAIN_MODELS_H_
#define TEXTEXPLAIN_MODELS_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "textexplain/corpus.h"

namespace textexplain {

// A binary classifier over documents. Implementations are immutable and
// Predict must be safe to call concurrently.
class Classifier {
 public:
  virtual ~Classifier() = default;
  virtual int Predict(const Document& doc) const = 0;
  virtual Json ToJson() const = 0;
};

// Wraps an arbitrary callable; handy for constant or ad-hoc models.
class FunctionClassifier : public Classifier {
 public:
  explicit FunctionClassifier(std::function<int(const Document&)> fn) : fn_(std::move(fn)) {}
  int Predict(const Document& doc) const override { return fn_(doc); }
  Json ToJson() const override;

 private:
  std::function<int(const Document&)> fn_;
};

// Disjunction of conjunctions of word-presence tests, e.g.
// {{"not", "bad"}, {"good"}} is (not AND bad) OR good.
class DnfClassifier : public Classifier {
 public:
  using Clause = std::vector<std::string>;

  // Clause words are normalized with the tokenizer; each clause must
  // normalize to exactly one word per entry. Duplicate words in a clause are
  // merged.
  explicit DnfClassifier(std::vector<Clause> clauses);

  const std::vector<Clause>& clauses() const { return clauses_; }
  int Predict(const Document& doc) const override;
  Json ToJson() const override;

 private:
  std::vector<Clause> clauses_;
};

// f(z) = 1 iff sigmoid(intercept + coefficients . phi(z)) > 1/2, i.e. iff the
// margin is strictly positive.
class LogisticClassifier : public Classifier {
 public:
  // Coefficients are keyed by word; every key must be in the vectorizer
  // vocabulary. Missing words get coefficient 0.
  LogisticClassifier(std::shared_ptr<const TfIdfVectorizer> vectorizer, double intercept,
                     const std::map<std::string, double>& coefficients);
  // Dense coefficients aligned with the vocabulary.
  LogisticClassifier(std::shared_ptr<const TfIdfVectorizer> vectorizer, double intercept,
                     std::vector<double> coefficients);

  const TfIdfVectorizer& vectorizer() const { return *vectorizer_; }
  std::shared_ptr<const TfIdfVectorizer> shared_vectorizer() const { return vectorizer_; }
  double intercept() const { return intercept_; }
  const std::vector<double>& coefficients() const { return coefficients_; }
  // Coefficient of `word`; 0 for out-of-vocabulary words.
  double coefficient(std::string_view word) const;

  double Margin(const Document& doc) const;
  double Probability(const Document& doc) const;
  int Predict(const Document& doc) const override;

  // lambda_j * phi(doc)_j for a word of the document. Throws when the word
  // does not occur in the document.
  double WordContribution(const Document& doc, std::string_view word) const;

  // Writes the vectorizer inline.
  Json ToJson() const override;

 private:
  std::shared_ptr<const TfIdfVectorizer> vectorizer_;
  double intercept_;
  std::vector<double> coefficients_;
};

double Sigmoid(double t);

struct TrainConfig {
  double learning_rate = 1.0;
  int epochs = 1000;
  double l2_penalty = 1e-4;
  uint64_t seed = 0;
};

// Full-batch gradient descent on the mean logistic loss plus
// (l2_penalty / 2) * |w|^2 (the intercept is not penalized). Weights start at
// zero and the intercept at the log prior odds, so zero epochs predicts the
// majority class. The procedure has no random component; `seed` is carried
// for provenance only.
LogisticClassifier TrainLogistic(const Corpus& corpus, const TrainConfig& cfg);
// Same, with a caller-provided feature map.
LogisticClassifier TrainLogistic(const Corpus& corpus,
                                 std::shared_ptr<const TfIdfVectorizer> vectorizer,
                                 const TrainConfig& cfg);

// Mean regularized training loss, as minimized by TrainLogistic.
double LogisticLoss(const LogisticClassifier& clf, const Corpus& corpus, double l2_penalty);
double Accuracy(const Classifier& clf, const Corpus& corpus);

// Model files. `base_dir` resolves a logistic model's vectorizer when it is
// given as a relative path instead of inline.
std::unique_ptr<Classifier> ClassifierFromJson(const Json& j,
                                               const std::filesystem::path& base_dir = {});
std::unique_ptr<Classifier> LoadClassifier(const std::filesystem::path& path);

}  // namespace textexplain

#endif  // TEXTEXPLAIN_MODELS_H_

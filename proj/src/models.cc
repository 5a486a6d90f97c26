#include "textexplain/models.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <unordered_set>

namespace textexplain {

double Sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

Json FunctionClassifier::ToJson() const { return Json{{"type", "function"}}; }

DnfClassifier::DnfClassifier(std::vector<Clause> clauses) {
  if (clauses.empty()) throw std::invalid_argument("DNF needs at least one clause");
  for (const Clause& raw : clauses) {
    if (raw.empty()) throw std::invalid_argument("DNF clauses must be non-empty");
    Clause clause;
    for (const std::string& w : raw) {
      Document d = Tokenize(w);
      if (d.tokens.size() != 1) {
        throw std::invalid_argument("clause entry '" + w + "' is not a single word");
      }
      if (std::find(clause.begin(), clause.end(), d.tokens[0]) == clause.end()) {
        clause.push_back(d.tokens[0]);
      }
    }
    clauses_.push_back(std::move(clause));
  }
}

int DnfClassifier::Predict(const Document& doc) const {
  std::unordered_set<std::string_view> present(doc.tokens.begin(), doc.tokens.end());
  for (const Clause& clause : clauses_) {
    bool all = std::all_of(clause.begin(), clause.end(),
                           [&](const std::string& w) { return present.count(w) > 0; });
    if (all) return 1;
  }
  return 0;
}

Json DnfClassifier::ToJson() const {
  Json j;
  j["type"] = "dnf";
  j["clauses"] = clauses_;
  return j;
}

LogisticClassifier::LogisticClassifier(std::shared_ptr<const TfIdfVectorizer> vectorizer,
                                       double intercept, std::vector<double> coefficients)
    : vectorizer_(std::move(vectorizer)),
      intercept_(intercept),
      coefficients_(std::move(coefficients)) {
  if (!vectorizer_) throw std::invalid_argument("logistic model needs a vectorizer");
  if (coefficients_.size() != vectorizer_->dimension()) {
    throw std::invalid_argument("coefficient vector does not match vocabulary size");
  }
}

LogisticClassifier::LogisticClassifier(std::shared_ptr<const TfIdfVectorizer> vectorizer,
                                       double intercept,
                                       const std::map<std::string, double>& coefficients)
    : vectorizer_(std::move(vectorizer)), intercept_(intercept) {
  if (!vectorizer_) throw std::invalid_argument("logistic model needs a vectorizer");
  coefficients_.assign(vectorizer_->dimension(), 0.0);
  for (const auto& [word, value] : coefficients) {
    auto idx = vectorizer_->vocabulary().IndexOf(word);
    if (!idx) {
      throw std::invalid_argument("coefficient word '" + word +
                                  "' is not in the vectorizer vocabulary");
    }
    coefficients_[*idx] = value;
  }
}

double LogisticClassifier::coefficient(std::string_view word) const {
  auto idx = vectorizer_->vocabulary().IndexOf(word);
  return idx ? coefficients_[*idx] : 0.0;
}

double LogisticClassifier::Margin(const Document& doc) const {
  double margin = intercept_;
  for (const auto& f : vectorizer_->VectorizeSparse(doc)) {
    margin += coefficients_[f.index] * f.value;
  }
  return margin;
}

double LogisticClassifier::Probability(const Document& doc) const { return Sigmoid(Margin(doc)); }

int LogisticClassifier::Predict(const Document& doc) const { return Margin(doc) > 0.0 ? 1 : 0; }

double LogisticClassifier::WordContribution(const Document& doc, std::string_view word) const {
  if (std::find(doc.tokens.begin(), doc.tokens.end(), word) == doc.tokens.end()) {
    throw std::invalid_argument("word '" + std::string(word) + "' is not in the document");
  }
  auto idx = vectorizer_->vocabulary().IndexOf(word);
  if (!idx) return 0.0;
  for (const auto& f : vectorizer_->VectorizeSparse(doc)) {
    if (f.index == *idx) return coefficients_[*idx] * f.value;
  }
  return 0.0;
}

Json LogisticClassifier::ToJson() const {
  Json j;
  j["type"] = "logistic";
  j["intercept"] = intercept_;
  Json coefs = Json::object();
  const auto& words = vectorizer_->vocabulary().words();
  for (size_t i = 0; i < words.size(); ++i) {
    if (coefficients_[i] != 0.0) coefs[words[i]] = coefficients_[i];
  }
  j["coefficients"] = std::move(coefs);
  j["vectorizer"] = vectorizer_->ToJson();
  return j;
}

namespace {

using SparseRows = std::vector<std::vector<TfIdfVectorizer::Feature>>;

double MeanLoss(const SparseRows& rows, const std::vector<int>& labels, double intercept,
                const std::vector<double>& w, double l2) {
  double loss = 0.0;
  for (size_t i = 0; i < rows.size(); ++i) {
    double margin = intercept;
    for (const auto& f : rows[i]) margin += w[f.index] * f.value;
    // log(1 + exp(-y' m)) with y' in {-1, +1}, computed stably.
    const double s = labels[i] == 1 ? margin : -margin;
    loss += s > 0 ? std::log1p(std::exp(-s)) : -s + std::log1p(std::exp(s));
  }
  double penalty = 0.0;
  for (double v : w) penalty += v * v;
  return loss / static_cast<double>(rows.size()) + 0.5 * l2 * penalty;
}

}  // namespace

LogisticClassifier TrainLogistic(const Corpus& corpus,
                                 std::shared_ptr<const TfIdfVectorizer> vectorizer,
                                 const TrainConfig& cfg) {
  if (corpus.documents.empty()) throw std::invalid_argument("empty corpus");
  if (!(cfg.learning_rate > 0.0)) throw std::invalid_argument("learning_rate must be positive");
  if (cfg.epochs < 0) throw std::invalid_argument("epochs must be nonnegative");
  if (cfg.l2_penalty < 0.0) throw std::invalid_argument("l2_penalty must be nonnegative");
  const size_t positives =
      static_cast<size_t>(std::count(corpus.labels.begin(), corpus.labels.end(), 1));
  if (positives == 0 || positives == corpus.size()) {
    throw std::invalid_argument("training corpus must contain both labels");
  }

  SparseRows rows;
  rows.reserve(corpus.size());
  for (const Document& doc : corpus.documents) rows.push_back(vectorizer->VectorizeSparse(doc));

  const double n = static_cast<double>(corpus.size());
  const double prior = static_cast<double>(positives) / n;
  double intercept = std::log(prior / (1.0 - prior));
  std::vector<double> w(vectorizer->dimension(), 0.0);
  std::vector<double> grad(w.size());

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::fill(grad.begin(), grad.end(), 0.0);
    double grad_intercept = 0.0;
    for (size_t i = 0; i < rows.size(); ++i) {
      double margin = intercept;
      for (const auto& f : rows[i]) margin += w[f.index] * f.value;
      const double residual = Sigmoid(margin) - corpus.labels[i];
      grad_intercept += residual;
      for (const auto& f : rows[i]) grad[f.index] += residual * f.value;
    }
    intercept -= cfg.learning_rate * grad_intercept / n;
    for (size_t k = 0; k < w.size(); ++k) {
      w[k] -= cfg.learning_rate * (grad[k] / n + cfg.l2_penalty * w[k]);
    }
  }
  return LogisticClassifier(std::move(vectorizer), intercept, std::move(w));
}

LogisticClassifier TrainLogistic(const Corpus& corpus, const TrainConfig& cfg) {
  auto vectorizer = std::make_shared<const TfIdfVectorizer>(TfIdfVectorizer::Fit(corpus));
  return TrainLogistic(corpus, std::move(vectorizer), cfg);
}

double LogisticLoss(const LogisticClassifier& clf, const Corpus& corpus, double l2_penalty) {
  if (corpus.documents.empty()) throw std::invalid_argument("empty corpus");
  SparseRows rows;
  for (const Document& doc : corpus.documents) {
    rows.push_back(clf.vectorizer().VectorizeSparse(doc));
  }
  return MeanLoss(rows, corpus.labels, clf.intercept(), clf.coefficients(), l2_penalty);
}

double Accuracy(const Classifier& clf, const Corpus& corpus) {
  if (corpus.documents.empty()) throw std::invalid_argument("empty corpus");
  size_t correct = 0;
  for (size_t i = 0; i < corpus.size(); ++i) {
    if (clf.Predict(corpus.documents[i]) == corpus.labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(corpus.size());
}

namespace {

Json ReadJsonFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

}  // namespace

std::unique_ptr<Classifier> ClassifierFromJson(const Json& j,
                                               const std::filesystem::path& base_dir) {
  try {
    const std::string type = j.at("type").get<std::string>();
    if (type == "dnf") {
      return std::make_unique<DnfClassifier>(
          j.at("clauses").get<std::vector<DnfClassifier::Clause>>());
    }
    if (type == "logistic") {
      const Json& vec = j.at("vectorizer");
      Json vec_json;
      if (vec.is_string()) {
        std::filesystem::path p = vec.get<std::string>();
        if (p.is_relative()) p = base_dir / p;
        vec_json = ReadJsonFile(p);
      } else {
        vec_json = vec;
      }
      auto vectorizer =
          std::make_shared<const TfIdfVectorizer>(TfIdfVectorizer::FromJson(vec_json));
      std::map<std::string, double> coefs;
      if (j.contains("coefficients")) {
        coefs = j.at("coefficients").get<std::map<std::string, double>>();
      }
      return std::make_unique<LogisticClassifier>(std::move(vectorizer), j.value("intercept", 0.0),
                                                  coefs);
    }
    throw std::invalid_argument("unknown model type '" + type + "'");
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("invalid model JSON: ") + e.what());
  }
}

std::unique_ptr<Classifier> LoadClassifier(const std::filesystem::path& path) {
  return ClassifierFromJson(ReadJsonFile(path), path.parent_path());
}

}  // namespace textexplain

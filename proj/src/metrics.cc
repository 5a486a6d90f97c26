#include "textexplain/metrics.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace textexplain {

Ranking ParseRanking(const std::string& name) {
  if (name == "signed") return Ranking::kSigned;
  if (name == "absolute") return Ranking::kAbsolute;
  throw std::invalid_argument("ranking must be 'signed' or 'absolute', got '" + name + "'");
}

std::string RankingName(Ranking ranking) {
  return ranking == Ranking::kSigned ? "signed" : "absolute";
}

RankedWords::RankedWords(std::vector<std::pair<std::string, double>> scored, Ranking ranking)
    : entries_(std::move(scored)) {
  if (ranking == Ranking::kAbsolute) {
    for (auto& [word, score] : entries_) score = std::abs(score);
  }
  std::sort(entries_.begin(), entries_.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  WordSet seen;
  for (const auto& [word, score] : entries_) {
    if (!seen.insert(word).second) {
      throw std::invalid_argument("duplicate word in ranking: " + word);
    }
  }
}

WordSet RankedWords::Top(size_t n) const {
  if (n > entries_.size()) {
    throw std::invalid_argument("requested top " + std::to_string(n) + " of only " +
                                std::to_string(entries_.size()) + " words");
  }
  WordSet top;
  for (size_t i = 0; i < n; ++i) top.insert(entries_[i].first);
  return top;
}

double Jaccard(const WordSet& a, const WordSet& b) {
  if (a.empty() && b.empty()) return 1.0;
  size_t common = 0;
  for (const std::string& w : a) common += b.count(w);
  const size_t unite = a.size() + b.size() - common;
  return static_cast<double>(common) / static_cast<double>(unite);
}

RankedWords RankByContribution(const LogisticClassifier& clf, const Document& doc,
                               Ranking ranking) {
  const LocalDictionary dict(doc);
  const auto& vocab = clf.vectorizer().vocabulary();
  const auto features = clf.vectorizer().VectorizeSparse(doc);
  std::vector<std::pair<std::string, double>> scored;
  scored.reserve(dict.size());
  for (const auto& entry : dict.entries()) {
    double contribution = 0.0;
    if (auto idx = vocab.IndexOf(entry.word)) {
      auto it = std::find_if(features.begin(), features.end(),
                             [&](const auto& f) { return f.index == *idx; });
      if (it != features.end()) contribution = clf.coefficients()[*idx] * it->value;
    }
    scored.emplace_back(entry.word, contribution);
  }
  return RankedWords(std::move(scored), ranking);
}

WordSet GroundTruthTopN(const LogisticClassifier& clf, const Document& doc, size_t n,
                        Ranking ranking) {
  return RankByContribution(clf, doc, ranking).Top(n);
}

RankedWords RankByCoefficient(const LimeExplanation& exp, Ranking ranking) {
  return RankedWords({exp.coefficients.begin(), exp.coefficients.end()}, ranking);
}

WordSet LimeTopN(const LimeExplanation& exp, size_t n, Ranking ranking) {
  return RankByCoefficient(exp, ranking).Top(n);
}

MeanStd Summarize(const std::vector<double>& values) {
  if (values.empty()) throw std::invalid_argument("cannot summarize an empty list");
  // Summing in sorted order makes the result independent of input order.
  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  double sum = 0.0;
  for (double v : sorted) sum += v;
  MeanStd out;
  out.mean = sum / static_cast<double>(values.size());
  double sq = 0.0;
  for (double v : sorted) sq += (v - out.mean) * (v - out.mean);
  out.std = std::sqrt(sq / static_cast<double>(values.size()));
  return out;
}

MeanStd LIndex(const std::vector<std::pair<WordSet, WordSet>>& per_document) {
  if (per_document.empty()) throw std::invalid_argument("l-index needs at least one document");
  std::vector<double> values;
  values.reserve(per_document.size());
  for (const auto& [explainer, truth] : per_document) values.push_back(Jaccard(explainer, truth));
  return Summarize(values);
}

}  // namespace textexplain

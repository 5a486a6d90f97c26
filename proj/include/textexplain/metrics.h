// Word rankings, Jaccard similarity and the l-index: the mean Jaccard
// similarity between an explainer's top-N words and the top-N words by
// logistic contribution lambda_j * phi(z)_j.

#ifndef TEXTEXPLAIN_METRICS_H_
#define TEXTEXPLAIN_METRICS_H_

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "textexplain/corpus.h"
#include "textexplain/lime.h"
#include "textexplain/models.h"

namespace textexplain {

using WordSet = std::set<std::string>;

enum class Ranking { kSigned, kAbsolute };

Ranking ParseRanking(const std::string& name);
std::string RankingName(Ranking ranking);

// Words with scores, descending by score; equal scores in alphabetical order.
class RankedWords {
 public:
  RankedWords() = default;
  // `scored` must hold distinct words.
  explicit RankedWords(std::vector<std::pair<std::string, double>> scored,
                       Ranking ranking = Ranking::kSigned);

  const std::vector<std::pair<std::string, double>>& entries() const { return entries_; }
  size_t size() const { return entries_.size(); }
  // First n words. Throws when n > size().
  WordSet Top(size_t n) const;

 private:
  std::vector<std::pair<std::string, double>> entries_;
};

// |a & b| / |a | b|; two empty sets have similarity 1.
double Jaccard(const WordSet& a, const WordSet& b);

RankedWords RankByContribution(const LogisticClassifier& clf, const Document& doc,
                               Ranking ranking = Ranking::kSigned);
WordSet GroundTruthTopN(const LogisticClassifier& clf, const Document& doc, size_t n,
                        Ranking ranking = Ranking::kSigned);

RankedWords RankByCoefficient(const LimeExplanation& exp, Ranking ranking = Ranking::kSigned);
WordSet LimeTopN(const LimeExplanation& exp, size_t n, Ranking ranking = Ranking::kSigned);

struct MeanStd {
  double mean = 0.0;
  // Population standard deviation.
  double std = 0.0;
};

MeanStd Summarize(const std::vector<double>& values);

// Mean and population std of Jaccard(E_N(z), Lambda_N(z)) over the corpus.
MeanStd LIndex(const std::vector<std::pair<WordSet, WordSet>>& per_document);

}  // namespace textexplain

#endif  // TEXTEXPLAIN_METRICS_H_

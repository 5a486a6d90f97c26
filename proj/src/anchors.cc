#include "textexplain/anchors.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <set>
#include <stdexcept>
#include <unordered_map>

namespace textexplain {

std::vector<std::string> Anchor::Words(const Document& doc) const {
  std::vector<std::string> words;
  words.reserve(positions.size());
  for (size_t pos : positions) words.push_back(doc.tokens.at(pos));
  return words;
}

std::vector<std::string> Anchor::WordSet(const Document& doc) const {
  std::vector<std::string> words = Words(doc);
  std::sort(words.begin(), words.end());
  words.erase(std::unique(words.begin(), words.end()), words.end());
  return words;
}

Json Anchor::ToJson(const Document& doc, const Json& doc_id, uint64_t seed,
                    double wall_time_s) const {
  Json j;
  j["method"] = "anchors";
  j["doc_id"] = doc_id;
  j["anchor_words"] = Words(doc);
  j["positions"] = positions;
  j["precision"] = precision;
  j["converged"] = converged;
  j["n_model_calls"] = n_model_calls;
  j["seed"] = seed;
  j["wall_time_s"] = wall_time_s;
  return j;
}

void AnchorConfig::Validate() const {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("epsilon must be in (0,1)");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must be in (0,1)");
  if (batch_size == 0) throw std::invalid_argument("batch size must be positive");
  if (beam_width == 0) throw std::invalid_argument("beam width must be positive");
  if (max_batches == 0) throw std::invalid_argument("max_batches must be positive");
}

double HoeffdingRadius(size_t n_samples, double delta) {
  if (n_samples == 0) return 1.0;
  return std::sqrt(std::log(2.0 / delta) / (2.0 * static_cast<double>(n_samples)));
}

namespace {

void CheckPositions(const Document& doc, const std::vector<size_t>& positions) {
  for (size_t pos : positions) {
    if (pos >= doc.tokens.size()) {
      throw std::out_of_range("anchor position " + std::to_string(pos) +
                              " outside document of length " + std::to_string(doc.tokens.size()));
    }
  }
}

std::vector<size_t> FreePositions(const Document& doc, const std::vector<size_t>& anchored) {
  std::vector<uint8_t> fixed(doc.tokens.size(), 0);
  for (size_t pos : anchored) fixed[pos] = 1;
  std::vector<size_t> free;
  for (size_t pos = 0; pos < doc.tokens.size(); ++pos) {
    if (!fixed[pos]) free.push_back(pos);
  }
  return free;
}

PrecisionEstimate MakeEstimate(size_t hits, size_t n, double delta) {
  PrecisionEstimate est;
  est.n_samples = n;
  est.mean = n > 0 ? static_cast<double>(hits) / static_cast<double>(n) : 0.0;
  const double r = HoeffdingRadius(n, delta);
  est.lower = std::max(0.0, est.mean - r);
  est.upper = std::min(1.0, est.mean + r);
  return est;
}

}  // namespace

std::vector<Document> SampleConditioned(const Document& doc,
                                        const std::vector<size_t>& anchor_positions, size_t n,
                                        Rng& rng) {
  CheckPositions(doc, anchor_positions);
  const std::vector<size_t> free = FreePositions(doc, anchor_positions);
  std::vector<Document> samples;
  samples.reserve(n);
  for (size_t i = 0; i < n; ++i) {
    std::vector<std::string> tokens = doc.tokens;
    uint64_t bits = 0;
    int available = 0;
    for (size_t pos : free) {
      if (available == 0) {
        bits = rng();
        available = 64;
      }
      if (bits & 1U) tokens[pos] = kUnkToken;
      bits >>= 1;
      --available;
    }
    samples.push_back(FromTokens(std::move(tokens)));
  }
  return samples;
}

PrecisionEstimate EmpiricalPrecision(const Classifier& f, const Document& doc,
                                     const std::vector<size_t>& anchor_positions, size_t n_samples,
                                     double delta, Rng& rng) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must be in (0,1)");
  const int target = f.Predict(doc);
  size_t hits = 0;
  for (const Document& x : SampleConditioned(doc, anchor_positions, n_samples, rng)) {
    if (f.Predict(x) == target) ++hits;
  }
  return MakeEstimate(hits, n_samples, delta);
}

double ExactPrecisionDnf(const DnfClassifier& clf, const Document& doc,
                         const std::vector<size_t>& anchor_positions) {
  CheckPositions(doc, anchor_positions);
  const auto& clauses = clf.clauses();
  if (clauses.size() > 24) throw std::invalid_argument("too many clauses for inclusion-exclusion");

  std::vector<uint8_t> anchored(doc.tokens.size(), 0);
  for (size_t pos : anchor_positions) anchored[pos] = 1;
  const LocalDictionary dict(doc);

  // Clause words as indices into a shared presence-probability table.
  std::unordered_map<std::string, size_t> word_index;
  std::vector<double> presence;
  std::vector<std::vector<size_t>> clause_words;
  for (const auto& clause : clauses) {
    std::vector<size_t> ids;
    for (const std::string& w : clause) {
      auto [it, inserted] = word_index.try_emplace(w, presence.size());
      if (inserted) {
        double p = 0.0;
        if (auto idx = dict.IndexOf(w)) {
          const auto& positions = dict[*idx].positions;
          const bool fixed = std::any_of(positions.begin(), positions.end(),
                                         [&](size_t pos) { return anchored[pos] != 0; });
          p = fixed ? 1.0 : 1.0 - std::ldexp(1.0, -static_cast<int>(positions.size()));
        }
        presence.push_back(p);
      }
      ids.push_back(it->second);
    }
    clause_words.push_back(std::move(ids));
  }

  const size_t k = clause_words.size();
  double p_positive = 0.0;
  std::vector<uint8_t> used(presence.size());
  for (uint32_t subset = 1; subset < (uint32_t{1} << k); ++subset) {
    std::fill(used.begin(), used.end(), 0);
    for (size_t c = 0; c < k; ++c) {
      if ((subset >> c) & 1U) {
        for (size_t id : clause_words[c]) used[id] = 1;
      }
    }
    double term = 1.0;
    for (size_t id = 0; id < presence.size(); ++id) {
      if (used[id]) term *= presence[id];
    }
    p_positive += (std::popcount(subset) % 2 == 1) ? term : -term;
  }
  p_positive = std::clamp(p_positive, 0.0, 1.0);
  return clf.Predict(doc) == 1 ? p_positive : 1.0 - p_positive;
}

double ExactPrecisionBruteforce(const Classifier& f, const Document& doc,
                                const std::vector<size_t>& anchor_positions) {
  CheckPositions(doc, anchor_positions);
  const std::vector<size_t> free = FreePositions(doc, anchor_positions);
  if (free.size() > kMaxBruteforceFreePositions) {
    throw std::invalid_argument("brute-force precision supports at most " +
                                std::to_string(kMaxBruteforceFreePositions) +
                                " free positions, got " + std::to_string(free.size()));
  }
  const int target = f.Predict(doc);
  const uint64_t patterns = uint64_t{1} << free.size();
  uint64_t hits = 0;
  for (uint64_t bits = 0; bits < patterns; ++bits) {
    std::vector<std::string> tokens = doc.tokens;
    for (size_t i = 0; i < free.size(); ++i) {
      if ((bits >> i) & 1U) tokens[free[i]] = kUnkToken;
    }
    if (f.Predict(FromTokens(std::move(tokens))) == target) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(patterns);
}

PrecisionFn ExactPrecisionFor(const Classifier& f) {
  if (const auto* dnf = dynamic_cast<const DnfClassifier*>(&f)) {
    return [dnf](const Document& doc, const std::vector<size_t>& positions) {
      return ExactPrecisionDnf(*dnf, doc, positions);
    };
  }
  return [&f](const Document& doc, const std::vector<size_t>& positions) {
    return ExactPrecisionBruteforce(f, doc, positions);
  };
}

std::vector<size_t> CandidatePositions(const LocalDictionary& dict,
                                       const std::vector<size_t>& word_indices,
                                       bool all_occurrences) {
  std::vector<size_t> positions;
  for (size_t j : word_indices) {
    const auto& occ = dict[j].positions;
    if (all_occurrences) {
      positions.insert(positions.end(), occ.begin(), occ.end());
    } else {
      positions.push_back(occ.front());
    }
  }
  std::sort(positions.begin(), positions.end());
  return positions;
}

namespace {

// Exact precisions are compared with a little slack so the closed form and
// the enumeration pick the same anchors.
constexpr double kExactSlack = 1e-12;

// Calls `visit` on every k-subset of {0..d-1} in lexicographic order.
template <typename Visit>
void ForEachCombination(size_t d, size_t k, Visit&& visit) {
  std::vector<size_t> combo(k);
  for (size_t i = 0; i < k; ++i) combo[i] = i;
  while (true) {
    visit(combo);
    size_t i = k;
    while (i > 0 && combo[i - 1] == d - k + i - 1) --i;
    if (i == 0) return;
    ++combo[i - 1];
    for (size_t j = i; j < k; ++j) combo[j] = combo[j - 1] + 1;
  }
}

}  // namespace

Anchor SearchAnchorExhaustive(const Document& doc, double epsilon, const PrecisionFn& precision_fn,
                              bool anchor_all_occurrences) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("epsilon must be in (0,1)");
  const LocalDictionary dict(doc);
  if (dict.size() > kMaxExhaustiveAnchorWords) {
    throw std::invalid_argument("exhaustive anchor search supports at most " +
                                std::to_string(kMaxExhaustiveAnchorWords) +
                                " distinct words, got " + std::to_string(dict.size()));
  }
  const double threshold = 1.0 - epsilon - kExactSlack;

  for (size_t k = 0; k <= dict.size(); ++k) {
    bool found = false;
    Anchor best;
    ForEachCombination(dict.size(), k, [&](const std::vector<size_t>& words) {
      std::vector<size_t> positions = CandidatePositions(dict, words, anchor_all_occurrences);
      const double prec = precision_fn(doc, positions);
      if (prec < threshold) return;
      const bool better =
          !found || prec > best.precision + kExactSlack ||
          (std::abs(prec - best.precision) <= kExactSlack && positions < best.positions);
      if (better) {
        found = true;
        best.positions = std::move(positions);
        best.precision = prec;
      }
    });
    if (found) return best;
  }

  Anchor full;
  full.positions.resize(doc.tokens.size());
  for (size_t i = 0; i < full.positions.size(); ++i) full.positions[i] = i;
  full.precision = precision_fn(doc, full.positions);
  return full;
}

namespace {

struct Candidate {
  std::vector<size_t> words;
  std::vector<size_t> positions;
  size_t hits = 0;
  size_t n = 0;
  enum class State { kOpen, kAccepted, kRejected } state = State::kOpen;

  PrecisionEstimate Estimate(double delta) const { return MakeEstimate(hits, n, delta); }
};

// Orders by lower bound, then mean (both descending), then leftmost positions.
bool RanksBefore(const Candidate& a, const Candidate& b, double delta) {
  const PrecisionEstimate ea = a.Estimate(delta);
  const PrecisionEstimate eb = b.Estimate(delta);
  if (ea.lower != eb.lower) return ea.lower > eb.lower;
  if (ea.mean != eb.mean) return ea.mean > eb.mean;
  return a.positions < b.positions;
}

}  // namespace

Anchor SearchAnchorBeam(const Classifier& f, const Document& doc, const AnchorConfig& cfg) {
  cfg.Validate();
  const LocalDictionary dict(doc);
  const int target = f.Predict(doc);
  const double threshold = 1.0 - cfg.epsilon;
  Rng rng(cfg.seed);
  size_t model_calls = 1;

  auto sample_batch = [&](Candidate& c) {
    for (const Document& x : SampleConditioned(doc, c.positions, cfg.batch_size, rng)) {
      if (f.Predict(x) == target) ++c.hits;
    }
    c.n += cfg.batch_size;
    model_calls += cfg.batch_size;
    const PrecisionEstimate est = c.Estimate(cfg.delta);
    if (est.lower >= threshold) {
      c.state = Candidate::State::kAccepted;
    } else if (est.upper < threshold) {
      c.state = Candidate::State::kRejected;
    }
  };

  // Samples all open candidates in lockstep until one is accepted, none is
  // open, or the per-candidate budget runs out.
  auto evaluate = [&](std::vector<Candidate>& cands) -> const Candidate* {
    for (size_t round = 0; round < cfg.max_batches; ++round) {
      bool any_open = false;
      for (Candidate& c : cands) {
        if (c.state != Candidate::State::kOpen) continue;
        sample_batch(c);
        any_open = true;
      }
      const Candidate* winner = nullptr;
      for (const Candidate& c : cands) {
        if (c.state != Candidate::State::kAccepted) continue;
        if (!winner || RanksBefore(c, *winner, cfg.delta)) winner = &c;
      }
      if (winner || !any_open) return winner;
    }
    return nullptr;
  };

  auto to_anchor = [&](const Candidate& c, bool converged) {
    Anchor a;
    a.positions = c.positions;
    a.precision = c.Estimate(cfg.delta).mean;
    a.converged = converged;
    a.n_model_calls = model_calls;
    return a;
  };

  std::vector<Candidate> beam(1);
  if (const Candidate* w = evaluate(beam)) return to_anchor(*w, true);
  Candidate best_seen = beam.front();

  for (size_t length = 1; length <= dict.size(); ++length) {
    std::set<std::vector<size_t>> expansions;
    for (const Candidate& b : beam) {
      for (size_t j = 0; j < dict.size(); ++j) {
        if (std::binary_search(b.words.begin(), b.words.end(), j)) continue;
        std::vector<size_t> words = b.words;
        words.insert(std::upper_bound(words.begin(), words.end(), j), j);
        expansions.insert(std::move(words));
      }
    }
    std::vector<Candidate> cands;
    cands.reserve(expansions.size());
    for (const auto& words : expansions) {
      Candidate c;
      c.words = words;
      c.positions = CandidatePositions(dict, words, cfg.anchor_all_occurrences);
      cands.push_back(std::move(c));
    }
    if (cands.empty()) break;
    if (const Candidate* w = evaluate(cands)) return to_anchor(*w, true);

    std::sort(cands.begin(), cands.end(),
              [&](const Candidate& a, const Candidate& b) { return RanksBefore(a, b, cfg.delta); });
    if (RanksBefore(cands.front(), best_seen, cfg.delta)) best_seen = cands.front();
    if (cands.size() > cfg.beam_width) cands.resize(cfg.beam_width);
    beam = std::move(cands);
  }
  return to_anchor(best_seen, false);
}

}  // namespace textexplain

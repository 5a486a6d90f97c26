// Tokenization, per-document dictionaries, TF-IDF vectorization and CSV
// corpus ingestion.

#ifndef TEXTEXPLAIN_CORPUS_H_
#define TEXTEXPLAIN_CORPUS_H_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"

namespace textexplain {

// Key order is preserved so serialized output follows the documented schemas.
using Json = nlohmann::ordered_json;

// A tokenized document. Tokens are lowercase alphanumeric runs in source
// order; `source_text` keeps the original string for reporting.
struct Document {
  std::vector<std::string> tokens;
  std::string source_text;

  size_t size() const { return tokens.size(); }
  bool empty() const { return tokens.empty(); }
};

// One distinct word of a document with its multiplicity and the token
// positions where it occurs (ascending).
struct WordOccurrences {
  std::string word;
  std::vector<size_t> positions;

  size_t multiplicity() const { return positions.size(); }
};

// Distinct words of a document, in order of first occurrence.
class LocalDictionary {
 public:
  explicit LocalDictionary(const Document& doc);

  const std::vector<WordOccurrences>& entries() const { return entries_; }
  size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const WordOccurrences& operator[](size_t i) const { return entries_[i]; }

  bool contains(std::string_view word) const;
  // Index into entries(), or nullopt when the word is absent.
  std::optional<size_t> IndexOf(std::string_view word) const;
  // Multiplicity of `word`; 0 when absent.
  size_t multiplicity(std::string_view word) const;

 private:
  std::vector<WordOccurrences> entries_;
  std::unordered_map<std::string, size_t> index_;
};

Document Tokenize(std::string_view text);

// Rebuilds a document from tokens; `source_text` is the space-join.
Document FromTokens(std::vector<std::string> tokens);

struct Corpus {
  std::vector<Document> documents;
  std::vector<int> labels;

  size_t size() const { return documents.size(); }
  void Add(std::string_view text, int label);
};

// Vocabulary (sorted when fitted) with per-word document frequencies.
class GlobalDictionary {
 public:
  GlobalDictionary() = default;
  GlobalDictionary(std::vector<std::string> words, std::vector<size_t> doc_freq);

  const std::vector<std::string>& words() const { return words_; }
  const std::vector<size_t>& doc_freq() const { return doc_freq_; }
  size_t size() const { return words_.size(); }
  std::optional<size_t> IndexOf(std::string_view word) const;

 private:
  std::vector<std::string> words_;
  std::vector<size_t> doc_freq_;
  std::unordered_map<std::string, size_t> index_;
};

// Smooth-idf TF-IDF with raw term counts and per-document L2 normalization:
//   idf(w) = ln((1 + N) / (1 + df(w))) + 1.
// Tokens outside the vocabulary contribute nothing.
class TfIdfVectorizer {
 public:
  // Sparse feature: vocabulary index and value.
  struct Feature {
    size_t index;
    double value;
  };

  static TfIdfVectorizer Fit(const Corpus& corpus);

  // Restores a vectorizer from its serialized fields. Document frequencies
  // are recovered by inverting the idf formula.
  TfIdfVectorizer(std::vector<std::string> vocab, std::vector<double> idf, size_t corpus_size);

  const GlobalDictionary& vocabulary() const { return vocabulary_; }
  const std::vector<double>& idf() const { return idf_; }
  size_t corpus_size() const { return corpus_size_; }
  size_t dimension() const { return vocabulary_.size(); }
  double idf(std::string_view word) const;

  // Dense feature vector of dimension D.
  std::vector<double> Vectorize(const Document& doc) const;
  // Nonzero entries of Vectorize(doc), ordered by vocabulary index.
  std::vector<Feature> VectorizeSparse(const Document& doc) const;

  Json ToJson() const;
  static TfIdfVectorizer FromJson(const Json& j);

 private:
  TfIdfVectorizer(GlobalDictionary vocabulary, std::vector<double> idf, size_t corpus_size);

  GlobalDictionary vocabulary_;
  std::vector<double> idf_;
  size_t corpus_size_ = 0;
};

// Reads a UTF-8 CSV with header `text,label` (RFC 4180 quoting). Labels must
// be exactly "0" or "1".
Corpus LoadCorpusCsv(const std::filesystem::path& path);
Corpus ParseCorpusCsv(std::string_view content);

}  // namespace textexplain

#endif  // TEXTEXPLAIN_CORPUS_H_

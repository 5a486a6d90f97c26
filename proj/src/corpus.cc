#include "textexplain/corpus.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <unordered_set>
#include <utility>

namespace textexplain {
namespace {

// Bytes >= 0x80 belong to multi-byte UTF-8 sequences; they are kept inside
// words so non-ASCII letters are not split apart.
bool IsWordByte(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c >= 0x80;
}

char ToLowerAscii(unsigned char c) {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : static_cast<char>(c);
}

}  // namespace

Document Tokenize(std::string_view text) {
  Document doc;
  doc.source_text = std::string(text);
  std::string current;
  for (unsigned char c : text) {
    if (IsWordByte(c)) {
      current.push_back(ToLowerAscii(c));
    } else if (!current.empty()) {
      doc.tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) doc.tokens.push_back(std::move(current));
  return doc;
}

Document FromTokens(std::vector<std::string> tokens) {
  Document doc;
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) doc.source_text.push_back(' ');
    doc.source_text += tokens[i];
  }
  doc.tokens = std::move(tokens);
  return doc;
}

LocalDictionary::LocalDictionary(const Document& doc) {
  for (size_t pos = 0; pos < doc.tokens.size(); ++pos) {
    const std::string& word = doc.tokens[pos];
    auto [it, inserted] = index_.try_emplace(word, entries_.size());
    if (inserted) entries_.push_back(WordOccurrences{word, {}});
    entries_[it->second].positions.push_back(pos);
  }
}

bool LocalDictionary::contains(std::string_view word) const {
  return index_.count(std::string(word)) > 0;
}

std::optional<size_t> LocalDictionary::IndexOf(std::string_view word) const {
  auto it = index_.find(std::string(word));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

size_t LocalDictionary::multiplicity(std::string_view word) const {
  auto idx = IndexOf(word);
  return idx ? entries_[*idx].multiplicity() : 0;
}

void Corpus::Add(std::string_view text, int label) {
  if (label != 0 && label != 1) {
    throw std::invalid_argument("label must be 0 or 1");
  }
  documents.push_back(Tokenize(text));
  labels.push_back(label);
}

GlobalDictionary::GlobalDictionary(std::vector<std::string> words, std::vector<size_t> doc_freq)
    : words_(std::move(words)), doc_freq_(std::move(doc_freq)) {
  if (words_.size() != doc_freq_.size()) {
    throw std::invalid_argument("vocabulary and document frequencies differ in size");
  }
  for (size_t i = 0; i < words_.size(); ++i) {
    if (doc_freq_[i] == 0) {
      throw std::invalid_argument("document frequency of '" + words_[i] + "' must be >= 1");
    }
    if (!index_.emplace(words_[i], i).second) {
      throw std::invalid_argument("duplicate vocabulary word '" + words_[i] + "'");
    }
  }
}

std::optional<size_t> GlobalDictionary::IndexOf(std::string_view word) const {
  auto it = index_.find(std::string(word));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

TfIdfVectorizer::TfIdfVectorizer(GlobalDictionary vocabulary, std::vector<double> idf,
                                 size_t corpus_size)
    : vocabulary_(std::move(vocabulary)), idf_(std::move(idf)), corpus_size_(corpus_size) {}

TfIdfVectorizer::TfIdfVectorizer(std::vector<std::string> vocab, std::vector<double> idf,
                                 size_t corpus_size)
    : corpus_size_(corpus_size) {
  if (vocab.size() != idf.size()) {
    throw std::invalid_argument("vocab and idf lengths differ");
  }
  if (corpus_size == 0) throw std::invalid_argument("corpus_size must be >= 1");
  std::vector<size_t> doc_freq(vocab.size());
  for (size_t i = 0; i < idf.size(); ++i) {
    if (!(idf[i] > 0.0) || !std::isfinite(idf[i])) {
      throw std::invalid_argument("idf values must be positive and finite");
    }
    const double df = (1.0 + static_cast<double>(corpus_size)) / std::exp(idf[i] - 1.0) - 1.0;
    doc_freq[i] = static_cast<size_t>(std::max(1.0, std::round(df)));
  }
  vocabulary_ = GlobalDictionary(std::move(vocab), std::move(doc_freq));
  idf_ = std::move(idf);
}

TfIdfVectorizer TfIdfVectorizer::Fit(const Corpus& corpus) {
  if (corpus.documents.empty()) throw std::invalid_argument("empty corpus");
  std::map<std::string, size_t> doc_freq;
  for (const Document& doc : corpus.documents) {
    std::unordered_set<std::string_view> seen(doc.tokens.begin(), doc.tokens.end());
    for (std::string_view w : seen) ++doc_freq[std::string(w)];
  }
  std::vector<std::string> words;
  std::vector<size_t> freqs;
  std::vector<double> idf;
  const double n = static_cast<double>(corpus.documents.size());
  for (const auto& [word, df] : doc_freq) {
    words.push_back(word);
    freqs.push_back(df);
    idf.push_back(std::log((1.0 + n) / (1.0 + static_cast<double>(df))) + 1.0);
  }
  return TfIdfVectorizer(GlobalDictionary(std::move(words), std::move(freqs)), std::move(idf),
                         corpus.documents.size());
}

double TfIdfVectorizer::idf(std::string_view word) const {
  auto idx = vocabulary_.IndexOf(word);
  if (!idx) throw std::out_of_range("word not in vocabulary: " + std::string(word));
  return idf_[*idx];
}

std::vector<TfIdfVectorizer::Feature> TfIdfVectorizer::VectorizeSparse(const Document& doc) const {
  std::map<size_t, double> counts;
  for (const std::string& token : doc.tokens) {
    if (auto idx = vocabulary_.IndexOf(token)) counts[*idx] += 1.0;
  }
  std::vector<Feature> features;
  features.reserve(counts.size());
  double norm_sq = 0.0;
  for (const auto& [idx, count] : counts) {
    const double v = count * idf_[idx];
    features.push_back({idx, v});
    norm_sq += v * v;
  }
  if (norm_sq > 0.0) {
    const double inv = 1.0 / std::sqrt(norm_sq);
    for (Feature& f : features) f.value *= inv;
  }
  return features;
}

std::vector<double> TfIdfVectorizer::Vectorize(const Document& doc) const {
  std::vector<double> dense(dimension(), 0.0);
  for (const Feature& f : VectorizeSparse(doc)) dense[f.index] = f.value;
  return dense;
}

Json TfIdfVectorizer::ToJson() const {
  Json j;
  j["vocab"] = vocabulary_.words();
  j["idf"] = idf_;
  j["corpus_size"] = corpus_size_;
  return j;
}

TfIdfVectorizer TfIdfVectorizer::FromJson(const Json& j) {
  try {
    return TfIdfVectorizer(j.at("vocab").get<std::vector<std::string>>(),
                           j.at("idf").get<std::vector<double>>(),
                           j.at("corpus_size").get<size_t>());
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("invalid vectorizer JSON: ") + e.what());
  }
}

namespace {

// Splits RFC 4180 content into records. Quoted fields may contain commas,
// doubled quotes and line breaks. Returns each record with the 1-based line
// number it starts on.
std::vector<std::pair<size_t, std::vector<std::string>>> ParseCsvRecords(std::string_view content) {
  std::vector<std::pair<size_t, std::vector<std::string>>> records;
  std::vector<std::string> fields;
  std::string field;
  bool in_quotes = false;
  bool field_was_quoted = false;
  bool record_started = false;
  size_t line = 1;
  size_t record_line = 1;

  auto end_field = [&] {
    fields.push_back(std::move(field));
    field.clear();
    field_was_quoted = false;
  };
  auto end_record = [&] {
    end_field();
    records.emplace_back(record_line, std::move(fields));
    fields.clear();
    record_started = false;
  };

  for (size_t i = 0; i < content.size(); ++i) {
    const char c = content[i];
    if (!record_started) {
      record_started = true;
      record_line = line;
    }
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < content.size() && content[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    if (c == '"') {
      if (!field.empty() || field_was_quoted) {
        throw std::runtime_error("line " + std::to_string(line) +
                                 ": unexpected quote inside unquoted field");
      }
      in_quotes = true;
      field_was_quoted = true;
    } else if (c == ',') {
      end_field();
    } else if (c == '\r' && i + 1 < content.size() && content[i + 1] == '\n') {
      // CRLF: handled on the '\n'.
    } else if (c == '\n') {
      end_record();
      ++line;
    } else {
      field.push_back(c);
    }
  }
  if (in_quotes) {
    throw std::runtime_error("line " + std::to_string(record_line) + ": unterminated quoted field");
  }
  if (record_started) end_record();
  return records;
}

}  // namespace

Corpus ParseCorpusCsv(std::string_view content) {
  if (content.size() >= 3 && content.substr(0, 3) == "\xEF\xBB\xBF") {
    content.remove_prefix(3);
  }
  auto records = ParseCsvRecords(content);
  if (records.empty()) throw std::runtime_error("missing header `text,label`");
  const auto& header = records.front().second;
  if (header.size() != 2 || header[0] != "text" || header[1] != "label") {
    throw std::runtime_error("expected header `text,label`");
  }
  Corpus corpus;
  for (size_t r = 1; r < records.size(); ++r) {
    const auto& [line, fields] = records[r];
    const std::string where = "row " + std::to_string(r) + " (line " + std::to_string(line) + ")";
    if (fields.size() == 1 && fields[0].empty()) continue;  // blank line
    if (fields.size() != 2) {
      throw std::runtime_error(where + ": expected 2 fields, got " + std::to_string(fields.size()));
    }
    const std::string& label = fields[1];
    if (label != "0" && label != "1") {
      throw std::runtime_error(where + ": label must be 0 or 1, got '" + label + "'");
    }
    corpus.Add(fields[0], label == "1" ? 1 : 0);
  }
  return corpus;
}

Corpus LoadCorpusCsv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open corpus file: " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return ParseCorpusCsv(buffer.str());
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

}  // namespace textexplain

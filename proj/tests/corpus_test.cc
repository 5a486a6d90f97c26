#include "textexplain/corpus.h"

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace textexplain {
namespace {

using ::testing::HasSubstr;

std::vector<std::string> Tokens(std::string_view text) { return Tokenize(text).tokens; }

double Norm(const std::vector<double>& v) {
  return std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
}

Corpus MakeCorpus(const std::vector<std::string>& texts) {
  Corpus corpus;
  for (size_t i = 0; i < texts.size(); ++i) corpus.Add(texts[i], static_cast<int>(i % 2));
  return corpus;
}

TEST(TokenizeTest, LowercasesAlphanumericRuns) {
  const Document doc = Tokenize("Very good, very good!");
  EXPECT_EQ(doc.tokens, (std::vector<std::string>{"very", "good", "very", "good"}));
  EXPECT_EQ(doc.source_text, "Very good, very good!");
  const LocalDictionary dict(doc);
  EXPECT_EQ(dict.size(), 2);
  EXPECT_EQ(dict.multiplicity("very"), 2);
}

TEST(TokenizeTest, EmptyAndUnk) {
  EXPECT_TRUE(Tokenize("").empty());
  EXPECT_TRUE(Tokenize("  ,.;!  ").empty());
  EXPECT_EQ(Tokens("UNK unk"), (std::vector<std::string>{"unk", "unk"}));
}

TEST(TokenizeTest, DigitsAndPunctuation) {
  EXPECT_EQ(Tokens("it's 5-star (A+) food"),
            (std::vector<std::string>{"it", "s", "5", "star", "a", "food"}));
  EXPECT_EQ(Tokens("\tline1\r\nline2"), (std::vector<std::string>{"line1", "line2"}));
}

TEST(TokenizeTest, KeepsNonAsciiBytesInsideWords) {
  EXPECT_EQ(Tokens("Caf\xc3\xa9 cr\xc3\xa8me"),
            (std::vector<std::string>{"caf\xc3\xa9", "cr\xc3\xa8me"}));
}

TEST(TokenizeTest, SpaceJoinRoundTrip) {
  std::mt19937_64 rng(3);
  const std::string alphabet = "abcXYZ019 ,.!?'-";
  for (int trial = 0; trial < 200; ++trial) {
    std::string text;
    const size_t len = rng() % 40;
    for (size_t i = 0; i < len; ++i) text.push_back(alphabet[rng() % alphabet.size()]);
    const Document doc = Tokenize(text);
    EXPECT_EQ(Tokenize(FromTokens(doc.tokens).source_text).tokens, doc.tokens) << text;
  }
}

TEST(LocalDictionaryTest, CountsAndPositions) {
  const LocalDictionary dict(FromTokens({"very", "good", "very"}));
  ASSERT_EQ(dict.size(), 2);
  EXPECT_EQ(dict[0].word, "very");
  EXPECT_EQ(dict[0].positions, (std::vector<size_t>{0, 2}));
  EXPECT_EQ(dict[1].word, "good");
  EXPECT_EQ(dict[1].positions, (std::vector<size_t>{1}));
  EXPECT_EQ(*dict.IndexOf("good"), 1);
  EXPECT_FALSE(dict.IndexOf("bad").has_value());
  EXPECT_FALSE(dict.contains("bad"));
  EXPECT_EQ(dict.multiplicity("bad"), 0);

  EXPECT_TRUE(LocalDictionary(FromTokens({})).empty());

  const LocalDictionary triple(FromTokens({"a", "a", "a"}));
  ASSERT_EQ(triple.size(), 1);
  EXPECT_EQ(triple[0].positions, (std::vector<size_t>{0, 1, 2}));
}

TEST(LocalDictionaryTest, PositionsPartitionTheDocument) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::string> tokens;
    const size_t b = rng() % 30;
    for (size_t i = 0; i < b; ++i) tokens.push_back(std::string(1, 'a' + rng() % 6));
    const Document doc = FromTokens(tokens);
    const LocalDictionary dict(doc);
    std::vector<int> seen(b, 0);
    size_t total = 0;
    for (const WordOccurrences& e : dict.entries()) {
      total += e.multiplicity();
      for (size_t p : e.positions) {
        ++seen[p];
        EXPECT_EQ(doc.tokens[p], e.word);
      }
    }
    EXPECT_EQ(total, b);
    for (int s : seen) EXPECT_EQ(s, 1);
  }
}

TEST(TfIdfTest, SingleDocumentIdf) {
  const TfIdfVectorizer v = TfIdfVectorizer::Fit(MakeCorpus({"good good bad"}));
  EXPECT_EQ(v.vocabulary().words(), (std::vector<std::string>{"bad", "good"}));
  EXPECT_NEAR(v.idf("good"), 1.0, 1e-15);
  EXPECT_NEAR(v.idf("bad"), 1.0, 1e-15);
}

TEST(TfIdfTest, TwoDocumentIdf) {
  const TfIdfVectorizer v = TfIdfVectorizer::Fit(MakeCorpus({"good food", "good wine"}));
  EXPECT_NEAR(v.idf("good"), 1.0, 1e-15);
  EXPECT_NEAR(v.idf("food"), std::log(3.0 / 2.0) + 1.0, 1e-15);
  EXPECT_NEAR(v.idf("food"), 1.4055, 1e-4);
  EXPECT_EQ(v.vocabulary().doc_freq()[*v.vocabulary().IndexOf("good")], 2);
}

TEST(TfIdfTest, EmptyCorpusThrows) {
  try {
    TfIdfVectorizer::Fit(Corpus{});
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_THAT(e.what(), HasSubstr("empty corpus"));
  }
}

TEST(TfIdfTest, VectorizeNormalizesRawCounts) {
  const TfIdfVectorizer v = TfIdfVectorizer::Fit(MakeCorpus({"good good bad"}));
  const std::vector<double> phi = v.Vectorize(Tokenize("good good bad"));
  ASSERT_EQ(phi.size(), 2);
  // (bad, good) = (1, 2) / sqrt(5)
  EXPECT_NEAR(phi[1], 2.0 / std::sqrt(5.0), 1e-15);
  EXPECT_NEAR(phi[0], 1.0 / std::sqrt(5.0), 1e-15);
  EXPECT_NEAR(phi[1], 0.8944, 1e-4);
  EXPECT_NEAR(phi[0], 0.4472, 1e-4);

  EXPECT_EQ(v.Vectorize(Document{}), (std::vector<double>{0.0, 0.0}));
  EXPECT_EQ(v.Vectorize(Tokenize("unk pizza")), (std::vector<double>{0.0, 0.0}));
  EXPECT_EQ(v.Vectorize(Tokenize("good unk")), (std::vector<double>{0.0, 1.0}));
}

TEST(TfIdfTest, SparseMatchesDense) {
  const Corpus corpus =
      MakeCorpus({"the food was good", "bad bad service", "good wine list", "the wine was bad"});
  const TfIdfVectorizer v = TfIdfVectorizer::Fit(corpus);
  const Document doc = Tokenize("the good wine was good and cheap");
  const std::vector<double> dense = v.Vectorize(doc);
  std::vector<double> rebuilt(dense.size(), 0.0);
  size_t last = 0;
  bool first = true;
  for (const auto& f : v.VectorizeSparse(doc)) {
    if (!first) EXPECT_GT(f.index, last);
    first = false;
    last = f.index;
    EXPECT_NE(f.value, 0.0);
    rebuilt[f.index] = f.value;
  }
  EXPECT_EQ(rebuilt, dense);
}

TEST(TfIdfTest, NormIsZeroOrOne) {
  const Corpus corpus = MakeCorpus({"a b c", "b c d", "c d e e", "f"});
  const TfIdfVectorizer v = TfIdfVectorizer::Fit(corpus);
  std::mt19937_64 rng(5);
  const std::vector<std::string> words = {"a", "b", "c", "d", "e", "f", "x", "y"};
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::string> tokens;
    const size_t b = rng() % 8;
    bool in_vocab = false;
    for (size_t i = 0; i < b; ++i) {
      tokens.push_back(words[rng() % words.size()]);
      in_vocab = in_vocab || tokens.back() < "x";
    }
    const double norm = Norm(v.Vectorize(FromTokens(tokens)));
    EXPECT_NEAR(norm, in_vocab ? 1.0 : 0.0, 1e-12);
  }
}

TEST(TfIdfTest, IdfDecreasesWithDocumentFrequency) {
  const Corpus corpus = MakeCorpus({"a b c", "b c", "c", "c d"});
  const TfIdfVectorizer v = TfIdfVectorizer::Fit(corpus);
  const auto& vocab = v.vocabulary();
  for (size_t i = 0; i < vocab.size(); ++i) {
    EXPECT_GT(v.idf()[i], 0.0);
    for (size_t j = 0; j < vocab.size(); ++j) {
      if (vocab.doc_freq()[i] < vocab.doc_freq()[j]) EXPECT_GT(v.idf()[i], v.idf()[j]);
    }
  }
}

TEST(TfIdfTest, JsonRoundTrip) {
  const Corpus corpus = MakeCorpus({"a b c", "b c", "c", "c d"});
  const TfIdfVectorizer v = TfIdfVectorizer::Fit(corpus);
  const Json j = v.ToJson();
  EXPECT_EQ(j["vocab"], Json({"a", "b", "c", "d"}));
  EXPECT_EQ(j["corpus_size"], 4);
  const TfIdfVectorizer back = TfIdfVectorizer::FromJson(Json::parse(j.dump()));
  EXPECT_EQ(back.vocabulary().words(), v.vocabulary().words());
  EXPECT_EQ(back.vocabulary().doc_freq(), v.vocabulary().doc_freq());
  EXPECT_EQ(back.idf(), v.idf());
  EXPECT_EQ(back.Vectorize(Tokenize("c d d")), v.Vectorize(Tokenize("c d d")));
}

TEST(TfIdfTest, RejectsMalformedJson) {
  EXPECT_THROW(TfIdfVectorizer::FromJson(Json{{"vocab", {"a"}}}), std::exception);
  EXPECT_THROW(
      TfIdfVectorizer::FromJson(Json{{"vocab", {"a", "b"}}, {"idf", {1.0}}, {"corpus_size", 1}}),
      std::exception);
  EXPECT_THROW(TfIdfVectorizer::FromJson(
                   Json{{"vocab", {"a", "a"}}, {"idf", {1.0, 1.0}}, {"corpus_size", 1}}),
               std::exception);
}

TEST(CorpusCsvTest, ParsesRows) {
  const Corpus corpus = ParseCorpusCsv("text,label\ngood food,1\n\"bad, cold\",0\n");
  ASSERT_EQ(corpus.size(), 2);
  EXPECT_EQ(corpus.labels, (std::vector<int>{1, 0}));
  EXPECT_EQ(corpus.documents[1].tokens, (std::vector<std::string>{"bad", "cold"}));
  EXPECT_EQ(corpus.documents[1].source_text, "bad, cold");
}

TEST(CorpusCsvTest, HeaderOnlyIsEmpty) {
  EXPECT_EQ(ParseCorpusCsv("text,label\n").size(), 0);
  EXPECT_EQ(ParseCorpusCsv("text,label").size(), 0);
}

TEST(CorpusCsvTest, QuotingBomAndCrlf) {
  const Corpus corpus = ParseCorpusCsv(
      "\xef\xbb\xbftext,label\r\n\"she said \"\"great\"\"\nreally\",1\r\n\r\nok,0\r\n");
  ASSERT_EQ(corpus.size(), 2);
  EXPECT_EQ(corpus.documents[0].source_text, "she said \"great\"\nreally");
  EXPECT_EQ(corpus.labels, (std::vector<int>{1, 0}));
}

TEST(CorpusCsvTest, ErrorsNameTheRow) {
  try {
    ParseCorpusCsv("text,label\ngood,1\nbad,3\n");
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_THAT(e.what(), HasSubstr("row 2"));
    EXPECT_THAT(e.what(), HasSubstr("3"));
  }
  EXPECT_THROW(ParseCorpusCsv("text,label\ngood,1,extra\n"), std::runtime_error);
  EXPECT_THROW(ParseCorpusCsv("text,label\ngood\n"), std::runtime_error);
  EXPECT_THROW(ParseCorpusCsv("text,label\ngood,yes\n"), std::runtime_error);
  EXPECT_THROW(ParseCorpusCsv("text,label\n\"unterminated,1\n"), std::runtime_error);
  EXPECT_THROW(ParseCorpusCsv("review,label\ngood,1\n"), std::runtime_error);
  EXPECT_THROW(ParseCorpusCsv(""), std::runtime_error);
}

TEST(CorpusCsvTest, LoadsFile) {
  const auto path = std::filesystem::temp_directory_path() / "textexplain_corpus_test.csv";
  {
    std::ofstream out(path, std::ios::binary);
    out << "text,label\nvery good,1\nnot good,0\n";
  }
  const Corpus corpus = LoadCorpusCsv(path);
  EXPECT_EQ(corpus.size(), 2);
  std::filesystem::remove(path);
  EXPECT_THROW(LoadCorpusCsv(path), std::runtime_error);
}

TEST(CorpusCsvTest, BundledCorpus) {
  const Corpus corpus =
      LoadCorpusCsv(std::filesystem::path(TEXTEXPLAIN_DATA_DIR) / "synthetic_reviews.csv");
  EXPECT_EQ(corpus.size(), 60);
  size_t positives = 0;
  for (int label : corpus.labels) positives += label;
  EXPECT_GT(positives, 0);
  EXPECT_LT(positives, corpus.size());
}

}  // namespace
}  // namespace textexplain

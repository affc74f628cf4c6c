#include "semsearch/index.h"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "fixtures.h"
#include "generators.h"
#include "semsearch/expand.h"

namespace semsearch {
namespace {

const KnowledgeBase &News() {
  static const KnowledgeBase kb = KnowledgeBase::Parse(testing::kNewsKb);
  return kb;
}

TEST(WeightTest, Examples) {
  EXPECT_DOUBLE_EQ(Weight(1, 10, 10), std::log(2.0));
  EXPECT_NEAR(Weight(1, 1, 10), 2.3979, 1e-4);
  EXPECT_GT(Weight(2, 1, 10), Weight(1, 1, 10));
  EXPECT_GT(Weight(1, 1, 10), Weight(1, 2, 10));
}

TEST(WeightTest, DomainErrors) {
  EXPECT_THROW(Weight(0, 1, 1), Error);
  EXPECT_THROW(Weight(1, 0, 1), Error);
  EXPECT_THROW(Weight(1, 3, 2), Error);
}

TEST(BuildIndexTest, EntityIdentifierPostingsOnlyWhereMentioned) {
  Annotator annotator(&News(), DefaultStoplist());
  std::vector<Document> docs = {
      {"doc1", "GM reported a loss in the U.S."},
      {"doc2", "Chrysler reported a profit."},
  };
  BuildReport report;
  Index index = BuildIndex(docs, annotator, 0, &report);
  EXPECT_EQ(index.DocFreq("ne:*|*|#Company_123"), 1);
  auto ord = index.TermOrdinal("ne:*|*|#Company_123");
  ASSERT_TRUE(ord);
  ASSERT_EQ(index.Postings(*ord).size(), 1u);
  EXPECT_EQ(index.Postings(*ord)[0].doc, 0u);
  EXPECT_EQ(index.DocFreq("ne:*|Company|*"), 2);
  EXPECT_EQ(index.DocFreq("ne:general_motors|*|*"), 1);
  // Entity tokens are not indexed as keywords by default.
  EXPECT_EQ(index.DocFreq("kw:gm"), 0);
  EXPECT_EQ(index.DocFreq("kw:reported"), 2);
  EXPECT_EQ(index.DocFreq("kw:a"), 0);
  EXPECT_EQ(report.documents, 2u);
  EXPECT_EQ(report.terms, index.num_terms());
}

TEST(BuildIndexTest, KeywordsInsideEntitiesOption) {
  Annotator annotator(&News(), DefaultStoplist(), nullptr, nullptr,
                      AnnotatorOptions{.keywords_inside_entities = true});
  Index index = BuildIndex({{"d", "General Motors"}}, annotator);
  EXPECT_EQ(index.DocFreq("kw:general"), 1);
  EXPECT_EQ(index.DocFreq("ne:*|*|#Company_123"), 1);
}

TEST(BuildIndexTest, EmptyCorpus) {
  Annotator annotator(&News(), DefaultStoplist());
  Index index = BuildIndex({}, annotator);
  EXPECT_EQ(index.num_docs(), 0u);
  EXPECT_TRUE(index.Search({{"kw:gm", 1}}, 10).empty());
}

TEST(BuildIndexTest, DuplicateIdRejected) {
  Annotator annotator(&News(), DefaultStoplist());
  EXPECT_THROW(BuildIndex({{"a", "x"}, {"a", "y"}}, annotator), Error);
}

TEST(BuildIndexTest, SameTextSameVector) {
  Annotator annotator(&News(), DefaultStoplist());
  Index index = BuildIndex(
      {{"a", "General Motors in Paris"}, {"b", "General Motors in Paris"},
       {"c", "storm"}},
      annotator);
  EXPECT_EQ(index.documents()[0].norm, index.documents()[1].norm);
  EXPECT_EQ(index.documents()[0].length, index.documents()[1].length);
  auto hits = index.Search({{"ne:*|*|#Company_123", 1}}, 10);
  ASSERT_EQ(hits.size(), 2u);
  EXPECT_EQ(hits[0].score, hits[1].score);
  EXPECT_EQ(hits[0].id, "a");
}

TEST(SearchTest, IdenticalVectorScoresOne) {
  TermCounts tc{{"kw:loss", 2}, {"ne:gm|*|*", 1}};
  Index index = Index::FromTermCounts({{"only", tc}});
  auto hits = index.Search(tc, 5);
  ASSERT_EQ(hits.size(), 1u);
  EXPECT_NEAR(hits[0].score, 1.0, 1e-12);
}

TEST(SearchTest, NoOverlapIsEmpty) {
  Index index = Index::FromTermCounts({{"a", {{"kw:x", 1}}}});
  EXPECT_TRUE(index.Search({{"kw:y", 3}}, 5).empty());
}

TEST(SearchTest, Errors) {
  Index index = Index::FromTermCounts({{"a", {{"kw:x", 1}}}});
  EXPECT_THROW(index.Search({}, 5), Error);
  EXPECT_THROW(index.Search({{"kw:x", 1}}, 0), Error);
}

TEST(SearchTest, ThreeDocumentHandComputed) {
  // N=3. kw:a in d1,d2 (df 2), kw:b in d2 (df 1), kw:c in d3 (df 1).
  Index index = Index::FromTermCounts({{"d1", {{"kw:a", 1}}},
                                       {"d2", {{"kw:a", 2}, {"kw:b", 1}}},
                                       {"d3", {{"kw:c", 1}}}});
  double wa1 = std::log(2.5), wa2 = (1 + std::log(2.0)) * std::log(2.5);
  double wb = std::log(4.0);
  // Query {a, b}: q = (wa1, wb).
  double qn = std::hypot(wa1, wb);
  double s1 = wa1 * wa1 / (wa1 * qn);
  double s2 = (wa2 * wa1 + wb * wb) / (std::hypot(wa2, wb) * qn);
  auto hits = index.Search({{"kw:a", 1}, {"kw:b", 1}}, 10);
  ASSERT_EQ(hits.size(), 2u);
  EXPECT_EQ(hits[0].id, "d2");
  EXPECT_NEAR(hits[0].score, s2, 1e-12);
  EXPECT_NEAR(hits[1].score, s1, 1e-12);
}

TEST(SearchTest, MatchesDenseOracle) {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    auto inst = testing::RandomCosineInstance(rng);
    Index index = Index::FromTermCounts(inst.docs);
    auto dense = testing::DenseCosine(inst.docs, inst.query);
    std::map<std::string, double> sparse;
    for (const auto &h : index.Search(inst.query, inst.docs.size())) {
      sparse[h.id] = h.score;
      EXPECT_GE(h.score, 0.0);
      EXPECT_LE(h.score, 1.0);
    }
    for (size_t i = 0; i < inst.docs.size(); ++i) {
      const std::string &id = inst.docs[i].first;
      if (dense[i] > 0) {
        ASSERT_TRUE(sparse.count(id)) << id;
        EXPECT_NEAR(sparse[id], dense[i], 1e-9);
      } else {
        EXPECT_FALSE(sparse.count(id)) << id;
      }
    }
  }
}

TEST(SearchTest, OrderingAndTopK) {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    auto inst = testing::RandomCosineInstance(rng);
    Index index = Index::FromTermCounts(inst.docs);
    auto all = index.Search(inst.query, 1000);
    for (size_t i = 1; i < all.size(); ++i) {
      bool ordered = all[i - 1].score > all[i].score ||
                     (all[i - 1].score == all[i].score &&
                      all[i - 1].id < all[i].id);
      EXPECT_TRUE(ordered);
    }
    auto top = index.Search(inst.query, 3);
    ASSERT_EQ(top.size(), std::min<size_t>(3, all.size()));
    for (size_t i = 0; i < top.size(); ++i) EXPECT_EQ(top[i].id, all[i].id);
  }
}

// Repeating a query c times over keeps the order when every query term has
// the same multiplicity. (With mixed multiplicities the log damping can
// legitimately reorder, so the property is stated for uniform queries.)
TEST(SearchTest, ScalingUniformQueryKeepsOrder) {
  std::mt19937 rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    auto inst = testing::RandomCosineInstance(rng);
    for (auto &[k, c] : inst.query) c = 1;
    Index index = Index::FromTermCounts(inst.docs);
    auto base = index.Search(inst.query, 1000);
    for (int c : {2, 3, 7}) {
      TermCounts scaled = inst.query;
      for (auto &[k, v] : scaled) v *= c;
      auto hits = index.Search(scaled, 1000);
      ASSERT_EQ(hits.size(), base.size());
      for (size_t i = 0; i < hits.size(); ++i) {
        EXPECT_EQ(hits[i].id, base[i].id);
        EXPECT_NEAR(hits[i].score, base[i].score, 1e-12);
      }
    }
  }
}

TEST(SearchTest, ClassQueryRetrievesSubclassMentions) {
  KnowledgeBase kb = testing::ChainKb();
  Annotator annotator(&kb, DefaultStoplist());
  std::mt19937 rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    auto corpus = testing::RandomSubsumptionCorpus(rng);
    Index index = BuildIndex(corpus.docs, annotator);
    for (const char *cls : {"Top", "Mid", "Low", "Other"}) {
      std::set<std::string> got;
      std::string key = NETriple::Make(std::nullopt, cls, std::nullopt).Key();
      for (const auto &h : index.Search({{key, 1}}, 1000)) got.insert(h.id);
      EXPECT_EQ(got, testing::ScanClassMatches(corpus.docs, annotator, kb, cls))
          << cls;
    }
  }
}

TEST(PersistenceTest, RoundTripAndDeterminism) {
  Annotator annotator(&News(), DefaultStoplist());
  std::vector<Document> docs = {
      {"d1", "GM and Chrysler in the U.S."},
      {"d2", "Paris, France hosts fashion week"},
      {"d3", "George Washington was born in Westmoreland Country"},
  };
  Index a = BuildIndex(docs, annotator);
  Index b = BuildIndex(docs, annotator);
  std::ostringstream sa, sb;
  a.Write(sa);
  b.Write(sb);
  EXPECT_EQ(sa.str(), sb.str());
  std::istringstream in(sa.str());
  Index back = Index::Read(in);
  EXPECT_EQ(back, a);
  std::ostringstream again;
  back.Write(again);
  EXPECT_EQ(again.str(), sa.str());

  testing::TempDir dir;
  std::string path = (dir.path() / "index.tsv").string();
  a.Save(path);
  EXPECT_EQ(Index::Load(path), a);
}

TEST(PersistenceTest, MalformedInputRejected) {
  for (const char *text : {"", "#TERMS\n", "#DOCS\n0\td\tx\t1\n#TERMS\n",
                           "#DOCS\n0\td\t1\t1\n#TERMS\nkw:a\t1\t5:1\n",
                           "#DOCS\n0\td\t1\t1\n#TERMS\nkw:a\t2\t0:1\n"}) {
    std::istringstream in(text);
    EXPECT_THROW(Index::Read(in), Error) << text;
  }
  EXPECT_THROW(Index::Load("/nonexistent/index.tsv"), Error);
}

TEST(ReadCorpusTest, DirectoryAndRecordFile) {
  testing::TempDir dir;
  dir.Write("docs/b.txt", "second");
  dir.Write("docs/a.txt", "first");
  Corpus c = ReadCorpus((dir.path() / "docs").string());
  ASSERT_EQ(c.documents.size(), 2u);
  EXPECT_EQ(c.documents[0].id, "a.txt");
  EXPECT_EQ(c.documents[1].text, "second");

  std::string tsv = dir.Write("c.tsv", "x\tone two\n\nbad line\ny\tthree\n");
  Corpus r = ReadCorpus(tsv);
  ASSERT_EQ(r.documents.size(), 2u);
  EXPECT_EQ(r.documents[1].id, "y");
  EXPECT_EQ(r.warnings.size(), 1u);

  EXPECT_THROW(ReadCorpus(dir.Write("dup.tsv", "x\ta\nx\tb\n")), Error);
  EXPECT_THROW(ReadCorpus((dir.path() / "missing.tsv").string()), Error);
}

}  // namespace
}  // namespace semsearch

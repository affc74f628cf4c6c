#include "semsearch/expand.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "fixtures.h"
#include "template_oracle.h"

namespace semsearch {
namespace {

using Keys = std::set<std::string>;

const KnowledgeBase &News() {
  static const KnowledgeBase kb = KnowledgeBase::Parse(testing::kNewsKb);
  return kb;
}

const PhraseDictionary &Phrases() {
  static const PhraseDictionary d =
      PhraseDictionary::Parse(testing::kNewsPhrases);
  return d;
}

const InterrogativeRules &Rules() {
  static const InterrogativeRules r =
      InterrogativeRules::Parse(testing::kInterrogatives);
  return r;
}

Keys KeysOf(const std::set<NETriple> &triples) {
  Keys keys;
  for (const auto &t : triples) keys.insert(t.Key());
  return keys;
}

Keys KeysOf(const std::vector<GeneralizedTerm> &terms) {
  Keys keys;
  for (const auto &t : terms) keys.insert(t.Key());
  return keys;
}

EntityAnnotation Annotation(std::string name, std::optional<std::string> cls,
                            std::optional<std::string> id) {
  EntityAnnotation a;
  a.surface = name;
  a.name = NormalizeName(name);
  a.class_id = std::move(cls);
  a.entity_id = std::move(id);
  return a;
}

TEST(NETripleTest, Serialization) {
  EXPECT_EQ(NETriple::Make("General  Motors", std::nullopt, std::nullopt).Key(),
            "ne:general_motors|*|*");
  EXPECT_EQ(NETriple::Make(std::nullopt, "Company", "#Company_123").Key(),
            "ne:*|Company|#Company_123");
  EXPECT_THROW(NETriple::Make(std::nullopt, std::nullopt, std::nullopt), Error);
  EXPECT_EQ(GeneralizedTerm::Keyword("Born").Key(), "kw:born");
}

TEST(DocumentTriplesTest, GeneralMotorsNineTriples) {
  KnowledgeBase kb = KnowledgeBase::Parse(
      "#CLASSES\nOrganization\tOrganization\nCompany\tCompany\tOrganization\n"
      "#ENTITIES\n#Company_123\tCompany\tGeneral Motors\tGM\n"
      "#RELATIONS\n#FACTS\n");
  auto keys = KeysOf(DocumentTriples(
      Annotation("General Motors", "Company", "#Company_123"), kb));
  EXPECT_EQ(keys, (Keys{
                      "ne:general_motors|*|*",
                      "ne:*|Company|*",
                      "ne:general_motors|Company|*",
                      "ne:gm|*|*",
                      "ne:*|Organization|*",
                      "ne:general_motors|Organization|*",
                      "ne:gm|Company|*",
                      "ne:gm|Organization|*",
                      "ne:*|*|#Company_123",
                  }));
}

TEST(DocumentTriplesTest, NameOnly) {
  EXPECT_EQ(KeysOf(DocumentTriples(
                Annotation("Rick Wagoner", std::nullopt, std::nullopt),
                News())),
            Keys{"ne:rick_wagoner|*|*"});
}

TEST(DocumentTriplesTest, NameAndClassWithoutIdentifier) {
  EXPECT_EQ(KeysOf(DocumentTriples(
                Annotation("Rick Wagoner", "Person", std::nullopt), News())),
            (Keys{"ne:rick_wagoner|*|*", "ne:*|Person|*",
                  "ne:rick_wagoner|Person|*", "ne:*|Agent|*",
                  "ne:rick_wagoner|Agent|*"}));
}

TEST(DocumentTriplesTest, SurfaceAliasIsNotItsOwnAlias) {
  auto keys = KeysOf(
      DocumentTriples(Annotation("GM", "Company", "#Company_123"), News()));
  EXPECT_TRUE(keys.count("ne:general_motors|*|*"));
  EXPECT_TRUE(keys.count("ne:gm|Company|*"));
  // A=1 alias, S=2 superclasses.
  EXPECT_EQ(keys.size(), 4u + 2 + 4 + 2);
}

TEST(DocumentTriplesTest, SuperDepthLimit) {
  auto keys = KeysOf(DocumentTriples(
      Annotation("Chrysler", "Company", "#Company_Chrysler"), News(), 1));
  EXPECT_TRUE(keys.count("ne:*|Organization|*"));
  EXPECT_FALSE(keys.count("ne:*|Agent|*"));
}

TEST(DocumentTriplesTest, Errors) {
  EXPECT_THROW(DocumentTriples(Annotation("", "Company", std::nullopt), News()),
               Error);
  EXPECT_THROW(DocumentTriples(Annotation("X", std::nullopt, "#Nope"), News()),
               Error);
  EXPECT_THROW(DocumentTriples(Annotation("X", "Nope", std::nullopt), News()),
               Error);
}

TEST(DocumentTriplesTest, CardinalityMatchesOracle) {
  for (int a = 0; a <= 3; ++a) {
    for (int s = 0; s <= 3; ++s) {
      for (bool chain : {true, false}) {
        KnowledgeBase kb = testing::TemplateKb(a, s, chain);
        auto got = KeysOf(
            DocumentTriples(Annotation("Main Name", "Leaf", "#E1"), kb));
        auto want = testing::OracleDocumentKeys(kb, {"Main Name", "Leaf", "#E1"});
        EXPECT_EQ(got, want) << "A=" << a << " S=" << s;
        EXPECT_EQ(got.size(), static_cast<size_t>(4 + 2 * a + 2 * s + a * s));
      }
    }
  }
}

// Every triple is one of the nine templates, on all News entities.
TEST(DocumentTriplesTest, TemplateSoundnessOnFixture) {
  for (const auto &e : News().entities()) {
    std::vector<std::string> names = e.aliases;
    names.push_back(e.canonical_name);
    for (const auto &n : names) {
      testing::OracleFeatures f{n, e.class_id, e.id};
      for (const auto &key :
           KeysOf(DocumentTriples(Annotation(n, e.class_id, e.id), News()))) {
        EXPECT_TRUE(testing::OracleMatchesTemplate(News(), f, key)) << key;
      }
    }
  }
}

TEST(QueryTripleTest, MostSpecificAvailable) {
  EXPECT_EQ(QueryTriple(Annotation("Paris", "City", "#City_Paris_TX")).Key(),
            "ne:*|*|#City_Paris_TX");
  EXPECT_EQ(QueryTriple(Annotation("Paris", "City", std::nullopt)).Key(),
            "ne:paris|City|*");
  EXPECT_EQ(QueryTriple(Annotation("Paris", std::nullopt, std::nullopt)).Key(),
            "ne:paris|*|*");
  EXPECT_EQ(QueryTriple(Annotation("", "Location", std::nullopt)).Key(),
            "ne:*|Location|*");
  EXPECT_EQ(QueryTriple(Annotation("", std::nullopt, "#X")).Key(),
            "ne:*|*|#X");
  EXPECT_THROW(QueryTriple(Annotation("", std::nullopt, std::nullopt)), Error);
}

// For a KB entity, any query annotation with a subset of the document's
// features is matched by one of the document's implied triples.
TEST(QueryTripleTest, SubsumptionMatching) {
  const KnowledgeBase &kb = News();
  for (const auto &e : kb.entities()) {
    std::vector<std::string> names = e.aliases;
    names.push_back(e.canonical_name);
    for (const auto &doc_name : names) {
      auto doc = KeysOf(
          DocumentTriples(Annotation(doc_name, e.class_id, e.id), kb));
      std::vector<std::string> classes{e.class_id};
      for (const auto &s : kb.SuperClasses(e.class_id)) classes.push_back(s);
      for (const auto &q_name : names) {
        for (int mask = 1; mask < 8; ++mask) {
          for (const auto &cls : classes) {
            auto q = Annotation(mask & 1 ? q_name : "",
                                mask & 2 ? std::optional(cls) : std::nullopt,
                                mask & 4 ? std::optional(e.id) : std::nullopt);
            if (mask & 4) q.class_id = e.class_id;
            EXPECT_TRUE(doc.count(QueryTriple(q).Key()))
                << doc_name << " / " << QueryTriple(q).Key();
          }
        }
      }
    }
  }
}

TEST(ExpandQueryTest, GeorgeWashingtonBirthplace) {
  ExpandedQuery q = ExpandQuery("Where was George Washington born?", News(),
                                Phrases(), Rules());
  EXPECT_EQ(q.status, ExpansionStatus::kExpanded);
  EXPECT_EQ(q.added_names, std::vector<std::string>{"Westmoreland Country"});
  EXPECT_EQ(q.relation_id, "bornIn");
  EXPECT_EQ(q.analysis.interrogative_class, "Location");
  auto keys = KeysOf(q.terms);
  for (const char *k : {"ne:*|Location|*", "ne:*|*|#GeorgeWashington",
                        "kw:born", "ne:*|*|#WestmorelandCountry"}) {
    EXPECT_TRUE(keys.count(k)) << k;
  }
  EXPECT_FALSE(keys.count("kw:where"));
}

TEST(ExpandQueryTest, SouthBend) {
  ExpandedQuery q =
      ExpandQuery("Where is South Bend?", News(), Phrases(), Rules());
  EXPECT_EQ(q.status, ExpansionStatus::kExpanded);
  EXPECT_EQ(q.added_names, std::vector<std::string>{"Indiana"});
  EXPECT_TRUE(KeysOf(q.terms).count("ne:*|*|#Indiana"));
}

TEST(ExpandQueryTest, AllRelatedEntitiesAreAdded) {
  ExpandedQuery q =
      ExpandQuery("earthquake in Southeast Asia", News(), Phrases(), Rules());
  EXPECT_EQ(q.status, ExpansionStatus::kExpanded);
  EXPECT_EQ(q.added_names,
            (std::vector<std::string>{"Indonesia", "Philippines"}));
  auto keys = KeysOf(q.terms);
  EXPECT_TRUE(keys.count("ne:*|*|#Indonesia"));
  EXPECT_TRUE(keys.count("ne:*|*|#Philippines"));
  EXPECT_TRUE(keys.count("kw:earthquake"));
}

TEST(ExpandQueryTest, StatusCodes) {
  auto status = [](std::string_view text) {
    return ExpandQuery(text, News(), Phrases(), Rules()).status;
  };
  EXPECT_EQ(status("General Motors loans"),
            ExpansionStatus::kNoRelationPhrase);
  EXPECT_EQ(status("Where was George Washington born in Indiana?"),
            ExpansionStatus::kMultipleRelations);
  EXPECT_EQ(status("Chrysler orbits"),
            ExpansionStatus::kNoRelationMapping);
  EXPECT_EQ(status("the jet flew over Indonesia"),
            ExpansionStatus::kNoRelationMapping);
  EXPECT_EQ(status("earthquake in Atlantis"), ExpansionStatus::kNoEntity);
  EXPECT_EQ(status("fashion plant in Paris"), ExpansionStatus::kNoEntity);
  EXPECT_EQ(status("factories in Indiana"), ExpansionStatus::kNoFacts);
}

TEST(ExpandQueryTest, UnexpandedTermsAreOriginalTerms) {
  Annotator annotator(&News(), DefaultStoplist(), &Phrases(), &Rules());
  std::string text = "Chrysler nationality is";
  ExpandedQuery q = QueryProcessor(annotator, SearchMode::kSemantic).Expand(text);
  EXPECT_EQ(CountTerms(q.terms), CountTerms(QueryTerms(annotator.Analyze(text))));
  EXPECT_EQ(q.expanded_text, text);
  EXPECT_TRUE(q.added_names.empty());
}

TEST(QueryTermsTest, AmbiguousMentionUsesNameAndClass) {
  Annotator annotator(&News(), DefaultStoplist(), &Phrases(), &Rules());
  auto keys = KeysOf(QueryTerms(annotator.Analyze("Paris fashion")));
  EXPECT_EQ(keys, (Keys{"kw:fashion", "ne:paris|CountryCapital|*",
                        "ne:paris|Woman|*"}));
}

TEST(QueryTermsTest, InterrogativeReplacesWord) {
  Annotator annotator(&News(), DefaultStoplist(), &Phrases(), &Rules());
  auto keys = KeysOf(QueryTerms(annotator.Analyze("What is the capital of Congo?")));
  EXPECT_TRUE(keys.count("ne:*|CountryCapital|*"));
  EXPECT_TRUE(keys.count("kw:capital"));
  EXPECT_FALSE(keys.count("kw:what"));
}

// Random queries over KB names and phrase words: the expanded multiset always
// contains the unexpanded one, and two relation mentions never expand.
TEST(ExpandQueryTest, SupersetAndSingleRelationProperties) {
  Annotator annotator(&News(), DefaultStoplist(), &Phrases(), &Rules());
  QueryProcessor semantic(annotator, SearchMode::kSemantic);
  std::vector<std::string> words = {
      "Where", "was",   "born",      "in",       "George Washington",
      "is",    "South Bend", "Indiana", "Southeast Asia", "Paris",
      "earthquake", "GM", "capital of", "Congo", "What", "flew over"};
  std::mt19937 rng(3);
  int expanded = 0;
  for (int trial = 0; trial < 400; ++trial) {
    std::string text;
    int n = 1 + rng() % 6;
    for (int i = 0; i < n; ++i) {
      if (!text.empty()) text += ' ';
      text += words[rng() % words.size()];
    }
    ExpandedQuery q = semantic.Expand(text);
    TermCounts base = CountTerms(QueryTerms(annotator.Analyze(text)));
    TermCounts full = CountTerms(q.terms);
    for (const auto &[key, count] : base) {
      EXPECT_GE(full[key], count) << key << " in: " << text;
    }
    EXPECT_EQ(q.status == ExpansionStatus::kExpanded, !q.added_names.empty());
    if (q.analysis.relations.size() >= 2) {
      EXPECT_NE(q.status, ExpansionStatus::kExpanded) << text;
    }
    expanded += q.status == ExpansionStatus::kExpanded;
  }
  EXPECT_GT(expanded, 0);
}

TEST(QueryProcessorTest, ModeMonotonicity) {
  Annotator keyword(nullptr, DefaultStoplist(), nullptr, nullptr);
  Annotator entity(&News(), DefaultStoplist(), &Phrases(), &Rules());
  QueryProcessor kw(keyword, SearchMode::kKeyword);
  QueryProcessor ne(entity, SearchMode::kNeKw);
  QueryProcessor sem(entity, SearchMode::kSemantic);
  for (const char *text :
       {"Where was George Washington born?", "earthquake in Southeast Asia",
        "GM loans in the U.S.", "Paris fashion week"}) {
    TermCounts k = CountTerms(kw.Terms(text));
    TermCounts n = CountTerms(ne.Terms(text));
    TermCounts s = CountTerms(sem.Terms(text));
    for (const auto &[key, c] : n) EXPECT_GE(s[key], c) << text;
    for (const auto &[key, c] : n) {
      if (key.rfind("kw:", 0) == 0) EXPECT_EQ(k.count(key), 1u) << key;
    }
  }
}

TEST(ModeTest, Names) {
  for (auto m : {SearchMode::kKeyword, SearchMode::kNeKw, SearchMode::kSemantic}) {
    EXPECT_EQ(ParseMode(ModeName(m)), m);
  }
  EXPECT_EQ(ParseMode("lucene"), std::nullopt);
}

}  // namespace
}  // namespace semsearch

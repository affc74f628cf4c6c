#ifndef SEMSEARCH_ANNOTATE_H_
#define SEMSEARCH_ANNOTATE_H_

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "semsearch/kb.h"

namespace semsearch {

struct Token {
  std::string text;
  size_t start = 0;  // byte offsets into the source, half-open
  size_t end = 0;

  bool operator==(const Token &) const = default;
};

// Splits text into maximal runs of word characters. An apostrophe or period
// is kept when it sits between two word characters ("don't", "U.S", "17.4bn");
// every other character separates tokens.
std::vector<Token> Tokenize(std::string_view text);

using Stoplist = std::set<std::string>;

// The 33-word English list used by classic keyword engines.
const Stoplist &DefaultStoplist();

// One word per line; blank lines and lines starting with '#' are skipped.
// Words are case-folded on load.
Stoplist LoadStoplist(const std::string &path);

std::vector<Token> RemoveStopwords(std::span<const Token> tokens,
                                   const Stoplist &stoplist);

struct EntityAnnotation {
  size_t start = 0;
  size_t end = 0;
  size_t token_begin = 0;  // token range covered by the match
  size_t token_end = 0;
  std::string surface;  // text as it appears in the source
  std::string name;     // NormalizeName(surface)
  std::optional<std::string> class_id;
  std::optional<std::string> entity_id;
  // Set when the span matched several KB entities; one annotation is emitted
  // per candidate.
  bool ambiguous = false;

  bool operator==(const EntityAnnotation &) const = default;
};

// Longest-match recognizer over every KB name. Names and text are compared
// on their normalized form between the first and last word token, so
// "U.S." in the KB matches "u.s" in text, while "Paris, Texas" never matches
// "Paris Texas".
class Gazetteer {
 public:
  explicit Gazetteer(const KnowledgeBase &kb);

  std::vector<EntityAnnotation> Recognize(std::string_view text,
                                          std::span<const Token> tokens) const;
  std::vector<EntityAnnotation> Recognize(std::string_view text) const;

 private:
  const KnowledgeBase &kb_;
  std::map<std::string, std::vector<std::string>> keys_;  // key -> entity ids
  size_t max_tokens_ = 0;
};

std::vector<EntityAnnotation> RecognizeEntities(std::string_view text,
                                                const KnowledgeBase &kb);

struct RelationMention {
  size_t start = 0;
  size_t end = 0;
  size_t token_begin = 0;
  size_t token_end = 0;
  std::string phrase;  // dictionary form
  // Dictionary target. Absent when the phrase is known but unmapped.
  std::optional<std::string> relation_id;

  bool operator==(const RelationMention &) const = default;
};

// Manually curated relation-phrase dictionary: phrase <TAB> relation_id per
// line. A phrase with an empty relation column is recognized as a relation
// phrase but maps to no relation.
class PhraseDictionary {
 public:
  static PhraseDictionary Load(const std::string &path);
  static PhraseDictionary Parse(std::string_view text);

  void Add(std::string_view phrase, std::string_view relation_id);

  // Exact, case-insensitive lookup. Unknown phrases and phrases without a
  // mapping both return nullopt.
  std::optional<std::string> Map(std::string_view phrase) const;
  bool Contains(std::string_view phrase) const;

  // Longest-match scan over tokens. Tokens flagged in `masked` are never part
  // of a match and break adjacency.
  std::vector<RelationMention> Recognize(std::string_view text,
                                         std::span<const Token> tokens,
                                         const std::vector<bool> &masked) const;

  size_t size() const { return entries_.size(); }

 private:
  struct Entry {
    std::string phrase;
    std::string relation_id;
  };
  std::map<std::string, Entry> entries_;  // token key -> entry
  size_t max_tokens_ = 0;
};

inline std::optional<std::string> MapRelationPhrase(
    std::string_view phrase, const PhraseDictionary &dict) {
  return dict.Map(phrase);
}

// Interrogative word -> NE class rules. Rules for a word are tried in file
// order; a rule fires when all of its trigger keywords occur in the query.
// A rule with no triggers is the word's default.
class InterrogativeRules {
 public:
  struct Rule {
    std::string word;
    std::vector<std::string> triggers;
    std::string class_id;
  };

  static InterrogativeRules Load(const std::string &path);
  static InterrogativeRules Parse(std::string_view text);

  void Add(Rule rule);

  // Class for the query's leading interrogative word, or nullopt.
  std::optional<std::string> Map(std::span<const Token> query_tokens) const;

  const std::vector<Rule> &rules() const { return rules_; }
  bool IsInterrogative(std::string_view word) const;

 private:
  std::vector<Rule> rules_;
};

inline std::optional<std::string> MapInterrogative(
    std::span<const Token> query_tokens, const InterrogativeRules &rules) {
  return rules.Map(query_tokens);
}

enum class TokenRole { kEntity, kInterrogative, kRelation, kStopword, kKeyword };

// Everything the annotation pipeline knows about one piece of text.
struct TextAnalysis {
  std::vector<Token> tokens;
  std::vector<TokenRole> roles;  // parallel to tokens
  std::vector<EntityAnnotation> entities;
  std::vector<RelationMention> relations;
  std::optional<std::string> interrogative_class;
  std::vector<std::string> keywords;  // case-folded, in text order
};

struct AnnotatorOptions {
  // Also emit keywords for the words of recognized entity names.
  bool keywords_inside_entities = false;
};

// Runs tokenization, entity recognition, relation-phrase recognition,
// interrogative mapping, and stop-word removal. Any resource may be null, in
// which case that stage is skipped (a null KB gives plain keyword analysis).
class Annotator {
 public:
  Annotator(const KnowledgeBase *kb, const Stoplist &stoplist,
            const PhraseDictionary *phrases = nullptr,
            const InterrogativeRules *interrogatives = nullptr,
            AnnotatorOptions options = {});

  TextAnalysis Analyze(std::string_view text) const;

  // Analyze with the interrogative class fixed by the caller instead of
  // derived from the text.
  TextAnalysis Analyze(std::string_view text,
                       const std::optional<std::string> &interrogative) const;

  const KnowledgeBase *kb() const { return kb_; }
  const Stoplist &stoplist() const { return stoplist_; }
  const PhraseDictionary *phrases() const { return phrases_; }
  const InterrogativeRules *interrogatives() const { return interrogatives_; }

 private:
  TextAnalysis Run(std::string_view text, bool map_interrogative,
                   const std::optional<std::string> &interrogative) const;

  const KnowledgeBase *kb_;
  Stoplist stoplist_;
  const PhraseDictionary *phrases_;
  const InterrogativeRules *interrogatives_;
  AnnotatorOptions options_;
  std::optional<Gazetteer> gazetteer_;
};

}  // namespace semsearch

#endif  // SEMSEARCH_ANNOTATE_H_

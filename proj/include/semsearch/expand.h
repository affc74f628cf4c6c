#ifndef SEMSEARCH_EXPAND_H_
#define SEMSEARCH_EXPAND_H_

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "semsearch/annotate.h"
#include "semsearch/kb.h"
#include "semsearch/terms.h"

namespace semsearch {

// The three compared retrieval models. ne_kw and semantic share document
// processing; only semantic expands queries.
enum class SearchMode { kKeyword, kNeKw, kSemantic };

std::string_view ModeName(SearchMode mode);
std::optional<SearchMode> ParseMode(std::string_view name);

// Implied triples for one document entity annotation:
//   (n/*/*) (*/c/*) (n/c/*) (a/*/*) (*/s/*) (n/s/*) (a/c/*) (a/s/*) (*/*/id)
// for every alias a of the identified entity and every superclass s of c.
// Templates whose features are missing are skipped. super_depth limits the
// superclass hops (0 = all ancestors).
std::set<NETriple> DocumentTriples(const EntityAnnotation &annotation,
                                   const KnowledgeBase &kb,
                                   int super_depth = 0);

// Most specific available triple: (*/*/id), (n/c/*), (n/*/*), (*/c/*).
NETriple QueryTriple(const EntityAnnotation &annotation);

// Document-side term multiset: keywords plus, per entity span, the union of
// the implied triples of every candidate annotation (each counted once).
std::vector<GeneralizedTerm> DocumentTerms(const TextAnalysis &analysis,
                                           const KnowledgeBase *kb,
                                           int super_depth = 0);

// Query-side term multiset without expansion: keywords, one most-specific
// triple per entity span (per distinct candidate triple when ambiguous), and
// (*/c/*) for a mapped interrogative word.
std::vector<GeneralizedTerm> QueryTerms(const TextAnalysis &analysis);

enum class ExpansionStatus {
  kExpanded,
  kNoRelationPhrase,
  kMultipleRelations,
  kNoRelationMapping,
  kNoEntity,
  kNoFacts,
};

std::string_view StatusName(ExpansionStatus status);

struct ExpandedQuery {
  std::string original_text;
  std::string expanded_text;  // equals original_text unless expanded
  std::vector<GeneralizedTerm> terms;
  std::vector<std::string> added_names;
  ExpansionStatus status = ExpansionStatus::kNoRelationPhrase;
  std::optional<std::string> relation_id;  // the single resolved relation
  TextAnalysis analysis;                   // of the original text
};

// Turns query text into a term multiset for a given mode. In semantic mode
// queries with exactly one resolvable relation phrase and an identified
// entity are extended with the canonical names of KB entities related to it,
// and the extended text is annotated again.
class QueryProcessor {
 public:
  QueryProcessor(const Annotator &annotator, SearchMode mode);

  ExpandedQuery Expand(std::string_view text) const;
  std::vector<GeneralizedTerm> Terms(std::string_view text) const;

  SearchMode mode() const { return mode_; }

 private:
  const Annotator &annotator_;
  SearchMode mode_;
};

ExpandedQuery ExpandQuery(std::string_view text, const KnowledgeBase &kb,
                          const PhraseDictionary &phrases,
                          const InterrogativeRules &interrogatives,
                          const Stoplist &stoplist = DefaultStoplist());

}  // namespace semsearch

#endif  // SEMSEARCH_EXPAND_H_

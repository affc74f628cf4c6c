#include "semsearch/expand.h"

#include <algorithm>

#include "semsearch/text_util.h"

namespace semsearch {

namespace {

// Consecutive annotations sharing a span are candidates for one mention.
template <typename Fn>
void ForEachSpan(const std::vector<EntityAnnotation> &entities, Fn fn) {
  size_t i = 0;
  while (i < entities.size()) {
    size_t j = i + 1;
    while (j < entities.size() && entities[j].start == entities[i].start &&
           entities[j].end == entities[i].end) {
      ++j;
    }
    fn(std::span<const EntityAnnotation>(entities.data() + i, j - i));
    i = j;
  }
}

constexpr std::string_view kAppendSeparator = " ; ";

}  // namespace

std::string_view ModeName(SearchMode mode) {
  switch (mode) {
    case SearchMode::kKeyword:
      return "keyword";
    case SearchMode::kNeKw:
      return "ne_kw";
    case SearchMode::kSemantic:
      return "semantic";
  }
  return "";
}

std::optional<SearchMode> ParseMode(std::string_view name) {
  if (name == "keyword") return SearchMode::kKeyword;
  if (name == "ne_kw") return SearchMode::kNeKw;
  if (name == "semantic") return SearchMode::kSemantic;
  return std::nullopt;
}

std::set<NETriple> DocumentTriples(const EntityAnnotation &annotation,
                                   const KnowledgeBase &kb, int super_depth) {
  if (NormalizeName(annotation.name).empty()) {
    throw Error("document annotation has no name");
  }
  const std::string &n = annotation.name;
  std::optional<std::string> c = annotation.class_id;
  const std::optional<std::string> &id = annotation.entity_id;

  std::vector<std::string> aliases;
  if (id) {
    const Entity *e = kb.FindEntity(*id);
    if (e == nullptr) throw Error("unknown entity '" + *id + "'");
    if (!c) c = e->class_id;
    std::string self = NormalizeTripleName(n);
    for (const auto &name : kb.NamesOf(*id)) {
      if (NormalizeTripleName(name) != self) aliases.push_back(name);
    }
  }
  std::set<std::string> supers;
  if (c) supers = kb.SuperClasses(*c, super_depth);

  using std::nullopt;
  std::set<NETriple> out;
  out.insert(NETriple::Make(n, nullopt, nullopt));
  for (const auto &a : aliases) out.insert(NETriple::Make(a, nullopt, nullopt));
  if (c) {
    out.insert(NETriple::Make(nullopt, *c, nullopt));
    out.insert(NETriple::Make(n, *c, nullopt));
    for (const auto &a : aliases) out.insert(NETriple::Make(a, *c, nullopt));
    for (const auto &s : supers) {
      out.insert(NETriple::Make(nullopt, s, nullopt));
      out.insert(NETriple::Make(n, s, nullopt));
      for (const auto &a : aliases) out.insert(NETriple::Make(a, s, nullopt));
    }
  }
  if (id) out.insert(NETriple::Make(nullopt, nullopt, *id));
  return out;
}

NETriple QueryTriple(const EntityAnnotation &annotation) {
  std::optional<std::string> name;
  if (!NormalizeName(annotation.name).empty()) name = annotation.name;
  const auto &c = annotation.class_id;
  if (annotation.entity_id) {
    return NETriple::Make(std::nullopt, std::nullopt, *annotation.entity_id);
  }
  if (name && c) return NETriple::Make(*name, *c, std::nullopt);
  if (name) return NETriple::Make(*name, std::nullopt, std::nullopt);
  if (c) return NETriple::Make(std::nullopt, *c, std::nullopt);
  throw Error("query annotation has no features");
}

std::vector<GeneralizedTerm> DocumentTerms(const TextAnalysis &analysis,
                                           const KnowledgeBase *kb,
                                           int super_depth) {
  std::vector<GeneralizedTerm> terms;
  for (const auto &k : analysis.keywords) {
    terms.push_back(GeneralizedTerm::Keyword(k));
  }
  if (kb == nullptr) return terms;
  ForEachSpan(analysis.entities, [&](std::span<const EntityAnnotation> span) {
    std::set<NETriple> triples;
    for (const auto &a : span) {
      auto more = DocumentTriples(a, *kb, super_depth);
      triples.insert(more.begin(), more.end());
    }
    for (const auto &t : triples) terms.push_back(GeneralizedTerm::Triple(t));
  });
  return terms;
}

std::vector<GeneralizedTerm> QueryTerms(const TextAnalysis &analysis) {
  std::vector<GeneralizedTerm> terms;
  for (const auto &k : analysis.keywords) {
    terms.push_back(GeneralizedTerm::Keyword(k));
  }
  ForEachSpan(analysis.entities, [&](std::span<const EntityAnnotation> span) {
    if (span.size() == 1) {
      terms.push_back(GeneralizedTerm::Triple(QueryTriple(span.front())));
      return;
    }
    // Ambiguous mention: the identifier is not trusted.
    std::set<NETriple> triples;
    for (EntityAnnotation a : span) {
      a.entity_id.reset();
      triples.insert(QueryTriple(a));
    }
    for (const auto &t : triples) terms.push_back(GeneralizedTerm::Triple(t));
  });
  if (analysis.interrogative_class) {
    terms.push_back(GeneralizedTerm::Triple(
        NETriple::Make(std::nullopt, *analysis.interrogative_class,
                       std::nullopt)));
  }
  return terms;
}

std::string_view StatusName(ExpansionStatus status) {
  switch (status) {
    case ExpansionStatus::kExpanded:
      return "EXPANDED";
    case ExpansionStatus::kNoRelationPhrase:
      return "NO_RELATION_PHRASE";
    case ExpansionStatus::kMultipleRelations:
      return "MULTIPLE_RELATIONS";
    case ExpansionStatus::kNoRelationMapping:
      return "NO_RELATION_MAPPING";
    case ExpansionStatus::kNoEntity:
      return "NO_ENTITY";
    case ExpansionStatus::kNoFacts:
      return "NO_FACTS";
  }
  return "";
}

QueryProcessor::QueryProcessor(const Annotator &annotator, SearchMode mode)
    : annotator_(annotator), mode_(mode) {}

ExpandedQuery QueryProcessor::Expand(std::string_view text) const {
  ExpandedQuery q;
  q.original_text = std::string(text);
  q.expanded_text = q.original_text;
  q.analysis = annotator_.Analyze(text);
  q.terms = QueryTerms(q.analysis);

  const KnowledgeBase *kb = annotator_.kb();
  const auto &mentions = q.analysis.relations;
  if (mentions.empty()) {
    q.status = ExpansionStatus::kNoRelationPhrase;
    return q;
  }
  if (mentions.size() > 1) {
    q.status = ExpansionStatus::kMultipleRelations;
    return q;
  }
  const auto &relation = mentions.front().relation_id;
  if (kb == nullptr || !relation || !kb->HasRelation(*relation)) {
    q.status = ExpansionStatus::kNoRelationMapping;
    return q;
  }
  q.relation_id = relation;

  std::vector<std::string> anchors;
  ForEachSpan(q.analysis.entities, [&](std::span<const EntityAnnotation> span) {
    if (span.size() == 1 && span.front().entity_id) {
      anchors.push_back(*span.front().entity_id);
    }
  });
  if (anchors.empty()) {
    q.status = ExpansionStatus::kNoEntity;
    return q;
  }

  std::set<std::string> related;
  for (const auto &e : anchors) {
    auto more = kb->RelatedEntities(e, *relation);
    related.insert(more.begin(), more.end());
  }
  if (related.empty()) {
    q.status = ExpansionStatus::kNoFacts;
    return q;
  }

  for (const auto &id : related) {
    const std::string &name = kb->FindEntity(id)->canonical_name;
    if (std::find(q.added_names.begin(), q.added_names.end(), name) ==
        q.added_names.end()) {
      q.added_names.push_back(name);
    }
  }
  for (const auto &name : q.added_names) {
    q.expanded_text += kAppendSeparator;
    q.expanded_text += name;
  }
  // The interrogative class belongs to the user's question, not to the
  // appended names, so it is carried over rather than re-derived.
  TextAnalysis extended =
      annotator_.Analyze(q.expanded_text, q.analysis.interrogative_class);
  q.terms = QueryTerms(extended);
  q.status = ExpansionStatus::kExpanded;
  return q;
}

std::vector<GeneralizedTerm> QueryProcessor::Terms(std::string_view text) const {
  if (mode_ == SearchMode::kSemantic) return Expand(text).terms;
  return QueryTerms(annotator_.Analyze(text));
}

ExpandedQuery ExpandQuery(std::string_view text, const KnowledgeBase &kb,
                          const PhraseDictionary &phrases,
                          const InterrogativeRules &interrogatives,
                          const Stoplist &stoplist) {
  Annotator annotator(&kb, stoplist, &phrases, &interrogatives);
  return QueryProcessor(annotator, SearchMode::kSemantic).Expand(text);
}

}  // namespace semsearch

#include "semsearch/terms.h"

#include "semsearch/kb.h"
#include "semsearch/text_util.h"

namespace semsearch {

std::string NormalizeTripleName(std::string_view name) {
  std::string n = NormalizeName(name);
  for (char &c : n) {
    if (c == ' ') c = '_';
  }
  return n;
}

NETriple NETriple::Make(std::optional<std::string_view> name,
                        std::optional<std::string_view> class_id,
                        std::optional<std::string_view> entity_id) {
  NETriple t;
  if (name) t.name = NormalizeTripleName(*name);
  if (class_id) t.class_id = std::string(*class_id);
  if (entity_id) t.entity_id = std::string(*entity_id);
  if (!t.name && !t.class_id && !t.entity_id) {
    throw Error("NE triple needs at least one non-wildcard slot");
  }
  return t;
}

std::string NETriple::Key() const {
  std::string key = "ne:";
  key += name.value_or("*");
  key += '|';
  key += class_id.value_or("*");
  key += '|';
  key += entity_id.value_or("*");
  return key;
}

GeneralizedTerm GeneralizedTerm::Keyword(std::string_view token) {
  GeneralizedTerm t;
  t.kind_ = Kind::kKeyword;
  t.keyword_ = CaseFold(token);
  t.key_ = "kw:" + t.keyword_;
  return t;
}

GeneralizedTerm GeneralizedTerm::Triple(NETriple triple) {
  GeneralizedTerm t;
  t.kind_ = Kind::kTriple;
  t.key_ = triple.Key();
  t.triple_ = std::move(triple);
  return t;
}

TermCounts CountTerms(std::span<const GeneralizedTerm> terms) {
  TermCounts counts;
  for (const auto &t : terms) ++counts[t.Key()];
  return counts;
}

}  // namespace semsearch

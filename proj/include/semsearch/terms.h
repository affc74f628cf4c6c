#ifndef SEMSEARCH_TERMS_H_
#define SEMSEARCH_TERMS_H_

#include <compare>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace semsearch {

// A (name, class, identifier) pattern. Absent slots are wildcards. Names are
// stored normalized: case-folded with whitespace runs replaced by '_'.
struct NETriple {
  std::optional<std::string> name;
  std::optional<std::string> class_id;
  std::optional<std::string> entity_id;

  static NETriple Make(std::optional<std::string_view> name,
                       std::optional<std::string_view> class_id,
                       std::optional<std::string_view> entity_id);

  // Index term key: ne:<name>|<class>|<id>, '*' for wildcards.
  std::string Key() const;

  auto operator<=>(const NETriple &) const = default;
  bool operator==(const NETriple &) const = default;
};

std::string NormalizeTripleName(std::string_view name);

// One dimension of the vector space: a keyword or an NE triple.
class GeneralizedTerm {
 public:
  enum class Kind { kKeyword, kTriple };

  static GeneralizedTerm Keyword(std::string_view token);
  static GeneralizedTerm Triple(NETriple triple);

  Kind kind() const { return kind_; }
  const std::string &keyword() const { return keyword_; }
  const NETriple &triple() const { return triple_; }

  // kw:<case-folded token> or the triple key.
  const std::string &Key() const { return key_; }

  bool operator==(const GeneralizedTerm &other) const {
    return key_ == other.key_;
  }
  auto operator<=>(const GeneralizedTerm &other) const {
    return key_ <=> other.key_;
  }

 private:
  Kind kind_ = Kind::kKeyword;
  std::string keyword_;
  NETriple triple_;
  std::string key_;
};

// Term key -> multiplicity.
using TermCounts = std::map<std::string, int>;

TermCounts CountTerms(std::span<const GeneralizedTerm> terms);

}  // namespace semsearch

#endif  // SEMSEARCH_TERMS_H_

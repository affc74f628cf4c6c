#ifndef SEMSEARCH_KB_H_
#define SEMSEARCH_KB_H_

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace semsearch {

// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when a knowledge base file fails to parse or validate. Carries every
// diagnostic found, each prefixed with its line number when one applies.
class KbError : public Error {
 public:
  explicit KbError(std::vector<std::string> diagnostics);
  const std::vector<std::string> &diagnostics() const { return diagnostics_; }

 private:
  std::vector<std::string> diagnostics_;
};

struct ClassDef {
  std::string id;
  std::string label;
  std::vector<std::string> parents;

  bool operator==(const ClassDef &) const = default;
};

struct Entity {
  std::string id;
  std::string class_id;  // most specific class
  std::string canonical_name;
  std::vector<std::string> aliases;  // never contains canonical_name

  bool operator==(const Entity &) const = default;
};

struct RelationType {
  std::string id;
  std::string label;

  bool operator==(const RelationType &) const = default;
};

struct Fact {
  std::string subject;
  std::string relation;
  std::string object;

  auto operator<=>(const Fact &) const = default;
};

// Combined store of entity descriptions (classes, entities, aliases) and
// relation facts. Immutable once constructed; all lookups are const and safe
// to share between threads.
class KnowledgeBase {
 public:
  KnowledgeBase() = default;

  // Reads and validates a KB file. Throws KbError listing every problem.
  static KnowledgeBase Load(const std::string &path);

  // Same as Load but from in-memory text.
  static KnowledgeBase Parse(std::string_view text);

  // Validates records and builds the derived indexes.
  static KnowledgeBase FromRecords(std::vector<ClassDef> classes,
                                   std::vector<Entity> entities,
                                   std::vector<RelationType> relations,
                                   std::vector<Fact> facts);

  const std::vector<ClassDef> &classes() const { return classes_; }
  const std::vector<Entity> &entities() const { return entities_; }
  const std::vector<RelationType> &relations() const { return relations_; }
  const std::vector<Fact> &facts() const { return facts_; }
  size_t alias_count() const;

  const ClassDef *FindClass(std::string_view id) const;
  const Entity *FindEntity(std::string_view id) const;
  bool HasRelation(std::string_view id) const;

  // Strict ancestors of a class. max_depth bounds the number of parent hops;
  // 0 means unlimited. Throws Error for an unknown class.
  std::set<std::string> SuperClasses(std::string_view class_id,
                                     int max_depth = 0) const;

  // Canonical name plus aliases of an entity.
  std::set<std::string> NamesOf(std::string_view entity_id) const;

  // Entities whose canonical name or alias matches under NormalizeName.
  std::set<std::string> EntitiesByName(std::string_view name) const;

  // Union of the names of every entity matching a bare name.
  std::set<std::string> AliasesOfName(std::string_view name) const;

  // Entities linked to entity_id by a fact of the given relation, in either
  // argument position.
  std::set<std::string> RelatedEntities(std::string_view entity_id,
                                        std::string_view relation_id) const;

  // Normalized name -> sorted entity ids. Drives gazetteer recognition.
  const std::map<std::string, std::vector<std::string>> &name_index() const {
    return name_index_;
  }

  // Equality over the declared record sets, independent of row order.
  bool operator==(const KnowledgeBase &other) const;

 private:
  void BuildIndexes();

  std::vector<ClassDef> classes_;
  std::vector<Entity> entities_;
  std::vector<RelationType> relations_;
  std::vector<Fact> facts_;

  std::unordered_map<std::string, size_t> class_pos_;
  std::unordered_map<std::string, size_t> entity_pos_;
  std::unordered_map<std::string, size_t> relation_pos_;
  std::map<std::string, std::vector<std::string>> name_index_;
  std::map<std::pair<std::string, std::string>, std::set<std::string>>
      related_;
  std::unordered_map<std::string, std::set<std::string>> ancestors_;
};

}  // namespace semsearch

#endif  // SEMSEARCH_KB_H_

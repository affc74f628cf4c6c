#include "semsearch/kb.h"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "semsearch/text_util.h"

namespace semsearch {

namespace {

std::string JoinDiagnostics(const std::vector<std::string> &diagnostics) {
  std::string msg = "invalid knowledge base";
  for (const auto &d : diagnostics) msg += "\n  " + d;
  return msg;
}

std::string At(int line) { return "line " + std::to_string(line) + ": "; }

// Source line of each record, used to point diagnostics at the input.
struct RecordLines {
  std::vector<int> classes, entities, relations, facts;
};

// Checks references, uniqueness, and acyclicity. Appends diagnostics.
void Validate(const std::vector<ClassDef> &classes,
              const std::vector<Entity> &entities,
              const std::vector<RelationType> &relations,
              const std::vector<Fact> &facts, const RecordLines *lines,
              std::vector<std::string> *diagnostics) {
  auto where = [&](const std::vector<int> RecordLines::*field, size_t i) {
    if (lines == nullptr) return std::string();
    return At((lines->*field)[i]);
  };

  std::unordered_map<std::string, size_t> class_pos;
  for (size_t i = 0; i < classes.size(); ++i) {
    if (!class_pos.emplace(classes[i].id, i).second) {
      diagnostics->push_back(where(&RecordLines::classes, i) +
                             "duplicate class id '" + classes[i].id + "'");
    }
  }
  bool parents_ok = true;
  for (size_t i = 0; i < classes.size(); ++i) {
    for (const auto &p : classes[i].parents) {
      if (!class_pos.count(p)) {
        parents_ok = false;
        diagnostics->push_back(where(&RecordLines::classes, i) + "class '" +
                               classes[i].id + "' has undeclared parent '" +
                               p + "'");
      }
    }
  }

  // Iterative three-colour DFS over the parent graph.
  if (parents_ok) {
    std::vector<int> colour(classes.size(), 0);
    for (size_t root = 0; root < classes.size(); ++root) {
      if (colour[root] != 0) continue;
      std::vector<std::pair<size_t, size_t>> stack{{root, 0}};
      colour[root] = 1;
      while (!stack.empty()) {
        auto &[node, next] = stack.back();
        const auto &parents = classes[node].parents;
        if (next == parents.size()) {
          colour[node] = 2;
          stack.pop_back();
          continue;
        }
        size_t p = class_pos.at(parents[next++]);
        if (colour[p] == 1) {
          diagnostics->push_back(where(&RecordLines::classes, node) +
                                 "cycle in class hierarchy through '" +
                                 classes[node].id + "' -> '" + classes[p].id +
                                 "'");
        } else if (colour[p] == 0) {
          colour[p] = 1;
          stack.emplace_back(p, 0);
        }
      }
    }
  }

  std::unordered_map<std::string, size_t> entity_pos;
  for (size_t i = 0; i < entities.size(); ++i) {
    const Entity &e = entities[i];
    std::string loc = where(&RecordLines::entities, i);
    if (!entity_pos.emplace(e.id, i).second) {
      diagnostics->push_back(loc + "duplicate entity id '" + e.id + "'");
    }
    if (!class_pos.count(e.class_id)) {
      diagnostics->push_back(loc + "entity '" + e.id +
                             "' has undeclared class '" + e.class_id + "'");
    }
    if (NormalizeName(e.canonical_name).empty()) {
      diagnostics->push_back(loc + "entity '" + e.id + "' has empty name");
    }
    std::string canonical = NormalizeName(e.canonical_name);
    for (const auto &a : e.aliases) {
      if (NormalizeName(a).empty()) {
        diagnostics->push_back(loc + "entity '" + e.id + "' has empty alias");
      } else if (NormalizeName(a) == canonical) {
        diagnostics->push_back(loc + "entity '" + e.id +
                               "' lists its canonical name as an alias");
      }
    }
  }

  std::unordered_map<std::string, size_t> relation_pos;
  for (size_t i = 0; i < relations.size(); ++i) {
    if (!relation_pos.emplace(relations[i].id, i).second) {
      diagnostics->push_back(where(&RecordLines::relations, i) +
                             "duplicate relation id '" + relations[i].id +
                             "'");
    }
  }

  for (size_t i = 0; i < facts.size(); ++i) {
    const Fact &f = facts[i];
    std::string loc = where(&RecordLines::facts, i);
    if (!entity_pos.count(f.subject)) {
      diagnostics->push_back(loc + "fact subject '" + f.subject +
                             "' is not a declared entity");
    }
    if (!relation_pos.count(f.relation)) {
      diagnostics->push_back(loc + "fact relation '" + f.relation +
                             "' is not a declared relation");
    }
    if (!entity_pos.count(f.object)) {
      diagnostics->push_back(loc + "fact object '" + f.object +
                             "' is not a declared entity");
    }
  }
}

std::vector<std::string> SplitList(std::string_view field, char delim) {
  std::vector<std::string> out;
  if (Trim(field).empty()) return out;
  for (auto &item : Split(field, delim)) {
    std::string_view t = Trim(item);
    out.emplace_back(t);
  }
  return out;
}

}  // namespace

KbError::KbError(std::vector<std::string> diagnostics)
    : Error(JoinDiagnostics(diagnostics)),
      diagnostics_(std::move(diagnostics)) {}

KnowledgeBase KnowledgeBase::Load(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw KbError({"cannot open knowledge base file '" + path + "'"});
  std::stringstream buf;
  buf << in.rdbuf();
  return Parse(buf.str());
}

KnowledgeBase KnowledgeBase::Parse(std::string_view text) {
  static constexpr std::string_view kHeaders[] = {"#CLASSES", "#ENTITIES",
                                                  "#RELATIONS", "#FACTS"};
  static constexpr size_t kFieldCounts[] = {3, 4, 2, 3};

  std::vector<std::string> diagnostics;
  std::vector<ClassDef> classes;
  std::vector<Entity> entities;
  std::vector<RelationType> relations;
  std::vector<Fact> facts;
  RecordLines lines;

  int section = -1;
  int line_no = 0;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (Trim(line).empty()) continue;

    if (line.front() == '#') {
      std::string_view head = Trim(line);
      auto it = std::find(std::begin(kHeaders), std::end(kHeaders), head);
      if (it == std::end(kHeaders)) {
        // Ids such as #Company_123 start with '#'; a row always has a tab.
        if (line.find('\t') == std::string_view::npos) continue;
      } else {
        int next = static_cast<int>(it - std::begin(kHeaders));
        if (next != section + 1) {
          diagnostics.push_back(At(line_no) + "section header " +
                                std::string(head) + " out of order");
        }
        section = std::max(section, next);
        continue;
      }
    }

    if (section < 0) {
      diagnostics.push_back(At(line_no) + "data row before #CLASSES header");
      continue;
    }

    std::vector<std::string> fields = Split(line, '\t');
    size_t want = kFieldCounts[section];
    // Trailing list columns may be omitted entirely.
    bool optional_tail = section == 0 || section == 1;
    if (fields.size() > want ||
        fields.size() < want - (optional_tail ? 1 : 0)) {
      diagnostics.push_back(At(line_no) + "expected " + std::to_string(want) +
                            " tab-separated fields in " +
                            std::string(kHeaders[section]) + ", got " +
                            std::to_string(fields.size()));
      continue;
    }
    fields.resize(want);
    bool empty_key = false;
    for (size_t i = 0; i < want; ++i) {
      fields[i] = std::string(Trim(fields[i]));
      if (fields[i].empty() && !(optional_tail && i == want - 1) &&
          !(section == 0 && i == 1)) {
        empty_key = true;
      }
    }
    if (empty_key) {
      diagnostics.push_back(At(line_no) + "empty required field");
      continue;
    }

    switch (section) {
      case 0:
        classes.push_back({fields[0], fields[1], SplitList(fields[2], ',')});
        lines.classes.push_back(line_no);
        break;
      case 1:
        entities.push_back(
            {fields[0], fields[1], fields[2], SplitList(fields[3], '|')});
        lines.entities.push_back(line_no);
        break;
      case 2:
        relations.push_back({fields[0], fields[1]});
        lines.relations.push_back(line_no);
        break;
      case 3:
        facts.push_back({fields[0], fields[1], fields[2]});
        lines.facts.push_back(line_no);
        break;
    }
  }
  for (int s = section + 1; s < 4; ++s) {
    diagnostics.push_back("missing section header " +
                          std::string(kHeaders[s]));
  }

  Validate(classes, entities, relations, facts, &lines, &diagnostics);
  if (!diagnostics.empty()) throw KbError(std::move(diagnostics));

  KnowledgeBase kb;
  kb.classes_ = std::move(classes);
  kb.entities_ = std::move(entities);
  kb.relations_ = std::move(relations);
  kb.facts_ = std::move(facts);
  kb.BuildIndexes();
  return kb;
}

KnowledgeBase KnowledgeBase::FromRecords(std::vector<ClassDef> classes,
                                         std::vector<Entity> entities,
                                         std::vector<RelationType> relations,
                                         std::vector<Fact> facts) {
  std::vector<std::string> diagnostics;
  Validate(classes, entities, relations, facts, nullptr, &diagnostics);
  if (!diagnostics.empty()) throw KbError(std::move(diagnostics));
  KnowledgeBase kb;
  kb.classes_ = std::move(classes);
  kb.entities_ = std::move(entities);
  kb.relations_ = std::move(relations);
  kb.facts_ = std::move(facts);
  kb.BuildIndexes();
  return kb;
}

void KnowledgeBase::BuildIndexes() {
  for (size_t i = 0; i < classes_.size(); ++i) class_pos_[classes_[i].id] = i;
  for (size_t i = 0; i < entities_.size(); ++i) {
    entity_pos_[entities_[i].id] = i;
  }
  for (size_t i = 0; i < relations_.size(); ++i) {
    relation_pos_[relations_[i].id] = i;
  }

  for (const Entity &e : entities_) {
    name_index_[NormalizeName(e.canonical_name)].push_back(e.id);
    for (const auto &a : e.aliases) name_index_[NormalizeName(a)].push_back(e.id);
  }
  for (auto &[name, ids] : name_index_) {
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  }

  for (const Fact &f : facts_) {
    if (f.subject == f.object) continue;
    related_[{f.subject, f.relation}].insert(f.object);
    related_[{f.object, f.relation}].insert(f.subject);
  }

  // Ancestor sets, memoised in topological order (the graph is acyclic).
  std::vector<size_t> order;
  std::vector<int> state(classes_.size(), 0);
  for (size_t root = 0; root < classes_.size(); ++root) {
    if (state[root]) continue;
    std::vector<std::pair<size_t, size_t>> stack{{root, 0}};
    state[root] = 1;
    while (!stack.empty()) {
      auto &[node, next] = stack.back();
      const auto &parents = classes_[node].parents;
      if (next == parents.size()) {
        order.push_back(node);
        stack.pop_back();
        continue;
      }
      size_t p = class_pos_.at(parents[next++]);
      if (!state[p]) {
        state[p] = 1;
        stack.emplace_back(p, 0);
      }
    }
  }
  for (size_t node : order) {
    std::set<std::string> &anc = ancestors_[classes_[node].id];
    for (const auto &p : classes_[node].parents) {
      anc.insert(p);
      const auto &up = ancestors_.at(p);
      anc.insert(up.begin(), up.end());
    }
  }
}

size_t KnowledgeBase::alias_count() const {
  size_t n = 0;
  for (const auto &e : entities_) n += e.aliases.size();
  return n;
}

const ClassDef *KnowledgeBase::FindClass(std::string_view id) const {
  auto it = class_pos_.find(std::string(id));
  return it == class_pos_.end() ? nullptr : &classes_[it->second];
}

const Entity *KnowledgeBase::FindEntity(std::string_view id) const {
  auto it = entity_pos_.find(std::string(id));
  return it == entity_pos_.end() ? nullptr : &entities_[it->second];
}

bool KnowledgeBase::HasRelation(std::string_view id) const {
  return relation_pos_.count(std::string(id)) > 0;
}

std::set<std::string> KnowledgeBase::SuperClasses(std::string_view class_id,
                                                  int max_depth) const {
  const ClassDef *c = FindClass(class_id);
  if (c == nullptr) throw Error("unknown class '" + std::string(class_id) + "'");
  if (max_depth <= 0) return ancestors_.at(c->id);

  std::set<std::string> result;
  std::vector<const ClassDef *> frontier{c};
  for (int depth = 0; depth < max_depth && !frontier.empty(); ++depth) {
    std::vector<const ClassDef *> next;
    for (const ClassDef *node : frontier) {
      for (const auto &p : node->parents) {
        if (result.insert(p).second) next.push_back(FindClass(p));
      }
    }
    frontier = std::move(next);
  }
  return result;
}

std::set<std::string> KnowledgeBase::NamesOf(std::string_view entity_id) const {
  const Entity *e = FindEntity(entity_id);
  if (e == nullptr) {
    throw Error("unknown entity '" + std::string(entity_id) + "'");
  }
  std::set<std::string> names(e->aliases.begin(), e->aliases.end());
  names.insert(e->canonical_name);
  return names;
}

std::set<std::string> KnowledgeBase::EntitiesByName(
    std::string_view name) const {
  auto it = name_index_.find(NormalizeName(name));
  if (it == name_index_.end()) return {};
  return {it->second.begin(), it->second.end()};
}

std::set<std::string> KnowledgeBase::AliasesOfName(std::string_view name) const {
  std::set<std::string> names;
  for (const auto &id : EntitiesByName(name)) {
    auto more = NamesOf(id);
    names.insert(more.begin(), more.end());
  }
  return names;
}

std::set<std::string> KnowledgeBase::RelatedEntities(
    std::string_view entity_id, std::string_view relation_id) const {
  if (FindEntity(entity_id) == nullptr) {
    throw Error("unknown entity '" + std::string(entity_id) + "'");
  }
  if (!HasRelation(relation_id)) {
    throw Error("unknown relation '" + std::string(relation_id) + "'");
  }
  auto it = related_.find({std::string(entity_id), std::string(relation_id)});
  if (it == related_.end()) return {};
  return it->second;
}

bool KnowledgeBase::operator==(const KnowledgeBase &other) const {
  auto sorted = [](auto v, auto key) {
    std::sort(v.begin(), v.end(),
              [&](const auto &a, const auto &b) { return key(a) < key(b); });
    return v;
  };
  auto by_id = [](const auto &r) { return r.id; };
  auto fact_set = [](const std::vector<Fact> &f) {
    return std::set<Fact>(f.begin(), f.end());
  };
  return sorted(classes_, by_id) == sorted(other.classes_, by_id) &&
         sorted(entities_, by_id) == sorted(other.entities_, by_id) &&
         sorted(relations_, by_id) == sorted(other.relations_, by_id) &&
         fact_set(facts_) == fact_set(other.facts_);
}

}  // namespace semsearch

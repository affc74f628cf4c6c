#include "semsearch/annotate.h"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "semsearch/text_util.h"

namespace semsearch {

namespace {

std::string ReadFile(const std::string &path, const char *what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(std::string("cannot open ") + what + " '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Calls fn(line_no, line) for each non-blank line that is not a comment.
template <typename Fn>
void ForEachDataLine(std::string_view text, Fn fn) {
  int line_no = 0;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (Trim(line).empty() || line.front() == '#') continue;
    fn(line_no, line);
  }
}

// Normalized text from the first to the last token of a range.
std::string SpanKey(std::string_view text, std::span<const Token> tokens,
                    size_t begin, size_t end) {
  size_t from = tokens[begin].start;
  size_t to = tokens[end - 1].end;
  return NormalizeName(text.substr(from, to - from));
}

// Key for a free-standing phrase: its normalized text between first and last
// word token. Empty if the phrase has no word characters.
std::pair<std::string, size_t> PhraseKey(std::string_view phrase) {
  std::vector<Token> tokens = Tokenize(phrase);
  if (tokens.empty()) return {std::string(), 0};
  return {SpanKey(phrase, tokens, 0, tokens.size()), tokens.size()};
}

bool OnlySpaceBetween(std::string_view text, const Token &a, const Token &b) {
  for (size_t i = a.end; i < b.start; ++i) {
    if (!IsSpace(text[i])) return false;
  }
  return true;
}

}  // namespace

std::vector<Token> Tokenize(std::string_view text) {
  std::vector<Token> tokens;
  size_t i = 0;
  const size_t n = text.size();
  while (i < n) {
    if (!IsWordChar(text[i])) {
      ++i;
      continue;
    }
    size_t start = i;
    while (i < n) {
      if (IsWordChar(text[i])) {
        ++i;
      } else if ((text[i] == '\'' || text[i] == '.') && i + 1 < n &&
                 IsWordChar(text[i + 1])) {
        i += 2;
      } else {
        break;
      }
    }
    tokens.push_back({std::string(text.substr(start, i - start)), start, i});
  }
  return tokens;
}

const Stoplist &DefaultStoplist() {
  static const Stoplist kWords = {
      "a",    "an",   "and",   "are",   "as",   "at",   "be",
      "but",  "by",   "for",   "if",    "in",   "into", "is",
      "it",   "no",   "not",   "of",    "on",   "or",   "such",
      "that", "the",  "their", "then",  "there", "these", "they",
      "this", "to",   "was",   "will",  "with"};
  return kWords;
}

Stoplist LoadStoplist(const std::string &path) {
  Stoplist words;
  ForEachDataLine(ReadFile(path, "stoplist"), [&](int, std::string_view line) {
    words.insert(CaseFold(Trim(line)));
  });
  return words;
}

std::vector<Token> RemoveStopwords(std::span<const Token> tokens,
                                   const Stoplist &stoplist) {
  std::vector<Token> kept;
  for (const Token &t : tokens) {
    if (!stoplist.count(CaseFold(t.text))) kept.push_back(t);
  }
  return kept;
}

Gazetteer::Gazetteer(const KnowledgeBase &kb) : kb_(kb) {
  for (const auto &[name, ids] : kb.name_index()) {
    auto [key, count] = PhraseKey(name);
    if (key.empty()) continue;
    auto &slot = keys_[key];
    slot.insert(slot.end(), ids.begin(), ids.end());
    max_tokens_ = std::max(max_tokens_, count);
  }
  for (auto &[key, ids] : keys_) {
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  }
}

std::vector<EntityAnnotation> Gazetteer::Recognize(
    std::string_view text, std::span<const Token> tokens) const {
  std::vector<EntityAnnotation> out;
  size_t i = 0;
  while (i < tokens.size()) {
    // Longest run of tokens separated only by whitespace, capped by the
    // longest KB name. A punctuation gap is allowed only if some name has it,
    // so we probe every length rather than stopping at the first gap.
    size_t limit = std::min(tokens.size(), i + max_tokens_);
    const std::vector<std::string> *hit = nullptr;
    size_t hit_end = 0;
    for (size_t j = limit; j > i; --j) {
      auto it = keys_.find(SpanKey(text, tokens, i, j));
      if (it != keys_.end()) {
        hit = &it->second;
        hit_end = j;
        break;
      }
    }
    if (hit == nullptr) {
      ++i;
      continue;
    }
    size_t start = tokens[i].start;
    size_t end = tokens[hit_end - 1].end;
    std::string surface(text.substr(start, end - start));
    for (const auto &id : *hit) {
      EntityAnnotation a;
      a.start = start;
      a.end = end;
      a.token_begin = i;
      a.token_end = hit_end;
      a.surface = surface;
      a.name = NormalizeName(surface);
      a.entity_id = id;
      a.class_id = kb_.FindEntity(id)->class_id;
      a.ambiguous = hit->size() > 1;
      out.push_back(std::move(a));
    }
    i = hit_end;
  }
  return out;
}

std::vector<EntityAnnotation> Gazetteer::Recognize(
    std::string_view text) const {
  std::vector<Token> tokens = Tokenize(text);
  return Recognize(text, tokens);
}

std::vector<EntityAnnotation> RecognizeEntities(std::string_view text,
                                                const KnowledgeBase &kb) {
  return Gazetteer(kb).Recognize(text);
}

PhraseDictionary PhraseDictionary::Load(const std::string &path) {
  return Parse(ReadFile(path, "relation-phrase dictionary"));
}

PhraseDictionary PhraseDictionary::Parse(std::string_view text) {
  PhraseDictionary dict;
  ForEachDataLine(text, [&](int line_no, std::string_view line) {
    std::vector<std::string> fields = Split(line, '\t');
    if (fields.size() > 2 || PhraseKey(fields[0]).first.empty()) {
      throw Error("relation-phrase dictionary line " + std::to_string(line_no) +
                  ": expected 'phrase<TAB>relation_id'");
    }
    dict.Add(fields[0], fields.size() == 2 ? Trim(fields[1]) : "");
  });
  return dict;
}

void PhraseDictionary::Add(std::string_view phrase,
                           std::string_view relation_id) {
  auto [key, count] = PhraseKey(phrase);
  if (key.empty()) throw Error("relation phrase has no words");
  entries_[key] = {std::string(Trim(phrase)), std::string(relation_id)};
  max_tokens_ = std::max(max_tokens_, count);
}

std::optional<std::string> PhraseDictionary::Map(
    std::string_view phrase) const {
  auto it = entries_.find(PhraseKey(phrase).first);
  if (it == entries_.end() || it->second.relation_id.empty()) {
    return std::nullopt;
  }
  return it->second.relation_id;
}

bool PhraseDictionary::Contains(std::string_view phrase) const {
  return entries_.count(PhraseKey(phrase).first) > 0;
}

std::vector<RelationMention> PhraseDictionary::Recognize(
    std::string_view text, std::span<const Token> tokens,
    const std::vector<bool> &masked) const {
  std::vector<RelationMention> out;
  size_t i = 0;
  while (i < tokens.size()) {
    if (masked[i]) {
      ++i;
      continue;
    }
    // Extend over unmasked, whitespace-separated tokens.
    size_t run = i + 1;
    while (run < tokens.size() && run - i < max_tokens_ && !masked[run] &&
           OnlySpaceBetween(text, tokens[run - 1], tokens[run])) {
      ++run;
    }
    const Entry *hit = nullptr;
    size_t hit_end = 0;
    for (size_t j = run; j > i; --j) {
      auto it = entries_.find(SpanKey(text, tokens, i, j));
      if (it != entries_.end()) {
        hit = &it->second;
        hit_end = j;
        break;
      }
    }
    if (hit == nullptr) {
      ++i;
      continue;
    }
    RelationMention m;
    m.start = tokens[i].start;
    m.end = tokens[hit_end - 1].end;
    m.token_begin = i;
    m.token_end = hit_end;
    m.phrase = hit->phrase;
    if (!hit->relation_id.empty()) m.relation_id = hit->relation_id;
    out.push_back(std::move(m));
    i = hit_end;
  }
  return out;
}

InterrogativeRules InterrogativeRules::Load(const std::string &path) {
  return Parse(ReadFile(path, "interrogative rule file"));
}

InterrogativeRules InterrogativeRules::Parse(std::string_view text) {
  InterrogativeRules rules;
  ForEachDataLine(text, [&](int line_no, std::string_view line) {
    std::vector<std::string> fields = Split(line, '\t');
    if (fields.size() != 3 || Trim(fields[0]).empty() ||
        Trim(fields[2]).empty()) {
      throw Error("interrogative rule line " + std::to_string(line_no) +
                  ": expected 'word<TAB>triggers<TAB>class_id'");
    }
    Rule rule;
    rule.word = CaseFold(Trim(fields[0]));
    if (!Trim(fields[1]).empty()) {
      for (const auto &t : Split(fields[1], ',')) {
        std::string trigger = NormalizeName(t);
        if (!trigger.empty()) rule.triggers.push_back(trigger);
      }
    }
    rule.class_id = std::string(Trim(fields[2]));
    rules.Add(std::move(rule));
  });
  return rules;
}

void InterrogativeRules::Add(Rule rule) { rules_.push_back(std::move(rule)); }

bool InterrogativeRules::IsInterrogative(std::string_view word) const {
  std::string w = CaseFold(word);
  return std::any_of(rules_.begin(), rules_.end(),
                     [&](const Rule &r) { return r.word == w; });
}

std::optional<std::string> InterrogativeRules::Map(
    std::span<const Token> query_tokens) const {
  if (query_tokens.empty()) return std::nullopt;
  std::string word = CaseFold(query_tokens.front().text);

  std::vector<std::string> folded;
  for (const Token &t : query_tokens) folded.push_back(CaseFold(t.text));
  auto occurs = [&](const std::string &trigger) {
    std::vector<std::string> parts = Split(trigger, ' ');
    if (parts.size() > folded.size()) return false;
    for (size_t i = 0; i + parts.size() <= folded.size(); ++i) {
      if (std::equal(parts.begin(), parts.end(), folded.begin() + i)) {
        return true;
      }
    }
    return false;
  };

  const Rule *fallback = nullptr;
  for (const Rule &r : rules_) {
    if (r.word != word) continue;
    if (r.triggers.empty()) {
      if (fallback == nullptr) fallback = &r;
      continue;
    }
    if (std::all_of(r.triggers.begin(), r.triggers.end(), occurs)) {
      return r.class_id;
    }
  }
  if (fallback != nullptr) return fallback->class_id;
  return std::nullopt;
}

Annotator::Annotator(const KnowledgeBase *kb, const Stoplist &stoplist,
                     const PhraseDictionary *phrases,
                     const InterrogativeRules *interrogatives,
                     AnnotatorOptions options)
    : kb_(kb),
      stoplist_(stoplist),
      phrases_(phrases),
      interrogatives_(interrogatives),
      options_(options) {
  if (kb_ != nullptr) gazetteer_.emplace(*kb_);
}

TextAnalysis Annotator::Analyze(std::string_view text) const {
  return Run(text, true, std::nullopt);
}

TextAnalysis Annotator::Analyze(
    std::string_view text,
    const std::optional<std::string> &interrogative) const {
  return Run(text, false, interrogative);
}

TextAnalysis Annotator::Run(
    std::string_view text, bool map_interrogative,
    const std::optional<std::string> &interrogative) const {
  TextAnalysis a;
  a.tokens = Tokenize(text);
  const size_t n = a.tokens.size();
  a.roles.assign(n, TokenRole::kKeyword);

  std::vector<bool> masked(n, false);
  if (gazetteer_) {
    a.entities = gazetteer_->Recognize(text, a.tokens);
    for (const auto &e : a.entities) {
      for (size_t i = e.token_begin; i < e.token_end; ++i) {
        masked[i] = true;
        a.roles[i] = TokenRole::kEntity;
      }
    }
  }

  if (map_interrogative) {
    if (interrogatives_ != nullptr && n > 0 && !masked[0]) {
      a.interrogative_class = interrogatives_->Map(a.tokens);
    }
  } else {
    a.interrogative_class = interrogative;
  }
  if (a.interrogative_class && n > 0 && !masked[0]) {
    a.roles[0] = TokenRole::kInterrogative;
  }

  if (phrases_ != nullptr) {
    a.relations = phrases_->Recognize(text, a.tokens, masked);
    for (const auto &m : a.relations) {
      for (size_t i = m.token_begin; i < m.token_end; ++i) {
        if (a.roles[i] == TokenRole::kKeyword) a.roles[i] = TokenRole::kRelation;
      }
    }
  }

  for (size_t i = 0; i < n; ++i) {
    bool stop = stoplist_.count(CaseFold(a.tokens[i].text)) > 0;
    if (stop && a.roles[i] == TokenRole::kKeyword) {
      a.roles[i] = TokenRole::kStopword;
    }
    bool emits = a.roles[i] == TokenRole::kKeyword ||
                 a.roles[i] == TokenRole::kRelation ||
                 (options_.keywords_inside_entities &&
                  a.roles[i] == TokenRole::kEntity);
    if (emits && !stop) a.keywords.push_back(CaseFold(a.tokens[i].text));
  }
  return a;
}

}  // namespace semsearch

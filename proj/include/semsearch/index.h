#ifndef SEMSEARCH_INDEX_H_
#define SEMSEARCH_INDEX_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "semsearch/annotate.h"
#include "semsearch/kb.h"
#include "semsearch/terms.h"

namespace semsearch {

struct Document {
  std::string id;
  std::string text;
};

struct Corpus {
  std::vector<Document> documents;
  std::vector<std::string> warnings;  // unreadable or malformed inputs
};

// Reads a directory of plain-text files (file name = document id, sorted by
// name) or a single file of `docid<TAB>text` records. Throws on duplicate ids.
Corpus ReadCorpus(const std::string &path);

// (1 + ln tf) * ln(1 + N / df). Requires tf >= 1 and 1 <= df <= N.
double Weight(int64_t tf, int64_t df, int64_t num_docs);

struct Posting {
  uint32_t doc = 0;
  int32_t tf = 0;

  bool operator==(const Posting &) const = default;
};

struct DocumentRecord {
  std::string id;
  double norm = 0.0;   // Euclidean norm of the weighted term vector
  int64_t length = 0;  // total term occurrences

  bool operator==(const DocumentRecord &) const = default;
};

struct ScoredDoc {
  std::string id;
  double score = 0.0;
};

struct BuildReport {
  size_t documents = 0;
  size_t terms = 0;
  size_t annotations = 0;
  std::vector<std::string> warnings;
};

// Inverted index over generalized term keys. Term ordinals follow sorted key
// order and document ordinals follow corpus order, so equal inputs give
// identical indexes. Immutable once built.
class Index {
 public:
  Index() = default;

  // Builds from precomputed term multisets, one per document.
  static Index FromTermCounts(
      const std::vector<std::pair<std::string, TermCounts>> &docs);

  size_t num_docs() const { return docs_.size(); }
  size_t num_terms() const { return keys_.size(); }
  const std::vector<DocumentRecord> &documents() const { return docs_; }
  const std::vector<std::string> &term_keys() const { return keys_; }

  std::optional<size_t> TermOrdinal(std::string_view key) const;
  int64_t DocFreq(std::string_view key) const;
  const std::vector<Posting> &Postings(size_t ordinal) const {
    return postings_[ordinal];
  }

  // Top-k documents by cosine similarity, score descending then document id
  // ascending. Documents sharing no term with the query are omitted; query
  // terms unknown to the index carry no weight.
  std::vector<ScoredDoc> Search(const TermCounts &query, size_t k) const;

  // Textual format: #DOCS rows (ordinal, id, norm, length) followed by
  // #TERMS rows (key, df, space-separated ord:tf postings), sorted by key.
  void Write(std::ostream &out) const;
  static Index Read(std::istream &in);
  void Save(const std::string &path) const;
  static Index Load(const std::string &path);

  bool operator==(const Index &) const = default;

 private:
  void BuildLookup();

  std::vector<DocumentRecord> docs_;
  std::vector<std::string> keys_;
  std::vector<std::vector<Posting>> postings_;
  std::unordered_map<std::string, size_t> ordinal_;
};

// Runs the document pipeline (tokenize, recognize entities, drop stop words,
// add implied triples) over a corpus. kb may be null for keyword indexing.
Index BuildIndex(const std::vector<Document> &docs, const Annotator &annotator,
                 int super_depth = 0, BuildReport *report = nullptr);

}  // namespace semsearch

#endif  // SEMSEARCH_INDEX_H_

#include "semsearch/index.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "semsearch/expand.h"
#include "semsearch/text_util.h"

namespace semsearch {

namespace fs = std::filesystem;

namespace {

bool ReadWhole(const fs::path &path, std::string *out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::stringstream buf;
  buf << in.rdbuf();
  if (in.bad()) return false;
  *out = buf.str();
  return true;
}

void CheckUnique(const std::vector<Document> &docs) {
  std::set<std::string_view> seen;
  for (const auto &d : docs) {
    if (!seen.insert(d.id).second) {
      throw Error("duplicate document id '" + d.id + "'");
    }
  }
}

}  // namespace

Corpus ReadCorpus(const std::string &path) {
  Corpus corpus;
  std::error_code ec;
  if (fs::is_directory(path, ec)) {
    std::vector<fs::path> files;
    for (const auto &entry : fs::directory_iterator(path)) {
      if (entry.is_regular_file()) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto &f : files) {
      Document d;
      d.id = f.filename().string();
      if (!ReadWhole(f, &d.text)) {
        corpus.warnings.push_back("skipped unreadable document '" +
                                  f.string() + "'");
        continue;
      }
      corpus.documents.push_back(std::move(d));
    }
  } else {
    std::string text;
    if (!ReadWhole(path, &text)) {
      throw Error("cannot read corpus '" + path + "'");
    }
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (Trim(line).empty()) continue;
      size_t tab = line.find('\t');
      if (tab == std::string::npos || Trim(line.substr(0, tab)).empty()) {
        corpus.warnings.push_back("skipped malformed corpus line " +
                                  std::to_string(line_no));
        continue;
      }
      corpus.documents.push_back({std::string(Trim(line.substr(0, tab))),
                                  line.substr(tab + 1)});
    }
  }
  CheckUnique(corpus.documents);
  return corpus;
}

double Weight(int64_t tf, int64_t df, int64_t num_docs) {
  if (tf < 1 || df < 1 || df > num_docs) {
    throw Error("weight domain violation: tf=" + std::to_string(tf) +
                " df=" + std::to_string(df) + " N=" + std::to_string(num_docs));
  }
  return (1.0 + std::log(static_cast<double>(tf))) *
         std::log(1.0 + static_cast<double>(num_docs) / static_cast<double>(df));
}

Index Index::FromTermCounts(
    const std::vector<std::pair<std::string, TermCounts>> &docs) {
  {
    std::set<std::string_view> seen;
    for (const auto &[id, counts] : docs) {
      if (!seen.insert(id).second) {
        throw Error("duplicate document id '" + id + "'");
      }
    }
  }

  std::map<std::string, std::vector<Posting>> by_key;
  Index index;
  for (size_t d = 0; d < docs.size(); ++d) {
    DocumentRecord rec;
    rec.id = docs[d].first;
    for (const auto &[key, tf] : docs[d].second) {
      if (tf <= 0) continue;
      by_key[key].push_back({static_cast<uint32_t>(d), tf});
      rec.length += tf;
    }
    index.docs_.push_back(std::move(rec));
  }
  for (auto &[key, postings] : by_key) {
    index.keys_.push_back(key);
    index.postings_.push_back(std::move(postings));
  }

  const int64_t n = static_cast<int64_t>(index.docs_.size());
  std::vector<double> sq(index.docs_.size(), 0.0);
  for (const auto &postings : index.postings_) {
    const int64_t df = static_cast<int64_t>(postings.size());
    for (const Posting &p : postings) {
      double w = Weight(p.tf, df, n);
      sq[p.doc] += w * w;
    }
  }
  for (size_t d = 0; d < sq.size(); ++d) index.docs_[d].norm = std::sqrt(sq[d]);
  index.BuildLookup();
  return index;
}

void Index::BuildLookup() {
  ordinal_.clear();
  for (size_t i = 0; i < keys_.size(); ++i) ordinal_.emplace(keys_[i], i);
}

std::optional<size_t> Index::TermOrdinal(std::string_view key) const {
  auto it = ordinal_.find(std::string(key));
  if (it == ordinal_.end()) return std::nullopt;
  return it->second;
}

int64_t Index::DocFreq(std::string_view key) const {
  auto ord = TermOrdinal(key);
  return ord ? static_cast<int64_t>(postings_[*ord].size()) : 0;
}

std::vector<ScoredDoc> Index::Search(const TermCounts &query, size_t k) const {
  if (query.empty()) throw Error("nothing to search: empty query");
  if (k == 0) throw Error("result count must be at least 1");

  const int64_t n = static_cast<int64_t>(docs_.size());
  std::vector<double> acc(docs_.size(), 0.0);
  std::vector<bool> touched(docs_.size(), false);
  double query_sq = 0.0;
  for (const auto &[key, qtf] : query) {
    auto ord = TermOrdinal(key);
    if (!ord || qtf <= 0) continue;
    const auto &postings = postings_[*ord];
    const int64_t df = static_cast<int64_t>(postings.size());
    double wq = Weight(qtf, df, n);
    query_sq += wq * wq;
    for (const Posting &p : postings) {
      acc[p.doc] += wq * Weight(p.tf, df, n);
      touched[p.doc] = true;
    }
  }

  std::vector<ScoredDoc> results;
  if (query_sq == 0.0) return results;
  const double query_norm = std::sqrt(query_sq);
  for (size_t d = 0; d < docs_.size(); ++d) {
    if (!touched[d]) continue;
    double s = acc[d] / (query_norm * docs_[d].norm);
    // Snap to a 1e-12 grid so mathematically tied scores that differ in the
    // last bits fall back to the id tiebreak.
    s = std::round(s * 1e12) / 1e12;
    results.push_back({docs_[d].id, std::clamp(s, 0.0, 1.0)});
  }
  auto order = [](const ScoredDoc &a, const ScoredDoc &b) {
    if (a.score != b.score) return a.score > b.score;
    return a.id < b.id;
  };
  if (results.size() > k) {
    std::partial_sort(results.begin(), results.begin() + k, results.end(),
                      order);
    results.resize(k);
  } else {
    std::sort(results.begin(), results.end(), order);
  }
  return results;
}

void Index::Write(std::ostream &out) const {
  out << "#DOCS\n";
  for (size_t d = 0; d < docs_.size(); ++d) {
    out << d << '\t' << docs_[d].id << '\t' << FormatDouble(docs_[d].norm)
        << '\t' << docs_[d].length << '\n';
  }
  out << "#TERMS\n";
  for (size_t t = 0; t < keys_.size(); ++t) {
    out << keys_[t] << '\t' << postings_[t].size() << '\t';
    for (size_t i = 0; i < postings_[t].size(); ++i) {
      if (i) out << ' ';
      out << postings_[t][i].doc << ':' << postings_[t][i].tf;
    }
    out << '\n';
  }
}

Index Index::Read(std::istream &in) {
  Index index;
  std::string line;
  int line_no = 0;
  int section = -1;
  auto fail = [&](const std::string &what) {
    throw Error("index line " + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line == "#DOCS") {
      if (section != -1) fail("unexpected #DOCS");
      section = 0;
      continue;
    }
    if (line == "#TERMS") {
      if (section != 0) fail("unexpected #TERMS");
      section = 1;
      continue;
    }
    std::vector<std::string> f = Split(line, '\t');
    try {
      if (section == 0) {
        if (f.size() != 4) fail("expected 4 fields in #DOCS row");
        if (std::stoul(f[0]) != index.docs_.size()) fail("ordinal out of order");
        index.docs_.push_back({f[1], std::stod(f[2]), std::stoll(f[3])});
      } else if (section == 1) {
        if (f.size() != 3) fail("expected 3 fields in #TERMS row");
        if (!index.keys_.empty() && f[0] <= index.keys_.back()) {
          fail("term keys not strictly sorted");
        }
        std::vector<Posting> postings;
        std::istringstream ps(f[2]);
        std::string item;
        while (ps >> item) {
          size_t colon = item.find(':');
          if (colon == std::string::npos) fail("bad posting '" + item + "'");
          Posting p{static_cast<uint32_t>(std::stoul(item.substr(0, colon))),
                    static_cast<int32_t>(std::stol(item.substr(colon + 1)))};
          if (p.doc >= index.docs_.size() || p.tf < 1 ||
              (!postings.empty() && p.doc <= postings.back().doc)) {
            fail("invalid posting '" + item + "'");
          }
          postings.push_back(p);
        }
        if (postings.empty() || std::stoul(f[1]) != postings.size()) {
          fail("document frequency does not match postings");
        }
        index.keys_.push_back(f[0]);
        index.postings_.push_back(std::move(postings));
      } else {
        fail("data before #DOCS header");
      }
    } catch (const std::logic_error &) {
      fail("malformed number");
    }
  }
  if (section != 1) throw Error("index is missing #DOCS or #TERMS section");
  index.BuildLookup();
  return index;
}

void Index::Save(const std::string &path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write index '" + path + "'");
  Write(out);
  if (!out) throw Error("failed writing index '" + path + "'");
}

Index Index::Load(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open index '" + path + "'");
  return Read(in);
}

Index BuildIndex(const std::vector<Document> &docs, const Annotator &annotator,
                 int super_depth, BuildReport *report) {
  std::vector<std::pair<std::string, TermCounts>> counted;
  counted.reserve(docs.size());
  size_t annotations = 0;
  for (const auto &d : docs) {
    TextAnalysis analysis = annotator.Analyze(d.text);
    annotations += analysis.entities.size();
    counted.emplace_back(
        d.id, CountTerms(DocumentTerms(analysis, annotator.kb(), super_depth)));
  }
  Index index = Index::FromTermCounts(counted);
  if (report != nullptr) {
    report->documents = index.num_docs();
    report->terms = index.num_terms();
    report->annotations = annotations;
  }
  return index;
}

}  // namespace semsearch

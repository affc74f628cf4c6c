#include "semsearch/cli.h"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "semsearch/annotate.h"
#include "semsearch/eval.h"
#include "semsearch/expand.h"
#include "semsearch/index.h"
#include "semsearch/kb.h"
#include "semsearch/text_util.h"

namespace semsearch {

namespace fs = std::filesystem;

namespace {

constexpr const char *kIndexFile = "index.tsv";
constexpr const char *kMetaFile = "meta.tsv";
constexpr const char *kReportFile = "build-report.txt";
constexpr size_t kDefaultSearchK = 10;

struct RunConfig {
  std::string kb_path;
  std::string relations_path;
  std::string interrogatives_path;
  std::string stoplist_path;
  std::string mode_name;
  std::string index_dir;
  size_t depth = kDefaultDepth;
  std::optional<size_t> k;
  bool keywords_inside_entities = false;
  int super_depth = 0;

  // Subcommand arguments.
  std::string kb_arg;
  std::string corpus;
  std::string query;
  std::string queries_file;
  std::string out_file;
  std::vector<std::string> run_files;
  std::string qrels;
  std::string records_file;
};

// Loaded pipeline resources for one invocation.
struct Pipeline {
  SearchMode mode = SearchMode::kSemantic;
  std::unique_ptr<KnowledgeBase> kb;
  std::unique_ptr<PhraseDictionary> phrases;
  std::unique_ptr<InterrogativeRules> interrogatives;
  Stoplist stoplist;
  AnnotatorOptions options;
  int super_depth = 0;

  Annotator DocumentAnnotator() const {
    return Annotator(kb.get(), stoplist, nullptr, nullptr, options);
  }
  Annotator QueryAnnotator() const {
    return Annotator(kb.get(), stoplist, phrases.get(), interrogatives.get(),
                     options);
  }
};

SearchMode RequireMode(const std::string &name) {
  auto mode = ParseMode(name);
  if (!mode) {
    throw Error("unknown mode '" + name + "' (expected keyword, ne_kw, semantic)");
  }
  return *mode;
}

// Loads what the mode needs. Keyword mode ignores the KB and dictionaries.
Pipeline LoadPipeline(const RunConfig &cfg, SearchMode mode) {
  Pipeline p;
  p.mode = mode;
  p.options.keywords_inside_entities = cfg.keywords_inside_entities;
  p.super_depth = cfg.super_depth;
  p.stoplist = cfg.stoplist_path.empty() ? DefaultStoplist()
                                         : LoadStoplist(cfg.stoplist_path);
  if (mode == SearchMode::kKeyword) return p;

  if (cfg.kb_path.empty()) {
    throw Error("mode " + std::string(ModeName(mode)) + " requires --kb");
  }
  p.kb = std::make_unique<KnowledgeBase>(KnowledgeBase::Load(cfg.kb_path));
  if (!cfg.interrogatives_path.empty()) {
    p.interrogatives = std::make_unique<InterrogativeRules>(
        InterrogativeRules::Load(cfg.interrogatives_path));
  }
  if (mode == SearchMode::kSemantic) {
    if (cfg.relations_path.empty()) {
      throw Error("mode semantic requires --relations");
    }
    p.phrases = std::make_unique<PhraseDictionary>(
        PhraseDictionary::Load(cfg.relations_path));
  }
  return p;
}

struct IndexMeta {
  SearchMode mode = SearchMode::kKeyword;
  bool keywords_inside_entities = false;
  int super_depth = 0;
};

void WriteMeta(const std::string &path, const IndexMeta &meta) {
  std::ofstream out(path, std::ios::binary);
  out << "mode\t" << ModeName(meta.mode) << '\n'
      << "keywords_inside_entities\t" << (meta.keywords_inside_entities ? 1 : 0)
      << '\n'
      << "super_depth\t" << meta.super_depth << '\n';
  if (!out) throw Error("cannot write '" + path + "'");
}

IndexMeta ReadMeta(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open index metadata '" + path + "'");
  IndexMeta meta;
  std::string line;
  while (std::getline(in, line)) {
    auto f = Split(line, '\t');
    if (f.size() != 2) continue;
    if (f[0] == "mode") meta.mode = RequireMode(f[1]);
    if (f[0] == "keywords_inside_entities") {
      meta.keywords_inside_entities = f[1] == "1";
    }
    if (f[0] == "super_depth") meta.super_depth = std::stoi(f[1]);
  }
  return meta;
}

bool EntityFamily(SearchMode m) { return m != SearchMode::kKeyword; }

// Resolves the query mode against the index the documents were built with.
SearchMode ResolveQueryMode(const RunConfig &cfg, const IndexMeta &meta) {
  if (cfg.mode_name.empty()) return meta.mode;
  SearchMode mode = RequireMode(cfg.mode_name);
  if (EntityFamily(mode) != EntityFamily(meta.mode)) {
    throw Error("mode " + std::string(ModeName(mode)) +
                " cannot query an index built in mode " +
                std::string(ModeName(meta.mode)));
  }
  return mode;
}

std::string RequireIndexDir(const RunConfig &cfg) {
  if (cfg.index_dir.empty()) throw Error("--index-dir is required");
  return cfg.index_dir;
}

int CmdKbValidate(const RunConfig &cfg, std::ostream &out, std::ostream &err) {
  std::string path = cfg.kb_arg.empty() ? cfg.kb_path : cfg.kb_arg;
  if (path.empty()) throw Error("kb-validate needs a knowledge base path");
  try {
    KnowledgeBase kb = KnowledgeBase::Load(path);
    out << "classes\t" << kb.classes().size() << '\n'
        << "entities\t" << kb.entities().size() << '\n'
        << "aliases\t" << kb.alias_count() << '\n'
        << "relation types\t" << kb.relations().size() << '\n'
        << "facts\t" << kb.facts().size() << '\n'
        << "valid\n";
    return 0;
  } catch (const KbError &e) {
    for (const auto &d : e.diagnostics()) err << path << ": " << d << '\n';
    out << "invalid (" << e.diagnostics().size() << " problems)\n";
    return 1;
  }
}

int CmdIndex(const RunConfig &cfg, std::ostream &out, std::ostream &err) {
  SearchMode mode = RequireMode(cfg.mode_name.empty() ? "semantic" : cfg.mode_name);
  std::string dir = RequireIndexDir(cfg);
  Pipeline p = LoadPipeline(cfg, mode);
  Corpus corpus = ReadCorpus(cfg.corpus);

  BuildReport report;
  report.warnings = corpus.warnings;
  if (corpus.documents.empty()) report.warnings.push_back("corpus is empty");
  Index index =
      BuildIndex(corpus.documents, p.DocumentAnnotator(), p.super_depth, &report);

  fs::create_directories(dir);
  index.Save((fs::path(dir) / kIndexFile).string());
  WriteMeta((fs::path(dir) / kMetaFile).string(),
            {mode, cfg.keywords_inside_entities, cfg.super_depth});

  std::ostringstream text;
  text << "mode\t" << ModeName(mode) << '\n'
       << "documents\t" << report.documents << '\n'
       << "terms\t" << report.terms << '\n'
       << "annotations\t" << report.annotations << '\n';
  for (const auto &w : report.warnings) text << "warning\t" << w << '\n';
  std::ofstream(fs::path(dir) / kReportFile, std::ios::binary) << text.str();
  out << text.str();
  for (const auto &w : report.warnings) err << "warning: " << w << '\n';
  return 0;
}

void PrintTerms(const std::vector<GeneralizedTerm> &terms, std::ostream &out) {
  for (const auto &[key, count] : CountTerms(terms)) {
    out << "  " << key;
    if (count > 1) out << " x" << count;
    out << '\n';
  }
}

int CmdExpand(const RunConfig &cfg, std::ostream &out, std::ostream &) {
  Pipeline p = LoadPipeline(cfg, SearchMode::kSemantic);
  Annotator annotator = p.QueryAnnotator();
  ExpandedQuery q = QueryProcessor(annotator, SearchMode::kSemantic)
                        .Expand(cfg.query);
  const TextAnalysis &a = q.analysis;

  out << "query\t" << q.original_text << '\n';
  out << "interrogative class\t" << a.interrogative_class.value_or("-") << '\n';
  out << "entities\t" << a.entities.size() << '\n';
  for (const auto &e : a.entities) {
    out << "  " << e.surface << " [" << e.start << ',' << e.end << ") class="
        << e.class_id.value_or("*") << " id=" << e.entity_id.value_or("*")
        << (e.ambiguous ? " ambiguous" : "") << '\n';
  }
  out << "relation mentions\t" << a.relations.size() << '\n';
  for (const auto &m : a.relations) {
    out << "  " << m.phrase << " [" << m.start << ',' << m.end << ") -> "
        << m.relation_id.value_or("?") << '\n';
  }
  out << "relation\t" << q.relation_id.value_or("-") << '\n';
  out << "added names\t" << q.added_names.size() << '\n';
  for (const auto &n : q.added_names) out << "  " << n << '\n';
  out << "status\t" << StatusName(q.status) << '\n';
  out << "expanded text\t" << q.expanded_text << '\n';
  out << "terms\t" << q.terms.size() << '\n';
  PrintTerms(q.terms, out);
  return 0;
}

// Index plus a query processor configured consistently with it.
struct Searcher {
  Index index;
  Pipeline pipeline;
  std::unique_ptr<Annotator> annotator;
  std::unique_ptr<QueryProcessor> processor;
};

std::unique_ptr<Searcher> OpenSearcher(const RunConfig &cfg) {
  std::string dir = RequireIndexDir(cfg);
  IndexMeta meta = ReadMeta((fs::path(dir) / kMetaFile).string());
  RunConfig effective = cfg;
  effective.keywords_inside_entities = meta.keywords_inside_entities;
  SearchMode mode = ResolveQueryMode(cfg, meta);

  auto s = std::make_unique<Searcher>();
  s->index = Index::Load((fs::path(dir) / kIndexFile).string());
  s->pipeline = LoadPipeline(effective, mode);
  s->annotator = std::make_unique<Annotator>(s->pipeline.QueryAnnotator());
  s->processor = std::make_unique<QueryProcessor>(*s->annotator, mode);
  return s;
}

void PrintResults(const std::vector<ScoredDoc> &results, std::ostream &out) {
  char score[32];
  for (size_t i = 0; i < results.size(); ++i) {
    std::snprintf(score, sizeof(score), "%.6f", results[i].score);
    out << (i + 1) << ' ' << results[i].id << ' ' << score << '\n';
  }
}

int CmdSearch(const RunConfig &cfg, std::ostream &out, std::ostream &) {
  auto s = OpenSearcher(cfg);
  TermCounts terms = CountTerms(s->processor->Terms(cfg.query));
  if (terms.empty()) throw Error("query is empty after processing");
  PrintResults(s->index.Search(terms, cfg.k.value_or(kDefaultSearchK)), out);
  return 0;
}

int CmdBatch(const RunConfig &cfg, std::ostream &out, std::ostream &err) {
  auto s = OpenSearcher(cfg);
  std::ifstream in(cfg.queries_file, std::ios::binary);
  if (!in) throw Error("cannot open queries file '" + cfg.queries_file + "'");
  size_t k = cfg.k.value_or(cfg.depth);
  std::string tag(ModeName(s->processor->mode()));

  std::ostringstream run;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (Trim(line).empty()) continue;
    size_t tab = line.find('\t');
    std::string id = tab == std::string::npos ? "" : std::string(Trim(line.substr(0, tab)));
    if (id.empty() || id.find_first_of(" \t") != std::string::npos) {
      err << "warning: skipped malformed query line " << line_no << '\n';
      continue;
    }
    TermCounts terms = CountTerms(s->processor->Terms(line.substr(tab + 1)));
    if (terms.empty()) {
      err << "warning: query '" << id << "' is empty after processing\n";
      continue;
    }
    std::vector<std::pair<std::string, double>> docs;
    for (auto &r : s->index.Search(terms, k)) docs.emplace_back(r.id, r.score);
    Run::WriteLines(run, id, docs, tag);
  }

  if (cfg.out_file.empty()) {
    out << run.str();
  } else {
    std::ofstream f(cfg.out_file, std::ios::binary);
    f << run.str();
    if (!f) throw Error("cannot write run file '" + cfg.out_file + "'");
  }
  return 0;
}

int CmdEval(const RunConfig &cfg, std::ostream &out, std::ostream &err) {
  if (cfg.qrels.empty()) throw Error("eval requires --qrels");
  Qrels qrels = Qrels::Load(cfg.qrels);
  for (const auto &q : qrels.rejected) {
    err << "warning: query '" << q << "' has no relevant documents; ignored\n";
  }
  std::vector<Run> runs;
  for (const auto &path : cfg.run_files) {
    runs.push_back(Run::Load(path));
    if (runs.back().tag.empty()) runs.back().tag = fs::path(path).stem().string();
  }
  Comparison cmp = CompareRuns(runs, qrels, cfg.depth);
  WriteComparisonTable(cmp, out);
  if (!cfg.records_file.empty()) {
    std::ofstream f(cfg.records_file, std::ios::binary);
    WriteComparisonRecords(cmp, f);
    if (!f) throw Error("cannot write records '" + cfg.records_file + "'");
  }
  return 0;
}

}  // namespace

int RunCli(const std::vector<std::string> &args, std::ostream &out,
           std::ostream &err) {
  RunConfig cfg;
  CLI::App app{"Semantic text search with named-entity triples and "
               "knowledge-base query expansion",
               "semsearch"};
  app.fallthrough();
  app.require_subcommand(1);
  app.set_config("--config", "", "key=value configuration file");
  app.add_option("--kb", cfg.kb_path, "Knowledge base file");
  app.add_option("--relations", cfg.relations_path,
                 "Relation-phrase dictionary file");
  app.add_option("--interrogatives", cfg.interrogatives_path,
                 "Interrogative rule file");
  app.add_option("--stoplist", cfg.stoplist_path,
                 "Stop-word list (default: built-in 33 words)");
  app.add_option("--mode", cfg.mode_name, "keyword, ne_kw, or semantic");
  app.add_option("--index-dir", cfg.index_dir, "Index directory");
  app.add_option("--depth", cfg.depth, "Retrieval/evaluation depth")
      ->check(CLI::PositiveNumber);
  app.add_option("--k", cfg.k, "Number of results")->check(CLI::PositiveNumber);
  app.add_flag("--keywords-inside-entities", cfg.keywords_inside_entities,
               "Also index the words of entity names as keywords");
  app.add_option("--super-depth", cfg.super_depth,
                 "Superclass hops for document expansion (0 = all)")
      ->check(CLI::NonNegativeNumber);

  auto *kb_validate = app.add_subcommand("kb-validate", "Validate a knowledge base");
  kb_validate->add_option("kb", cfg.kb_arg, "Knowledge base file");
  auto *index = app.add_subcommand("index", "Index a corpus");
  index->add_option("corpus", cfg.corpus, "Directory or docid<TAB>text file")
      ->required();
  auto *expand = app.add_subcommand("expand", "Show query expansion");
  expand->add_option("query", cfg.query, "Query text")->required();
  auto *search = app.add_subcommand("search", "Search an index");
  search->add_option("query", cfg.query, "Query text")->required();
  auto *batch = app.add_subcommand("batch", "Run a query file into a run file");
  batch->add_option("queries", cfg.queries_file, "query_id<TAB>text file")
      ->required();
  batch->add_option("--out", cfg.out_file, "Run file (default: stdout)");
  auto *eval = app.add_subcommand("eval", "Evaluate and compare runs");
  eval->add_option("runs", cfg.run_files, "Run files")->required();
  eval->add_option("--qrels", cfg.qrels, "Relevance judgments")->required();
  eval->add_option("--records", cfg.records_file,
                   "Write run,level,metric,value records here");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError &e) {
    return app.exit(e, out, err) == 0 ? 0 : 2;
  }

  try {
    if (*kb_validate) return CmdKbValidate(cfg, out, err);
    if (*index) return CmdIndex(cfg, out, err);
    if (*expand) return CmdExpand(cfg, out, err);
    if (*search) return CmdSearch(cfg, out, err);
    if (*batch) return CmdBatch(cfg, out, err);
    if (*eval) return CmdEval(cfg, out, err);
  } catch (const std::exception &e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace semsearch

#include "semsearch/eval.h"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "semsearch/kb.h"
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

std::vector<std::string> Fields(std::string_view line) {
  std::vector<std::string> out;
  std::istringstream in{std::string(line)};
  std::string f;
  while (in >> f) out.push_back(f);
  return out;
}

// Tolerance for comparing achieved recall against the standard levels.
constexpr double kRecallSlack = 1e-12;

}  // namespace

std::vector<PrPoint> PrPoints(std::span<const std::string> ranked,
                              const std::set<std::string> &relevant) {
  if (relevant.empty()) throw Error("relevant set is empty");
  std::vector<PrPoint> points;
  points.reserve(ranked.size());
  size_t hits = 0;
  for (size_t i = 0; i < ranked.size(); ++i) {
    if (relevant.count(ranked[i])) ++hits;
    points.push_back({static_cast<double>(hits) / relevant.size(),
                      static_cast<double>(hits) / (i + 1)});
  }
  return points;
}

EvalCurve Interpolate11pt(std::span<const PrPoint> points) {
  // Walk levels from high to low while sweeping points from the tail, keeping
  // the running maximum precision of everything at or beyond the level.
  std::vector<const PrPoint *> sorted;
  for (const auto &p : points) sorted.push_back(&p);
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const PrPoint *a, const PrPoint *b) {
                     return a->recall < b->recall;
                   });
  EvalCurve curve{};
  double best = 0.0;
  size_t next = sorted.size();
  for (int level = kRecallLevels - 1; level >= 0; --level) {
    double r = RecallLevel(level);
    while (next > 0 && sorted[next - 1]->recall >= r - kRecallSlack) {
      --next;
      best = std::max(best, sorted[next]->precision);
    }
    curve[level] = best;
  }
  return curve;
}

double FMeasure(double precision, double recall) {
  double sum = precision + recall;
  return sum == 0.0 ? 0.0 : 2.0 * precision * recall / sum;
}

EvalCurve AverageCurves(std::span<const EvalCurve> curves) {
  if (curves.empty()) throw Error("cannot average an empty list of curves");
  EvalCurve mean{};
  for (const auto &c : curves) {
    for (int i = 0; i < kRecallLevels; ++i) mean[i] += c[i];
  }
  for (double &v : mean) v /= static_cast<double>(curves.size());
  return mean;
}

Qrels Qrels::Load(const std::string &path) {
  return Parse(ReadFile(path, "qrels file"));
}

Qrels Qrels::Parse(std::string_view text) {
  std::map<std::string, std::set<std::string>> judged;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::vector<std::string> f = Fields(line);
    if (f.empty() || f[0].front() == '#') continue;
    if (f.size() != 4) {
      throw Error("qrels line " + std::to_string(line_no) +
                  ": expected 'query_id 0 doc_id relevance'");
    }
    auto &docs = judged[f[0]];
    int rel = 0;
    try {
      rel = std::stoi(f[3]);
    } catch (const std::logic_error &) {
      throw Error("qrels line " + std::to_string(line_no) +
                  ": relevance is not an integer");
    }
    if (rel > 0) docs.insert(f[2]);
  }
  Qrels qrels;
  for (auto &[query, docs] : judged) {
    if (docs.empty()) {
      qrels.rejected.push_back(query);
    } else {
      qrels.relevant.emplace(query, std::move(docs));
    }
  }
  return qrels;
}

Run Run::Load(const std::string &path) {
  return Parse(ReadFile(path, "run file"));
}

Run Run::Parse(std::string_view text) {
  struct Row {
    long rank;
    std::string doc;
    double score;
    int line;
  };
  std::map<std::string, std::vector<Row>> rows;
  Run run;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::vector<std::string> f = Fields(line);
    if (f.empty()) continue;
    if (f.size() != 6) {
      throw Error("run line " + std::to_string(line_no) +
                  ": expected 'query_id Q0 doc_id rank score tag'");
    }
    Row row;
    try {
      row = {std::stol(f[3]), f[2], std::stod(f[4]), line_no};
    } catch (const std::logic_error &) {
      throw Error("run line " + std::to_string(line_no) +
                  ": malformed rank or score");
    }
    if (run.tag.empty()) run.tag = f[5];
    rows[f[0]].push_back(std::move(row));
  }
  for (auto &[query, list] : rows) {
    std::stable_sort(list.begin(), list.end(),
                     [](const Row &a, const Row &b) { return a.rank < b.rank; });
    std::set<std::string> seen;
    auto &out = run.queries[query];
    for (size_t i = 0; i < list.size(); ++i) {
      const Row &r = list[i];
      if (!seen.insert(r.doc).second) {
        throw Error("run line " + std::to_string(r.line) + ": document '" +
                    r.doc + "' repeated for query '" + query + "'");
      }
      if (i > 0 && r.score > list[i - 1].score) {
        throw Error("run line " + std::to_string(r.line) +
                    ": score increases with rank for query '" + query + "'");
      }
      out.emplace_back(r.doc, r.score);
    }
  }
  return run;
}

void Run::WriteLines(std::ostream &out, const std::string &query_id,
                     std::span<const std::pair<std::string, double>> docs,
                     const std::string &tag) {
  char score[32];
  for (size_t i = 0; i < docs.size(); ++i) {
    std::snprintf(score, sizeof(score), "%.6f", docs[i].second);
    out << query_id << "\tQ0\t" << docs[i].first << '\t' << (i + 1) << '\t'
        << score << '\t' << tag << '\n';
  }
}

RunEvaluation EvaluateRun(const Run &run, const Qrels &qrels, size_t depth) {
  for (const auto &[query, docs] : run.queries) {
    if (!qrels.relevant.count(query)) {
      throw Error("run '" + run.tag + "' references query '" + query +
                  "' that has no relevance judgments");
    }
  }
  if (qrels.relevant.empty()) throw Error("qrels contain no judged queries");

  RunEvaluation eval;
  eval.tag = run.tag;
  std::vector<EvalCurve> precision, f;
  for (const auto &[query, relevant] : qrels.relevant) {
    std::vector<std::string> ranked;
    auto it = run.queries.find(query);
    if (it != run.queries.end()) {
      for (const auto &[doc, score] : it->second) {
        if (ranked.size() == depth) break;
        ranked.push_back(doc);
      }
    }
    EvalCurve p = Interpolate11pt(PrPoints(ranked, relevant));
    EvalCurve fc{};
    for (int i = 0; i < kRecallLevels; ++i) fc[i] = FMeasure(p[i], RecallLevel(i));
    eval.query_precision[query] = p;
    eval.query_f[query] = fc;
    precision.push_back(p);
    f.push_back(fc);
  }
  eval.precision = AverageCurves(precision);
  eval.f = AverageCurves(f);
  return eval;
}

Comparison CompareRuns(std::span<const Run> runs, const Qrels &qrels,
                       size_t depth) {
  Comparison cmp;
  for (const Run &run : runs) cmp.runs.push_back(EvaluateRun(run, qrels, depth));
  return cmp;
}

double MeanOverLevels(const EvalCurve &curve) {
  double sum = 0.0;
  for (double v : curve) sum += v;
  return sum / kRecallLevels;
}

void WriteComparisonTable(const Comparison &comparison, std::ostream &out) {
  size_t model_width = 5;
  for (const auto &r : comparison.runs) {
    model_width = std::max(model_width, r.tag.size());
  }
  char buf[64];
  auto pad = [](std::string s, size_t w) {
    if (s.size() < w) s.append(w - s.size(), ' ');
    return s;
  };

  out << pad("Measure", 15) << pad("Model", model_width + 2);
  for (int i = 0; i < kRecallLevels; ++i) {
    std::snprintf(buf, sizeof(buf), "%6d", i * 10);
    out << buf;
  }
  out << "    Mean\n";

  auto rows = [&](const char *measure, EvalCurve RunEvaluation::*curve) {
    bool first = true;
    for (const auto &r : comparison.runs) {
      out << pad(first ? measure : "", 15) << pad(r.tag, model_width + 2);
      first = false;
      for (double v : r.*curve) {
        std::snprintf(buf, sizeof(buf), "%6.1f", 100.0 * v);
        out << buf;
      }
      std::snprintf(buf, sizeof(buf), "%8.1f", 100.0 * MeanOverLevels(r.*curve));
      out << buf << '\n';
    }
  };
  rows("Precision (%)", &RunEvaluation::precision);
  rows("F-measure (%)", &RunEvaluation::f);
}

void WriteComparisonRecords(const Comparison &comparison, std::ostream &out) {
  char buf[96];
  out << "run,level,metric,value\n";
  for (const auto &r : comparison.runs) {
    for (const auto &[metric, curve] :
         {std::pair{"P", &r.precision}, std::pair{"F", &r.f}}) {
      for (int i = 0; i < kRecallLevels; ++i) {
        std::snprintf(buf, sizeof(buf), ",%.1f,%s,%.6f\n", RecallLevel(i),
                      metric, (*curve)[i]);
        out << r.tag << buf;
      }
    }
  }
}

}  // namespace semsearch

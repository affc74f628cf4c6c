#ifndef SEMSEARCH_EVAL_H_
#define SEMSEARCH_EVAL_H_

#include <array>
#include <iosfwd>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace semsearch {

inline constexpr int kRecallLevels = 11;

// Values at recall 0.0, 0.1, ..., 1.0.
using EvalCurve = std::array<double, kRecallLevels>;

inline double RecallLevel(int i) { return i / 10.0; }

struct PrPoint {
  double recall = 0.0;
  double precision = 0.0;

  bool operator==(const PrPoint &) const = default;
};

// One (recall, precision) point per rank position. Throws if relevant is
// empty.
std::vector<PrPoint> PrPoints(std::span<const std::string> ranked,
                              const std::set<std::string> &relevant);

// Value at level r is the highest precision of any point with recall >= r,
// or 0 when recall r is never reached.
EvalCurve Interpolate11pt(std::span<const PrPoint> points);

// Harmonic mean 2pr/(p+r); 0 when p + r = 0.
double FMeasure(double precision, double recall);

// Level-wise arithmetic mean. Throws on an empty list.
EvalCurve AverageCurves(std::span<const EvalCurve> curves);

// Relevance judgments. Queries without any relevant document are dropped at
// load and listed in `rejected`.
struct Qrels {
  std::map<std::string, std::set<std::string>> relevant;
  std::vector<std::string> rejected;

  static Qrels Load(const std::string &path);
  static Qrels Parse(std::string_view text);
};

// A ranked run: per query, documents in rank order with their scores.
struct Run {
  std::string tag;
  std::map<std::string, std::vector<std::pair<std::string, double>>> queries;

  static Run Load(const std::string &path);
  static Run Parse(std::string_view text);

  // Writes query_id Q0 doc_id rank score tag lines, queries in the order
  // given.
  static void WriteLines(std::ostream &out, const std::string &query_id,
                         std::span<const std::pair<std::string, double>> docs,
                         const std::string &tag);
};

struct RunEvaluation {
  std::string tag;
  EvalCurve precision{};  // averaged interpolated precision
  EvalCurve f{};          // averaged per-query F at each level
  std::map<std::string, EvalCurve> query_precision;
  std::map<std::string, EvalCurve> query_f;
};

inline constexpr size_t kDefaultDepth = 1000;

// Scores a run over every judged query. Queries the run does not answer count
// as retrieving nothing; documents missing from the judgments count as
// non-relevant. Throws when the run names a query absent from the qrels.
RunEvaluation EvaluateRun(const Run &run, const Qrels &qrels,
                          size_t depth = kDefaultDepth);

struct Comparison {
  std::vector<RunEvaluation> runs;
};

Comparison CompareRuns(std::span<const Run> runs, const Qrels &qrels,
                       size_t depth = kDefaultDepth);

double MeanOverLevels(const EvalCurve &curve);

// Aligned P(%) and F(%) rows per run at the eleven levels, plus a mean column.
void WriteComparisonTable(const Comparison &comparison, std::ostream &out);

// run,level,metric,value lines (metric P or F).
void WriteComparisonRecords(const Comparison &comparison, std::ostream &out);

}  // namespace semsearch

#endif  // SEMSEARCH_EVAL_H_

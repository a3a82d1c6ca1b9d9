// Copyright 2026 The tkgqa Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TKGQA_EVAL_HPP_
#define TKGQA_EVAL_HPP_

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tkgqa/answer.hpp"
#include "tkgqa/controller.hpp"
#include "tkgqa/qa_gen.hpp"

namespace tkgqa {

struct Prediction {
  std::string id;
  Answer answer;
  RunTrace trace;
};

/// Provenance ids of everything the run retrieved.
std::set<std::string> retrieved_provenance(const RunTrace& trace);

/// Slot-granular exact match of a prediction against the item's gold label.
bool correct(const Answer& a, const QAItem& item, Seconds slot);

/// Class label used for macro-F1: Q1 {YES, NO}; Q2/Q3 {TIME-correct,
/// TIME-wrong, NO_NEED, NO_ANSWER}. Predictions outside the set map to
/// OTHER.
std::string gold_class(const QAItem& item);
std::string predicted_class(const Answer& a, const QAItem& item, Seconds slot);

/// Unweighted mean of per-class F1 over the union of gold and predicted
/// labels; a class with no true positives scores 0.
double macro_f1(std::span<const std::string> gold, std::span<const std::string> predicted);

/// |a ∩ b| / |a ∪ b|; two empty sets score 1.
double jaccard(const std::set<std::string>& a, const std::set<std::string>& b);

/// |retrieved ∩ sd| / |retrieved|; 0 for an empty retrieval.
double precision(const std::set<std::string>& retrieved, const std::set<std::string>& sd);

enum class AuditClause { kNone, kQ1, kWindowNotInEvidence, kWrongTime, kFailedToStop };

struct AuditResult {
  bool hallucinated = false;
  AuditClause clause = AuditClause::kNone;
};

/// Q1: any wrong yes/no. Q2/Q3, first clause that fires: (a) a TIME answer
/// whose window is not fully covered by retrieved observations at every path
/// location; (b) the answer differs from gold; (c) some step was judged
/// sufficient and Allen-consistent without the loop stopping there.
AuditResult audit_hallucination(const Prediction& p, const QAItem& item, const TemporalKG& kg);

struct KindReport {
  std::size_t n = 0;
  double accuracy = 0.0;
  double macro_f1 = 0.0;
  double hit_rate = 0.0;
  double hallucination_rate = 0.0;
};

struct CostSummary {
  double mean_kg_calls = 0.0;
  double mean_llm_calls = 0.0;
  double mean_triples = 0.0;
  double median_steps = 0.0;
  std::map<std::size_t, std::size_t> steps_histogram;
};

struct EvalReport {
  std::size_t n = 0;
  double accuracy = 0.0;
  double macro_f1 = 0.0;  // mean of the per-kind values
  double hit_rate = 0.0;  // plain Jaccard of retrieved provenance vs SD
  double hallucination_rate = 0.0;
  std::map<std::string, KindReport> per_kind;  // "Q1", "Q2", "Q3"
  std::map<std::string, std::size_t> clauses;
  CostSummary cost;
};

/// Predictions are aligned to items by id; LENGTH_MISMATCH when the id sets
/// differ.
EvalReport score(std::span<const Prediction> predictions, std::span<const QAItem> items,
                 const TemporalKG& kg);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

/// Ordinary least squares; r2 = 1 when y has no variance and the fit is exact.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

/// One-sided exact sign test: P(X >= successes) for X ~ Binomial(n, 1/2),
/// ties discarded by the caller.
double sign_test_p(std::size_t successes, std::size_t n);

double median(std::vector<double> v);

/// Offset in slots from the anchor to the gold window of a Q2/Q3 TIME item.
std::optional<int> d_star(const QAItem& item, Seconds slot);

struct CostPoint {
  std::string id;
  int d_star = 0;
  std::size_t kg_calls = 0;
  std::size_t triples = 0;
  bool success = false;
};

struct PrecisionPoint {
  int w = 0;
  double median_precision = 0.0;
  double mean_triples = 0.0;
  std::size_t successes = 0;
};

struct CostReport {
  std::vector<CostPoint> iterative;
  std::map<int, std::vector<CostPoint>> single_pass;  // by w
  LineFit iterative_fit;                              // kg_calls ~ d*
  std::vector<PrecisionPoint> precision_curve;        // by ascending w
  std::map<std::string, int> minimal_w;               // smallest succeeding w per item
};

/// Q2/Q3 TIME items only; `single_pass` maps w to per-item predictions in
/// the same order as `items`.
CostReport cost_report(std::span<const QAItem> items, std::span<const Prediction> iterative,
                       const std::map<int, std::vector<Prediction>>& single_pass,
                       const TemporalKG& kg);

std::string_view to_string(AuditClause c);

}  // namespace tkgqa

#endif  // TKGQA_EVAL_HPP_

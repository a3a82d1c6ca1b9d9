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

#include "tkgqa/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tkgqa/error.hpp"

namespace tkgqa {

std::set<std::string> retrieved_provenance(const RunTrace& trace) {
  std::set<std::string> out;
  for (const Observation* o : trace.retrieved()) out.insert(o->provenance);
  return out;
}

bool correct(const Answer& a, const QAItem& item, Seconds slot) {
  const Gold& g = item.gold;
  switch (g.kind) {
    case GoldKind::kTrue: return a.verdict == Verdict::kYes;
    case GoldKind::kFalse: return a.verdict == Verdict::kNo;
    case GoldKind::kNoNeed: return a.verdict == Verdict::kNoNeed;
    case GoldKind::kNoAnswer: return a.verdict == Verdict::kNoAnswer;
    case GoldKind::kTime:
      return a.verdict == Verdict::kTime && a.decisive_time && g.time &&
             floor_to_slot(a.decisive_time->start, slot) == floor_to_slot(*g.time, slot);
  }
  return false;
}

std::string gold_class(const QAItem& item) {
  switch (item.gold.kind) {
    case GoldKind::kTrue: return "YES";
    case GoldKind::kFalse: return "NO";
    case GoldKind::kTime: return "TIME-correct";
    case GoldKind::kNoNeed: return "NO_NEED";
    case GoldKind::kNoAnswer: return "NO_ANSWER";
  }
  return "OTHER";
}

std::string predicted_class(const Answer& a, const QAItem& item, Seconds slot) {
  if (is_q1(item.kind)) {
    if (a.verdict == Verdict::kYes) return "YES";
    if (a.verdict == Verdict::kNo) return "NO";
    return "OTHER";
  }
  switch (a.verdict) {
    case Verdict::kTime:
      return item.gold.kind == GoldKind::kTime && correct(a, item, slot) ? "TIME-correct"
                                                                         : "TIME-wrong";
    case Verdict::kNoNeed: return "NO_NEED";
    case Verdict::kNoAnswer: return "NO_ANSWER";
    default: return "OTHER";
  }
}

double macro_f1(std::span<const std::string> gold, std::span<const std::string> predicted) {
  if (gold.size() != predicted.size())
    throw Error(ErrorCode::kLengthMismatch, "label vectors differ in length");
  std::set<std::string> labels(gold.begin(), gold.end());
  labels.insert(predicted.begin(), predicted.end());
  if (labels.empty()) return 0.0;
  double sum = 0.0;
  for (const std::string& c : labels) {
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < gold.size(); ++i) {
      const bool g = gold[i] == c, p = predicted[i] == c;
      if (g && p) ++tp;
      else if (p) ++fp;
      else if (g) ++fn;
    }
    if (tp == 0) continue;
    const double prec = static_cast<double>(tp) / static_cast<double>(tp + fp);
    const double rec = static_cast<double>(tp) / static_cast<double>(tp + fn);
    sum += 2.0 * prec * rec / (prec + rec);
  }
  return sum / static_cast<double>(labels.size());
}

double jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
  if (a.empty() && b.empty()) return 1.0;
  std::size_t inter = 0;
  for (const std::string& x : a) inter += b.count(x);
  return static_cast<double>(inter) / static_cast<double>(a.size() + b.size() - inter);
}

double precision(const std::set<std::string>& retrieved, const std::set<std::string>& sd) {
  if (retrieved.empty()) return 0.0;
  std::size_t inter = 0;
  for (const std::string& x : retrieved) inter += sd.count(x);
  return static_cast<double>(inter) / static_cast<double>(retrieved.size());
}

AuditResult audit_hallucination(const Prediction& p, const QAItem& item, const TemporalKG& kg) {
  const Seconds slot = kg.slot_duration();
  if (is_q1(item.kind)) {
    if (!correct(p.answer, item, slot)) return {true, AuditClause::kQ1};
    return {};
  }
  if (p.answer.verdict == Verdict::kTime) {
    if (!p.answer.decisive_time) return {true, AuditClause::kWindowNotInEvidence};
    const QueryIntent q = to_query(item, kg);
    std::set<std::pair<std::uint32_t, Seconds>> seen;
    for (const Observation* o : p.trace.retrieved())
      if (o->measure == item.event_kind) seen.insert({o->location.value, o->time.start});
    const TimeRef w = TimeRef::span(p.answer.decisive_time->start, item.duration);
    for (NodeId loc : q.location_path)
      for (Seconds s : slots_of(w, slot))
        if (!seen.count({loc.value, s})) return {true, AuditClause::kWindowNotInEvidence};
  }
  if (!correct(p.answer, item, slot)) return {true, AuditClause::kWrongTime};
  for (const StepRecord& s : p.trace.steps)
    if (s.judgment.sufficient && s.consistent && !s.stopped)
      return {true, AuditClause::kFailedToStop};
  return {};
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

EvalReport score(std::span<const Prediction> predictions, std::span<const QAItem> items,
                 const TemporalKG& kg) {
  if (predictions.size() != items.size())
    throw Error(ErrorCode::kLengthMismatch, std::to_string(predictions.size()) +
                                                " predictions for " +
                                                std::to_string(items.size()) + " items");
  std::map<std::string, const Prediction*> by_id;
  for (const Prediction& p : predictions) by_id[p.id] = &p;
  const Seconds slot = kg.slot_duration();

  struct Acc {
    std::size_t n = 0, ok = 0, hal = 0;
    double hr = 0.0;
    std::vector<std::string> gold, pred;
  };
  std::map<std::string, Acc> kinds;
  EvalReport r;
  std::vector<double> steps;
  double kg_calls = 0, llm_calls = 0, triples = 0;
  for (const QAItem& it : items) {
    auto f = by_id.find(it.id);
    if (f == by_id.end())
      throw Error(ErrorCode::kLengthMismatch, "no prediction for item " + it.id);
    const Prediction& p = *f->second;
    const std::string kind = is_q1(it.kind) ? "Q1" : it.kind == QueryKind::kQ2LatestBefore ? "Q2" : "Q3";
    Acc& a = kinds[kind];
    ++a.n;
    if (correct(p.answer, it, slot)) ++a.ok;
    const AuditResult audit = audit_hallucination(p, it, kg);
    if (audit.hallucinated) {
      ++a.hal;
      ++r.clauses[std::string(to_string(audit.clause))];
    }
    a.hr += jaccard(retrieved_provenance(p.trace), {it.sd.begin(), it.sd.end()});
    a.gold.push_back(gold_class(it));
    a.pred.push_back(predicted_class(p.answer, it, slot));
    kg_calls += static_cast<double>(p.trace.kg_calls);
    llm_calls += static_cast<double>(p.trace.llm_calls);
    triples += static_cast<double>(p.trace.triples_retrieved);
    steps.push_back(static_cast<double>(p.trace.steps.size()));
    ++r.cost.steps_histogram[p.trace.steps.size()];
  }
  r.n = items.size();
  std::size_t ok = 0, hal = 0;
  double hr = 0.0, f1 = 0.0;
  for (auto& [kind, a] : kinds) {
    KindReport k;
    k.n = a.n;
    k.accuracy = static_cast<double>(a.ok) / static_cast<double>(a.n);
    k.macro_f1 = macro_f1(a.gold, a.pred);
    k.hit_rate = a.hr / static_cast<double>(a.n);
    k.hallucination_rate = static_cast<double>(a.hal) / static_cast<double>(a.n);
    r.per_kind[kind] = k;
    ok += a.ok;
    hal += a.hal;
    hr += a.hr;
    f1 += k.macro_f1;
  }
  if (r.n > 0) {
    const double n = static_cast<double>(r.n);
    r.accuracy = static_cast<double>(ok) / n;
    r.hit_rate = hr / n;
    r.hallucination_rate = static_cast<double>(hal) / n;
    r.macro_f1 = f1 / static_cast<double>(kinds.size());
    r.cost.mean_kg_calls = kg_calls / n;
    r.cost.mean_llm_calls = llm_calls / n;
    r.cost.mean_triples = triples / n;
    r.cost.median_steps = median(steps);
  }
  return r;
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error(ErrorCode::kLengthMismatch, "x and y differ in length");
  if (x.size() < 2) throw Error(ErrorCode::kInvalidParams, "need at least two points");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw Error(ErrorCode::kInvalidParams, "x has no variance");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - (f.intercept + f.slope * x[i]);
    sse += e * e;
  }
  f.r2 = syy == 0.0 ? (sse == 0.0 ? 1.0 : 0.0) : 1.0 - sse / syy;
  return f;
}

double sign_test_p(std::size_t successes, std::size_t n) {
  if (successes > n) throw Error(ErrorCode::kInvalidParams, "more successes than trials");
  // Sum of binomial pmf terms in log space.
  double p = 0.0;
  for (std::size_t k = successes; k <= n; ++k) {
    const double lg = std::lgamma(static_cast<double>(n) + 1) -
                      std::lgamma(static_cast<double>(k) + 1) -
                      std::lgamma(static_cast<double>(n - k) + 1) -
                      static_cast<double>(n) * std::log(2.0);
    p += std::exp(lg);
  }
  return std::min(1.0, p);
}

std::optional<int> d_star(const QAItem& item, Seconds slot) {
  if (is_q1(item.kind) || item.gold.kind != GoldKind::kTime || !item.gold.time) return std::nullopt;
  const Seconds off = item.kind == QueryKind::kQ3EarliestAfter ? *item.gold.time - item.anchor
                                                               : item.anchor - *item.gold.time;
  return static_cast<int>(off / slot);
}

CostReport cost_report(std::span<const QAItem> items, std::span<const Prediction> iterative,
                       const std::map<int, std::vector<Prediction>>& single_pass,
                       const TemporalKG& kg) {
  const Seconds slot = kg.slot_duration();
  if (iterative.size() != items.size())
    throw Error(ErrorCode::kLengthMismatch, "iterative predictions do not match items");
  for (const auto& [w, preds] : single_pass)
    if (preds.size() != items.size())
      throw Error(ErrorCode::kLengthMismatch, "single-pass predictions do not match items");

  CostReport r;
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto d = d_star(items[i], slot);
    if (!d) continue;
    CostPoint c{items[i].id, *d, iterative[i].trace.kg_calls, iterative[i].trace.triples_retrieved,
                correct(iterative[i].answer, items[i], slot)};
    r.iterative.push_back(c);
    xs.push_back(*d);
    ys.push_back(static_cast<double>(c.kg_calls));
  }
  if (xs.size() >= 2 && std::any_of(xs.begin(), xs.end(), [&](double v) { return v != xs[0]; }))
    r.iterative_fit = fit_line(xs, ys);

  for (const auto& [w, preds] : single_pass) {
    PrecisionPoint pp;
    pp.w = w;
    std::vector<double> precs;
    double triples = 0;
    for (std::size_t i = 0; i < items.size(); ++i) {
      const auto d = d_star(items[i], slot);
      if (!d) continue;
      const bool ok = correct(preds[i].answer, items[i], slot);
      r.single_pass[w].push_back(
          {items[i].id, *d, preds[i].trace.kg_calls, preds[i].trace.triples_retrieved, ok});
      if (ok) {
        ++pp.successes;
        if (!r.minimal_w.count(items[i].id)) r.minimal_w[items[i].id] = w;
      }
      precs.push_back(precision(retrieved_provenance(preds[i].trace),
                                {items[i].sd.begin(), items[i].sd.end()}));
      triples += static_cast<double>(preds[i].trace.triples_retrieved);
    }
    pp.median_precision = median(precs);
    pp.mean_triples = precs.empty() ? 0.0 : triples / static_cast<double>(precs.size());
    r.precision_curve.push_back(pp);
  }
  return r;
}

std::string_view to_string(AuditClause c) {
  switch (c) {
    case AuditClause::kNone: return "none";
    case AuditClause::kQ1: return "Q1";
    case AuditClause::kWindowNotInEvidence: return "a";
    case AuditClause::kWrongTime: return "b";
    case AuditClause::kFailedToStop: return "c";
  }
  return "?";
}

}  // namespace tkgqa

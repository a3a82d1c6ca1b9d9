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

// tkgqa command-line entry point.

#include <algorithm>
#include <atomic>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tkgqa/config.hpp"
#include "tkgqa/controller.hpp"
#include "tkgqa/error.hpp"
#include "tkgqa/eval.hpp"
#include "tkgqa/ingest.hpp"
#include "tkgqa/kg_io.hpp"
#include "tkgqa/qa_gen.hpp"
#include "tkgqa/remote_agent.hpp"
#include "tkgqa/report_io.hpp"

namespace {

using namespace tkgqa;
using nlohmann::json;

// stdin is read once so a bundled stream can feed both the graph and the
// QA reader.
const std::string& stdin_text() {
  static const std::string text = [] {
    std::ostringstream os;
    os << std::cin.rdbuf();
    return os.str();
  }();
  return text;
}

std::unique_ptr<std::istream> open_input(const std::string& path) {
  if (path == "-") return std::make_unique<std::istringstream>(stdin_text());
  auto in = std::make_unique<std::ifstream>(path, std::ios::binary);
  if (!*in) throw Error(ErrorCode::kIoError, "cannot open " + path);
  return in;
}

class Output {
 public:
  explicit Output(const std::string& path) {
    if (path != "-") {
      file_.open(path, std::ios::binary);
      if (!file_) throw Error(ErrorCode::kIoError, "cannot write " + path);
    }
    out_ = path == "-" ? &std::cout : &file_;
  }
  std::ostream& stream() { return *out_; }
  bool is_stdout() const { return out_ == &std::cout; }

 private:
  std::ofstream file_;
  std::ostream* out_;
};

TemporalKG load_graph(const std::string& path) {
  auto in = open_input(path);
  return read_kg_jsonl(*in);
}

std::vector<QAItem> load_items(const std::string& path) {
  auto in = open_input(path);
  return read_qa_jsonl(*in);
}

struct FlagSet {
  std::string config;
  std::map<std::string, std::string> values;
  std::vector<std::pair<std::string, CLI::Option*>> options;
};

void add_settings(CLI::App* sub, FlagSet& fs, std::initializer_list<const char*> keys) {
  sub->add_option("--config", fs.config, "key = value settings file");
  for (const char* k : keys) {
    const std::string key = k;
    std::string flag = "--" + key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    if (key == "L") flag = "--L,--horizon";
    fs.options.emplace_back(key, sub->add_option(flag, fs.values[key], "setting '" + key + "'"));
  }
}

Settings resolve(const FlagSet& fs) {
  Settings s;
  if (!fs.config.empty()) apply_config_file(s, fs.config);
  for (const auto& [key, opt] : fs.options)
    if (opt->count() > 0) apply_setting(s, key, fs.values.at(key));
  return s;
}

const std::initializer_list<const char*> kRunKeys = {
    "theta", "t_max", "lambda", "gamma", "radius", "hop_cap", "budget",
    "mode",  "neighborhood", "w", "slot", "dt", "L", "traffic_percentile", "rain_threshold"};

struct AgentChoice {
  std::string kind = "rule";
};

// Runs every item; results keep item order whatever the job count.
std::vector<Prediction> run_items(const std::vector<QAItem>& items, const TemporalKG& kg,
                                  const RunConfig& cfg, int jobs, const std::string& agent) {
  std::unique_ptr<RemoteClient> client;
  if (agent == "remote") {
    auto s = RemoteSettings::from_env();
    if (!s) throw Error(ErrorCode::kInvalidParams, "--agent remote needs TKGQA_REMOTE_URL");
    client = std::make_unique<RemoteClient>(*s);
  } else if (agent != "rule") {
    throw Error(ErrorCode::kInvalidParams, "unknown agent '" + agent + "'");
  }
  std::vector<Prediction> out(items.size());
  std::atomic<std::size_t> next{0};
  std::vector<std::string> errors(items.size());
  auto worker = [&] {
    for (std::size_t i = next++; i < items.size(); i = next++) {
      try {
        const QueryIntent q = to_query(items[i], kg);
        RunResult r;
        if (client) {
          RemoteVerifier v(*client, kg, cfg.theta);
          RemotePlanner p(*client, kg, cfg.lambda, cfg.theta, cfg.neighborhood);
          r = run(q, kg, cfg, p, v);
        } else {
          r = run(q, kg, cfg);
        }
        out[i] = Prediction{items[i].id, std::move(r.answer), std::move(r.trace)};
      } catch (const std::exception& e) {
        errors[i] = items[i].id + ": " + e.what();
      }
    }
  };
  const int n = std::max(1, std::min<int>(jobs, static_cast<int>(items.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const std::string& e : errors)
    if (!e.empty()) throw Error(ErrorCode::kInvalidParams, e);
  return out;
}

std::vector<NearEdge> read_near_edges(const std::string& path) {
  auto in = open_input(path);
  std::vector<NearEdge> out;
  std::string line;
  bool first = true;
  while (std::getline(*in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw Error(ErrorCode::kMalformedRecord, "near-edge line without a comma: " + line);
    NearEdge e{line.substr(0, comma), line.substr(comma + 1)};
    if (first && e.a == "a" && e.b == "b") {
      first = false;
      continue;
    }
    first = false;
    out.push_back(std::move(e));
  }
  return out;
}

int cmd_ingest(const std::string& schema_name, const std::vector<std::string>& inputs,
               const std::string& tz, const std::string& near, const std::string& out_path,
               const Settings& s) {
  auto schema = parse_schema(schema_name);
  if (!schema) throw Error(ErrorCode::kInvalidParams, "unknown schema '" + schema_name + "'");
  auto offset = parse_utc_offset(tz);
  if (!offset) throw Error(ErrorCode::kInvalidParams, "unsupported --tz '" + tz + "'");
  ParseOptions po;
  po.utc_offset = *offset;
  po.slot_duration = s.slot;
  std::vector<std::vector<RawRecord>> parts;
  for (const std::string& path : inputs) {
    auto in = open_input(path);
    ParseResult r = parse_corpus(*in, *schema, po);
    std::cerr << path << ": rows_in=" << r.stats.rows_in << " kept=" << r.stats.kept
              << " duplicates=" << r.stats.duplicates << " skipped=" << r.stats.skipped << '\n';
    parts.push_back(std::move(r.records));
  }
  const auto records = merge_records(std::move(parts));
  const auto edges = near.empty() ? std::vector<NearEdge>{} : read_near_edges(near);
  BuildOptions bo;
  bo.rain_threshold = s.rain_threshold;
  bo.traffic_percentile = s.traffic_percentile;
  const TemporalKG kg = build_kg(records, s.slot, edges, bo);
  Output out(out_path);
  write_kg_jsonl(kg, out.stream());
  (out.is_stdout() ? std::cerr : std::cout)
      << format_stats_table(kg.stats(), std::string(to_string(*schema)));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tkgqa: iterative time-anchored retrieval over temporal knowledge graphs"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);

  // ingest
  auto* ingest = app.add_subcommand("ingest", "parse corpus CSVs into a graph dump");
  std::string schema, tz = "UTC", near, ingest_out = "-";
  std::vector<std::string> inputs;
  FlagSet ingest_flags;
  ingest->add_option("--schema", schema, "irish | sydney | tfnsw")->required();
  ingest->add_option("inputs", inputs, "CSV files ('-' for stdin)")->required();
  ingest->add_option("--tz", tz, "corpus UTC offset (UTC, +10:00, ...)");
  ingest->add_option("--near", near, "CSV of location-key pairs (a,b)");
  ingest->add_option("--out", ingest_out, "graph dump path ('-' for stdout)");
  add_settings(ingest, ingest_flags, {"slot", "traffic_percentile", "rain_threshold"});

  // synth
  auto* synth = app.add_subcommand("synth", "synthetic rain corpus as a graph dump or CSV");
  SynthParams sp;
  std::string synth_start = "2024-01-01T00:00:00Z", synth_span = "14d", synth_format = "kg",
              synth_out = "-";
  FlagSet synth_flags;
  synth->add_option("--seed", sp.seed, "RNG seed");
  synth->add_option("--locations", sp.locations, "number of stations (chained by near-edges)");
  synth->add_option("--event-rate", sp.event_rate, "per-slot rain probability");
  synth->add_option("--start", synth_start, "first slot (UTC)");
  synth->add_option("--span", synth_span, "covered duration, e.g. 14d");
  synth->add_option("--format", synth_format, "kg | csv");
  synth->add_option("--out", synth_out, "output path ('-' for stdout)");
  add_settings(synth, synth_flags, {"slot"});

  // gen-qa
  auto* gen = app.add_subcommand("gen-qa", "generate Q1/Q2/Q3 items with gold labels");
  GenParams gp;
  std::string gen_kg = "-", gen_out = "-", gen_kind = "rain";
  bool no_bundle = false;
  FlagSet gen_flags;
  gen->add_option("--kg", gen_kg, "graph dump ('-' for stdin)");
  gen->add_option("--m", gp.m, "number of sampled anchors");
  gen->add_option("--seed", gp.seed, "RNG seed");
  gen->add_option("--path-length", gp.path_length, "locations per trip");
  gen->add_option("--event-kind", gen_kind, "rain | traffic");
  gen->add_option("--out", gen_out, "QA JSON-lines path ('-' for stdout)");
  gen->add_flag("--no-bundle", no_bundle, "do not re-emit a graph read from stdin");
  add_settings(gen, gen_flags, {"dt", "L"});

  // answer
  auto* answer = app.add_subcommand("answer", "answer one query and dump the run trace");
  std::string ans_kg, query_path, question, ans_out = "-", ans_agent = "rule";
  FlagSet ans_flags;
  answer->add_option("--kg", ans_kg, "graph dump ('-' for stdin)")->required();
  answer->add_option("--query", query_path, "query JSON document");
  answer->add_option("--question", question, "templated natural-language question");
  answer->add_option("--agent", ans_agent, "rule | remote");
  answer->add_option("--out", ans_out, "output path ('-' for stdout)");
  add_settings(answer, ans_flags, kRunKeys);

  // bench / audit / cost-report share inputs
  auto* bench = app.add_subcommand("bench", "run every QA item and score the answers");
  auto* audit = app.add_subcommand("audit", "per-item hallucination clauses");
  auto* cost = app.add_subcommand("cost-report", "retrieval cost and single-pass precision curves");
  std::string b_kg = "-", b_qa, b_out = "-", b_agent = "rule", b_pred, c_ws = "1,2,4,8", c_csv;
  int jobs = 1;
  FlagSet b_flags, a_flags, c_flags;
  for (auto* sub : {bench, audit, cost}) {
    sub->add_option("--kg", b_kg, "graph dump ('-' for stdin)");
    sub->add_option("--qa", b_qa, "QA JSON-lines (defaults to the --kg stream)");
    sub->add_option("--out", b_out, "output path ('-' for stdout)");
    sub->add_option("--jobs", jobs, "parallel runs");
    sub->add_option("--agent", b_agent, "rule | remote");
  }
  bench->add_option("--predictions", b_pred, "per-item prediction JSON-lines");
  cost->add_option("--ws", c_ws, "comma-separated single-pass radii (slots)");
  cost->add_option("--csv", c_csv, "CSV curves path");
  add_settings(bench, b_flags, kRunKeys);
  add_settings(audit, a_flags, kRunKeys);
  add_settings(cost, c_flags, kRunKeys);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (ingest->parsed())
      return cmd_ingest(schema, inputs, tz, near, ingest_out, resolve(ingest_flags));

    if (synth->parsed()) {
      const Settings s = resolve(synth_flags);
      auto start = parse_timestamp(synth_start);
      auto span = parse_duration(synth_span);
      if (!start || !span) throw Error(ErrorCode::kInvalidParams, "bad --start or --span");
      sp.start = *start;
      sp.span = *span;
      sp.slot_duration = s.slot;
      const auto records = synth_corpus(sp);
      Output out(synth_out);
      if (synth_format == "csv") {
        write_corpus(records, Schema::kSydney, out.stream());
      } else if (synth_format == "kg") {
        write_kg_jsonl(build_kg(records, s.slot, synth_near_edges(sp.locations)), out.stream());
      } else {
        throw Error(ErrorCode::kInvalidParams, "unknown --format '" + synth_format + "'");
      }
      return 0;
    }

    if (gen->parsed()) {
      const Settings s = resolve(gen_flags);
      gp.duration = s.duration;
      gp.horizon = s.horizon;
      if (gen_kind == "traffic") gp.event_kind = MeasureKind::kVolume;
      else if (gen_kind != "rain") throw Error(ErrorCode::kInvalidParams, "unknown --event-kind");
      const TemporalKG kg = load_graph(gen_kg);
      const auto items = generate(kg, gp);
      Output out(gen_out);
      if (gen_kg == "-" && !no_bundle) write_kg_jsonl(kg, out.stream());
      write_qa_jsonl(items, out.stream());
      return 0;
    }

    if (answer->parsed()) {
      const Settings s = resolve(ans_flags);
      const TemporalKG kg = load_graph(ans_kg);
      QueryIntent q;
      if (!query_path.empty()) {
        auto in = open_input(query_path);
        json j;
        try {
          j = json::parse(*in);
        } catch (const json::exception& e) {
          throw Error(ErrorCode::kInvalidFormat, std::string("query document: ") + e.what());
        }
        q = query_from_json(j, kg, s.horizon);
      } else if (!question.empty()) {
        auto parsed = parse_question(question, kg, s.horizon);
        if (!parsed) throw Error(ErrorCode::kInvalidFormat, "question matches no template");
        q = *parsed;
      } else {
        throw Error(ErrorCode::kInvalidParams, "answer needs --query or --question");
      }
      RunResult r;
      if (ans_agent == "remote") {
        auto rs = RemoteSettings::from_env();
        if (!rs) throw Error(ErrorCode::kInvalidParams, "--agent remote needs TKGQA_REMOTE_URL");
        RemoteClient client(*rs);
        RemoteVerifier v(client, kg, s.run.theta);
        RemotePlanner p(client, kg, s.run.lambda, s.run.theta, s.run.neighborhood);
        r = run(q, kg, s.run, p, v);
      } else if (ans_agent == "rule") {
        r = run(q, kg, s.run);
      } else {
        throw Error(ErrorCode::kInvalidParams, "unknown agent '" + ans_agent + "'");
      }
      Output out(ans_out);
      out.stream() << json{{"query", query_to_json(q, kg)},
                           {"answer", to_json(r.answer, kg)},
                           {"trace", to_json(r.trace, kg)}}
                          .dump(2)
                   << '\n';
      return 0;
    }

    // bench, audit and cost-report
    const bool is_bench = bench->parsed(), is_audit = audit->parsed();
    const Settings s = resolve(is_bench ? b_flags : is_audit ? a_flags : c_flags);
    if (b_qa.empty()) {
      if (b_kg != "-") throw Error(ErrorCode::kInvalidParams, "--qa is required with a --kg file");
      b_qa = "-";
    }
    const TemporalKG kg = load_graph(b_kg);
    const auto items = load_items(b_qa);
    Output out(b_out);

    if (is_bench || is_audit) {
      const auto preds = run_items(items, kg, s.run, jobs, b_agent);
      if (is_bench) {
        out.stream() << to_json(score(preds, items, kg)).dump(2) << '\n';
        if (!b_pred.empty()) {
          Output p(b_pred);
          for (std::size_t i = 0; i < items.size(); ++i)
            p.stream() << json{{"id", items[i].id},
                               {"answer", to_json(preds[i].answer, kg)},
                               {"gold", format_gold(items[i].gold)},
                               {"correct", correct(preds[i].answer, items[i], kg.slot_duration())},
                               {"trace", to_json(preds[i].trace, kg)}}
                              .dump()
                       << '\n';
        }
      } else {
        std::size_t flagged = 0;
        for (std::size_t i = 0; i < items.size(); ++i) {
          const AuditResult a = audit_hallucination(preds[i], items[i], kg);
          flagged += a.hallucinated;
          out.stream() << json{{"id", items[i].id},
                               {"kind", to_string(items[i].kind)},
                               {"predicted", format_verdict(preds[i].answer)},
                               {"gold", format_gold(items[i].gold)},
                               {"hallucinated", a.hallucinated},
                               {"clause", to_string(a.clause)}}
                              .dump()
                       << '\n';
        }
        std::cerr << flagged << " of " << items.size() << " items flagged\n";
      }
      return 0;
    }

    // cost-report
    std::vector<int> ws;
    {
      std::istringstream in(c_ws);
      std::string tok;
      while (std::getline(in, tok, ','))
        try {
          ws.push_back(std::stoi(tok));
        } catch (const std::exception&) {
          throw Error(ErrorCode::kInvalidParams, "bad --ws entry '" + tok + "'");
        }
    }
    RunConfig it_cfg = s.run;
    it_cfg.mode = RunMode::kIterative;
    const auto iter = run_items(items, kg, it_cfg, jobs, b_agent);
    std::map<int, std::vector<Prediction>> single;
    for (int w : ws) {
      RunConfig c = s.run;
      c.mode = RunMode::kSinglePass;
      c.single_pass_w = w;
      single[w] = run_items(items, kg, c, jobs, "rule");
    }
    const CostReport rep = cost_report(items, iter, single, kg);
    out.stream() << to_json(rep).dump(2) << '\n';
    if (!c_csv.empty()) {
      Output csv(c_csv);
      csv.stream() << cost_csv(rep);
    }
    return 0;
  } catch (const Error& e) {
    std::cerr << "tkgqa: " << e.what() << '\n';
    return is_input_error(e.code()) ? 1 : 2;
  } catch (const std::exception& e) {
    std::cerr << "tkgqa: internal error: " << e.what() << '\n';
    return 2;
  }
}

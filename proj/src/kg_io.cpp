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

#include "tkgqa/kg_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "tkgqa/error.hpp"

namespace tkgqa {

using nlohmann::json;

namespace {

json node_to_json(const Node& n) {
  json j = {{"type", "node"}, {"id", n.id.value}, {"kind", to_string(n.kind())}};
  std::visit(
      [&j](const auto& p) {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, TimePayload>) {
          j["start"] = p.time.start;
          j["end"] = p.time.end;
        } else if constexpr (std::is_same_v<P, LocationPayload>) {
          j["key"] = p.key;
          j["name"] = p.name;
          if (p.coords) {
            j["lat"] = p.coords->lat;
            j["lon"] = p.coords->lon;
          }
        } else if constexpr (std::is_same_v<P, EventPayload>) {
          j["tag"] = p.tag;
          j["measure"] = to_string(p.measure);
          j["observation"] = p.observation;
        } else {
          j["magnitude"] = p.magnitude;
          j["unit"] = p.unit;
        }
      },
      n.payload);
  return j;
}

Node node_from_json(const json& j) {
  Node n;
  n.id = NodeId{j.at("id").get<std::uint32_t>()};
  auto kind = parse_node_kind(j.at("kind").get<std::string>());
  if (!kind) throw Error(ErrorCode::kInvalidFormat, "unknown node kind");
  switch (*kind) {
    case NodeKind::kTime:
      n.payload = TimePayload{{j.at("start").get<Seconds>(), j.at("end").get<Seconds>()}};
      break;
    case NodeKind::kLocation: {
      LocationPayload p{j.at("key").get<std::string>(), j.value("name", std::string()), {}};
      if (j.contains("lat") && j.contains("lon"))
        p.coords = Coordinates{j["lat"].get<double>(), j["lon"].get<double>()};
      n.payload = std::move(p);
      break;
    }
    case NodeKind::kEvent: {
      auto m = parse_measure_kind(j.at("measure").get<std::string>());
      if (!m) throw Error(ErrorCode::kInvalidFormat, "unknown measure kind");
      n.payload = EventPayload{j.at("tag").get<std::string>(), *m,
                               j.at("observation").get<std::string>()};
      break;
    }
    case NodeKind::kValue:
      n.payload = ValuePayload{j.at("magnitude").get<double>(), j.at("unit").get<std::string>()};
      break;
  }
  return n;
}

}  // namespace

void write_kg_jsonl(const TemporalKG& kg, std::ostream& out) {
  json header = {{"type", "header"},           {"format", "tkgqa-kg"},
                 {"version", 1},               {"slot_duration", kg.slot_duration()},
                 {"nodes", kg.nodes().size()}, {"triples", kg.triples().size()}};
  out << header.dump() << '\n';
  for (const Node& n : kg.nodes()) out << node_to_json(n).dump() << '\n';
  for (const Triple& t : kg.triples()) {
    json j = {{"type", "triple"},
              {"head", t.head.value},
              {"rel", to_string(t.rel)},
              {"tail", t.tail.value},
              {"provenance", t.provenance}};
    out << j.dump() << '\n';
  }
}

TemporalKG read_kg_jsonl(std::istream& in) {
  std::optional<Seconds> slot;
  std::size_t expected_nodes = 0;
  std::size_t expected_triples = 0;
  std::vector<Node> nodes;
  std::vector<Triple> triples;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kInvalidFormat,
                  "line " + std::to_string(line_no) + ": " + e.what());
    }
    const std::string type = j.value("type", std::string());
    try {
      if (type == "header") {
        if (j.value("format", std::string()) != "tkgqa-kg")
          throw Error(ErrorCode::kInvalidFormat, "not a tkgqa-kg stream");
        slot = j.at("slot_duration").get<Seconds>();
        expected_nodes = j.value("nodes", std::size_t{0});
        expected_triples = j.value("triples", std::size_t{0});
      } else if (type == "node") {
        nodes.push_back(node_from_json(j));
      } else if (type == "triple") {
        auto rel = parse_relation(j.at("rel").get<std::string>());
        if (!rel) throw Error(ErrorCode::kInvalidFormat, "unknown relation");
        triples.push_back({NodeId{j.at("head").get<std::uint32_t>()}, *rel,
                           NodeId{j.at("tail").get<std::uint32_t>()},
                           j.value("provenance", std::string())});
      }
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kInvalidFormat,
                  "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!slot) throw Error(ErrorCode::kInvalidFormat, "missing graph header");
  if (nodes.size() != expected_nodes || triples.size() != expected_triples)
    throw Error(ErrorCode::kInvalidFormat, "node/triple counts disagree with header");
  return TemporalKG::from_parts(*slot, std::move(nodes), std::move(triples));
}

void save_kg(const TemporalKG& kg, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot open " + path + " for writing");
  write_kg_jsonl(kg, out);
}

TemporalKG load_kg(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path);
  return read_kg_jsonl(in);
}

}  // namespace tkgqa

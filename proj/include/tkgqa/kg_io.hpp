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

#ifndef TKGQA_KG_IO_HPP_
#define TKGQA_KG_IO_HPP_

#include <iosfwd>
#include <string>

#include "tkgqa/kg.hpp"

namespace tkgqa {

// JSON-lines graph dump. Every line carries a "type":
//   {"type":"header","format":"tkgqa-kg","version":1,"slot_duration":1800,
//    "nodes":N,"triples":M}
//   N node lines   {"type":"node","id":..,"kind":"TIME|LOCATION|EVENT|VALUE",...}
//   M triple lines {"type":"triple","head":..,"rel":"occursAt",..,"provenance":..}
// Lines of other types (e.g. "qa") are skipped on read so that a graph and
// a question set can travel in one stream.

void write_kg_jsonl(const TemporalKG& kg, std::ostream& out);
TemporalKG read_kg_jsonl(std::istream& in);

void save_kg(const TemporalKG& kg, const std::string& path);
TemporalKG load_kg(const std::string& path);

}  // namespace tkgqa

#endif  // TKGQA_KG_IO_HPP_

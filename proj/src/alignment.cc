// Copyright 2026 The Bookalign Authors.
//
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

#include "bookalign/alignment.h"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "bookalign/common.h"

namespace bookalign {
namespace {

std::string FormatDouble(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::vector<std::string> SplitTabs(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, '\t')) fields.push_back(field);
  return fields;
}

}  // namespace

std::string_view AlignerName(AlignerKind kind) {
  switch (kind) {
    case AlignerKind::kPassage: return "passage";
    case AlignerKind::kToken: return "token";
    case AlignerKind::kJing: return "jing";
  }
  return "unknown";
}

AlignerKind ParseAlignerKind(std::string_view name) {
  if (name == "passage") return AlignerKind::kPassage;
  if (name == "token") return AlignerKind::kToken;
  if (name == "jing") return AlignerKind::kJing;
  throw ConfigError("unknown model '" + std::string(name) +
                    "' (expected passage, token or jing)");
}

void WriteAlignment(std::ostream& out, const AlignmentResult& result) {
  out << "# model=" << AlignerName(result.kind) << " pair=" << result.pair_id
      << " loglik=" << FormatDouble(result.log_likelihood) << '\n';
  if (result.kind == AlignerKind::kPassage) {
    for (const SentenceAlignment& a : result.sentences) {
      out << result.pair_id << '\t' << a.summary_sentence << '\t' << a.state << '\t'
          << a.span_start << '\t' << a.span_end << '\t' << FormatDouble(a.posterior)
          << '\n';
    }
    return;
  }
  for (const TokenAlignment& a : result.tokens) {
    out << result.pair_id << '\t' << a.summary_position << '\t';
    if (a.source_position) {
      out << *a.source_position;
    } else {
      out << "NULL";
    }
    out << '\t';
    if (a.bin) {
      out << *a.bin;
    } else {
      out << '-';
    }
    out << '\t' << FormatDouble(a.posterior) << '\n';
  }
}

AlignmentResult ReadAlignment(std::istream& in) {
  AlignmentResult result;
  std::string line;
  std::size_t line_number = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    const std::string where = "alignment line " + std::to_string(line_number);
    if (line[0] == '#') {
      std::stringstream ss(line.substr(1));
      std::string item;
      while (ss >> item) {
        const std::size_t eq = item.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = item.substr(0, eq);
        const std::string value = item.substr(eq + 1);
        if (key == "model") {
          result.kind = ParseAlignerKind(value);
          have_header = true;
        } else if (key == "pair") {
          result.pair_id = value;
        } else if (key == "loglik") {
          result.log_likelihood = std::stod(value);
        }
      }
      continue;
    }
    if (!have_header) throw InputError(where + ": record before header");
    const std::vector<std::string> f = SplitTabs(line);
    try {
      if (result.kind == AlignerKind::kPassage) {
        if (f.size() != 6) throw InputError(where + ": expected 6 fields");
        SentenceAlignment a;
        a.summary_sentence = std::stoul(f[1]);
        a.state = std::stoul(f[2]);
        a.span_start = std::stoul(f[3]);
        a.span_end = std::stoul(f[4]);
        a.posterior = std::stod(f[5]);
        result.sentences.push_back(a);
      } else {
        if (f.size() != 5) throw InputError(where + ": expected 5 fields");
        TokenAlignment a;
        a.summary_position = std::stoul(f[1]);
        if (f[2] != "NULL") a.source_position = std::stoul(f[2]);
        if (f[3] != "-") a.bin = std::stoi(f[3]);
        a.posterior = std::stod(f[4]);
        result.tokens.push_back(a);
      }
    } catch (const std::logic_error&) {
      throw InputError(where + ": malformed number");
    }
  }
  if (!have_header) throw InputError("alignment file has no header");
  return result;
}

}  // namespace bookalign

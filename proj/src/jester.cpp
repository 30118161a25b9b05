// Copyright 2026 The NSM Authors.
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
#include "nsm/jester.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

#include "nsm/error.hpp"

namespace nsm {
namespace {

std::vector<double> parse_line(const std::string& line, std::size_t line_no) {
  std::vector<double> out;
  const char* p = line.data();
  const char* end = p + line.size();
  while (p < end) {
    while (p < end && (*p == ',' || *p == ' ' || *p == '\t' || *p == ';' || *p == '\r')) ++p;
    if (p >= end) break;
    if (*p == '+') ++p;
    double value = 0.0;
    const auto [next, ec] = std::from_chars(p, end, value);
    if (ec != std::errc() || (next < end && *next != ',' && *next != ' ' && *next != '\t' &&
                              *next != ';' && *next != '\r'))
      throw ParseError("jester: unparsable value on line " + std::to_string(line_no), line_no,
                       out.size() + 1);
    out.push_back(value);
    p = next;
  }
  return out;
}

}  // namespace

RatingsMatrix jester_ingest(const std::string& text, const JesterOptions& options) {
  if (options.rated_exactly < 0 || static_cast<std::size_t>(options.rated_exactly) > options.jokes)
    throw InsufficientDataError("jester: no user can rate exactly " +
                                std::to_string(options.rated_exactly) + " of " +
                                std::to_string(options.jokes) + " jokes");
  std::istringstream in(text);
  std::string line;
  std::vector<std::vector<double>> users;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = parse_line(line, line_no);
    if (cells.size() != options.jokes + 1)
      throw FormatError("jester: line " + std::to_string(line_no) + " has " +
                        std::to_string(cells.size()) + " fields, expected " +
                        std::to_string(options.jokes + 1));
    std::size_t rated = 0;
    for (std::size_t k = 1; k < cells.size(); ++k) {
      if (cells[k] == options.sentinel) continue;
      if (cells[k] < -10.0 || cells[k] > 10.0)
        throw DomainError("jester: rating " + std::to_string(cells[k]) + " outside [-10, 10] on line " +
                          std::to_string(line_no) + ", joke " + std::to_string(k));
      ++rated;
    }
    if (cells[0] != static_cast<double>(rated))
      throw FormatError("jester: line " + std::to_string(line_no) + " declares " +
                        std::to_string(static_cast<long long>(cells[0])) + " ratings but has " +
                        std::to_string(rated));
    if (rated == static_cast<std::size_t>(options.rated_exactly)) users.push_back(cells);
  }
  if (users.empty())
    throw InsufficientDataError("jester: no user rated exactly " + std::to_string(options.rated_exactly) +
                                " jokes");
  RatingsMatrix m(users.size(), options.jokes);
  for (std::size_t u = 0; u < users.size(); ++u)
    for (std::size_t k = 0; k < options.jokes; ++k)
      if (users[u][k + 1] != options.sentinel) m.set(u, k, users[u][k + 1]);
  return m;
}

RatingsMatrix jester_ingest_file(const std::string& path, const JesterOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return jester_ingest(ss.str(), options);
}

}  // namespace nsm

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
#ifndef NSM_JESTER_HPP_
#define NSM_JESTER_HPP_

#include <string>

#include "nsm/ratings.hpp"

namespace nsm {

struct JesterOptions {
  int rated_exactly = 74;
  double sentinel = 99.0;  // marks an unrated joke
  std::size_t jokes = 100;
};

// Parses the published Jester layout (one user per line: the number of rated
// jokes, then one column per joke) and keeps users who rated exactly
// rated_exactly jokes. Ratings outside [-10, 10] are rejected.
RatingsMatrix jester_ingest(const std::string& text, const JesterOptions& options = {});
RatingsMatrix jester_ingest_file(const std::string& path, const JesterOptions& options = {});

}  // namespace nsm

#endif  // NSM_JESTER_HPP_

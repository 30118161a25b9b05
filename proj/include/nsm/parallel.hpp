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

#ifndef NSM_PARALLEL_HPP_
#define NSM_PARALLEL_HPP_

#include <cstddef>
#include <functional>

namespace nsm {

// Worker cap for the library. 0 means "use NSM_THREADS from the environment,
// else 1".
void set_thread_count(unsigned threads);
unsigned thread_count();

// Runs body(i) for i in [0, n). Each index is processed exactly once; callers
// write results into per-index slots so the outcome never depends on
// scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace nsm

#endif  // NSM_PARALLEL_HPP_

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

#include <atomic>
#include <cstdlib>
#include <exception>
#include <iostream>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "nsm/log.hpp"
#include "nsm/parallel.hpp"

namespace nsm {
namespace {

std::atomic<unsigned> g_threads{0};
std::atomic<bool> g_warnings{true};
std::mutex g_log_mutex;

}  // namespace

void set_thread_count(unsigned threads) { g_threads = threads; }

unsigned thread_count() {
  unsigned n = g_threads;
  if (n > 0) return n;
  if (const char* env = std::getenv("NSM_THREADS")) {
    const long parsed = std::strtol(env, nullptr, 10);
    if (parsed > 0) return static_cast<unsigned>(parsed);
  }
  return 1;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min<std::size_t>(thread_count(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = next++; i < n; i = next++) body(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

void set_warnings_enabled(bool enabled) { g_warnings = enabled; }

void warn(const std::string& message) {
  if (!g_warnings) return;
  std::lock_guard<std::mutex> lock(g_log_mutex);
  std::cerr << "warning: " << message << '\n';
}

}  // namespace nsm

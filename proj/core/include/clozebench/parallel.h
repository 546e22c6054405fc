// Copyright 2026 The clozebench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CLOZEBENCH_PARALLEL_H_
#define CLOZEBENCH_PARALLEL_H_

#include <condition_variable>
#include <cstddef>
#include <functional>
#include <mutex>

namespace clozebench {

// Runs fn(0..n-1) on up to `workers` threads. Results must be written to
// per-index slots by the caller, which keeps reductions order-independent.
// The first exception thrown by any task is rethrown after all workers join.
void ParallelFor(size_t n, size_t workers, const std::function<void(size_t)>& fn);

// Counting limiter for in-flight remote requests.
class InFlightLimiter {
 public:
  explicit InFlightLimiter(size_t limit) : available_(limit == 0 ? 1 : limit) {}

  void Acquire();
  void Release();

  class Slot {
   public:
    explicit Slot(InFlightLimiter& l) : limiter_(l) { limiter_.Acquire(); }
    ~Slot() { limiter_.Release(); }
    Slot(const Slot&) = delete;
    Slot& operator=(const Slot&) = delete;

   private:
    InFlightLimiter& limiter_;
  };

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  size_t available_;
};

}  // namespace clozebench

#endif  // CLOZEBENCH_PARALLEL_H_

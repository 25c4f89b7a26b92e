// Copyright 2025 The Authors.
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

#ifndef NOCG_PARALLEL_HPP
#define NOCG_PARALLEL_HPP

#include <cstdint>
#include <functional>

namespace nocg {

// Worker count for within-batch evaluation, capped by NOBLIV_CG_THREADS.
int batch_threads();

// Runs fn(i) for i in [0, n). Work is split across batch_threads() workers
// when n is large enough to pay for the threads; fn must write only to
// per-index slots so the subsequent sequential reduction is deterministic.
void parallel_for_indexed(int64_t n, const std::function<void(int64_t)>& fn);

}  // namespace nocg

#endif  // NOCG_PARALLEL_HPP

// Copyright 2026 The qrev Authors
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

#pragma once

#include <cstdint>
#include <random>

namespace qrev {

/// Per-run random stream derived from (master seed, run index).
///
/// Streams for different run indices are independent of the order in which
/// runs execute, so Monte Carlo results do not depend on thread count.
class Rng {
   public:
    explicit Rng(std::uint64_t seed);
    Rng(std::uint64_t master_seed, std::uint64_t stream);

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform();
    bool bernoulli(double p) { return uniform() < p; }

   private:
    std::mt19937_64 engine_;
};

}  // namespace qrev

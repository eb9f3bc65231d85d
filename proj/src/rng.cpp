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

#include "qrev/rng.hpp"

namespace qrev {

namespace {

std::mt19937_64 seeded_engine(std::uint64_t a, std::uint64_t b) {
    std::seed_seq seq{
        static_cast<std::uint32_t>(a),
        static_cast<std::uint32_t>(a >> 32),
        static_cast<std::uint32_t>(b),
        static_cast<std::uint32_t>(b >> 32),
    };
    return std::mt19937_64(seq);
}

}  // namespace

Rng::Rng(std::uint64_t seed) : engine_(seeded_engine(seed, ~std::uint64_t{0})) {}

Rng::Rng(std::uint64_t master_seed, std::uint64_t stream) : engine_(seeded_engine(master_seed, stream)) {}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

}  // namespace qrev

// include/splda/rng.h

// Copyright 2026  splda-vb authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef SPLDA_RNG_H_
#define SPLDA_RNG_H_

#include <cstdint>
#include <random>

namespace splda {

/// Independent stream `stream` of the generator family named by `seed`.
/// Both 64-bit values enter the seed sequence in full.
inline std::mt19937_64 SubstreamRng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq ss{static_cast<std::uint32_t>(seed),
                   static_cast<std::uint32_t>(seed >> 32),
                   static_cast<std::uint32_t>(stream),
                   static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(ss);
}

}  // namespace splda

#endif  // SPLDA_RNG_H_

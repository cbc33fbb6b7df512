/*
 * Copyright 2026 The deepgp-lab Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef DEEPGP_RNG_HPP
#define DEEPGP_RNG_HPP

#include <cstdint>
#include <initializer_list>
#include <limits>
#include <random>

namespace deepgp {

// Counter-based stream: output i is a bijective mix of (key, i). Streams are
// keyed by the experiment seed plus a path of tags (chain, layer, node,
// attempt, ...) so results never depend on call interleaving across threads.
class KeyedRng {
 public:
  using result_type = std::uint64_t;

  KeyedRng(std::uint64_t seed, std::initializer_list<std::uint64_t> tags)
      : key_(mix(seed ^ 0x6a09e667f3bcc908ULL)) {
    for (auto t : tags) key_ = mix(key_ ^ mix(t + 0x9e3779b97f4a7c15ULL));
  }

  explicit KeyedRng(std::uint64_t seed) : KeyedRng(seed, {}) {}

  /// Derive an independent child stream.
  KeyedRng child(std::uint64_t tag) const {
    KeyedRng c(*this);
    c.key_ = mix(key_ ^ mix(tag + 0xbb67ae8584caa73bULL));
    c.counter_ = 0;
    return c;
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() {
    return mix(key_ + (++counter_) * 0x9e3779b97f4a7c15ULL);
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  double normal() {
    std::normal_distribution<double> d;
    return d(*this);
  }

  std::uint64_t key() const { return key_; }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace deepgp

#endif  // DEEPGP_RNG_HPP

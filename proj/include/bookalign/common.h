// Copyright 2026 The Bookalign Authors.
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

// Shared plumbing: error types, log-space arithmetic, a portable RNG and a
// string interner.

#ifndef BOOKALIGN_COMMON_H_
#define BOOKALIGN_COMMON_H_

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace bookalign {

// Malformed or unusable user input (bad bytes, bad file lines, ...).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration values (flags, thresholds, model sizes).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Probabilistic inference failed, e.g. an observation that no state can emit.
class InferenceError : public std::runtime_error {
 public:
  InferenceError(const std::string& what, std::size_t observation)
      : std::runtime_error(what), observation_(observation) {}
  std::size_t observation() const { return observation_; }

 private:
  std::size_t observation_;
};

inline constexpr double kLogZero = -std::numeric_limits<double>::infinity();

inline double LogSumExp(double a, double b) {
  if (a == kLogZero) return b;
  if (b == kLogZero) return a;
  return a > b ? a + std::log1p(std::exp(b - a))
               : b + std::log1p(std::exp(a - b));
}

inline double LogSumExp(std::span<const double> values) {
  double max = kLogZero;
  for (double v : values) {
    if (std::isnan(v)) return v;
    max = v > max ? v : max;
  }
  if (max == kLogZero) return kLogZero;
  double sum = 0.0;
  for (double v : values) sum += std::exp(v - max);
  return max + std::log(sum);
}

// Normalizes log weights into a probability vector. All -inf falls back to
// uniform.
std::vector<double> NormalizeLogWeights(std::span<const double> log_weights);

// Index of the entry whose cumulative mass first exceeds u*total. u in [0,1).
std::size_t SampleIndex(std::span<const double> probabilities, double u);

// mt19937_64 is fully specified by the standard; the uniform mapping below is
// ours so draws are identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  std::uint64_t Next() { return engine_(); }
  double Uniform01() { return static_cast<double>(Next() >> 11) * 0x1.0p-53; }
  // Uniform integer in [0, n), by rejection so there is no modulo bias.
  std::uint64_t Below(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
};

// Stable 64-bit FNV-1a, used to derive per-pair seeds from ids.
std::uint64_t Fnv1a(std::string_view text, std::uint64_t seed = 0);

// Selects the serial reference or the OpenMP variant of a data-parallel
// kernel.
enum class Execution { kSerial, kParallel };

using WordId = std::uint32_t;
inline constexpr WordId kNoWord = std::numeric_limits<WordId>::max();

class Vocabulary {
 public:
  WordId Intern(std::string_view word);
  WordId Find(std::string_view word) const;
  const std::string& Word(WordId id) const { return words_[id]; }
  std::size_t size() const { return words_.size(); }

 private:
  std::unordered_map<std::string, WordId> index_;
  std::vector<std::string> words_;
};

}  // namespace bookalign

#endif  // BOOKALIGN_COMMON_H_

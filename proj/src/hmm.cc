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

#include "bookalign/hmm.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace bookalign {
namespace {

void Validate(const HmmSpec& spec) {
  if (spec.num_states == 0) throw std::invalid_argument("HMM has no states");
  if (spec.steps.empty()) throw std::invalid_argument("HMM has no observations");
  if (spec.log_start.size() != spec.num_states) {
    throw std::invalid_argument("start vector size differs from state count");
  }
  if (!spec.log_transition) throw std::invalid_argument("no transition function");
  for (const LatticeStep& step : spec.steps) {
    if (step.states.size() != step.log_emission.size()) {
      throw std::invalid_argument("lattice step has mismatched emission list");
    }
    for (std::size_t k = 0; k < step.states.size(); ++k) {
      if (step.states[k] >= spec.num_states ||
          (k > 0 && step.states[k] <= step.states[k - 1])) {
        throw std::invalid_argument("lattice states must be increasing ids");
      }
    }
  }
}

void CheckReachable(const LatticeStep& step, std::span<const double> row,
                    std::size_t l) {
  for (double v : row) {
    if (std::isnan(v)) throw std::logic_error("NaN in HMM recursion");
    if (v != kLogZero) return;
  }
  const bool emits = std::any_of(step.log_emission.begin(), step.log_emission.end(),
                                 [](double e) { return e != kLogZero; });
  if (!emits) {
    throw InferenceError("observation " + std::to_string(l) +
                             " has zero emission probability under every state",
                         l);
  }
  throw InferenceError("no state path reaches observation " + std::to_string(l), l);
}

std::vector<std::vector<double>> Forward(const HmmSpec& spec) {
  const std::size_t n = spec.steps.size();
  std::vector<std::vector<double>> alpha(n);
  std::vector<double> scratch;
  const LatticeStep& first = spec.steps[0];
  alpha[0].resize(first.states.size());
  for (std::size_t k = 0; k < first.states.size(); ++k) {
    alpha[0][k] = spec.log_start[first.states[k]] + first.log_emission[k];
  }
  CheckReachable(first, alpha[0], 0);
  for (std::size_t l = 1; l < n; ++l) {
    const LatticeStep& prev = spec.steps[l - 1];
    const LatticeStep& cur = spec.steps[l];
    alpha[l].assign(cur.states.size(), kLogZero);
    scratch.resize(prev.states.size());
    for (std::size_t k = 0; k < cur.states.size(); ++k) {
      if (cur.log_emission[k] == kLogZero) continue;
      for (std::size_t j = 0; j < prev.states.size(); ++j) {
        scratch[j] = alpha[l - 1][j] == kLogZero
                         ? kLogZero
                         : alpha[l - 1][j] +
                               spec.log_transition(prev.states[j], cur.states[k]);
      }
      const double incoming = LogSumExp(scratch);
      if (incoming != kLogZero) alpha[l][k] = incoming + cur.log_emission[k];
    }
    CheckReachable(cur, alpha[l], l);
  }
  return alpha;
}

}  // namespace

std::vector<LatticeStep> DenseLattice(std::size_t num_states,
                                      std::size_t num_observations,
                                      std::span<const double> log_emission) {
  if (log_emission.size() != num_states * num_observations) {
    throw std::invalid_argument("emission table has the wrong size");
  }
  std::vector<LatticeStep> steps(num_observations);
  for (std::size_t l = 0; l < num_observations; ++l) {
    steps[l].states.resize(num_states);
    steps[l].log_emission.assign(log_emission.begin() + l * num_states,
                                 log_emission.begin() + (l + 1) * num_states);
    for (std::size_t s = 0; s < num_states; ++s) {
      steps[l].states[s] = static_cast<StateId>(s);
    }
  }
  return steps;
}

PosteriorTable ForwardBackward(const HmmSpec& spec, const PairVisitor& visit_pairs) {
  Validate(spec);
  const std::size_t n = spec.steps.size();
  const std::vector<std::vector<double>> alpha = Forward(spec);

  std::vector<std::vector<double>> beta(n);
  beta[n - 1].assign(spec.steps[n - 1].states.size(), 0.0);
  std::vector<double> scratch;
  for (std::size_t l = n - 1; l-- > 0;) {
    const LatticeStep& cur = spec.steps[l];
    const LatticeStep& next = spec.steps[l + 1];
    beta[l].assign(cur.states.size(), kLogZero);
    scratch.resize(next.states.size());
    for (std::size_t j = 0; j < cur.states.size(); ++j) {
      for (std::size_t k = 0; k < next.states.size(); ++k) {
        const double tail = next.log_emission[k] + beta[l + 1][k];
        scratch[k] = tail == kLogZero
                         ? kLogZero
                         : spec.log_transition(cur.states[j], next.states[k]) + tail;
      }
      beta[l][j] = LogSumExp(scratch);
    }
  }

  PosteriorTable table;
  table.log_likelihood = LogSumExp(alpha[n - 1]);
  {
    const LatticeStep& first = spec.steps[0];
    scratch.resize(first.states.size());
    for (std::size_t k = 0; k < first.states.size(); ++k) {
      scratch[k] = spec.log_start[first.states[k]] + first.log_emission[k] + beta[0][k];
    }
    table.backward_log_likelihood = LogSumExp(scratch);
  }
  if (std::isnan(table.log_likelihood)) throw std::logic_error("NaN likelihood");

  const double ll = table.log_likelihood;
  table.state_posteriors.resize(n);
  for (std::size_t l = 0; l < n; ++l) {
    auto& row = table.state_posteriors[l];
    row.resize(alpha[l].size());
    for (std::size_t k = 0; k < row.size(); ++k) {
      const double v = alpha[l][k] + beta[l][k];
      row[k] = v == kLogZero ? 0.0 : std::exp(v - ll);
    }
  }

  if (visit_pairs) {
    for (std::size_t l = 1; l < n; ++l) {
      const LatticeStep& prev = spec.steps[l - 1];
      const LatticeStep& cur = spec.steps[l];
      for (std::size_t j = 0; j < prev.states.size(); ++j) {
        if (alpha[l - 1][j] == kLogZero) continue;
        for (std::size_t k = 0; k < cur.states.size(); ++k) {
          const double tail = cur.log_emission[k] + beta[l][k];
          if (tail == kLogZero) continue;
          const double t = spec.log_transition(prev.states[j], cur.states[k]);
          if (t == kLogZero) continue;
          const double xi = std::exp(alpha[l - 1][j] + t + tail - ll);
          if (xi > 0.0) visit_pairs(l, prev.states[j], cur.states[k], xi);
        }
      }
    }
  }
  return table;
}

ViterbiPath Viterbi(const HmmSpec& spec) {
  Validate(spec);
  const std::size_t n = spec.steps.size();
  std::vector<std::vector<double>> delta(n);
  std::vector<std::vector<std::uint32_t>> back(n);
  const LatticeStep& first = spec.steps[0];
  delta[0].resize(first.states.size());
  for (std::size_t k = 0; k < first.states.size(); ++k) {
    delta[0][k] = spec.log_start[first.states[k]] + first.log_emission[k];
  }
  CheckReachable(first, delta[0], 0);
  for (std::size_t l = 1; l < n; ++l) {
    const LatticeStep& prev = spec.steps[l - 1];
    const LatticeStep& cur = spec.steps[l];
    delta[l].assign(cur.states.size(), kLogZero);
    back[l].assign(cur.states.size(), 0);
    for (std::size_t k = 0; k < cur.states.size(); ++k) {
      if (cur.log_emission[k] == kLogZero) continue;
      double best = kLogZero;
      std::uint32_t best_j = 0;
      for (std::size_t j = 0; j < prev.states.size(); ++j) {
        if (delta[l - 1][j] == kLogZero) continue;
        const double v =
            delta[l - 1][j] + spec.log_transition(prev.states[j], cur.states[k]);
        if (v > best) {
          best = v;
          best_j = static_cast<std::uint32_t>(j);
        }
      }
      if (best != kLogZero) {
        delta[l][k] = best + cur.log_emission[k];
        back[l][k] = best_j;
      }
    }
    CheckReachable(cur, delta[l], l);
  }

  ViterbiPath path;
  std::size_t best_k = 0;
  for (std::size_t k = 0; k < delta[n - 1].size(); ++k) {
    if (delta[n - 1][k] > path.log_prob) {
      path.log_prob = delta[n - 1][k];
      best_k = k;
    }
  }
  path.states.resize(n);
  for (std::size_t l = n; l-- > 0;) {
    path.states[l] = spec.steps[l].states[best_k];
    if (l > 0) best_k = back[l][best_k];
  }
  return path;
}

double JumpObjective(std::span<const double> jump_counts,
                     std::span<const DepartureProfile> profiles,
                     std::span<const double> weights) {
  double q = 0.0;
  for (std::size_t b = 0; b < jump_counts.size(); ++b) {
    if (jump_counts[b] <= 0.0) continue;
    if (weights[b] <= 0.0) return kLogZero;
    q += jump_counts[b] * std::log(weights[b]);
  }
  for (const DepartureProfile& p : profiles) {
    if (p.departures <= 0.0) continue;
    double z = 0.0;
    for (std::size_t b = 0; b < weights.size(); ++b) z += p.reach[b] * weights[b];
    if (z <= 0.0) return kLogZero;
    q -= p.departures * std::log(z);
  }
  return q;
}

std::vector<double> EstimateJumpWeights(std::span<const double> jump_counts,
                                        std::span<const DepartureProfile> profiles,
                                        std::span<const double> current,
                                        double floor, int max_iterations) {
  const std::size_t num_bins = current.size();
  if (jump_counts.size() != num_bins) {
    throw std::invalid_argument("jump count and weight sizes differ");
  }
  std::vector<double> old(current.begin(), current.end());
  double total = 0.0;
  for (double c : jump_counts) total += c;
  if (total <= 0.0) return old;

  std::vector<double> w = old;
  for (double& v : w) v = std::max(v, floor);
  std::vector<double> denom(num_bins);
  for (int iter = 0; iter < max_iterations; ++iter) {
    std::fill(denom.begin(), denom.end(), 0.0);
    for (const DepartureProfile& p : profiles) {
      if (p.departures <= 0.0) continue;
      double z = 0.0;
      for (std::size_t b = 0; b < num_bins; ++b) z += p.reach[b] * w[b];
      for (std::size_t b = 0; b < num_bins; ++b) {
        denom[b] += p.departures * p.reach[b] / z;
      }
    }
    std::vector<double> next(num_bins);
    double mass = 0.0;
    for (std::size_t b = 0; b < num_bins; ++b) {
      next[b] = denom[b] > 0.0 ? jump_counts[b] / denom[b] : w[b];
      mass += next[b];
    }
    double change = 0.0;
    for (std::size_t b = 0; b < num_bins; ++b) {
      next[b] = std::max(next[b] * total / mass, floor);
      change = std::max(change, std::abs(next[b] - w[b]) / std::max(w[b], 1e-300));
    }
    w.swap(next);
    if (change < 1e-12) break;
  }

  const double q_old = JumpObjective(jump_counts, profiles, old);
  if (JumpObjective(jump_counts, profiles, w) >= q_old) return w;

  // The floor can cost objective relative to the previous weights; step back
  // along the log-space segment until Q no longer decreases.
  std::vector<double> trial(num_bins);
  for (double t = 0.5; t > 1e-9; t *= 0.5) {
    for (std::size_t b = 0; b < num_bins; ++b) {
      const double from = std::log(std::max(old[b], floor));
      trial[b] = std::exp(from + t * (std::log(w[b]) - from));
    }
    if (JumpObjective(jump_counts, profiles, trial) >= q_old) return trial;
  }
  return old;
}

}  // namespace bookalign

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

// Log-space inference for first-order HMMs over abstract states.
//
// A model is described by a start vector, a transition callback and, for
// every observation, the list of states that can emit it (the "lattice").
// States absent from a step's list have zero emission probability there, so
// sparse state spaces never need a K x K matrix. There is no stop
// distribution: every quantity is conditioned on the observation count.

#ifndef BOOKALIGN_HMM_H_
#define BOOKALIGN_HMM_H_

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "bookalign/common.h"

namespace bookalign {

using StateId = std::uint32_t;

struct LatticeStep {
  // Strictly increasing state ids.
  std::vector<StateId> states;
  std::vector<double> log_emission;
};

struct HmmSpec {
  std::size_t num_states = 0;
  // log pi, one entry per state.
  std::vector<double> log_start;
  // log gamma(from -> to); -inf for disallowed moves.
  std::function<double(StateId, StateId)> log_transition;
  std::vector<LatticeStep> steps;

  std::size_t num_observations() const { return steps.size(); }
};

// Builds a spec whose every step lists all states. `log_emission` is
// row-major num_observations x num_states.
std::vector<LatticeStep> DenseLattice(std::size_t num_states,
                                      std::size_t num_observations,
                                      std::span<const double> log_emission);

struct PosteriorTable {
  // posteriors[l][k] = q(z_l = steps[l].states[k] | t)
  std::vector<std::vector<double>> state_posteriors;
  double log_likelihood = kLogZero;
  // The same quantity from the backward pass; agrees to rounding.
  double backward_log_likelihood = kLogZero;
};

// Receives expected transition counts xi(step, from, to) for step >= 1.
using PairVisitor = std::function<void(std::size_t step, StateId from,
                                       StateId to, double probability)>;

// Exact posteriors and log p(t | n). Throws InferenceError naming the
// observation when no state can emit it or no path reaches it.
PosteriorTable ForwardBackward(const HmmSpec& spec,
                               const PairVisitor& visit_pairs = nullptr);

struct ViterbiPath {
  std::vector<StateId> states;
  double log_prob = kLogZero;
};

// Most probable state sequence; ties go to the lower state id.
ViterbiPath Viterbi(const HmmSpec& spec);

// Jump-weight estimation for transitions of the form
//
//   gamma(s -> s') = w[bin(s, s')] / sum_b reach(s, b) * w[b]
//
// where reach(s, b) counts the targets of s that fall in bin b. Both aligners
// use this shape (passage rank differences, token distance bins). Given the
// expected jump count per bin and the expected departures per source profile,
// the M-step maximizes
//
//   Q(w) = sum_b N_b log w_b - sum_s M_s log sum_b reach(s, b) w_b.
struct DepartureProfile {
  std::vector<double> reach;
  double departures = 0.0;
};

double JumpObjective(std::span<const double> jump_counts,
                     std::span<const DepartureProfile> profiles,
                     std::span<const double> weights);

// Minorize-maximize iterations w_b <- N_b / sum_s M_s reach(s,b) / Z_s(w),
// rescaled to total mass sum_b N_b and floored at `floor`. The result never
// has a lower objective than `current`.
std::vector<double> EstimateJumpWeights(std::span<const double> jump_counts,
                                        std::span<const DepartureProfile> profiles,
                                        std::span<const double> current,
                                        double floor, int max_iterations = 200);

}  // namespace bookalign

#endif  // BOOKALIGN_HMM_H_

// Copyright (C) 2026 The fsorf Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "fsorf/e2e_analysis.hpp"
#include "fsorf/fso_link.hpp"
#include "fsorf/irs_rf_link.hpp"

/// Coupled Monte-Carlo simulation of the dual-hop link.
///
/// Trials are grouped in fixed-size blocks; block b always draws from a
/// generator seeded by (seed, b), and block results are reduced in block
/// order, so estimates do not depend on the number of workers.
namespace fsorf::mc {

using Rng = std::mt19937_64;

struct McEstimate {
  double value = 0.0;
  double std_err = 0.0;
  std::int64_t n_samples = 0;
  std::uint64_t seed = 0;
};

enum class PerMode {
  /// Packet error iff the accumulated equivalent SNR is below T0.
  Step,
  /// Bernoulli draw with probability g(accumulated equivalent SNR).
  ExactG,
};

struct McOptions {
  std::int64_t n_samples = 10'000'000;
  std::uint64_t seed = 1;
  /// 0: FSORF_WORKERS from the environment, else hardware concurrency.
  int workers = 0;
  std::int64_t block_size = 1 << 16;
  rf::SnrModel rf_model = rf::SnrModel::ExactCascade;

  void validate() const;
};

/// Worker count after resolving 0 against the environment.
int resolve_workers(int requested);

/// Generator for block `block` of the stream `seed`.
Rng block_rng(std::uint64_t seed, std::uint64_t block);

/// Bernoulli frequency of `trial` with std_err sqrt(p(1-p)/n).
McEstimate estimate_probability(const McOptions& opts, const std::function<bool(Rng&)>& trial);

/// One pass, several thresholds: fraction of trials with min(sum SR, sum RD) below each.
std::vector<McEstimate> simulate_equivalent_cdf(const fso::FsoLinkConfig& fso_cfg, const rf::RfLinkConfig& rf_cfg,
                                                const e2e::HarqConfig& harq, const std::vector<double>& thresholds,
                                                const McOptions& opts);

McEstimate simulate_outage(const fso::FsoLinkConfig& fso_cfg, const rf::RfLinkConfig& rf_cfg,
                           const e2e::HarqConfig& harq, const McOptions& opts);

McEstimate simulate_per(const fso::FsoLinkConfig& fso_cfg, const rf::RfLinkConfig& rf_cfg, const e2e::HarqConfig& harq,
                        const e2e::PerConfig& per, const McOptions& opts, PerMode mode = PerMode::Step);

struct MomentEstimate {
  double second = 0.0;
  double second_err = 0.0;
  double fourth = 0.0;
  double fourth_err = 0.0;
  std::int64_t n_samples = 0;
  std::uint64_t seed = 0;
};

/// Sample moments of |I|^2 and |I|^4 for the cascade sum I.
MomentEstimate estimate_moments(const rf::IrsParams& irs, const McOptions& opts);

}  // namespace fsorf::mc

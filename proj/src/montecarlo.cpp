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

#include "fsorf/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>

namespace fsorf::mc {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

struct Neumaier {
  double sum = 0.0;
  double comp = 0.0;

  void add(double x) {
    const double t = sum + x;
    if (std::fabs(sum) >= std::fabs(x)) {
      comp += (sum - t) + x;
    } else {
      comp += (x - t) + sum;
    }
    sum = t;
  }
  double value() const { return sum + comp; }
};

// Runs fn(rng, count) for every block and returns the block results in block order.
template <class Result, class Fn>
std::vector<Result> run_blocks(const McOptions& opts, Fn fn) {
  opts.validate();
  const std::int64_t blocks = (opts.n_samples + opts.block_size - 1) / opts.block_size;
  std::vector<Result> results(static_cast<std::size_t>(blocks));
  std::atomic<std::int64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_lock;

  auto worker = [&] {
    try {
      for (std::int64_t b = next++; b < blocks; b = next++) {
        const std::int64_t count = std::min(opts.block_size, opts.n_samples - b * opts.block_size);
        Rng rng = block_rng(opts.seed, static_cast<std::uint64_t>(b));
        results[static_cast<std::size_t>(b)] = fn(rng, count);
      }
    } catch (...) {
      const std::lock_guard<std::mutex> guard(failure_lock);
      if (!failure) failure = std::current_exception();
      next = blocks;
    }
  };

  const int workers = static_cast<int>(std::min<std::int64_t>(resolve_workers(opts.workers), blocks));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return results;
}

McEstimate bernoulli(std::int64_t hits, const McOptions& opts) {
  const double n = static_cast<double>(opts.n_samples);
  const double p = static_cast<double>(hits) / n;
  return McEstimate{p, std::sqrt(p * (1.0 - p) / n), opts.n_samples, opts.seed};
}

// Draws the chase-combined SNR of both hops for one trial.
class HopSampler {
 public:
  HopSampler(const fso::FsoLinkConfig& fso_cfg, const rf::RfLinkConfig& rf_cfg, const e2e::HarqConfig& harq,
             rf::SnrModel model)
      : fso_(fso_cfg), rf_(rf_cfg, model), n1_(harq.rounds_n1), n2_(harq.rounds_n2) {
    fso_cfg.validate();
    harq.validate();
  }

  double equivalent(Rng& rng) const {
    double sr = 0.0;
    for (int i = 0; i < n1_; ++i) sr += fso::sample_snr(fso_, rng);
    double rd = 0.0;
    for (int i = 0; i < n2_; ++i) rd += rf_(rng);
    return std::min(sr, rd);
  }

 private:
  fso::FsoLinkConfig fso_;
  rf::RfSnrSampler rf_;
  int n1_;
  int n2_;
};

}  // namespace

void McOptions::validate() const {
  if (n_samples < 1) throw std::invalid_argument("mc.n_samples must be at least 1");
  if (block_size < 1) throw std::invalid_argument("mc.block_size must be at least 1");
  if (workers < 0) throw std::invalid_argument("mc.workers must be nonnegative");
}

int resolve_workers(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("FSORF_WORKERS")) {
    const int parsed = std::atoi(env);
    if (parsed > 0) return parsed;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

Rng block_rng(std::uint64_t seed, std::uint64_t block) {
  std::uint64_t state = seed;
  state = splitmix64(state) + block;
  std::uint32_t words[8];
  for (int i = 0; i < 4; ++i) {
    const std::uint64_t w = splitmix64(state);
    words[2 * i] = static_cast<std::uint32_t>(w);
    words[2 * i + 1] = static_cast<std::uint32_t>(w >> 32);
  }
  std::seed_seq seq(std::begin(words), std::end(words));
  return Rng(seq);
}

McEstimate estimate_probability(const McOptions& opts, const std::function<bool(Rng&)>& trial) {
  const auto blocks = run_blocks<std::int64_t>(opts, [&](Rng& rng, std::int64_t count) {
    std::int64_t hits = 0;
    for (std::int64_t i = 0; i < count; ++i) hits += trial(rng) ? 1 : 0;
    return hits;
  });
  std::int64_t hits = 0;
  for (std::int64_t h : blocks) hits += h;
  return bernoulli(hits, opts);
}

std::vector<McEstimate> simulate_equivalent_cdf(const fso::FsoLinkConfig& fso_cfg, const rf::RfLinkConfig& rf_cfg,
                                                const e2e::HarqConfig& harq, const std::vector<double>& thresholds,
                                                const McOptions& opts) {
  const HopSampler sampler(fso_cfg, rf_cfg, harq, opts.rf_model);
  const auto blocks = run_blocks<std::vector<std::int64_t>>(opts, [&](Rng& rng, std::int64_t count) {
    std::vector<std::int64_t> hits(thresholds.size(), 0);
    for (std::int64_t i = 0; i < count; ++i) {
      const double z = sampler.equivalent(rng);
      for (std::size_t k = 0; k < thresholds.size(); ++k) hits[k] += z < thresholds[k] ? 1 : 0;
    }
    return hits;
  });
  std::vector<McEstimate> out;
  out.reserve(thresholds.size());
  for (std::size_t k = 0; k < thresholds.size(); ++k) {
    std::int64_t hits = 0;
    for (const auto& b : blocks) hits += b[k];
    out.push_back(bernoulli(hits, opts));
  }
  return out;
}

McEstimate simulate_outage(const fso::FsoLinkConfig& fso_cfg, const rf::RfLinkConfig& rf_cfg,
                           const e2e::HarqConfig& harq, const McOptions& opts) {
  return simulate_equivalent_cdf(fso_cfg, rf_cfg, harq, {harq.snr_threshold()}, opts).front();
}

McEstimate simulate_per(const fso::FsoLinkConfig& fso_cfg, const rf::RfLinkConfig& rf_cfg, const e2e::HarqConfig& harq,
                        const e2e::PerConfig& per, const McOptions& opts, PerMode mode) {
  const double t0 = per.t0();
  const HopSampler sampler(fso_cfg, rf_cfg, harq, opts.rf_model);
  const int bits = per.packet_bits;
  // Both modes consume the same stream, so mode comparisons share their draws.
  return estimate_probability(opts, [&](Rng& rng) {
    const double z = sampler.equivalent(rng);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double u = unit(rng);
    return mode == PerMode::Step ? z < t0 : u < e2e::packet_error(z, bits);
  });
}

MomentEstimate estimate_moments(const rf::IrsParams& irs, const McOptions& opts) {
  irs.validate();
  struct Sums {
    Neumaier p2, p4, p8;
  };
  const auto blocks = run_blocks<Sums>(opts, [&](Rng& rng, std::int64_t count) {
    Sums s;
    for (std::int64_t i = 0; i < count; ++i) {
      const double p = std::norm(rf::sample_cascade_gain(irs, rng));
      const double p2 = p * p;
      s.p2.add(p);
      s.p4.add(p2);
      s.p8.add(p2 * p2);
    }
    return s;
  });
  Neumaier p2, p4, p8;
  for (const Sums& s : blocks) {
    p2.add(s.p2.value());
    p4.add(s.p4.value());
    p8.add(s.p8.value());
  }
  const double n = static_cast<double>(opts.n_samples);
  MomentEstimate out;
  out.second = p2.value() / n;
  out.fourth = p4.value() / n;
  out.second_err = std::sqrt(std::max(0.0, out.fourth - out.second * out.second) / n);
  out.fourth_err = std::sqrt(std::max(0.0, p8.value() / n - out.fourth * out.fourth) / n);
  out.n_samples = opts.n_samples;
  out.seed = opts.seed;
  return out;
}

}  // namespace fsorf::mc

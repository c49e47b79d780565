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
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fsorf/e2e_analysis.hpp"
#include "fsorf/montecarlo.hpp"

namespace fsorf::cli {

/// Invalid configuration; field() names the offending key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message);
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

enum class RdReference {
  /// rf.snr_db is the mean per-round SNR at the destination.
  Mean,
  /// rf.snr_db is gamma0; the mean is M^2 gamma0 (d1 d2)^-nu.
  Transmit,
};

enum class RunMode { Analytic, MonteCarlo, Both };

struct SweepAxis {
  std::string variable = "fso.snr_db";
  double start = 0.0;
  double stop = 60.0;
  int points = 13;
  bool log_scale = false;
  std::vector<double> values() const;
};

struct ExperimentConfig {
  std::string label = "sweep";
  fso::FsoLinkConfig fso;
  rf::IrsParams irs;
  double rd_snr_db = 50.0;
  RdReference rd_reference = RdReference::Transmit;
  e2e::HarqConfig harq;
  e2e::PerConfig per;
  SweepAxis sweep;
  RunMode mode = RunMode::Analytic;
  mc::McOptions mc;
  std::string output = "-";

  void validate() const;
  fso::FsoLinkConfig fso_link() const;
  rf::RfLinkConfig rf_link() const;
};

/// Every recognised key, in header order.
const std::vector<std::string>& config_keys();
void set_value(ExperimentConfig& cfg, const std::string& key, const std::string& value);
std::string get_value(const ExperimentConfig& cfg, const std::string& key);
/// "key=value".
void apply_assignment(ExperimentConfig& cfg, const std::string& assignment);
/// One assignment per line; blank lines and lines starting with '#' are skipped.
void apply_file(ExperimentConfig& cfg, const std::string& path);

struct SweepRow {
  int index = 0;
  double x = 0.0;
  std::optional<e2e::E2eResult> analytic;
  std::optional<mc::McEstimate> mc_op;
  std::optional<mc::McEstimate> mc_per;
  double t0 = 0.0;
};

struct SweepTable {
  ExperimentConfig config;
  std::vector<SweepRow> rows;
};

/// Points are evaluated concurrently; rows come back in sweep order.
SweepTable run_sweep(const ExperimentConfig& cfg);

struct Figure {
  std::string id;
  std::string title;
  std::vector<ExperimentConfig> curves;
  /// Parameters not stated for the figure and filled from defaults.
  std::vector<std::string> defaulted;
};

const std::vector<std::string>& figure_ids();
Figure figure_preset(const std::string& id);

struct Claim {
  std::string description;
  bool pass = false;
  std::string detail;
};

std::vector<Claim> check_figure(const Figure& fig, const std::vector<SweepTable>& tables);

std::string version();
void write_csv(std::ostream& os, const std::vector<SweepTable>& tables, const std::vector<std::string>& notes = {});

struct ValidationOptions {
  std::int64_t samples = 1'000'000;
  /// Exact-cascade trials per point; 0 skips the surrogate-approximation section.
  std::int64_t exact_samples = 0;
  std::uint64_t seed = 1;
  int workers = 0;
  /// Points whose analytic value is below this are reported but not judged.
  double min_probability = 1e-4;
  double z = 3.0;
  double exact_rel_tol = 0.10;
  /// Extra allowance for the exact section in multiples of its standard error.
  double exact_noise_se = 3.0;
};

struct ValidationRow {
  std::string check;
  std::string point;
  double analytic = 0.0;
  double simulated = 0.0;
  double std_err = 0.0;
  double tolerance = 0.0;
  bool judged = true;
  bool pass = true;
};

std::vector<ValidationRow> run_validation(const ValidationOptions& opts);
void print_validation(std::ostream& os, const std::vector<ValidationRow>& rows);
bool all_passed(const std::vector<ValidationRow>& rows);

}  // namespace fsorf::cli

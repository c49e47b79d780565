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

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "experiment.hpp"

using namespace fsorf;
using namespace fsorf::cli;

TEST_CASE("every key round-trips through its text form") {
  const ExperimentConfig cfg;
  ExperimentConfig copy;
  copy.fso.turb.a = 9.0;
  for (const std::string& k : config_keys()) set_value(copy, k, get_value(cfg, k));
  for (const std::string& k : config_keys()) CHECK(get_value(copy, k) == get_value(cfg, k));
  CHECK(copy.fso.turb.a == cfg.fso.turb.a);
}

TEST_CASE("defaults") {
  const ExperimentConfig cfg;
  CHECK(cfg.fso.turb.a == 2.064);
  CHECK(cfg.fso.turb.b == 1.342);
  CHECK(get_value(cfg, "fso.xi") == "1.2");
  CHECK(cfg.fso.point.A0 == 1.0);
  CHECK(cfg.irs.m_reflectors == 128);
  CHECK(cfg.irs.pathloss_exp == 2.6);
  CHECK(cfg.irs.d1_m == 10.0);
  CHECK(cfg.irs.d2_m == 10.0);
  CHECK(cfg.harq.rate_bpshz == 1.0);
  CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("diagnostics name the field") {
  ExperimentConfig cfg;
  auto field_of = [](auto&& f) -> std::string {
    try {
      f();
    } catch (const ConfigError& e) {
      return e.field();
    }
    return "";
  };
  CHECK(field_of([&] { set_value(cfg, "fso.a", "abc"); }) == "fso.a");
  CHECK(field_of([&] { set_value(cfg, "rf.M", "2.5"); }) == "rf.M");
  CHECK(field_of([&] { set_value(cfg, "nope", "1"); }) == "nope");
  CHECK(field_of([&] { set_value(cfg, "fso.detection", "coherent"); }) == "fso.detection");
  CHECK(field_of([&] { apply_assignment(cfg, "fso.a"); }) == "fso.a");
  ExperimentConfig bad;
  bad.irs.m_reflectors = 0;
  CHECK(field_of([&] { bad.validate(); }) == "rf.M");
  bad = ExperimentConfig{};
  bad.fso.point.xi2 = -1.0;
  CHECK(field_of([&] { bad.validate(); }) == "fso.xi");
  bad = ExperimentConfig{};
  bad.sweep.points = 1;
  CHECK(field_of([&] { bad.validate(); }) == "sweep.points");
  bad = ExperimentConfig{};
  bad.sweep.variable = "fso.detection";
  CHECK(field_of([&] { bad.validate(); }) == "sweep.variable");
  bad = ExperimentConfig{};
  bad.sweep.log_scale = true;
  CHECK(field_of([&] { bad.validate(); }) == "sweep.scale");
}

TEST_CASE("file then overrides") {
  const std::string path = "test_cli_config.txt";
  {
    std::ofstream out(path);
    out << "# comment\n\nfso.a = 2.296\nfso.b=1.822\nrf.M=64\n";
  }
  ExperimentConfig cfg;
  apply_file(cfg, path);
  apply_assignment(cfg, "rf.M=32");
  CHECK(cfg.fso.turb.a == 2.296);
  CHECK(cfg.fso.turb.b == 1.822);
  CHECK(cfg.irs.m_reflectors == 32);
  std::remove(path.c_str());
  CHECK_THROWS_AS(apply_file(cfg, path), ConfigError);
}

TEST_CASE("sweep axis") {
  SweepAxis lin{"fso.snr_db", 0.0, 60.0, 13, false};
  const auto v = lin.values();
  CHECK(v.size() == 13);
  CHECK(v[1] == doctest::Approx(5.0));
  CHECK(v.back() == 60.0);
  SweepAxis log{"rf.M", 16.0, 256.0, 5, true};
  const auto m = log.values();
  CHECK(m[2] == doctest::Approx(64.0));
}

TEST_CASE("rf reference modes") {
  ExperimentConfig cfg;
  cfg.rd_snr_db = 25.0;
  cfg.rd_reference = RdReference::Mean;
  CHECK(10.0 * std::log10(cfg.rf_link().mean_snr()) == doctest::Approx(25.0));
  cfg.rd_reference = RdReference::Transmit;
  const double expect = 25.0 + 20.0 * std::log10(128.0) - 2.6 * 10.0 * std::log10(100.0);
  CHECK(10.0 * std::log10(cfg.rf_link().mean_snr()) == doctest::Approx(expect));
}

TEST_CASE("sweep table and CSV schema") {
  ExperimentConfig cfg;
  cfg.sweep = {"rf.M", 16.0, 256.0, 5, true};
  cfg.fso.mean_snr_db = 45.0;
  cfg.rd_snr_db = 25.0;
  cfg.mc.workers = 3;
  const SweepTable t = run_sweep(cfg);
  REQUIRE(t.rows.size() == 5);
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    CHECK(t.rows[i].index == static_cast<int>(i));
    CHECK(t.rows[i].x == 16.0 * std::pow(2.0, static_cast<double>(i)));
    CHECK(t.rows[i].analytic.has_value());
    CHECK_FALSE(t.rows[i].mc_op.has_value());
  }
  std::ostringstream os;
  write_csv(os, {t}, {"a note"});
  const std::string csv = os.str();
  CHECK(csv.rfind("# fsorf ", 0) == 0);
  CHECK(csv.find("# note: a note") != std::string::npos);
  for (const std::string& k : config_keys()) CHECK(csv.find(" " + k + "=") != std::string::npos);
  std::istringstream lines(csv);
  std::string line;
  int data = 0;
  bool header = false;
  while (std::getline(lines, line)) {
    if (line[0] == '#') continue;
    if (!header) {
      CHECK(line.rfind("curve,index,x,op,per,", 0) == 0);
      header = true;
      continue;
    }
    ++data;
    std::istringstream fields(line);
    std::string f;
    std::getline(fields, f, ',');
    std::getline(fields, f, ',');
    CHECK(std::stoi(f) == data - 1);
    std::getline(fields, f, ',');
    std::getline(fields, f, ',');
    // mantissa digits of the OP column
    CHECK(f.find('e') - f.find('.') - 1 >= 9);
  }
  CHECK(data == 5);

  ExperimentConfig one = cfg;
  one.mc.workers = 1;
  CHECK(run_sweep(one).rows[3].analytic->op == t.rows[3].analytic->op);
}

TEST_CASE("monte-carlo columns") {
  ExperimentConfig cfg;
  cfg.sweep = {"fso.snr_db", 10.0, 20.0, 2, false};
  cfg.rd_reference = RdReference::Mean;
  cfg.rd_snr_db = 5.0;
  cfg.mode = RunMode::Both;
  cfg.mc.n_samples = 200000;
  cfg.mc.rf_model = rf::SnrModel::NakagamiSurrogate;
  const SweepTable t = run_sweep(cfg);
  for (const SweepRow& r : t.rows) {
    REQUIRE(r.mc_op.has_value());
    CHECK(std::fabs(r.mc_op->value - r.analytic->op) <= 4.0 * r.mc_op->std_err + 1e-12);
    CHECK(std::fabs(r.mc_per->value - r.analytic->per) <= 4.0 * r.mc_per->std_err + 1e-12);
  }
}

TEST_CASE("figure presets") {
  CHECK(figure_ids().size() == 5);
  const Figure f4 = figure_preset("fig4");
  REQUIRE_FALSE(f4.curves.empty());
  CHECK(f4.curves.front().sweep.variable == "rf.kappa");
  CHECK(f4.curves.front().fso.mean_snr_db == 45.0);
  CHECK(f4.curves.front().rd_snr_db == 40.0);
  const Figure f5 = figure_preset("fig5");
  CHECK(f5.curves.front().per.packet_bits == 1024);
  CHECK(f5.curves.front().rd_snr_db == 45.0);
  CHECK(f5.curves.front().fso.detection == fso::DetectionMode::IntensityModulation);
  const Figure f3 = figure_preset("fig3");
  CHECK(f3.curves.front().sweep.start == 16.0);
  CHECK(f3.curves.front().sweep.stop == 256.0);
  CHECK(f3.curves.front().sweep.log_scale);
  for (const std::string& id : figure_ids()) {
    const Figure f = figure_preset(id);
    CHECK_FALSE(f.defaulted.empty());
    for (const ExperimentConfig& c : f.curves) CHECK_NOTHROW(c.validate());
  }
  CHECK_THROWS_AS(figure_preset("fig9"), ConfigError);
}

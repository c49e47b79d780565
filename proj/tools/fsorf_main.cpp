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
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "experiment.hpp"
#include "fsorf/irs_rf_link.hpp"
#include "fsorf/montecarlo.hpp"

using namespace fsorf;

namespace {

struct Overrides {
  std::string config_file;
  std::vector<std::string> assignments;
  std::string output;
  int workers = -1;
  std::string mode;
  std::int64_t samples = 0;
  std::int64_t seed = -1;
};

void add_overrides(CLI::App* cmd, Overrides& o) {
  cmd->add_option("-c,--config", o.config_file, "key=value configuration file")->check(CLI::ExistingFile);
  cmd->add_option("-s,--set", o.assignments, "key=value override, repeatable");
  cmd->add_option("-o,--output", o.output, "CSV path, - for stdout");
  cmd->add_option("-w,--workers", o.workers, "worker threads (0: FSORF_WORKERS or hardware)");
  cmd->add_option("-m,--mode", o.mode, "analytic|mc|both");
  cmd->add_option("-n,--samples", o.samples, "Monte-Carlo samples per point");
  cmd->add_option("--seed", o.seed, "Monte-Carlo seed");
}

void apply(cli::ExperimentConfig& cfg, const Overrides& o) {
  if (!o.config_file.empty()) cli::apply_file(cfg, o.config_file);
  for (const std::string& a : o.assignments) cli::apply_assignment(cfg, a);
  if (!o.output.empty()) cfg.output = o.output;
  if (o.workers >= 0) cli::set_value(cfg, "mc.workers", std::to_string(o.workers));
  if (!o.mode.empty()) cli::set_value(cfg, "run.mode", o.mode);
  if (o.samples > 0) cli::set_value(cfg, "mc.samples", std::to_string(o.samples));
  if (o.seed >= 0) cli::set_value(cfg, "mc.seed", std::to_string(o.seed));
}

void emit(const std::string& path, const std::vector<cli::SweepTable>& tables, const std::vector<std::string>& notes) {
  if (path == "-") {
    cli::write_csv(std::cout, tables, notes);
    return;
  }
  std::ofstream out(path);
  if (!out) throw cli::ConfigError("output", "cannot write '" + path + "'");
  cli::write_csv(out, tables, notes);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dual-hop FSO / IRS-RF outage and packet error evaluator"};
  app.set_version_flag("--version", cli::version());
  app.require_subcommand(1);

  Overrides sweep_o;
  std::string var;
  double start = std::nan(""), stop = std::nan("");
  int points = 0;
  bool log_scale = false;
  auto* sweep = app.add_subcommand("sweep", "Sweep one configuration key and write a CSV table");
  add_overrides(sweep, sweep_o);
  sweep->add_option("--var", var, "key to sweep, e.g. fso.snr_db");
  sweep->add_option("--start", start);
  sweep->add_option("--stop", stop);
  sweep->add_option("--points", points);
  sweep->add_flag("--log", log_scale, "log-spaced sweep");

  Overrides fig_o;
  std::string fig_id;
  bool check = false;
  auto* figure = app.add_subcommand("figure", "Run a figure preset (fig2..fig6)");
  figure->add_option("id", fig_id)->required()->check(CLI::IsMember(cli::figure_ids()));
  add_overrides(figure, fig_o);
  figure->add_flag("--check", check, "verify the qualitative claims; nonzero exit on failure");

  rf::IrsParams irs;
  std::string fading = "rician-rayleigh";
  std::int64_t fit_samples = 0;
  auto* fit = app.add_subcommand("fit-nakagami", "Moment-matched Nakagami surrogate of the IRS cascade");
  fit->add_option("-M,--reflectors", irs.m_reflectors);
  fit->add_option("-k,--kappa", irs.kappa);
  fit->add_option("--rician-k", irs.rician_k);
  fit->add_option("--fading", fading)->check(CLI::IsMember({"rician-rayleigh", "los"}));
  fit->add_option("-n,--samples", fit_samples, "also estimate the moments by sampling");

  cli::ValidationOptions vopts;
  auto* validate = app.add_subcommand("validate", "Closed forms against Monte-Carlo simulation");
  validate->add_option("-n,--samples", vopts.samples);
  validate->add_option("--exact-samples", vopts.exact_samples, "exact-cascade trials per point, 0 skips");
  validate->add_option("--seed", vopts.seed);
  validate->add_option("-w,--workers", vopts.workers);

  int bits = 1024;
  std::string rule = "tanh-sinh";
  auto* t0 = app.add_subcommand("t0", "Waterfall threshold for BPSK packets");
  t0->add_option("-L,--packet-bits", bits)->required();
  t0->add_option("--rule", rule)->check(CLI::IsMember({"tanh-sinh", "gauss-kronrod"}));

  auto* keys = app.add_subcommand("keys", "List configuration keys with their defaults");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sweep) {
      cli::ExperimentConfig cfg;
      apply(cfg, sweep_o);
      if (!var.empty()) cfg.sweep.variable = var;
      if (!std::isnan(start)) cfg.sweep.start = start;
      if (!std::isnan(stop)) cfg.sweep.stop = stop;
      if (points != 0) cfg.sweep.points = points;
      if (log_scale) cfg.sweep.log_scale = true;
      emit(cfg.output, {cli::run_sweep(cfg)}, {});
    } else if (*figure) {
      cli::Figure fig = cli::figure_preset(fig_id);
      std::vector<cli::SweepTable> tables;
      for (cli::ExperimentConfig& c : fig.curves) {
        apply(c, fig_o);
        tables.push_back(cli::run_sweep(c));
      }
      std::vector<std::string> notes = {fig.id + ": " + fig.title};
      for (const std::string& d : fig.defaulted) notes.push_back("defaulted: " + d);
      emit(fig.curves.front().output, tables, notes);
      if (check) {
        bool ok = true;
        for (const cli::Claim& c : cli::check_figure(fig, tables)) {
          std::cerr << (c.pass ? "PASS " : "FAIL ") << c.description << "  (" << c.detail << ")\n";
          ok = ok && c.pass;
        }
        return ok ? 0 : 1;
      }
    } else if (*fit) {
      irs.fading = fading == "los" ? rf::FadingModel::LineOfSight : rf::FadingModel::RicianRayleigh;
      irs.validate();
      const rf::NakagamiFit f = rf::fit_nakagami(irs);
      const rf::SumMoments m = rf::cascade_sum_moments(irs);
      std::printf("M=%d\nkappa=%.17g\nrician_k=%.17g\nm=%.12e\nmu2=%.12e\nE|I|^2=%.12e\nE|I|^4=%.12e\n", irs.m_reflectors,
                  irs.kappa, irs.rician_k, f.m_shape, f.mu2, m.second, m.fourth);
      if (f.single_reflector) std::printf("# single reflector: the surrogate is a moment fit only\n");
      if (fit_samples > 0) {
        mc::McOptions o;
        o.n_samples = fit_samples;
        const mc::MomentEstimate e = mc::estimate_moments(irs, o);
        std::printf("mc.E|I|^2=%.12e +- %.3e\nmc.E|I|^4=%.12e +- %.3e\n", e.second, e.second_err, e.fourth,
                    e.fourth_err);
      }
    } else if (*validate) {
      const std::vector<cli::ValidationRow> rows = cli::run_validation(vopts);
      cli::print_validation(std::cout, rows);
      const bool ok = cli::all_passed(rows);
      std::cout << (ok ? "validation passed" : "validation FAILED") << "\n";
      return ok ? 0 : 1;
    } else if (*t0) {
      e2e::PerConfig per;
      per.packet_bits = bits;
      per.validate();
      const double v = e2e::waterfall_threshold(
          per, rule == "tanh-sinh" ? e2e::QuadratureRule::TanhSinh : e2e::QuadratureRule::GaussKronrod);
      std::printf("packet_bits=%d\nt0=%.17g\nt0_db=%.12f\n", bits, v, 10.0 * std::log10(v));
    } else if (*keys) {
      const cli::ExperimentConfig cfg;
      for (const std::string& k : cli::config_keys()) std::cout << k << "=" << cli::get_value(cfg, k) << "\n";
    }
  } catch (const cli::ConfigError& e) {
    std::cerr << "config error [" << e.field() << "] " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}

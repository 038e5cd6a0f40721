#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hiphome/geometry.hpp"
#include "hiphome/metrics.hpp"
#include "hiphome/modal_basis.hpp"
#include "hiphome/parallel.hpp"
#include "hiphome/velocity.hpp"

namespace hiphome {

// Time-integration block; a config without one describes a steady study.
// Snapshot instants must be multiples of dt and lie in (0, horizon].
struct TimeConfig {
  double theta = 1.0;
  double dt = 0.0;
  double horizon = 0.0;
  std::vector<double> snapshots;
};

struct GridSpec {
  int nx = 0;
  int nz = 0;
};

// Complete description of one study: geometry, physics, sweeps, reference
// and evaluation resolutions.  Loadable from a single JSON document; the
// shipped presets are config files, not code paths.
struct ExperimentConfig {
  std::string name = "custom";
  ChannelDomain domain = make_domain(2.0, 0.2, 0.2);
  VelocityProfile profile = VelocityProfile::constant(1.0);
  // Source path when the profile is tabulated; a tabulated profile built
  // programmatically has no path and cannot be serialised back to JSON.
  std::string profile_csv;

  double diffusion = 1.0;
  double reaction = 0.0;
  double forcing = 0.0;
  double inlet_value = 1.0;
  double initial_value = 0.0;

  std::vector<int> m_list;
  std::vector<double> h_list;
  int corrector_panels = 2048;
  int quadrature_panels = 1024;
  std::vector<BasisFamily> families{BasisFamily::HiPhome, BasisFamily::Educated};
  GridSpec reference{801, 81};
  GridSpec error_grid{801, 81};
  std::optional<TimeConfig> time;

  std::string output_dir = "out";
  // Wall times are recorded only when true; the default keeps CSV bodies
  // free of timing noise so repeated runs are byte-identical.
  bool timing = false;
  bool dump_fields = false;

  ProblemData problem() const;
};

std::vector<std::string> preset_names();
ExperimentConfig preset_config(const std::string& name);

// JSON round trip.  parse_config throws ConfigError with the offending key;
// config_to_json is canonical (fixed key order, LF terminated) so that a
// shipped preset file can be compared byte-for-byte against its factory.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);
std::string config_to_json(const ExperimentConfig& cfg);
void save_config(const ExperimentConfig& cfg, const std::string& path);

// Structural checks beyond parsing: non-empty sweeps, odd evaluation grid,
// snapshots aligned to the time step.  Throws ConfigError.
void validate_config(const ExperimentConfig& cfg);

// Least-squares rate fitted over the pre-plateau prefix of one sweep line:
// axis "m" holds h fixed (slope of error vs mode count), axis "h" holds m
// fixed (slope of error vs mesh size).
struct RateSummary {
  std::string family;
  std::string axis;
  double at = 0.0;
  double slope = 0.0;
  int points = 0;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<ErrorRecord> records;
  std::vector<RateSummary> rates;
  double reference_norm = 0.0;
  double reference_wall_ms = 0.0;
};

// Runs the full sweep against a single reference solve.  Sweep points
// execute in a dynamic work pool over immutable shared inputs; records are
// stored in sweep order regardless of scheduling.  On a sweep-point
// failure the completed records are flushed to disk before the error is
// rethrown with the offending point identified.
ExperimentReport run_experiment(const ExperimentConfig& cfg, Exec exec = Exec::Parallel);

// Deterministic emission: header family,m,h,dt,t,l2_error,qoi_error,wall_ms,
// one row per record, 17 significant digits, LF endings.
std::string records_csv(const std::vector<ErrorRecord>& records);
std::string report_json(const ExperimentReport& report);

// Writes errors.csv and summary.json under config.output_dir.
void write_report(const ExperimentReport& report);

// Per-family mode traces (zhat, value, derivative) on a uniform grid of
// [0, 1], long format, one file per family.  A degenerate profile is
// reported on the returned note and the dump truncates to the surviving
// modes instead of failing.
std::string dump_basis(const ExperimentConfig& cfg, const std::string& dir);

// Corrector traces chi_i(y) on the transverse grid plus the effective
// coefficients; returns a one-line summary.
std::string dump_correctors(const ExperimentConfig& cfg, const std::string& dir);

// Invariant suite: closed-form oracles, orthonormality, degenerate-profile
// contracts, record ordering, and byte-identical CSV bodies across serial,
// parallel, and repeated runs.  Prints one line per check to stdout and
// returns the number of failures.
int run_selftest(const std::string& out_dir);

}  // namespace hiphome

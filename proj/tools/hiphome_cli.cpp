// Command-line front end: preset or JSON-config driven sweeps, basis and
// corrector dumps, and the determinism/invariant selftest.
#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "hiphome/errors.hpp"
#include "hiphome/experiment.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  std::string preset;
  std::string out;
  std::vector<int> m_override;
  std::vector<double> h_override;
  std::string family = "both";
  int threads = 0;
  bool timing = false;
  bool dump_fields = false;
};

void add_common(CLI::App* sub, CommonFlags& f) {
  // The mesh-size flag is literally --h, so help keeps only its long form.
  sub->set_help_flag("--help", "print help");
  sub->add_option("--config", f.config_path, "JSON config file");
  sub->add_option("--preset", f.preset, "named preset (see --help-presets)");
  sub->add_option("--out", f.out, "output directory override");
  sub->add_option("--m", f.m_override, "mode-count sweep override")->delimiter(',');
  sub->add_option("--h", f.h_override, "mesh-size sweep override")->delimiter(',');
  sub->add_option("--family", f.family, "hiphome | educated | both")
      ->check(CLI::IsMember({"hiphome", "educated", "both"}));
  sub->add_option("--threads", f.threads, "parallelism degree (default: all cores)");
  sub->add_flag("--timing", f.timing, "record wall times (breaks byte-reproducibility)");
  sub->add_flag("--dump-fields", f.dump_fields, "write field CSVs on the evaluation lattice");
}

hiphome::ExperimentConfig resolve_config(const CommonFlags& f) {
  using hiphome::ConfigError;
  if (!f.config_path.empty() && !f.preset.empty())
    throw ConfigError("pass either --config or --preset, not both");
  if (f.config_path.empty() && f.preset.empty())
    throw ConfigError("one of --config or --preset is required");
  hiphome::ExperimentConfig cfg = f.config_path.empty()
                                      ? hiphome::preset_config(f.preset)
                                      : hiphome::load_config(f.config_path);
  if (!f.out.empty()) cfg.output_dir = f.out;
  if (!f.m_override.empty()) cfg.m_list = f.m_override;
  if (!f.h_override.empty()) cfg.h_list = f.h_override;
  if (f.family == "hiphome")
    cfg.families = {hiphome::BasisFamily::HiPhome};
  else if (f.family == "educated")
    cfg.families = {hiphome::BasisFamily::Educated};
  if (f.timing) cfg.timing = true;
  if (f.dump_fields) cfg.dump_fields = true;
  return cfg;
}

int exit_code_for_current_exception() {
  try {
    throw;
  } catch (const hiphome::ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const hiphome::IoError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const hiphome::ArgumentError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const hiphome::Error& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 3;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hiphome: transport in thin channels via corrector-adapted modal reduction"};
  app.set_help_flag("--help", "print help");
  app.require_subcommand(1);

  CommonFlags run_flags, basis_flags, corr_flags;
  std::string selftest_out = "out/selftest";
  int selftest_threads = 0;

  CLI::App* run = app.add_subcommand("run", "execute a sweep and write errors.csv");
  add_common(run, run_flags);
  CLI::App* basis = app.add_subcommand("dump-basis", "write per-family mode traces");
  add_common(basis, basis_flags);
  CLI::App* corr = app.add_subcommand("dump-correctors", "write corrector traces");
  add_common(corr, corr_flags);
  CLI::App* self = app.add_subcommand("selftest", "run the invariant suite");
  self->add_option("--out", selftest_out, "output directory");
  self->add_option("--threads", selftest_threads, "parallelism degree");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int r = app.exit(e);
    return r == 0 ? 0 : 2;
  }

  try {
    if (run->parsed()) {
      hiphome::set_threads(run_flags.threads);
      hiphome::ExperimentConfig cfg = resolve_config(run_flags);
      hiphome::ExperimentReport report = hiphome::run_experiment(cfg);
      std::printf("wrote %s/errors.csv (%zu records, reference norm %.6g)\n",
                  cfg.output_dir.c_str(), report.records.size(), report.reference_norm);
      for (const hiphome::RateSummary& r : report.rates)
        std::printf("rate family=%s axis=%s at=%g: slope %.3f over %d points\n",
                    r.family.c_str(), r.axis.c_str(), r.at, r.slope, r.points);
    } else if (basis->parsed()) {
      hiphome::set_threads(basis_flags.threads);
      hiphome::ExperimentConfig cfg = resolve_config(basis_flags);
      const std::string dir = basis_flags.out.empty() ? cfg.output_dir : basis_flags.out;
      const std::string note = hiphome::dump_basis(cfg, dir);
      if (!note.empty()) std::printf("%s", note.c_str());
      std::printf("wrote %s/basis_<family>.csv\n", dir.c_str());
    } else if (corr->parsed()) {
      hiphome::set_threads(corr_flags.threads);
      hiphome::ExperimentConfig cfg = resolve_config(corr_flags);
      const std::string dir = corr_flags.out.empty() ? cfg.output_dir : corr_flags.out;
      const std::string summary = hiphome::dump_correctors(cfg, dir);
      std::printf("%s\nwrote %s/correctors.csv\n", summary.c_str(), dir.c_str());
    } else if (self->parsed()) {
      hiphome::set_threads(selftest_threads);
      const int fails = hiphome::run_selftest(selftest_out);
      std::printf("selftest: %d failure%s\n", fails, fails == 1 ? "" : "s");
      return fails == 0 ? 0 : 1;
    }
  } catch (...) {
    return exit_code_for_current_exception();
  }
  return 0;
}

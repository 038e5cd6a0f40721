#include "hiphome/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <memory>
#include <set>
#include <sstream>

#include "json.hpp"

#include "hiphome/corrector.hpp"
#include "hiphome/errors.hpp"
#include "hiphome/reduced_solver.hpp"
#include "hiphome/reference2d.hpp"

namespace hiphome {

namespace {

using njson = nlohmann::ordered_json;

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_short(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

void write_text(const std::filesystem::path& path, const std::string& body) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << body;
  out.flush();
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

// Strict schema: an unknown key is a config error, not a silent default.
void check_keys(const njson& obj, std::initializer_list<const char*> allowed,
                const std::string& where) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* k : allowed)
      if (item.key() == k) known = true;
    if (!known) throw ConfigError("config: unknown key '" + item.key() + "' in " + where);
  }
}

double num_field(const njson& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) throw ConfigError("config: missing key '" + where + "." + key + "'");
  if (!obj.at(key).is_number())
    throw ConfigError("config: key '" + where + "." + key + "' must be a number");
  return obj.at(key).get<double>();
}

int int_field(const njson& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) throw ConfigError("config: missing key '" + where + "." + key + "'");
  if (!obj.at(key).is_number_integer())
    throw ConfigError("config: key '" + where + "." + key + "' must be an integer");
  return obj.at(key).get<int>();
}

double loglaw_default_shift(double kappa, double offset) { return -std::log(offset) / kappa; }

njson profile_to_json(const ExperimentConfig& cfg) {
  const VelocityProfile& p = cfg.profile;
  njson j;
  switch (p.kind()) {
    case ProfileKind::Constant:
      j["kind"] = "constant";
      j["value"] = p.param_value;
      break;
    case ProfileKind::LinearShear:
      j["kind"] = "linear_shear";
      j["shear"] = p.param_shear;
      break;
    case ProfileKind::Poiseuille:
      j["kind"] = "poiseuille";
      j["v_mean"] = p.param_value;
      break;
    case ProfileKind::LogLaw:
      j["kind"] = "loglaw";
      j["kappa"] = p.param_kappa;
      j["offset"] = p.param_offset;
      if (p.param_shift != loglaw_default_shift(p.param_kappa, p.param_offset))
        j["shift"] = p.param_shift;
      break;
    case ProfileKind::Tabulated:
      if (cfg.profile_csv.empty())
        throw ConfigError("config: tabulated profile without a source path is not serialisable");
      j["kind"] = "tabulated";
      j["csv"] = cfg.profile_csv;
      break;
  }
  return j;
}

void profile_from_json(const njson& j, ExperimentConfig& cfg) {
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string())
    throw ConfigError("config: profile.kind must name a velocity profile");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "constant") {
    check_keys(j, {"kind", "value"}, "profile");
    cfg.profile = VelocityProfile::constant(num_field(j, "value", "profile"));
  } else if (kind == "linear_shear") {
    check_keys(j, {"kind", "shear"}, "profile");
    cfg.profile = VelocityProfile::linear_shear(num_field(j, "shear", "profile"));
  } else if (kind == "poiseuille") {
    check_keys(j, {"kind", "v_mean"}, "profile");
    cfg.profile = VelocityProfile::poiseuille(num_field(j, "v_mean", "profile"), cfg.domain.epsilon);
  } else if (kind == "loglaw") {
    check_keys(j, {"kind", "kappa", "offset", "shift"}, "profile");
    const double kappa = num_field(j, "kappa", "profile");
    const double offset = num_field(j, "offset", "profile");
    if (j.contains("shift"))
      cfg.profile = VelocityProfile::loglaw(kappa, cfg.domain.epsilon, offset,
                                            num_field(j, "shift", "profile"));
    else
      cfg.profile = VelocityProfile::loglaw(kappa, cfg.domain.epsilon, offset);
  } else if (kind == "tabulated") {
    check_keys(j, {"kind", "csv"}, "profile");
    if (!j.contains("csv") || !j.at("csv").is_string())
      throw ConfigError("config: profile.csv must be a path");
    cfg.profile_csv = j.at("csv").get<std::string>();
    cfg.profile = VelocityProfile::tabulated_from_csv(cfg.profile_csv);
  } else {
    throw ConfigError("config: unknown profile kind '" + kind + "'");
  }
}

BasisFamily family_from_string(const std::string& s) {
  if (s == "hiphome") return BasisFamily::HiPhome;
  if (s == "educated") return BasisFamily::Educated;
  if (s == "legendre") return BasisFamily::Legendre;
  throw ConfigError("config: unknown basis family '" + s + "'");
}

njson config_to_tree(const ExperimentConfig& cfg) {
  njson j;
  j["name"] = cfg.name;
  j["domain"] = {{"length", cfg.domain.length},
                 {"width", cfg.domain.width},
                 {"epsilon", cfg.domain.epsilon}};
  j["profile"] = profile_to_json(cfg);
  j["problem"] = {{"diffusion", cfg.diffusion},
                  {"reaction", cfg.reaction},
                  {"forcing", cfg.forcing},
                  {"inlet", cfg.inlet_value},
                  {"initial", cfg.initial_value}};
  j["sweep"] = {{"m", cfg.m_list}, {"h", cfg.h_list}};
  njson fams = njson::array();
  for (BasisFamily f : cfg.families) fams.push_back(to_string(f));
  j["families"] = fams;
  j["resolution"] = {{"corrector_panels", cfg.corrector_panels},
                     {"quadrature_panels", cfg.quadrature_panels}};
  j["reference"] = {{"nx", cfg.reference.nx}, {"nz", cfg.reference.nz}};
  j["error_grid"] = {{"nx", cfg.error_grid.nx}, {"nz", cfg.error_grid.nz}};
  if (cfg.time) {
    j["time"] = {{"theta", cfg.time->theta},
                 {"dt", cfg.time->dt},
                 {"horizon", cfg.time->horizon},
                 {"snapshots", cfg.time->snapshots}};
  }
  j["output"] = cfg.output_dir;
  j["timing"] = cfg.timing;
  j["dump_fields"] = cfg.dump_fields;
  return j;
}

ExperimentConfig config_from_tree(const njson& j) {
  if (!j.is_object()) throw ConfigError("config: top level must be a JSON object");
  check_keys(j,
             {"name", "domain", "profile", "problem", "sweep", "families", "resolution",
              "reference", "error_grid", "time", "output", "timing", "dump_fields"},
             "top level");
  ExperimentConfig cfg;
  if (j.contains("name")) {
    if (!j.at("name").is_string()) throw ConfigError("config: name must be a string");
    cfg.name = j.at("name").get<std::string>();
  }
  if (!j.contains("domain")) throw ConfigError("config: missing key 'domain'");
  {
    const njson& d = j.at("domain");
    check_keys(d, {"length", "width", "epsilon"}, "domain");
    cfg.domain = make_domain(num_field(d, "length", "domain"), num_field(d, "width", "domain"),
                             num_field(d, "epsilon", "domain"));
  }
  if (!j.contains("profile")) throw ConfigError("config: missing key 'profile'");
  profile_from_json(j.at("profile"), cfg);
  if (!j.contains("problem")) throw ConfigError("config: missing key 'problem'");
  {
    const njson& p = j.at("problem");
    check_keys(p, {"diffusion", "reaction", "forcing", "inlet", "initial"}, "problem");
    cfg.diffusion = num_field(p, "diffusion", "problem");
    cfg.reaction = num_field(p, "reaction", "problem");
    cfg.forcing = num_field(p, "forcing", "problem");
    cfg.inlet_value = num_field(p, "inlet", "problem");
    cfg.initial_value = p.contains("initial") ? num_field(p, "initial", "problem") : 0.0;
  }
  if (!j.contains("sweep")) throw ConfigError("config: missing key 'sweep'");
  {
    const njson& s = j.at("sweep");
    check_keys(s, {"m", "h"}, "sweep");
    if (!s.contains("m") || !s.at("m").is_array())
      throw ConfigError("config: sweep.m must be an array of mode counts");
    if (!s.contains("h") || !s.at("h").is_array())
      throw ConfigError("config: sweep.h must be an array of mesh sizes");
    for (const auto& v : s.at("m")) {
      if (!v.is_number_integer()) throw ConfigError("config: sweep.m entries must be integers");
      cfg.m_list.push_back(v.get<int>());
    }
    for (const auto& v : s.at("h")) {
      if (!v.is_number()) throw ConfigError("config: sweep.h entries must be numbers");
      cfg.h_list.push_back(v.get<double>());
    }
  }
  if (j.contains("families")) {
    if (!j.at("families").is_array()) throw ConfigError("config: families must be an array");
    cfg.families.clear();
    for (const auto& v : j.at("families")) {
      if (!v.is_string()) throw ConfigError("config: families entries must be strings");
      cfg.families.push_back(family_from_string(v.get<std::string>()));
    }
  }
  if (j.contains("resolution")) {
    const njson& r = j.at("resolution");
    check_keys(r, {"corrector_panels", "quadrature_panels"}, "resolution");
    if (r.contains("corrector_panels"))
      cfg.corrector_panels = int_field(r, "corrector_panels", "resolution");
    if (r.contains("quadrature_panels"))
      cfg.quadrature_panels = int_field(r, "quadrature_panels", "resolution");
  }
  if (!j.contains("reference")) throw ConfigError("config: missing key 'reference'");
  {
    const njson& r = j.at("reference");
    check_keys(r, {"nx", "nz"}, "reference");
    cfg.reference = {int_field(r, "nx", "reference"), int_field(r, "nz", "reference")};
  }
  if (j.contains("error_grid")) {
    const njson& r = j.at("error_grid");
    check_keys(r, {"nx", "nz"}, "error_grid");
    cfg.error_grid = {int_field(r, "nx", "error_grid"), int_field(r, "nz", "error_grid")};
  }
  if (j.contains("time")) {
    const njson& t = j.at("time");
    check_keys(t, {"theta", "dt", "horizon", "snapshots"}, "time");
    TimeConfig tc;
    tc.theta = num_field(t, "theta", "time");
    tc.dt = num_field(t, "dt", "time");
    tc.horizon = num_field(t, "horizon", "time");
    if (!t.contains("snapshots") || !t.at("snapshots").is_array())
      throw ConfigError("config: time.snapshots must be an array of instants");
    for (const auto& v : t.at("snapshots")) {
      if (!v.is_number()) throw ConfigError("config: time.snapshots entries must be numbers");
      tc.snapshots.push_back(v.get<double>());
    }
    cfg.time = std::move(tc);
  }
  if (j.contains("output")) {
    if (!j.at("output").is_string()) throw ConfigError("config: output must be a string");
    cfg.output_dir = j.at("output").get<std::string>();
  }
  if (j.contains("timing")) {
    if (!j.at("timing").is_boolean()) throw ConfigError("config: timing must be a boolean");
    cfg.timing = j.at("timing").get<bool>();
  }
  if (j.contains("dump_fields")) {
    if (!j.at("dump_fields").is_boolean())
      throw ConfigError("config: dump_fields must be a boolean");
    cfg.dump_fields = j.at("dump_fields").get<bool>();
  }
  return cfg;
}

// Rethrows the in-flight exception with the sweep point prepended, keeping
// the dynamic type (and payload) so the CLI exit-code mapping still sees it.
[[noreturn]] void rethrow_annotated(const std::string& where) {
  try {
    throw;
  } catch (const StabilityError& e) {
    throw StabilityError(e.peclet, where + e.what());
  } catch (const BlowUpError& e) {
    throw BlowUpError(e.step, where + e.what());
  } catch (const DegeneracyError& e) {
    throw DegeneracyError(e.index, where + e.what());
  } catch (const ResolutionError& e) {
    throw ResolutionError(e.residual, where + e.what());
  } catch (const SolverError& e) {
    throw SolverError(where + e.what());
  } catch (const ConfigError& e) {
    throw ConfigError(where + e.what());
  } catch (const IoError& e) {
    throw IoError(where + e.what());
  } catch (const ArgumentError& e) {
    throw ArgumentError(where + e.what());
  } catch (const DomainError& e) {
    throw DomainError(where + e.what());
  } catch (const Error& e) {
    throw Error(where + e.what());
  } catch (const std::exception& e) {
    throw Error(where + e.what());
  }
}

std::string point_tag(BasisFamily family, int m, double h) {
  std::string s = "sweep point family=";
  s += to_string(family);
  s += " m=" + std::to_string(m);
  if (h > 0.0) s += " h=" + fmt_short(h);
  return s + ": ";
}

std::string field_csv(const FieldEvaluator& field, const ChannelDomain& domain, int nx, int nz) {
  Lattice2D lat = make_lattice(domain, nx, nz);
  std::string body = "x,z,c\n";
  for (int i = 0; i < nx; ++i)
    for (int jz = 0; jz < nz; ++jz) {
      const double x = lat.x(i), z = lat.z(jz);
      body += fmt17(x);
      body += ',';
      body += fmt17(z);
      body += ',';
      body += fmt17(field(x, z));
      body += '\n';
    }
  return body;
}

struct DumpFile {
  std::string name;
  std::string body;
};

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
      .count();
}

}  // namespace

ProblemData ExperimentConfig::problem() const {
  return make_problem(domain, diffusion, reaction, forcing, inlet_value, initial_value);
}

std::vector<std::string> preset_names() {
  return {"poiseuille-steady", "loglaw-steady", "loglaw-unsteady"};
}

ExperimentConfig preset_config(const std::string& name) {
  ExperimentConfig cfg;
  cfg.name = name;
  if (name == "poiseuille-steady") {
    cfg.domain = make_domain(2.0, 0.2, 0.2);
    cfg.profile = VelocityProfile::poiseuille(10.0, cfg.domain.epsilon);
    cfg.reaction = 1.0;
    cfg.m_list = {1, 2, 3, 4, 5, 6};
    cfg.h_list = {0.025, 0.0125};
    cfg.reference = {1601, 41};
    cfg.output_dir = "out/poiseuille-steady";
  } else if (name == "loglaw-steady") {
    cfg.domain = make_domain(2.0, 0.4, 0.2);
    cfg.profile = VelocityProfile::loglaw(0.41, cfg.domain.epsilon, 0.001);
    cfg.reaction = 1.0;
    cfg.m_list = {1, 2, 3, 4, 5, 6};
    cfg.h_list = {0.05, 0.025};
    cfg.reference = {801, 161};
    cfg.output_dir = "out/loglaw-steady";
  } else if (name == "loglaw-unsteady") {
    cfg.domain = make_domain(2.0, 0.4, 0.2);
    cfg.profile = VelocityProfile::loglaw(0.41, cfg.domain.epsilon, 0.001);
    cfg.reaction = 0.0;
    cfg.m_list = {4};
    cfg.h_list = {0.0125};
    cfg.reference = {801, 161};
    TimeConfig tc;
    // The explicit scheme is unconditionally unstable at this dt against
    // the transverse diffusion scale, so the preset integrates implicitly.
    tc.theta = 1.0;
    tc.dt = 0.005;
    tc.horizon = 0.4;
    tc.snapshots = {0.01, 0.05, 0.1, 0.15, 0.2, 0.3};
    cfg.time = std::move(tc);
    cfg.output_dir = "out/loglaw-unsteady";
  } else {
    throw ConfigError("unknown preset '" + name + "'");
  }
  return cfg;
}

ExperimentConfig parse_config(const std::string& json_text) {
  njson j;
  try {
    j = njson::parse(json_text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config parse: ") + e.what());
  }
  return config_from_tree(j);
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string config_to_json(const ExperimentConfig& cfg) {
  return config_to_tree(cfg).dump(2) + "\n";
}

void save_config(const ExperimentConfig& cfg, const std::string& path) {
  write_text(path, config_to_json(cfg));
}

void validate_config(const ExperimentConfig& cfg) {
  if (cfg.m_list.empty()) throw ConfigError("config: sweep.m must not be empty");
  if (cfg.h_list.empty()) throw ConfigError("config: sweep.h must not be empty");
  for (int m : cfg.m_list)
    if (m < 1) throw ConfigError("config: sweep.m entries must be >= 1");
  for (std::size_t i = 1; i < cfg.m_list.size(); ++i)
    if (cfg.m_list[i] <= cfg.m_list[i - 1])
      throw ConfigError("config: sweep.m must be strictly increasing");
  for (double h : cfg.h_list)
    if (!(h > 0.0) || h > cfg.domain.length)
      throw ConfigError("config: sweep.h entries must lie in (0, length]");
  for (std::size_t i = 1; i < cfg.h_list.size(); ++i)
    if (cfg.h_list[i] >= cfg.h_list[i - 1])
      throw ConfigError("config: sweep.h must be strictly decreasing (coarse to fine)");
  if (cfg.families.empty()) throw ConfigError("config: families must not be empty");
  for (std::size_t i = 0; i < cfg.families.size(); ++i)
    for (std::size_t k = i + 1; k < cfg.families.size(); ++k)
      if (cfg.families[i] == cfg.families[k])
        throw ConfigError("config: families must not repeat");
  if (cfg.corrector_panels < 64 || cfg.corrector_panels % 2 != 0)
    throw ConfigError("config: resolution.corrector_panels must be even and >= 64");
  if (cfg.quadrature_panels < 1)
    throw ConfigError("config: resolution.quadrature_panels must be >= 1");
  if (cfg.reference.nx < 3 || cfg.reference.nz < 3)
    throw ConfigError("config: reference grid must be at least 3x3");
  if (cfg.error_grid.nx < 9 || cfg.error_grid.nz < 9 || cfg.error_grid.nx % 2 == 0 ||
      cfg.error_grid.nz % 2 == 0)
    throw ConfigError("config: error_grid sides must be odd and >= 9");
  if (cfg.output_dir.empty()) throw ConfigError("config: output must not be empty");
  if (cfg.time) {
    const TimeConfig& t = *cfg.time;
    if (!(t.dt > 0.0)) throw ConfigError("config: time.dt must be positive");
    if (!(t.horizon > 0.0)) throw ConfigError("config: time.horizon must be positive");
    if (t.theta < 0.0 || t.theta > 1.0)
      throw ConfigError("config: time.theta must lie in [0, 1]");
    const double steps = t.horizon / t.dt;
    if (std::abs(steps - std::round(steps)) > 1e-9 * steps)
      throw ConfigError("config: time.horizon must be a multiple of time.dt");
    if (t.snapshots.empty()) throw ConfigError("config: time.snapshots must not be empty");
    double prev = 0.0;
    for (double s : t.snapshots) {
      if (!(s > 0.0) || s > t.horizon + 1e-12)
        throw ConfigError("config: time.snapshots must lie in (0, horizon]");
      if (s <= prev) throw ConfigError("config: time.snapshots must be strictly increasing");
      const double k = s / t.dt;
      if (std::abs(k - std::round(k)) > 1e-9 * std::max(1.0, k))
        throw ConfigError("config: time.snapshots must be multiples of time.dt");
      prev = s;
    }
  }
}

std::string records_csv(const std::vector<ErrorRecord>& records) {
  std::string body = "family,m,h,dt,t,l2_error,qoi_error,wall_ms\n";
  for (const ErrorRecord& r : records) {
    body += r.family;
    body += ',';
    body += std::to_string(r.m);
    body += ',';
    body += fmt17(r.h);
    body += ',';
    body += fmt17(r.dt);
    body += ',';
    body += fmt17(r.t);
    body += ',';
    body += fmt17(r.l2_error);
    body += ',';
    body += fmt17(r.qoi_error);
    body += ',';
    body += fmt17(r.wall_ms);
    body += '\n';
  }
  return body;
}

std::string report_json(const ExperimentReport& report) {
  njson j;
  j["config"] = config_to_tree(report.config);
  j["reference"] = {{"nx", report.config.reference.nx},
                    {"nz", report.config.reference.nz},
                    {"l2_norm", report.reference_norm},
                    {"wall_ms", report.reference_wall_ms}};
  j["record_count"] = report.records.size();
  njson rates = njson::array();
  for (const RateSummary& r : report.rates) {
    rates.push_back({{"family", r.family},
                     {"axis", r.axis},
                     {"at", r.at},
                     {"slope", r.slope},
                     {"points", r.points}});
  }
  j["rates"] = rates;
  return j.dump(2) + "\n";
}

void write_report(const ExperimentReport& report) {
  const std::filesystem::path dir(report.config.output_dir);
  write_text(dir / "errors.csv", records_csv(report.records));
  write_text(dir / "summary.json", report_json(report));
  write_text(dir / "config.json", config_to_json(report.config));
}

namespace {

// Slope reported per sweep line once it has at least two records; unsteady
// lines are fitted on their terminal-snapshot errors.
void append_rates(ExperimentReport& report) {
  const ExperimentConfig& cfg = report.config;
  const double t_fit = cfg.time ? cfg.time->snapshots.back() : 0.0;
  auto line_error = [&](BasisFamily fam, int m, double h, double* out) {
    for (const ErrorRecord& r : report.records)
      if (r.family == to_string(fam) && r.m == m && r.h == h && r.t == t_fit) {
        *out = r.l2_error;
        return true;
      }
    return false;
  };
  for (BasisFamily fam : cfg.families) {
    if (cfg.m_list.size() >= 2) {
      for (double h : cfg.h_list) {
        std::vector<double> errs, params;
        for (int m : cfg.m_list) {
          double e = 0.0;
          if (!line_error(fam, m, h, &e)) continue;
          errs.push_back(e);
          params.push_back(static_cast<double>(m));
        }
        if (errs.size() < 2) continue;
        RateFit fit = fit_rate_pre_plateau(errs, params);
        report.rates.push_back({to_string(fam), "m", h, fit.slope, fit.points});
      }
    }
    if (cfg.h_list.size() >= 2) {
      for (int m : cfg.m_list) {
        std::vector<double> errs, params;
        for (double h : cfg.h_list) {
          double e = 0.0;
          if (!line_error(fam, m, h, &e)) continue;
          errs.push_back(e);
          params.push_back(h);
        }
        if (errs.size() < 2) continue;
        RateFit fit = fit_rate_pre_plateau(errs, params);
        report.rates.push_back({to_string(fam), "h", static_cast<double>(m), fit.slope,
                                fit.points});
      }
    }
  }
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& cfg, Exec exec) {
  validate_config(cfg);
  ExperimentReport report;
  report.config = cfg;

  const ProblemData pb = cfg.problem();
  auto quad = std::make_shared<Quadrature>(Quadrature::gauss_legendre(cfg.quadrature_panels));
  const int max_m = *std::max_element(cfg.m_list.begin(), cfg.m_list.end());

  const bool unsteady = cfg.time.has_value();
  std::vector<double> snaps = unsteady ? cfg.time->snapshots : std::vector<double>{};

  // One basis per (family, m); correctors are family-independent and built
  // once at the largest requested order.
  std::shared_ptr<const CorrectorSet> set;
  struct Line {
    BasisFamily family;
    int m;
    std::shared_ptr<const ModalBasis> basis;
  };
  std::vector<Line> lines;
  for (BasisFamily fam : cfg.families) {
    for (int m : cfg.m_list) {
      try {
        if (fam == BasisFamily::HiPhome) {
          if (!set) {
            CorrectorOptions copts;
            copts.grid_panels = cfg.corrector_panels;
            set = std::make_shared<CorrectorSet>(
                compute_correctors(cfg.profile, cfg.domain, pb.diffusion, max_m - 1, copts));
          }
          lines.push_back({fam, m,
                           std::make_shared<ModalBasis>(ModalBasis::from_correctors(set, m, quad))});
        } else if (fam == BasisFamily::Educated) {
          lines.push_back(
              {fam, m, std::make_shared<ModalBasis>(ModalBasis::educated(m, pb.diffusion, quad))});
        } else {
          lines.push_back({fam, m, std::make_shared<ModalBasis>(ModalBasis::legendre(m, quad))});
        }
      } catch (...) {
        try {
          write_report(report);
        } catch (...) {
        }
        rethrow_annotated(point_tag(fam, m, 0.0));
      }
    }
  }

  // Single reference solve shared by every sweep point.
  Field2D ref_steady;
  std::vector<Field2D> ref_snaps;
  {
    const auto t0 = std::chrono::steady_clock::now();
    Reference2D ref(pb, cfg.profile, cfg.domain, cfg.reference.nx, cfg.reference.nz, exec);
    if (unsteady) {
      UnsteadyParams up;
      up.dt = cfg.time->dt;
      up.theta = cfg.time->theta;
      up.horizon = cfg.time->horizon;
      up.snapshots = snaps;
      ref_snaps = ref.solve_unsteady(up);
    } else {
      ref_steady = ref.solve_steady();
    }
    report.reference_wall_ms = cfg.timing ? elapsed_ms(t0) : 0.0;
  }
  const Field2D& ref_last = unsteady ? ref_snaps.back() : ref_steady;
  report.reference_norm =
      l2_norm([&](double x, double z) { return ref_last.evaluate(x, z); }, cfg.domain,
              cfg.error_grid.nx, cfg.error_grid.nz, exec);

  std::vector<DumpFile> ref_dumps;
  if (cfg.dump_fields) {
    if (unsteady) {
      for (std::size_t s = 0; s < snaps.size(); ++s)
        ref_dumps.push_back(
            {"ref_t" + fmt_short(snaps[s]) + ".csv",
             field_csv([&](double x, double z) { return ref_snaps[s].evaluate(x, z); },
                       cfg.domain, cfg.error_grid.nx, cfg.error_grid.nz)});
    } else {
      ref_dumps.push_back(
          {"ref.csv", field_csv([&](double x, double z) { return ref_steady.evaluate(x, z); },
                                cfg.domain, cfg.error_grid.nx, cfg.error_grid.nz)});
    }
  }

  // Work pool over sweep points; slot order fixes the record order no
  // matter how the pool schedules.
  struct Point {
    std::size_t line;
    double h;
  };
  std::vector<Point> points;
  for (std::size_t li = 0; li < lines.size(); ++li)
    for (double h : cfg.h_list) points.push_back({li, h});
  std::vector<std::vector<ErrorRecord>> slots(points.size());
  std::vector<std::vector<DumpFile>> dump_slots(points.size());
  std::vector<std::exception_ptr> failures(points.size());

  parallel_for_dynamic(static_cast<std::int64_t>(points.size()), exec, [&](std::int64_t p) {
    try {
      const Line& line = lines[points[p].line];
      const double h = points[p].h;
      const auto t0 = std::chrono::steady_clock::now();
      Mesh1D mesh = build_mesh(cfg.domain.length, h);
      ReducedSystem sys(pb, line.basis, mesh, cfg.profile, cfg.domain);
      const std::string fam = to_string(line.family);
      auto measure = [&](const ReducedSolution& sol, const Field2D& target, double t,
                         double dt) {
        FieldEvaluator red = [&sol](double x, double z) { return sol.evaluate(x, z); };
        FieldEvaluator refe = [&target](double x, double z) { return target.evaluate(x, z); };
        const double e =
            l2_norm([&](double x, double z) { return refe(x, z) - red(x, z); }, cfg.domain,
                    cfg.error_grid.nx, cfg.error_grid.nz, exec);
        const double q =
            qoi_error(refe, red, cfg.domain, cfg.error_grid.nx, cfg.error_grid.nz, exec);
        const double wall = cfg.timing ? elapsed_ms(t0) : 0.0;
        slots[p].push_back(make_record(fam, line.m, h, dt, t, e, q, wall));
        if (cfg.dump_fields) {
          std::string name = "field_" + fam + "_m" + std::to_string(line.m) + "_h" +
                             fmt_short(h);
          if (dt > 0.0) name += "_t" + fmt_short(t);
          dump_slots[p].push_back(
              {name + ".csv", field_csv(red, cfg.domain, cfg.error_grid.nx, cfg.error_grid.nz)});
        }
      };
      if (unsteady) {
        ThetaStepper stepper(sys, cfg.time->dt, cfg.time->theta);
        ReducedSolution state = sys.initial_state();
        const int nsteps = static_cast<int>(std::round(cfg.time->horizon / cfg.time->dt));
        std::size_t isnap = 0;
        for (int step = 0; step < nsteps && isnap < snaps.size(); ++step) {
          stepper.advance(state);
          if (std::abs(state.time - snaps[isnap]) < 0.5 * cfg.time->dt) {
            measure(state, ref_snaps[isnap], snaps[isnap], cfg.time->dt);
            ++isnap;
          }
        }
      } else {
        ReducedSolution sol = sys.solve_steady();
        measure(sol, ref_steady, 0.0, 0.0);
      }
    } catch (...) {
      failures[p] = std::current_exception();
    }
  });

  for (std::size_t p = 0; p < points.size(); ++p) {
    if (!failures[p]) continue;
    for (std::size_t k = 0; k < points.size(); ++k)
      if (!failures[k])
        report.records.insert(report.records.end(), slots[k].begin(), slots[k].end());
    try {
      write_report(report);
    } catch (...) {
    }
    const Line& line = lines[points[p].line];
    try {
      std::rethrow_exception(failures[p]);
    } catch (...) {
      rethrow_annotated(point_tag(line.family, line.m, points[p].h));
    }
  }

  for (auto& slot : slots)
    report.records.insert(report.records.end(), slot.begin(), slot.end());
  append_rates(report);
  write_report(report);
  const std::filesystem::path dir(cfg.output_dir);
  for (const DumpFile& d : ref_dumps) write_text(dir / d.name, d.body);
  for (const auto& slot : dump_slots)
    for (const DumpFile& d : slot) write_text(dir / d.name, d.body);
  return report;
}

std::string dump_basis(const ExperimentConfig& cfg, const std::string& dir) {
  validate_config(cfg);
  const ProblemData pb = cfg.problem();
  auto quad = std::make_shared<Quadrature>(Quadrature::gauss_legendre(cfg.quadrature_panels));
  const int max_m = *std::max_element(cfg.m_list.begin(), cfg.m_list.end());
  std::string note;
  constexpr int samples = 513;
  for (BasisFamily fam : cfg.families) {
    std::shared_ptr<const ModalBasis> basis;
    try {
      if (fam == BasisFamily::HiPhome) {
        CorrectorOptions copts;
        copts.grid_panels = cfg.corrector_panels;
        auto set = std::make_shared<CorrectorSet>(
            compute_correctors(cfg.profile, cfg.domain, pb.diffusion, max_m - 1, copts));
        basis = std::make_shared<ModalBasis>(ModalBasis::from_correctors(set, max_m, quad));
      } else if (fam == BasisFamily::Educated) {
        basis = std::make_shared<ModalBasis>(ModalBasis::educated(max_m, pb.diffusion, quad));
      } else {
        basis = std::make_shared<ModalBasis>(ModalBasis::legendre(max_m, quad));
      }
    } catch (const DegeneracyError& e) {
      // A degenerate profile truncates the dump to the surviving modes.
      note += std::string("family ") + to_string(fam) + " degenerate: " + e.what() +
              "; dumping modes 0.." + std::to_string(e.index - 1) + "\n";
      CorrectorOptions copts;
      copts.grid_panels = cfg.corrector_panels;
      auto set = std::make_shared<CorrectorSet>(
          compute_correctors(cfg.profile, cfg.domain, pb.diffusion, max_m - 1, copts));
      basis = std::make_shared<ModalBasis>(ModalBasis::from_correctors(set, e.index, quad));
    }
    std::string body = "zhat,mode,value,derivative\n";
    for (int k = 0; k < basis->size(); ++k)
      for (int s = 0; s < samples; ++s) {
        const double zhat = static_cast<double>(s) / (samples - 1);
        body += fmt17(zhat);
        body += ',';
        body += std::to_string(k);
        body += ',';
        body += fmt17(basis->value(k, zhat));
        body += ',';
        body += fmt17(basis->derivative(k, zhat));
        body += '\n';
      }
    write_text(std::filesystem::path(dir) / ("basis_" + std::string(to_string(fam)) + ".csv"),
               body);
  }
  return note;
}

std::string dump_correctors(const ExperimentConfig& cfg, const std::string& dir) {
  validate_config(cfg);
  const ProblemData pb = cfg.problem();
  const int max_m = *std::max_element(cfg.m_list.begin(), cfg.m_list.end());
  CorrectorOptions copts;
  copts.grid_panels = cfg.corrector_panels;
  CorrectorSet set = compute_correctors(cfg.profile, cfg.domain, pb.diffusion,
                                        std::max(1, max_m - 1), copts);
  std::string body = "i,y,chi\n";
  for (int i = 0; i <= set.order; ++i)
    for (std::size_t s = 0; s < set.y.size(); ++s) {
      body += std::to_string(i);
      body += ',';
      body += fmt17(set.y[s]);
      body += ',';
      body += fmt17(set.chi[i][s]);
      body += '\n';
    }
  write_text(std::filesystem::path(dir) / "correctors.csv", body);
  std::string vel = "y,u_hat\n";
  for (std::size_t s = 0; s < set.y.size(); ++s) {
    vel += fmt17(set.y[s]);
    vel += ',';
    vel += fmt17(set.u_hat[s]);
    vel += '\n';
  }
  write_text(std::filesystem::path(dir) / "velocity_hat.csv", vel);
  const EffectiveCoefficients eff = taylor_dispersion(set);
  return "mean_velocity=" + fmt17(eff.mean_velocity) + " dispersion=" + fmt17(eff.dispersion) +
         " enhancement=" + fmt17(eff.enhancement());
}

int run_selftest(const std::string& out_dir) {
  int fails = 0;
  auto check = [&fails](const char* name, bool ok, const std::string& detail) {
    std::printf("selftest %-36s %s%s\n", name, ok ? "ok" : "FAIL",
                detail.empty() ? "" : ("  [" + detail + "]").c_str());
    if (!ok) ++fails;
  };

  // Closed-form corrector for unit rescaled shear on Y = 1/2: the physical
  // shear is 1/epsilon so that u_hat(y) = y.
  {
    ChannelDomain dom = make_domain(2.0, 0.1, 0.1);
    CorrectorSet set =
        compute_correctors(VelocityProfile::linear_shear(1.0 / dom.epsilon), dom, 1.0, 1, {});
    const double Y = dom.half_width_rescaled();
    double dev = 0.0;
    for (std::size_t s = 0; s < set.y.size(); ++s) {
      const double y = set.y[s];
      dev = std::max(dev, std::abs(set.chi[1][s] - (y * y * y / 6.0 - Y * Y * y / 2.0)));
    }
    check("linear-shear corrector closed form", dev <= 1e-8, "max dev " + fmt_short(dev));
  }

  // Exact effective dispersion for the same shear at epsilon = 0.1.
  {
    ChannelDomain dom = make_domain(2.0, 0.1, 0.1);
    CorrectorSet set =
        compute_correctors(VelocityProfile::linear_shear(1.0 / dom.epsilon), dom, 1.0, 1, {});
    const EffectiveCoefficients eff = taylor_dispersion(set);
    const double expected = 0.1 * (1.0 + 1.0 / 120.0);
    check("linear-shear effective dispersion", std::abs(eff.dispersion - expected) <= 1e-8,
          "got " + fmt17(eff.dispersion));
  }

  // Orthonormality of both families on the benchmark fibre.
  {
    ChannelDomain dom = make_domain(2.0, 0.2, 0.2);
    auto quad = std::make_shared<Quadrature>(Quadrature::gauss_legendre(512));
    CorrectorOptions copts;
    auto set = std::make_shared<CorrectorSet>(
        compute_correctors(VelocityProfile::poiseuille(10.0, dom.epsilon), dom, 1.0, 7, copts));
    const double d_hip = ModalBasis::from_correctors(set, 8, quad).gram_defect();
    const double d_edu = ModalBasis::educated(8, 1.0, quad).gram_defect();
    check("basis orthonormality", d_hip <= 1e-10 && d_edu <= 1e-10,
          "defects " + fmt_short(d_hip) + " / " + fmt_short(d_edu));
  }

  // Degenerate constant profile: zero correctors, exact dispersion, loud
  // Gram-Schmidt failure.
  {
    ChannelDomain dom = make_domain(2.0, 0.2, 0.2);
    CorrectorSet set = compute_correctors(VelocityProfile::constant(3.0), dom, 1.0, 2, {});
    double amp = 0.0;
    for (double v : set.chi[1]) amp = std::max(amp, std::abs(v));
    const EffectiveCoefficients eff = taylor_dispersion(set);
    bool raised = false;
    try {
      auto quad = std::make_shared<Quadrature>(Quadrature::gauss_legendre(256));
      auto sp = std::make_shared<CorrectorSet>(set);
      ModalBasis::from_correctors(sp, 2, quad);
    } catch (const DegeneracyError&) {
      raised = true;
    }
    check("degenerate profile contract",
          amp <= 1e-14 && eff.dispersion == dom.epsilon * 1.0 && raised,
          "chi1 amp " + fmt_short(amp));
  }

  // Miniature sweep: serial, parallel, and repeated runs must agree byte
  // for byte, and every sweep point must appear exactly once.
  {
    ExperimentConfig cfg;
    cfg.name = "selftest";
    cfg.domain = make_domain(2.0, 0.2, 0.2);
    cfg.profile = VelocityProfile::poiseuille(10.0, cfg.domain.epsilon);
    cfg.reaction = 1.0;
    cfg.m_list = {1, 2, 3};
    cfg.h_list = {0.025};
    cfg.corrector_panels = 1024;
    cfg.quadrature_panels = 512;
    cfg.reference = {401, 41};
    cfg.error_grid = {201, 41};
    cfg.output_dir = out_dir + "/run-serial";
    ExperimentReport a = run_experiment(cfg, Exec::Serial);
    cfg.output_dir = out_dir + "/run-parallel";
    ExperimentReport b = run_experiment(cfg, Exec::Parallel);
    cfg.output_dir = out_dir + "/run-repeat";
    ExperimentReport c = run_experiment(cfg, Exec::Parallel);
    const std::string ca = records_csv(a.records);
    const std::string cb = records_csv(b.records);
    const std::string cc = records_csv(c.records);
    check("determinism serial vs parallel", ca == cb, "");
    check("determinism across repeats", cb == cc, "");
    std::set<std::string> seen;
    bool unique = true, bounded = true;
    for (const ErrorRecord& r : a.records) {
      unique = unique && seen.insert(r.family + "/" + std::to_string(r.m) + "/" + fmt17(r.h) +
                                     "/" + fmt17(r.t))
                             .second;
      bounded = bounded && r.qoi_error <= r.l2_error;
    }
    check("sweep points unique", unique && a.records.size() == 6, "");
    check("qoi bounded by l2", bounded, "");
    write_text(std::filesystem::path(out_dir) / "selftest.csv", ca);
  }

  // Preset echoes carry the published constants.
  {
    ExperimentConfig p = preset_config("poiseuille-steady");
    bool ok = p.domain.length == 2.0 && p.domain.width == 0.2 && p.domain.epsilon == 0.2 &&
              p.profile.param_value == 10.0 && p.diffusion == 1.0 && p.reaction == 1.0 &&
              p.forcing == 0.0 && p.inlet_value == 1.0 &&
              std::find(p.h_list.begin(), p.h_list.end(), 0.0125) != p.h_list.end();
    ExperimentConfig l = preset_config("loglaw-steady");
    ok = ok && l.profile.param_kappa == 0.41 && l.profile.param_offset == 0.001 &&
         l.profile.param_shift == -std::log(0.001) / 0.41;
    ExperimentConfig u = preset_config("loglaw-unsteady");
    ok = ok && u.time && u.time->dt == 0.005 && u.time->horizon == 0.4 && u.reaction == 0.0;
    check("preset fidelity", ok, "");
  }

  return fails;
}

}  // namespace hiphome

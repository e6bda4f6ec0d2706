#include "nlslab/harness.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <future>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>
#include <thread>

#include "nlslab/error.hpp"
#include "nlslab/exact_solutions.hpp"
#include "nlslab/inout_decomp.hpp"
#include "nlslab/snapshot.hpp"
#include "nlslab/spectral_ops.hpp"

#ifndef NLSLAB_VERSION
#define NLSLAB_VERSION "unknown"
#endif

namespace nlslab {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

const std::map<Scenario, std::string>& scenario_names() {
  static const std::map<Scenario, std::string> names{
      {Scenario::ground_state, "ground-state"},
      {Scenario::soliton, "soliton"},
      {Scenario::pseudoconformal, "pseudoconformal"},
      {Scenario::subcritical, "subcritical"},
      {Scenario::threshold_census, "threshold-census"},
      {Scenario::operator_suite, "operator-suite"},
  };
  return names;
}

std::string shape_name(Shape s) { return s == Shape::ground_state ? "ground-state" : "gaussian"; }

Shape shape_from_string(const std::string& s) {
  if (s == "ground-state") return Shape::ground_state;
  if (s == "gaussian") return Shape::gaussian;
  throw InvalidArgument("unknown shape: " + s);
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(); }

// Files written by one scenario, relative to the output directory.
class OutputSet {
 public:
  explicit OutputSet(fs::path root) : root_(std::move(root)) { fs::create_directories(root_); }

  fs::path add(const fs::path& rel) {
    const auto full = root_ / rel;
    fs::create_directories(full.parent_path());
    files_.push_back(rel.generic_string());
    return full;
  }
  void merge(const std::string& prefix, const std::vector<std::string>& files) {
    for (const auto& f : files) files_.push_back(prefix + "/" + f);
  }
  const fs::path& root() const { return root_; }
  std::vector<std::string> files() const {
    auto f = files_;
    std::sort(f.begin(), f.end());
    f.erase(std::unique(f.begin(), f.end()), f.end());
    return f;
  }

 private:
  fs::path root_;
  std::vector<std::string> files_;
};

void write_json(const fs::path& path, const ojson& j) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

RadialField gaussian_with_mass(const GridPtr& g, double target) {
  auto u = sample(g, [](double r) { return cplx(std::exp(-r * r)); });
  return u * std::sqrt(target / mass(u));
}

RadialField initial_data(Shape shape, double ratio, const GroundStateSolution& q) {
  if (shape == Shape::ground_state) return q.profile * std::sqrt(ratio);
  return gaussian_with_mass(q.grid(), ratio * q.mass);
}

EvolutionConfig evolution_config(const TimeParams& t, const GroundStateSolution& q, double scale = 1.0) {
  EvolutionConfig c;
  c.t0 = t.t0;
  c.t1 = t.t1;
  c.dt0 = t.dt0;
  c.c_nl = t.c_nl;
  c.snapshot_interval = t.snapshot_interval;
  c.kinetic_max = t.kinetic_factor * scale * std::sqrt(q.kinetic_sq);
  c.dt_min = std::min(c.dt_min, 0.1 * c.dt0);
  return c;
}

ojson blowup_json(const BlowupReport& b) {
  return {{"detected", b.detected},        {"trigger", b.trigger},
          {"t_stop", b.t_stop},            {"t_est", finite_or_null(b.t_est)},
          {"rate", finite_or_null(b.rate)}, {"fit_residual", finite_or_null(b.fit_residual)}};
}

void write_run_outputs(OutputSet& out, const EvolutionResult& res, const DiagnosticsReport& diag) {
  write_run_csv(out.add("run.csv"), res.trajectory);
  write_diagnostics_csv(out.add("diagnostics.csv"), diag);
  write_diagnostics_summary(out.add("diagnostics.json"), diag);
  write_snapshot(out.add("final.snap"), res.trajectory.snapshots.back().u);
}

ojson scenario_ground_state(const ExperimentConfig& cfg, OutputSet& out) {
  const auto grid = cfg.grid.make();
  const auto shoot = solve_shooting(grid);
  const auto flow = solve_gradient_flow(grid);
  const double agreement = std::abs(flow.mass - shoot.mass) / shoot.mass;
  if (agreement > 1e-5)
    throw CertificationFailed("cross-method agreement: shooting and gradient-flow masses differ by " +
                              std::to_string(agreement));
  write_snapshot(out.add("ground_state.snap"), shoot.profile);
  write_certificate(out.add("certificate.json"), shoot, "ground_state.snap");
  write_snapshot(out.add("ground_state_gradient_flow.snap"), flow.profile);
  write_certificate(out.add("certificate_gradient_flow.json"), flow, "ground_state_gradient_flow.snap");
  return {{"mass", shoot.mass},
          {"energy", shoot.energy},
          {"energy_relative", std::abs(shoot.energy) / shoot.kinetic_sq},
          {"kinetic_sq", shoot.kinetic_sq},
          {"potential", shoot.potential},
          {"peak", shoot.peak},
          {"gn_constant", shoot.gn_constant},
          {"residual", shoot.residual},
          {"gradient_flow_mass", flow.mass},
          {"cross_method_mass_agreement", agreement}};
}

Trajectory thinned(const Trajectory& tr, double t0, double t1, int stride) {
  Trajectory out;
  out.nonlinearity = tr.nonlinearity;
  int i = 0;
  for (const auto& s : tr.snapshots) {
    if (s.t < t0 - 1e-12 || s.t > t1 + 1e-12) continue;
    if (i++ % stride == 0) out.snapshots.push_back(s);
  }
  return out;
}

ojson scenario_soliton(const ExperimentConfig& cfg, const GroundStateSolution& q, OutputSet& out) {
  const SymmetryParams p{cfg.soliton_phase, cfg.soliton_scale, 0.0};
  const auto u0 = soliton(q, cfg.time.t0, p);
  const auto res = evolve(u0, evolution_config(cfg.time, q, cfg.soliton_scale));
  const auto& tr = res.trajectory;

  const auto qs = apply_scaling(q.profile, cfg.soliton_scale);
  double modulus = 0.0;
  for (const auto& s : tr.snapshots) {
    double d = 0.0;
    const auto w = s.u.grid()->radial_measure();
    for (std::size_t k = 0; k < s.u.size(); ++k) {
      const double e = std::abs(s.u[k]) - std::abs(qs[k]);
      d += w[k] * e * e;
    }
    modulus = std::max(modulus, std::sqrt(d / q.mass));
  }

  ojson duhamel;
  const double window = cfg.time.t0 + 1.0;
  if (cfg.time.snapshot_interval > 0.0 && cfg.time.snapshot_interval <= 1.0 / 16.0 &&
      tr.snapshots.back().t >= window - 1e-12) {
    const auto unit = thinned(tr, cfg.time.t0, window, 1);
    const auto half = thinned(tr, cfg.time.t0, window, 2);
    const double fine = duhamel_residual(unit, cfg.time.t0, window);
    const double coarse = duhamel_residual(half, cfg.time.t0, window);
    duhamel = {{"snapshots_per_unit", std::lround(1.0 / cfg.time.snapshot_interval)},
               {"residual", fine},
               {"residual_half_density", coarse},
               {"refinement_factor", coarse / fine}};
  }

  const auto diag = diagnose(tr, &q, cfg.diagnostics);
  const auto label = classify(res, diag);
  write_run_outputs(out, res, diag);
  const auto [nmin, nmax] = std::minmax_element(diag.frequency_scale.begin(), diag.frequency_scale.end());
  return {{"modulus_error", modulus},
          {"mass_drift", tr.mass_drift()},
          {"energy_drift", tr.energy_drift()},
          {"duhamel", duhamel},
          {"frequency_scale_min", *nmin},
          {"frequency_scale_max", *nmax},
          {"local_constancy", diag.local_constancy.value},
          {"blowup", blowup_json(res.blowup)},
          {"label", label}};
}

ojson scenario_pseudoconformal(const ExperimentConfig& cfg, const GroundStateSolution& q, OutputSet& out) {
  const double big_t = cfg.blowup_time;
  if (!(cfg.time.t0 < big_t)) throw InvalidArgument("pseudoconformal: t0 must precede the blowup time");
  const auto u0 = pseudoconformal(q, cfg.time.t0, big_t);
  const double mass_error = std::abs(mass(u0) - q.mass) / q.mass;
  const auto res = evolve(u0, evolution_config(cfg.time, q));
  const auto& tr = res.trajectory;

  double mismatch = 0.0, mismatch_t = cfg.time.t0;
  for (const auto& s : tr.snapshots) {
    if (s.t > cfg.time.t0 + 1.0 + 1e-12) break;
    try {
      const double e = l2_distance(s.u, pseudoconformal(q, s.t, big_t)) / q.l2();
      if (e > mismatch) mismatch = e, mismatch_t = s.t;
    } catch (const Unresolved&) {
      break;  // the exact profile no longer fits the grid
    }
  }

  const auto diag = diagnose(tr, &q, cfg.diagnostics, big_t);
  std::vector<double> t, n;
  for (std::size_t i = 0; i < diag.t.size(); ++i)
    if (big_t - diag.t[i] <= 0.5 + 1e-12) {
      t.push_back(diag.t[i]);
      n.push_back(diag.frequency_scale[i]);
    }
  const double near_exponent = frequency_blowup_exponent(t, n, big_t);
  const auto label = classify(res, diag);
  write_run_outputs(out, res, diag);
  return {{"blowup_time", big_t},
          {"initial_mass_error", mass_error},
          {"mass_drift", tr.mass_drift()},
          {"max_mismatch", mismatch},
          {"max_mismatch_time", mismatch_t},
          {"kinetic_rate", finite_or_null(res.blowup.rate)},
          {"frequency_exponent", finite_or_null(diag.frequency_exponent)},
          {"frequency_exponent_near", finite_or_null(near_exponent)},
          {"compactness_0.01", diag.compactness[1].c},
          {"blowup", blowup_json(res.blowup)},
          {"label", label}};
}

struct MemberResult {
  ojson headline;
  std::string label;
};

MemberResult run_member(const ExperimentConfig& cfg, const GroundStateSolution& q, Shape shape, double ratio,
                        OutputSet& out) {
  const auto u0 = initial_data(shape, ratio, q);
  const auto res = evolve(u0, evolution_config(cfg.time, q));
  const auto diag = diagnose(res.trajectory, &q, cfg.diagnostics);
  const auto label = classify(res, diag);
  write_run_outputs(out, res, diag);
  double peak = 0.0;
  for (const auto& r : res.trajectory.records) peak = std::max(peak, r.linf);
  return {{{"shape", shape_name(shape)},
           {"mass_ratio", ratio},
           {"label", label},
           {"linf_final_over_max", res.trajectory.records.back().linf / peak},
           {"mass_drift", res.trajectory.mass_drift()},
           {"energy_drift", res.trajectory.energy_drift()},
           {"local_constancy", diag.local_constancy.value},
           {"blowup", blowup_json(res.blowup)}},
          label};
}

ojson scenario_subcritical(const ExperimentConfig& cfg, const GroundStateSolution& q, OutputSet& out) {
  return run_member(cfg, q, cfg.shape, cfg.mass_ratio, out).headline;
}

std::string ratio_tag(double r) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(3) << r;
  return s.str();
}

ojson scenario_census(const ExperimentConfig& cfg, const GroundStateSolution& q, OutputSet& out) {
  struct Job {
    Shape shape;
    double ratio;
    std::string dir;
  };
  std::vector<Job> jobs;
  for (auto shape : cfg.census_shapes)
    for (double r : cfg.census_ratios) jobs.push_back({shape, r, shape_name(shape) + "-" + ratio_tag(r)});

  std::vector<MemberResult> results(jobs.size());
  std::vector<std::vector<std::string>> files(jobs.size());
  const std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
  for (std::size_t start = 0; start < jobs.size(); start += workers) {
    std::vector<std::future<void>> batch;
    for (std::size_t i = start; i < std::min(jobs.size(), start + workers); ++i)
      batch.push_back(std::async(std::launch::async, [&, i] {
        OutputSet member(out.root() / jobs[i].dir);
        results[i] = run_member(cfg, q, jobs[i].shape, jobs[i].ratio, member);
        files[i] = member.files();
      }));
    for (auto& f : batch) f.get();
  }

  std::vector<CensusEntry> entries;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    out.merge(jobs[i].dir, files[i]);
    entries.push_back({jobs[i].shape, jobs[i].ratio, results[i].label, results[i].label});
  }
  const int violations = enforce_census_monotonicity(entries);

  std::ofstream csv(out.add("census.csv"));
  csv << "shape,mass_ratio,label,raw_label\n";
  ojson members = ojson::array();
  for (std::size_t i = 0; i < entries.size(); ++i) {
    csv << shape_name(entries[i].shape) << ',' << entries[i].ratio << ',' << entries[i].label << ','
        << entries[i].raw_label << '\n';
    auto h = results[i].headline;
    h["label"] = entries[i].label;
    h["raw_label"] = entries[i].raw_label;
    members.push_back(h);
  }
  return {{"members", members}, {"monotonicity_violations", violations}};
}

ojson scenario_operator_suite(const ExperimentConfig& cfg, const GroundStateSolution* q, OutputSet& out) {
  const auto grid = cfg.grid.make();
  const auto& pp = cfg.probes;
  std::vector<ProbeRecord> records;
  ojson head;

  double bmin = kInf, bmax = 0.0;
  for (double n : pp.bernstein_n) {
    const auto b = bernstein_probe(grid, n, 2.0, kInf, 1.0, pp.trials, cfg.seed);
    std::ostringstream params;
    params << "N=" << n << ";p=2;q=inf;s=1";
    records.push_back({"bernstein-derivative", params.str(), 1.0, b.derivative.max, 1.0, b.derivative.max});
    records.push_back({"bernstein-inverse", params.str(), 1.0, b.inverse_derivative.max, 1.0,
                       b.inverse_derivative.max});
    records.push_back({"bernstein-lebesgue", params.str(), 1.0, b.lebesgue.max, 1.0, b.lebesgue.max});
    bmin = std::min(bmin, b.derivative.max);
    bmax = std::max(bmax, b.derivative.max);
  }
  head["bernstein_derivative_spread"] = bmax / bmin;

  std::vector<MismatchParams> points;
  std::size_t reference = 0;
  for (double n : pp.mismatch_n)
    for (double r : pp.mismatch_r) {
      MismatchParams p;
      p.n = n;
      p.r = r;
      p.trials = pp.trials;
      p.seed = cfg.seed;
      if (n == 16.0 && r == 8.0) reference = points.size();
      points.push_back(p);
    }
  if (!points.empty()) {
    const auto survey = mismatch_survey(grid, points, reference);
    double worst = 0.0;
    for (const auto& r : survey) worst = std::max(worst, r.ratio);
    records.insert(records.end(), survey.begin(), survey.end());
    head["mismatch_max_ratio"] = worst;
  }

  MismatchParams decay;
  decay.n = 32.0;
  decay.trials = pp.trials;
  decay.seed = cfg.seed;
  decay.r = 8.0;
  const double m8 = mismatch_probe(grid, decay).measured;
  decay.r = 16.0;
  const double m16 = mismatch_probe(grid, decay).measured;
  head["mismatch_decay_factor_N32_R8_to_R16"] = m8 / m16;

  MismatchParams bad;
  bad.kind = MismatchKind::freq;
  bad.n = 2.0;
  bad.m_freq = 4.0 * 0.99;
  bool rejected = false;
  try {
    mismatch_probe(grid, bad);
  } catch (const PreconditionFailed&) {
    rejected = true;
  }
  head["frequency_hypothesis_rejected"] = rejected;

  const auto bank = inout_bank(grid, q ? &q->profile : nullptr, cfg.seed);
  double identity = 0.0;
  for (const auto& f : bank)
    identity = std::max(identity, l2_distance(p_out(f) + p_in(f), f) / std::sqrt(mass(f)));
  head["inout_identity_error"] = identity;
  ojson ext = ojson::object();
  double cmin = kInf, cmax = 0.0;
  for (double n : pp.inout_n) {
    const double c = exterior_bound_constant(bank, n, Direction::outgoing);
    std::ostringstream params;
    params << "N=" << n << ";bank=" << bank.size();
    records.push_back({"inout-exterior", params.str(), 0.0, c, 1.0, c});
    ext[ratio_tag(n)] = c;
    cmin = std::min(cmin, c);
    cmax = std::max(cmax, c);
  }
  head["inout_exterior_constants"] = ext;
  head["inout_exterior_spread"] = cmax / cmin;
  head["pv_selftest"] = pv_selftest(pv_quadrature(grid));
  head["idempotency_defect"] = idempotency_defect(bank.front());

  write_probe_csv(out.add("probes.csv"), records);
  return head;
}

std::string bytes_to_hex(const unsigned char* d, unsigned n) {
  std::ostringstream s;
  for (unsigned i = 0; i < n; ++i) s << std::hex << std::setw(2) << std::setfill('0') << int(d[i]);
  return s.str();
}

RunManifest finish(const ExperimentConfig& cfg, OutputSet& out, ojson headline,
                   std::chrono::steady_clock::time_point start) {
  RunManifest m;
  m.config = cfg.to_json();
  m.code_version = code_version();
  m.headline = std::move(headline);
  std::string listing;
  for (const auto& f : out.files()) {
    m.outputs.push_back({f, sha256_file(out.root() / f)});
    listing += f + '\t' + m.outputs.back().sha256 + '\n';
  }
  m.content_hash = sha256_hex(listing);
  m.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_json(out.root() / "manifest.json", m.to_json());
  return m;
}

RunManifest run_impl(const ExperimentConfig& cfg, const GroundStateSolution* preloaded) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  OutputSet out(cfg.output_dir);
  write_json(out.add("config.json"), cfg.to_json());

  if (cfg.scenario == Scenario::ground_state) return finish(cfg, out, scenario_ground_state(cfg, out), start);

  std::optional<GroundStateSolution> loaded;
  if (!preloaded) {
    if (!cfg.certificate) throw PreconditionFailed("missing certificate: scenario needs a certified ground state");
    loaded = load_certified_ground_state(*cfg.certificate, cfg.grid.make());
  }
  const GroundStateSolution& q = preloaded ? *preloaded : *loaded;
  ojson head;
  switch (cfg.scenario) {
    case Scenario::soliton: head = scenario_soliton(cfg, q, out); break;
    case Scenario::pseudoconformal: head = scenario_pseudoconformal(cfg, q, out); break;
    case Scenario::subcritical: head = scenario_subcritical(cfg, q, out); break;
    case Scenario::threshold_census: head = scenario_census(cfg, q, out); break;
    case Scenario::operator_suite: head = scenario_operator_suite(cfg, &q, out); break;
    case Scenario::ground_state: break;
  }
  head["ground_state"] = {{"mass", q.mass}, {"energy", q.energy}, {"gn_constant", q.gn_constant}};
  return finish(cfg, out, std::move(head), start);
}

}  // namespace

std::string to_string(Scenario s) { return scenario_names().at(s); }

Scenario scenario_from_string(const std::string& name) {
  for (const auto& [k, v] : scenario_names())
    if (v == name) return k;
  throw InvalidArgument("unknown scenario: " + name);
}

GridPtr GridParams::make() const { return RadialGrid::make(d, nodes, rmax); }

ExperimentConfig ExperimentConfig::defaults(Scenario s) {
  ExperimentConfig c;
  c.scenario = s;
  switch (s) {
    case Scenario::ground_state: break;
    case Scenario::soliton:
      c.grid.nodes = 512;
      c.time = {0.0, 10.0, 1e-3, 1.0 / 64.0, 0.1, 10.0};
      break;
    case Scenario::pseudoconformal:
      c.grid.rmax = 40.0;
      c.time = {0.0, 3.0, 1e-3, 0.025, 0.1, 10.0};
      c.blowup_time = 2.0;
      break;
    case Scenario::subcritical:
      c.grid.rmax = 60.0;
      c.time = {0.0, 20.0, 2.5e-3, 0.5, 0.1, 5.0};
      break;
    case Scenario::threshold_census:
      c.grid.rmax = 60.0;
      c.time = {0.0, 10.0, 5e-3, 0.5, 0.1, 5.0};
      break;
    case Scenario::operator_suite:
      c.grid.rmax = 40.0;
      break;
  }
  return c;
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  if (!j.is_object()) throw InvalidArgument("config must be a JSON object");
  static const std::vector<std::string> keys{"scenario", "grid", "time", "mass_ratio", "shape", "census",
                                             "blowup_time", "soliton", "probes", "diagnostics", "seed",
                                             "output_dir", "certificate"};
  for (const auto& [k, v] : j.items())
    if (std::find(keys.begin(), keys.end(), k) == keys.end()) throw InvalidArgument("unknown config key: " + k);
  if (!j.contains("scenario")) throw InvalidArgument("config needs a scenario");
  try {
    auto c = defaults(scenario_from_string(j.at("scenario").get<std::string>()));
    if (auto g = j.find("grid"); g != j.end()) {
      c.grid.d = g->value("d", c.grid.d);
      c.grid.nodes = g->value("M", c.grid.nodes);
      c.grid.rmax = g->value("Rmax", c.grid.rmax);
    }
    if (auto t = j.find("time"); t != j.end()) {
      c.time.t0 = t->value("t0", c.time.t0);
      c.time.t1 = t->value("t1", c.time.t1);
      c.time.dt0 = t->value("dt0", c.time.dt0);
      c.time.snapshot_interval = t->value("snapshot_interval", c.time.snapshot_interval);
      c.time.c_nl = t->value("c_nl", c.time.c_nl);
      c.time.kinetic_factor = t->value("kinetic_factor", c.time.kinetic_factor);
    }
    c.mass_ratio = j.value("mass_ratio", c.mass_ratio);
    if (j.contains("shape")) c.shape = shape_from_string(j.at("shape").get<std::string>());
    if (auto cs = j.find("census"); cs != j.end()) {
      c.census_ratios = cs->value("ratios", c.census_ratios);
      if (cs->contains("shapes")) {
        c.census_shapes.clear();
        for (const auto& s : cs->at("shapes")) c.census_shapes.push_back(shape_from_string(s.get<std::string>()));
      }
    }
    c.blowup_time = j.value("blowup_time", c.blowup_time);
    if (auto s = j.find("soliton"); s != j.end()) {
      c.soliton_phase = s->value("phase", c.soliton_phase);
      c.soliton_scale = s->value("scale", c.soliton_scale);
    }
    if (auto p = j.find("probes"); p != j.end()) {
      c.probes.bernstein_n = p->value("bernstein_n", c.probes.bernstein_n);
      c.probes.mismatch_n = p->value("mismatch_n", c.probes.mismatch_n);
      c.probes.mismatch_r = p->value("mismatch_r", c.probes.mismatch_r);
      c.probes.inout_n = p->value("inout_n", c.probes.inout_n);
      c.probes.trials = p->value("trials", c.probes.trials);
    }
    if (auto d = j.find("diagnostics"); d != j.end()) {
      c.diagnostics.virial_radius = d->value("virial_radius", c.diagnostics.virial_radius);
      c.diagnostics.exterior_radius = d->value("exterior_radius", c.diagnostics.exterior_radius);
    }
    c.seed = j.value("seed", c.seed);
    if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
    if (j.contains("certificate") && !j.at("certificate").is_null())
      c.certificate = fs::path(j.at("certificate").get<std::string>());
    c.validate();
    return c;
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("config: ") + e.what());
  }
}

ExperimentConfig ExperimentConfig::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open config: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw InvalidArgument("config is not valid JSON: " + std::string(e.what()));
  }
  return from_json(j);
}

ojson ExperimentConfig::to_json() const {
  ojson j;
  j["scenario"] = to_string(scenario);
  j["grid"] = {{"d", grid.d}, {"M", grid.nodes}, {"Rmax", grid.rmax}};
  j["time"] = {{"t0", time.t0},
               {"t1", time.t1},
               {"dt0", time.dt0},
               {"snapshot_interval", time.snapshot_interval},
               {"c_nl", time.c_nl},
               {"kinetic_factor", time.kinetic_factor}};
  j["mass_ratio"] = mass_ratio;
  j["shape"] = shape_name(shape);
  ojson shapes = ojson::array();
  for (auto s : census_shapes) shapes.push_back(shape_name(s));
  j["census"] = {{"ratios", census_ratios}, {"shapes", shapes}};
  j["blowup_time"] = blowup_time;
  j["soliton"] = {{"phase", soliton_phase}, {"scale", soliton_scale}};
  j["probes"] = {{"bernstein_n", probes.bernstein_n},
                 {"mismatch_n", probes.mismatch_n},
                 {"mismatch_r", probes.mismatch_r},
                 {"inout_n", probes.inout_n},
                 {"trials", probes.trials}};
  j["diagnostics"] = {{"virial_radius", diagnostics.virial_radius},
                      {"exterior_radius", diagnostics.exterior_radius}};
  j["seed"] = seed;
  j["output_dir"] = output_dir.generic_string();
  j["certificate"] = certificate ? ojson(certificate->generic_string()) : ojson();
  return j;
}

void ExperimentConfig::validate() const {
  if (grid.d < 1) throw InvalidArgument("grid: dimension must be positive");
  if (grid.nodes < 16) throw InvalidArgument("grid: at least 16 nodes");
  if (!(grid.rmax > 0.0)) throw InvalidArgument("grid: Rmax must be positive");
  if (!(time.t1 > time.t0)) throw InvalidArgument("time: t1 must exceed t0");
  if (!(time.dt0 > 0.0)) throw InvalidArgument("time: dt0 must be positive");
  if (!(time.snapshot_interval >= 0.0)) throw InvalidArgument("time: snapshot_interval must be >= 0");
  if (!(time.kinetic_factor > 0.0)) throw InvalidArgument("time: kinetic_factor must be positive");
  if (!(mass_ratio > 0.0)) throw InvalidArgument("mass ratio must be positive");
  for (double r : census_ratios)
    if (!(r > 0.0)) throw InvalidArgument("census mass ratios must be positive");
  if (!(soliton_scale > 0.0)) throw InvalidArgument("soliton scale must be positive");
  if (probes.trials < 1) throw InvalidArgument("probes: trials must be positive");
  if (!(diagnostics.virial_radius > 0.0)) throw InvalidArgument("diagnostics: virial radius must be positive");
  if (!(diagnostics.exterior_radius >= 0.0)) throw InvalidArgument("diagnostics: exterior radius must be >= 0");
  if (output_dir.empty()) throw InvalidArgument("output_dir must be set");
}

std::string classify(const EvolutionResult& run, const DiagnosticsReport& report,
                     const ClassificationThresholds& th) {
  if (run.blowup.detected) return "blowup-like";
  const auto& t = report.t;
  if (t.size() >= 2) {
    const double mid = 0.5 * (t.front() + t.back());
    bool close = true;
    double nmin = kInf, nmax = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (t[i] < mid) continue;
      const double d = report.profile_distance[i];
      if (!(d <= th.profile_distance)) close = false;
      nmin = std::min(nmin, report.frequency_scale[i]);
      nmax = std::max(nmax, report.frequency_scale[i]);
    }
    if (close && nmax < th.frequency_variation * nmin) return "soliton-like";
  }
  const auto& rec = run.trajectory.records;
  if (!rec.empty()) {
    double linf = 0.0, kin = 0.0;
    for (const auto& r : rec) {
      linf = std::max(linf, r.linf);
      kin = std::max(kin, r.kinetic);
    }
    if (rec.back().linf <= th.amplitude_decay * linf && rec.back().kinetic < kin) return "disperse-like";
  }
  return "undecided";
}

int enforce_census_monotonicity(std::vector<CensusEntry>& entries) {
  int changed = 0;
  for (auto shape : {Shape::ground_state, Shape::gaussian}) {
    double first_blowup = kInf;
    for (const auto& e : entries)
      if (e.shape == shape && e.raw_label == "blowup-like") first_blowup = std::min(first_blowup, e.ratio);
    for (auto& e : entries)
      if (e.shape == shape && e.ratio > first_blowup && e.label == "disperse-like") {
        e.label = "undecided";
        ++changed;
      }
  }
  return changed;
}

ojson RunManifest::to_json() const {
  ojson j;
  j["config"] = config;
  j["code_version"] = code_version;
  j["wall_time_seconds"] = wall_time;
  const ClassificationThresholds th;
  j["classification_thresholds"] = {{"version", ClassificationThresholds::version},
                                    {"profile_distance", th.profile_distance},
                                    {"frequency_variation", th.frequency_variation},
                                    {"amplitude_decay", th.amplitude_decay}};
  j["frequency_scale_definition"] = "median: smallest 2^(k/8) holding half the L2 mass";
  j["headline"] = headline;
  ojson files = ojson::array();
  for (const auto& f : outputs) files.push_back({{"path", f.path}, {"sha256", f.sha256}});
  j["outputs"] = files;
  j["content_hash"] = content_hash;
  return j;
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned len = 0;
  if (!EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr))
    throw Error("SHA-256 failed");
  return bytes_to_hex(digest, len);
}

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return sha256_hex(s.str());
}

RadialField resample(const RadialField& f, const GridPtr& grid) {
  if (f.grid()->same_as(*grid)) return RadialField(grid, {f.values().begin(), f.values().end()});
  if (f.grid()->dimension() != grid->dimension()) throw InvalidArgument("resample: dimensions differ");
  return RadialField(grid, evaluate(f, grid->nodes()));
}

GroundStateSolution load_certified_ground_state(const fs::path& certificate, const GridPtr& grid) {
  std::ifstream in(certificate);
  if (!in) throw PreconditionFailed("missing certificate: " + certificate.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw PreconditionFailed("unreadable certificate: " + std::string(e.what()));
  }
  if (j.value("d", 0) != grid->dimension())
    throw PreconditionFailed("certificate dimension does not match the run grid");
  const auto snap = certificate.parent_path() / j.at("snapshot").get<std::string>();
  if (!fs::exists(snap)) throw PreconditionFailed("missing certificate snapshot: " + snap.string());
  auto profile = resample(read_snapshot(snap), grid);
  for (auto& v : profile.values()) v = v.real();
  return certify_ground_state(std::move(profile), j.value("method", std::string("certificate")));
}

RunManifest run(const ExperimentConfig& config) { return run_impl(config, nullptr); }

RunManifest run_with_ground_state(const ExperimentConfig& config, const GroundStateSolution& q) {
  return run_impl(config, &q);
}

std::string code_version() { return NLSLAB_VERSION; }

}  // namespace nlslab

// srm: batch front end for simulation, verification, limit sweeps and rolling paths.
//
// Exit codes: 0 success, 1 a check failed or drift exceeded --fail-drift,
// 2 usage or I/O error, 3 hypothesis violated, 4 numerical failure.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json_out.hpp"
#include "srm/srm.hpp"

namespace {

using srm::cli::json;
using srm::cli::RunConfig;
namespace io = srm::io;

constexpr int exit_fail      = 1;
constexpr int exit_usage     = 2;
constexpr int exit_hypothesis = 3;
constexpr int exit_numerical = 4;

struct SpecOptions
{
  int n = 0;
  std::string inertia;
  std::string mass;
  double s = 0.0;
  CLI::Option * n_opt = nullptr;
  CLI::Option * inertia_opt = nullptr;
  CLI::Option * mass_opt = nullptr;
  CLI::Option * s_opt = nullptr;
};

struct MomentumOptions
{
  std::string m0_file;
  std::string m0_values;
  std::uint64_t seed = 0;
  double scale = 1.0;
  CLI::Option * file_opt = nullptr;
  CLI::Option * values_opt = nullptr;
};

std::string list_string(const std::vector<double> & v) { return io::join(std::span<const double>(v)); }

void add_spec_options(CLI::App * sub, SpecOptions & o, bool allow_mass)
{
  o.n_opt       = sub->add_option("--n", o.n, "Dimension n (default inertia 1,...,n-1 if none given)");
  o.inertia_opt = sub->add_option("--inertia", o.inertia, "Sub-Riemannian inertias I2,...,In");
  if (allow_mass) {
    o.mass_opt = sub->add_option("--mass", o.mass, "Riemannian mass matrix J1,...,Jn");
    o.s_opt    = sub->add_option("--s", o.s, "Use the family J^s built from --inertia");
  }
}

srm::MassSpec resolve_spec(const SpecOptions & o, RunConfig & cfg)
{
  const bool has_i = o.inertia_opt->count() > 0;
  const bool has_m = o.mass_opt != nullptr && o.mass_opt->count() > 0;
  const bool has_s = o.s_opt != nullptr && o.s_opt->count() > 0;
  const bool has_n = o.n_opt->count() > 0;
  if (has_i && has_m) { throw srm::InvalidArgument("give either --inertia or --mass, not both"); }
  if (has_s && !has_i) { throw srm::InvalidArgument("--s requires --inertia"); }

  std::optional<srm::MassSpec> spec;
  if (has_m) {
    const auto v = io::parse_list(o.mass);
    spec         = srm::MassSpec::riemannian(v);
    cfg.emplace_back("mass", list_string(v));
  } else {
    std::vector<double> v;
    if (has_i) {
      v = io::parse_list(o.inertia);
    } else if (has_n) {
      if (o.n < 2) { throw srm::InvalidArgument("--n must be >= 2"); }
      for (int i = 1; i < o.n; ++i) { v.push_back(i); }
    } else {
      throw srm::InvalidArgument("one of --inertia, --mass or --n is required");
    }
    spec = has_s ? srm::MassSpec::family(v, o.s) : srm::MassSpec::sub_riemannian(v);
    cfg.emplace_back("inertia", list_string(v));
    if (has_s) { cfg.emplace_back("s", io::fmt(o.s)); }
  }
  if (has_n && o.n != spec->n()) {
    throw srm::InvalidArgument(
      "--n " + std::to_string(o.n) + " does not match the inertia data (n = " + std::to_string(spec->n()) + ")");
  }
  cfg.emplace(cfg.begin() + 1, "n", std::to_string(spec->n()));
  cfg.emplace(cfg.begin() + 2, "kind", srm::to_string(spec->kind()));
  return *spec;
}

void add_momentum_options(CLI::App * sub, MomentumOptions & o)
{
  o.file_opt   = sub->add_option("--m0", o.m0_file, "File with the upper-triangle entries M_12,M_13,...");
  o.values_opt = sub->add_option("--m0-values", o.m0_values, "Upper-triangle entries inline, comma separated");
  sub->add_option("--seed", o.seed, "Seed for a random initial momentum")->capture_default_str();
  sub->add_option("--scale", o.scale, "Entry range of the random momentum")->capture_default_str();
}

std::vector<double> read_m0_file(const std::string & path)
{
  const std::string text = io::read_file(path);
  std::vector<double> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto t = io::trim(line);
    if (t.empty() || t.front() == '#') { continue; }
    const auto toks = io::split(t, ',');
    double probe    = 0.0;
    const auto first = io::trim(toks.front());
    if (std::from_chars(first.data(), first.data() + first.size(), probe).ec != std::errc{}) { continue; }
    for (const auto & tok : toks) {
      if (!io::trim(tok).empty()) { out.push_back(io::parse_double(tok)); }
    }
  }
  return out;
}

srm::SkewMatrix resolve_momentum(const MomentumOptions & o, int n, RunConfig & cfg)
{
  if (o.file_opt->count() > 0 && o.values_opt->count() > 0) {
    throw srm::InvalidArgument("give either --m0 or --m0-values, not both");
  }
  std::vector<double> v;
  if (o.file_opt->count() > 0) {
    v = read_m0_file(o.m0_file);
    cfg.emplace_back("m0", o.m0_file);
  } else if (o.values_opt->count() > 0) {
    v = io::parse_list(o.m0_values);
  } else {
    cfg.emplace_back("seed", std::to_string(o.seed));
    cfg.emplace_back("scale", io::fmt(o.scale));
    return srm::random_skew(n, o.seed, o.scale);
  }
  if (static_cast<int>(v.size()) != srm::so_dim(n)) {
    throw srm::InvalidArgument(
      "initial momentum needs " + std::to_string(srm::so_dim(n)) + " entries, got " + std::to_string(v.size()));
  }
  cfg.emplace_back("m0_values", list_string(v));
  return srm::SkewMatrix::from_upper(n, v);
}

void emit(const std::string & path, const std::string & content)
{
  if (path.empty()) {
    std::cout << content;
  } else {
    io::write_file(path, content);
  }
}

std::string dump(const json & j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------- simulate

struct SimulateOptions
{
  SpecOptions spec;
  MomentumOptions mom;
  double dt = 1e-3;
  long steps = 1000;
  std::string scheme = "rk4";
  bool reconstruct = false;
  long every = 1;
  std::string out;
  std::string report;
  std::string format = "csv";
  double fail_drift = 0.0;
  CLI::Option * fail_opt = nullptr;
};

int run_simulate(SimulateOptions & o)
{
  RunConfig cfg{{"subcommand", "simulate"}};
  const srm::MassSpec spec = resolve_spec(o.spec, cfg);
  const srm::SkewMatrix m0 = resolve_momentum(o.mom, spec.n(), cfg);
  if (o.every < 1) { throw srm::InvalidArgument("--every must be >= 1"); }

  srm::IntegrateOptions iopt;
  iopt.dt          = o.dt;
  iopt.steps       = o.steps;
  iopt.scheme      = o.scheme == "midpoint" ? srm::Scheme::midpoint : srm::Scheme::rk4;
  iopt.reconstruct = o.reconstruct;
  cfg.emplace_back("dt", io::fmt(o.dt));
  cfg.emplace_back("steps", std::to_string(o.steps));
  cfg.emplace_back("scheme", o.scheme);
  cfg.emplace_back("reconstruct", o.reconstruct ? "true" : "false");
  cfg.emplace_back("every", std::to_string(o.every));
  cfg.emplace_back("format", o.format);
  cfg.emplace_back("out", o.out);
  cfg.emplace_back("report", o.report);
  if (o.fail_opt->count() > 0) { cfg.emplace_back("fail_drift", io::fmt(o.fail_drift)); }

  srm::Trajectory traj = srm::integrate(m0, spec, iopt);

  const srm::IntegralFamily fam = srm::integral_family(spec);
  std::vector<srm::ScalarFunction> logged{srm::hamiltonian_function(spec)};
  logged.insert(logged.end(), fam.casimirs.begin(), fam.casimirs.end());
  srm::record_invariants(traj, logged);

  std::vector<srm::ScalarFunction> monitored = logged;
  for (const auto & e : fam.entries) { monitored.push_back(e.fn); }
  const srm::DriftReport drift = srm::monitor(traj, monitored);

  const int n = spec.n();
  std::string content;
  if (o.format == "json") {
    json j = srm::cli::envelope(cfg);
    json samples = json::array();
    for (std::size_t s = 0; s < traj.size(); s += static_cast<std::size_t>(o.every)) {
      json row;
      row["t"] = traj.times[s];
      row["M"] = traj.momenta[s].upper();
      if (traj.has_group()) {
        const srm::Matrix & g = traj.group[s];
        std::vector<double> flat;
        for (int a = 0; a < n; ++a) {
          for (int b = 0; b < n; ++b) { flat.push_back(g(a, b)); }
        }
        row["g"] = flat;
      }
      json inv = json::object();
      for (std::size_t q = 0; q < traj.invariant_names.size(); ++q) { inv[traj.invariant_names[q]] = traj.invariant_log[s][q]; }
      row["invariants"] = inv;
      samples.push_back(row);
    }
    j["samples"] = samples;
    content      = dump(j);
  } else {
    content = srm::cli::csv_preamble(cfg);
    std::vector<std::string> header{"t"};
    for (const auto & h : srm::upper_header(n)) { header.push_back(h); }
    if (traj.has_group()) {
      for (int a = 1; a <= n; ++a) {
        for (int b = 1; b <= n; ++b) { header.push_back("g_" + std::to_string(a) + std::to_string(b)); }
      }
    }
    header.insert(header.end(), traj.invariant_names.begin(), traj.invariant_names.end());
    content += io::join(std::span<const std::string>(header)) + "\n";
    for (std::size_t s = 0; s < traj.size(); s += static_cast<std::size_t>(o.every)) {
      std::vector<double> row{traj.times[s]};
      const auto up = traj.momenta[s].upper();
      row.insert(row.end(), up.begin(), up.end());
      if (traj.has_group()) {
        const srm::Matrix & g = traj.group[s];
        for (int a = 0; a < n; ++a) {
          for (int b = 0; b < n; ++b) { row.push_back(g(a, b)); }
        }
      }
      row.insert(row.end(), traj.invariant_log[s].begin(), traj.invariant_log[s].end());
      content += io::join(std::span<const double>(row)) + "\n";
    }
  }
  emit(o.out, content);

  const bool drift_ok = o.fail_opt->count() == 0 || drift.worst() <= o.fail_drift;
  json rep            = srm::cli::envelope(cfg);
  rep["invariants"]   = srm::cli::to_json(drift);
  rep["worst_relative_drift"] = drift.worst();
  rep["integrals_at_t0"]      = srm::cli::integral_table(fam, m0);
  rep["pass"]                 = drift_ok;
  if (o.report.empty()) {
    if (!o.out.empty()) { std::cout << dump(rep); }
  } else {
    io::write_file(o.report, dump(rep));
  }
  if (!drift_ok) {
    std::cerr << "invariant drift " << io::fmt(drift.worst()) << " exceeds --fail-drift " << io::fmt(o.fail_drift) << "\n";
    return exit_fail;
  }
  return 0;
}

// ---------------------------------------------------------------- verify

struct VerifyOptions
{
  SpecOptions spec;
  std::string check = "all";
  std::uint64_t seed = 0;
  int trials = 100;
  std::string out;
};

int run_verify(VerifyOptions & o)
{
  RunConfig cfg{{"subcommand", "verify"}};
  const srm::MassSpec spec = resolve_spec(o.spec, cfg);
  cfg.emplace_back("check", o.check);
  cfg.emplace_back("seed", std::to_string(o.seed));
  cfg.emplace_back("trials", std::to_string(o.trials));
  cfg.emplace_back("out", o.out);

  std::vector<std::string> names;
  if (o.check == "all") {
    names = {"bihamiltonian", "recursion", "involution", "jacobi", "independence"};
  } else {
    names = {o.check};
  }

  json j        = srm::cli::envelope(cfg);
  json reports  = json::array();
  bool all_pass = true;
  for (const auto & name : names) {
    srm::VerificationReport r;
    if (name == "bihamiltonian") {
      r = srm::check_bihamiltonian(spec, o.seed, o.trials);
    } else if (name == "recursion") {
      r = srm::check_recursion(spec, o.seed, o.trials);
    } else if (name == "involution") {
      r = srm::check_involution(spec, o.seed, o.trials);
    } else if (name == "jacobi") {
      r = srm::check_jacobi_compatibility(spec, o.seed, o.trials);
    } else {
      r = srm::check_independence(spec, o.seed, o.trials);
    }
    all_pass = all_pass && r.pass;
    if (!o.out.empty()) {
      std::cout << r.check << ": " << (r.pass ? "PASS" : "FAIL") << " max_residual=" << io::fmt(r.max_residual)
                << " threshold=" << io::fmt(r.threshold) << "\n";
    }
    reports.push_back(srm::cli::to_json(r));
  }
  j["reports"] = reports;
  j["pass"]    = all_pass;
  emit(o.out, dump(j));
  return all_pass ? 0 : exit_fail;
}

// ---------------------------------------------------------------- limit

struct LimitOptions
{
  SpecOptions spec;
  MomentumOptions mom;
  int k = 3;
  int r = 2;
  std::string s_values = "10,100,1000,10000";
  std::string out;
  std::string format = "csv";
};

int run_limit(LimitOptions & o)
{
  RunConfig cfg{{"subcommand", "limit"}};
  const srm::MassSpec spec = resolve_spec(o.spec, cfg);
  const srm::SkewMatrix m  = resolve_momentum(o.mom, spec.n(), cfg);
  const auto s_values      = io::parse_list(o.s_values);
  cfg.emplace_back("k", std::to_string(o.k));
  cfg.emplace_back("r", std::to_string(o.r));
  cfg.emplace_back("s_values", list_string(s_values));
  cfg.emplace_back("format", o.format);
  cfg.emplace_back("out", o.out);

  const srm::LimitSweep sw = srm::limit_sweep(m, spec.inertias(), o.k, o.r, s_values);
  std::string content;
  if (o.format == "json") {
    json j          = srm::cli::envelope(cfg);
    j["sweep"]      = srm::cli::to_json(sw);
    content         = dump(j);
  } else {
    content = srm::cli::csv_preamble(cfg) + "s,scaled_value,target,abs_error\n";
    for (std::size_t i = 0; i < sw.s_values.size(); ++i) {
      const double row[] = {sw.s_values[i], sw.scaled_values[i], sw.target, sw.abs_errors[i]};
      content += io::join(std::span<const double>(row)) + "\n";
    }
  }
  emit(o.out, content);
  if (!o.out.empty()) {
    std::cout << "target=" << io::fmt(sw.target) << " extrapolated=" << io::fmt(sw.extrapolated)
              << " observed_rate=" << io::fmt(sw.observed_rate) << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------- roll

struct RollOptions
{
  double i2 = 1.0;
  double i3 = 2.0;
  double casimir = 3.0;
  double t_max = 10.0;
  double dt = 1e-3;
  std::string out;
  std::string svg;
  std::string format = "csv";
};

int run_roll(RollOptions & o)
{
  const srm::RollingParams p{o.i2, o.i3, o.casimir};
  p.validate();
  RunConfig cfg{
    {"subcommand", "roll"},
    {"i2", io::fmt(o.i2)},
    {"i3", io::fmt(o.i3)},
    {"casimir", io::fmt(o.casimir)},
    {"t_max", io::fmt(o.t_max)},
    {"dt", io::fmt(o.dt)},
    {"format", o.format},
    {"out", o.out},
    {"svg", o.svg},
  };
  const auto km   = p.modulus();
  const auto path = srm::contact_path(p, o.t_max, o.dt);
  double worst    = 0.0;
  for (const auto & q : path) { worst = std::max(worst, std::abs(srm::curve_residual(q.y, q.z, p))); }

  std::string content;
  if (o.format == "json") {
    json j                 = srm::cli::envelope(cfg);
    j["regime"]            = srm::to_string(km.regime);
    j["k"]                 = km.k;
    j["max_curve_residual"] = worst;
    json rows = json::array();
    for (const auto & q : path) {
      rows.push_back({q.t, q.y, q.z, q.m[0], q.m[1], q.m[2], srm::rolling_hamiltonian(q.m, p.i2, p.i3), q.m.squaredNorm()});
    }
    j["columns"] = {"t", "y", "z", "M23", "M12", "M13", "H", "C"};
    j["rows"]    = rows;
    content      = dump(j);
  } else {
    content = srm::cli::csv_preamble(cfg) + "t,y,z,M23,M12,M13,H,C\n";
    for (const auto & q : path) {
      const double row[] = {q.t, q.y, q.z, q.m[0], q.m[1], q.m[2], srm::rolling_hamiltonian(q.m, p.i2, p.i3), q.m.squaredNorm()};
      content += io::join(std::span<const double>(row)) + "\n";
    }
  }
  emit(o.out, content);
  if (!o.svg.empty()) {
    std::string svg = srm::paths_to_svg({{srm::to_string(km.regime), path}});
    std::string pre = "<!-- format_version=" + std::string(srm::cli::format_version);
    for (const auto & [k, v] : cfg) { pre += " " + k + "=" + v; }
    io::write_file(o.svg, pre + " -->\n" + svg);
  }
  if (!o.out.empty()) {
    std::cout << "regime=" << srm::to_string(km.regime) << " k=" << io::fmt(km.k)
              << " max_curve_residual=" << io::fmt(worst) << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------- config

/// Replaces "--config FILE" by "--key=value" tokens placed right after the
/// subcommand name, so explicit flags (which come later) take precedence.
std::vector<std::string> expand_config(std::vector<std::string> args)
{
  std::vector<std::string> injected;
  std::vector<std::string> rest;
  for (std::size_t i = 0; i < args.size(); ++i) {
    std::string path;
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) { throw srm::InvalidArgument("--config needs a file"); }
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
      continue;
    }
    std::istringstream in(io::read_file(path));
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto t = io::trim(line);
      if (t.empty() || t.front() == '#') { continue; }
      const auto eq = t.find('=');
      if (eq == std::string_view::npos) {
        throw srm::InvalidArgument(path + ":" + std::to_string(lineno) + ": expected key=value");
      }
      std::string key(io::trim(t.substr(0, eq)));
      while (!key.empty() && key.front() == '-') { key.erase(0, 1); }
      injected.push_back("--" + key + "=" + std::string(io::trim(t.substr(eq + 1))));
    }
  }
  if (injected.empty()) { return rest; }
  const auto at = rest.empty() || rest.front().rfind("-", 0) == 0 ? rest.begin() : rest.begin() + 1;
  rest.insert(at, injected.begin(), injected.end());
  return rest;
}

}  // namespace

int main(int argc, char ** argv)
{
  CLI::App app{"Sub-Riemannian and Manakov tops on SO(n): simulation, verification, limits, rolling"};
  app.name("srm");
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.add_option("--config", "key=value file; explicit flags override it");

  SimulateOptions sim;
  auto * s = app.add_subcommand("simulate", "Integrate the Euler equations and monitor invariants");
  add_spec_options(s, sim.spec, true);
  add_momentum_options(s, sim.mom);
  s->add_option("--dt", sim.dt, "Time step")->capture_default_str();
  s->add_option("--steps", sim.steps, "Number of steps")->capture_default_str();
  s->add_option("--scheme", sim.scheme, "rk4 or midpoint")->check(CLI::IsMember({"rk4", "midpoint"}))->capture_default_str();
  s->add_flag("--reconstruct", sim.reconstruct, "Also integrate g' = g Omega from g(0) = Id");
  s->add_option("--every", sim.every, "Write every k-th sample")->capture_default_str();
  s->add_option("--out", sim.out, "Trajectory file (stdout if omitted)");
  s->add_option("--report", sim.report, "Drift report JSON file");
  s->add_option("--format", sim.format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  sim.fail_opt = s->add_option("--fail-drift", sim.fail_drift, "Exit 1 if any relative drift exceeds this");

  VerifyOptions ver;
  auto * v = app.add_subcommand("verify", "Run the Poisson-structure verification checks");
  add_spec_options(v, ver.spec, false);
  v->add_option("--check", ver.check, "bihamiltonian|recursion|involution|jacobi|independence|all")
    ->check(CLI::IsMember({"bihamiltonian", "recursion", "involution", "jacobi", "independence", "all"}))
    ->capture_default_str();
  v->add_option("--seed", ver.seed, "Random seed")->capture_default_str();
  v->add_option("--trials", ver.trials, "Random points per check")->capture_default_str();
  v->add_option("--out", ver.out, "Report JSON file (stdout if omitted)");

  LimitOptions lim;
  auto * l = app.add_subcommand("limit", "Sweep the scaled Riemannian integrals towards h_{k,r}");
  l->alias("sweep");
  add_spec_options(l, lim.spec, false);
  add_momentum_options(l, lim.mom);
  l->add_option("--k", lim.k, "Degree k")->capture_default_str();
  l->add_option("--r", lim.r, "Codegree r")->capture_default_str();
  l->add_option("--s-values", lim.s_values, "Increasing s values >= 1")->capture_default_str();
  l->add_option("--out", lim.out, "Output file (stdout if omitted)");
  l->add_option("--format", lim.format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();

  RollOptions rol;
  auto * r = app.add_subcommand("roll", "Contact path of the rolling ball");
  r->add_option("--i2", rol.i2, "Inertia I2")->capture_default_str();
  r->add_option("--i3", rol.i3, "Inertia I3 > I2")->capture_default_str();
  r->add_option("--casimir", rol.casimir, "Casimir level C > I2")->capture_default_str();
  r->add_option("--t-max", rol.t_max, "Final time")->capture_default_str();
  r->add_option("--dt", rol.dt, "Sample spacing")->capture_default_str();
  r->add_option("--out", rol.out, "Path file (stdout if omitted)");
  r->add_option("--svg", rol.svg, "Also write an SVG polyline");
  r->add_option("--format", rol.format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();

  for (auto * sub : {s, v, l, r}) {
    for (auto * opt : sub->get_options()) { opt->multi_option_policy(CLI::MultiOptionPolicy::TakeLast); }
  }

  try {
    std::vector<std::string> args = expand_config({argv + 1, argv + argc});
    std::reverse(args.begin(), args.end());
    try {
      app.parse(args);
    } catch (const CLI::ParseError & e) {
      const int code = app.exit(e);
      return code == 0 ? 0 : exit_usage;
    }
    if (s->parsed()) { return run_simulate(sim); }
    if (v->parsed()) { return run_verify(ver); }
    if (l->parsed()) { return run_limit(lim); }
    return run_roll(rol);
  } catch (const srm::HypothesisViolated & e) {
    std::cerr << "hypothesis violated: " << e.what() << "\n";
    return exit_hypothesis;
  } catch (const srm::NumericalFailure & e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return exit_numerical;
  } catch (const srm::InvalidArgument & e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return exit_usage;
  } catch (const srm::NotApplicable & e) {
    std::cerr << "not applicable: " << e.what() << "\n";
    return exit_usage;
  } catch (const io::IoError & e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return exit_usage;
  } catch (const std::exception & e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_fail;
  }
}

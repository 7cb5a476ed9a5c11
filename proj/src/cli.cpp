#include "niplab/cli.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "niplab/errors.hpp"
#include "niplab/fourier.hpp"
#include "niplab/fring_tenney.hpp"
#include "niplab/metric.hpp"
#include "niplab/nip.hpp"
#include "niplab/operators.hpp"
#include "niplab/schedule.hpp"
#include "niplab/spectra.hpp"

namespace niplab::cli {

namespace {

using json = nlohmann::ordered_json;

struct Config {
  std::optional<int> n;
  std::optional<double> L;
  std::string out = "-";
  std::string format;
  std::string config_path;

  std::string model;
  std::string pair;
  double lambda = 1.0;
  double j = 1.0;
  double eps = 0.5;
  double delta = 0.0;
  std::string g = "poly:1";
  double t = 0.0;
  int k = 8;
  double tol = 1e-3;
  std::string mode;
  bool relative = false;
  double tau_abs = 1e-6;
  double tau_rel = 1e-6;
  bool no_filter = false;

  std::string theta = "closed";
  double quasi_tol = 1e-6;
  double consistency_tol = 1e-12;

  double t0 = 0.0;
  double t1 = 1.0;
  double dt = 1e-3;
  double abort = 1e-2;
  double drift_tol = 1e-6;
  double center = 0.0;
  double width = 1.0;
  int every = 1;
  std::vector<std::string> observe;
  std::string generator = "G";

  std::string alpha = "poly:0";
  std::string beta = "poly:0";
  std::string gamma = "poly:0";
  std::string delta_schedule = "poly:0";
  std::string kappas = "1,1,1";
  std::optional<double> c2;
  std::string sigma;
  double fd = 1e-3;
  double ft_t = 0.25;
};

// ---------------------------------------------------------------------------
// Output

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

class Sink {
 public:
  Sink(const Config& c, std::ostream& fallback) : fallback_(fallback) {
    format_ = c.format;
    if (format_.empty()) {
      const auto ends_with = [&](const std::string& s) {
        return c.out.size() >= s.size() && c.out.compare(c.out.size() - s.size(), s.size(), s) == 0;
      };
      format_ = ends_with(".json") ? "json" : "csv";
    }
    if (format_ != "csv" && format_ != "json") {
      throw Error(ErrorCode::invalid_configuration, "--format must be csv or json");
    }
    path_ = c.out;
  }

  bool json_format() const { return format_ == "json"; }

  void write(const Table& table, const json& doc) {
    std::ostringstream os;
    if (json_format()) {
      os << doc.dump(2) << '\n';
    } else {
      os << join(table.header) << '\n';
      for (const auto& r : table.rows) os << join(r) << '\n';
    }
    if (path_ == "-") {
      fallback_ << os.str();
      return;
    }
    std::ofstream f(path_, std::ios::binary);
    if (!f) throw Error(ErrorCode::invalid_configuration, "cannot open output file " + path_);
    f << os.str();
  }

 private:
  static std::string join(const std::vector<std::string>& cells) {
    std::string s;
    for (std::size_t i = 0; i < cells.size(); ++i) s += (i ? "," : "") + cells[i];
    return s;
  }

  std::ostream& fallback_;
  std::string format_;
  std::string path_;
};

json cplx_json(cplx z) { return json{{"re", z.real()}, {"im", z.imag()}}; }

// ---------------------------------------------------------------------------
// Grid and model resolution

GridSpec resolve_grid(const Config& c, const GridSpec& fallback) {
  int n = fallback.n_points();
  double L = fallback.half_width();
  if (const char* env = std::getenv("NIPLAB_GRID"); env != nullptr && *env != '\0') {
    const std::string s(env);
    const auto comma = s.find(',');
    try {
      if (comma == std::string::npos) throw std::invalid_argument("comma");
      std::size_t used = 0;
      n = std::stoi(s.substr(0, comma), &used);
      if (used != comma) throw std::invalid_argument("n");
      const std::string rest = s.substr(comma + 1);
      L = std::stod(rest, &used);
      if (used != rest.size()) throw std::invalid_argument("L");
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::invalid_configuration, "NIPLAB_GRID must look like 'n,L', got '" + s + "'");
    }
  }
  if (c.n) n = *c.n;
  if (c.L) L = *c.L;
  return GridSpec(n, L);
}

json grid_json(const GridSpec& g) { return json{{"n", g.n_points()}, {"L", g.half_width()}}; }

bool shifted_model(const std::string& m) { return m == "qtilde" || m == "bg"; }

Schedule parse_schedule(const std::string& text, double t0, double t1) {
  Schedule s = Schedule::parse(text);
  s.with_domain(t0, t1);
  return s;
}

double njm_coupling(const Config& c) {
  const double gv = Schedule::parse(c.g).value(c.t);
  if (!(gv > 0.0)) throw Error(ErrorCode::domain, "g(t) must be positive, got " + num(gv));
  return gv;
}

OperatorMatrix build_model(const Config& c, const GridSpec& grid) {
  const std::string& m = c.model;
  if (m == "aho") return build_aho_radial(c.lambda, c.j, grid);
  if (m == "qtilde") return build_qtilde(c.lambda, c.j, c.eps, grid);
  if (m == "bb") return build_bb(c.lambda, c.delta, grid);
  if (m == "jm") return build_jm_mapped(c.lambda, grid);
  if (m == "jm-avatar") return build_jm_avatar(c.lambda, grid);
  if (m == "bg") return build_bg(c.lambda, c.j, c.eps, grid);
  if (m == "bg-avatar") return build_bg_avatar(c.lambda, c.j, grid);
  if (m == "njm") return build_njm_mapped(njm_coupling(c), grid);
  if (m == "njm-avatar") return build_njm_avatar(njm_coupling(c), grid);
  throw Error(ErrorCode::invalid_configuration, "unknown model '" + m + "'");
}

json model_params(const Config& c) {
  json p;
  p["model"] = c.model;
  if (c.model == "njm" || c.model == "njm-avatar") {
    p["g"] = c.g;
    p["t"] = c.t;
    return p;
  }
  p["lambda"] = c.lambda;
  if (c.model == "aho" || c.model == "qtilde" || c.model == "bg" || c.model == "bg-avatar") p["j"] = c.j;
  if (c.model == "qtilde" || c.model == "bg") p["eps"] = c.eps;
  if (c.model == "bb") p["delta"] = c.delta;
  return p;
}

ArtifactFilter filter_of(const Config& c) {
  ArtifactFilter f;
  f.enabled = !c.no_filter;
  return f;
}

// ---------------------------------------------------------------------------
// Commands

int cmd_spectrum(const Config& c, std::ostream& out, std::ostream& err) {
  Sink sink(c, out);
  const GridSpec grid = resolve_grid(c, shifted_model(c.model) ? shifted_default_grid() : quartic_default_grid());
  const OperatorMatrix m = build_model(c, grid);
  const Spectrum s = eigensolve(m, c.k, filter_of(c));
  const auto low = s.lowest();
  if (low.size() < static_cast<std::size_t>(c.k)) {
    throw Error(ErrorCode::numerical, "only " + std::to_string(low.size()) +
                                          " eigenvalues survived the artifact filter; enlarge the box");
  }
  Table table{{"index", "re", "im", "real"}, {}};
  json values = json::array();
  for (std::size_t i = 0; i < low.size(); ++i) {
    const bool real = is_real(low[i], c.tau_abs, c.tau_rel);
    table.rows.push_back({std::to_string(i), num(low[i].real()), num(low[i].imag()), real ? "1" : "0"});
    json e = cplx_json(low[i]);
    e["real"] = real;
    values.push_back(e);
  }
  json doc{{"command", "spectrum"}, {"params", model_params(c)}, {"grid", grid_json(grid)},
           {"filtered_count", s.filtered_count}, {"tau_abs", c.tau_abs}, {"tau_rel", c.tau_rel},
           {"eigenvalues", values}};
  sink.write(table, doc);
  err << "spectrum: " << low.size() << " eigenvalues, " << s.filtered_count << " filtered as box artifacts\n";
  return exit_pass;
}

int cmd_isospectral(const Config& c, std::ostream& out, std::ostream& err) {
  Sink sink(c, out);
  Config ca = c;
  Config cb = c;
  MatchMode mode = MatchMode::bijective;
  bool shifted = false;
  if (c.pair == "jm") {
    ca.model = "jm-avatar";
    cb.model = "jm";
  } else if (c.pair == "njm") {
    ca.model = "njm-avatar";
    cb.model = "njm";
  } else if (c.pair == "bg") {
    ca.model = "bg-avatar";
    cb.model = "bg";
    mode = MatchMode::subset;
    shifted = true;
  } else if (c.pair == "aho-qtilde") {
    ca.model = "aho";
    cb.model = "qtilde";
    mode = MatchMode::subset;
    shifted = true;
  } else {
    throw Error(ErrorCode::invalid_configuration, "unknown pair '" + c.pair + "'");
  }
  if (c.mode == "subset") {
    mode = MatchMode::subset;
  } else if (c.mode == "bijective") {
    mode = MatchMode::bijective;
  } else if (!c.mode.empty()) {
    throw Error(ErrorCode::invalid_configuration, "--mode must be bijective or subset");
  }
  const GridSpec grid = resolve_grid(c, shifted ? shifted_default_grid() : quartic_default_grid());
  const OperatorMatrix ma = build_model(ca, grid);
  const OperatorMatrix mb = build_model(cb, grid);
  const Spectrum sa = eigensolve(ma, c.k, filter_of(c));
  const Spectrum sb = eigensolve(mb, c.k, filter_of(c));
  const MatchReport r = compare_spectra(sa, sb, c.k, c.tol, mode, c.relative);

  Table table{{"kind", "index_a", "index_b", "re_a", "im_a", "re_b", "im_b", "deviation"}, {}};
  json pairs = json::array();
  for (const auto& p : r.pairs) {
    const cplx ea = sa.eigenvalues[p.index_a];
    const cplx eb = sb.eigenvalues[p.index_b];
    table.rows.push_back({p.within_tolerance ? "pair" : "mismatch", std::to_string(p.index_a),
                          std::to_string(p.index_b), num(ea.real()), num(ea.imag()), num(eb.real()), num(eb.imag()),
                          num(p.deviation)});
    pairs.push_back(json{{"index_a", p.index_a}, {"index_b", p.index_b}, {"a", cplx_json(ea)},
                         {"b", cplx_json(eb)}, {"deviation", p.deviation}, {"within_tolerance", p.within_tolerance}});
  }
  json surplus = json::array();
  for (int ib : r.unmatched_b) {
    const cplx eb = sb.eigenvalues[ib];
    if (mode == MatchMode::subset) {
      table.rows.push_back({"surplus_b", "", std::to_string(ib), "", "", num(eb.real()), num(eb.imag()), ""});
    }
    surplus.push_back(json{{"index_b", ib}, {"b", cplx_json(eb)}});
  }
  json missing = json::array();
  for (int ia : r.unmatched_a) {
    const cplx ea = sa.eigenvalues[ia];
    if (mode == MatchMode::subset) {
      table.rows.push_back({"unmatched_a", std::to_string(ia), "", num(ea.real()), num(ea.imag()), "", "", ""});
    }
    missing.push_back(json{{"index_a", ia}, {"a", cplx_json(ea)}});
  }
  json doc{{"command", "isospectral"},
           {"pair", c.pair},
           {"models", json::array({model_params(ca), model_params(cb)})},
           {"grid", grid_json(grid)},
           {"mode", mode == MatchMode::subset ? "subset" : "bijective"},
           {"tolerance", c.tol},
           {"relative", c.relative},
           {"matched", r.matched},
           {"max_deviation", r.max_deviation},
           {"max_relative_deviation", r.max_relative_deviation},
           {"pairs", pairs},
           {"unmatched_a", missing},
           {"unmatched_b", surplus},
           {"filtered_count_a", sa.filtered_count},
           {"filtered_count_b", sb.filtered_count}};
  sink.write(table, doc);
  err << "isospectral " << c.pair << ": max deviation " << num(r.max_deviation) << ", "
      << (r.matched ? "matched" : "MISMATCH") << '\n';
  return r.matched ? exit_pass : exit_claim_failed;
}

int cmd_metric_check(const Config& c, std::ostream& out, std::ostream& err) {
  Sink sink(c, out);
  const GridSpec grid = resolve_grid(c, quartic_default_grid());
  std::optional<OperatorMatrix> h;
  double g_value = 0.0;
  if (c.model == "jm") {
    if (!(c.lambda > 0.0)) throw Error(ErrorCode::domain, "metric-check needs lambda > 0");
    g_value = c.lambda * c.lambda;
    h = build_jm_mapped(c.lambda, grid);
  } else if (c.model == "njm") {
    g_value = njm_coupling(c);
    h = build_njm_mapped(g_value, grid);
  } else {
    throw Error(ErrorCode::invalid_configuration, "metric-check supports --model jm or njm");
  }
  std::optional<MetricOperator> theta;
  std::optional<DysonMap> omega;
  if (c.theta == "closed") {
    theta = c.model == "jm" ? build_jm_metric(c.lambda, grid) : build_jm_metric(std::sqrt(g_value), grid);
    omega = build_njm_dyson(g_value, grid);
  } else if (c.theta == "identity") {
    theta = metric_from_symbol(grid, Eigen::VectorXcd::Ones(grid.n_points()));
    omega = factor_metric(*theta);
  } else {
    throw Error(ErrorCode::invalid_configuration, "--theta must be closed or identity");
  }
  const double quasi = quasi_hermiticity_residual(*h, *theta);
  const double consistency = relative_difference(omega->matrix.entries.adjoint() * omega->matrix.entries,
                                                 theta->matrix.entries);
  const Hermitized herm = hermitize(*h, *omega);
  const bool pass = quasi < c.quasi_tol && theta->positive && consistency < c.consistency_tol;

  Table table{{"quantity", "value"},
              {{"quasi_hermiticity_residual", num(quasi)},
               {"metric_positive", theta->positive ? "1" : "0"},
               {"metric_cutoff_pmax", num(theta->cutoff_pmax)},
               {"dyson_consistency_residual", num(consistency)},
               {"hermitized_residual", num(herm.residual)},
               {"hermitized_cutoff_pmax", num(herm.cutoff_pmax)},
               {"hermitized_condition_number", num(herm.condition_number)},
               {"pass", pass ? "1" : "0"}}};
  json params{{"model", c.model}, {"theta", c.theta}};
  if (c.model == "jm") {
    params["lambda"] = c.lambda;
  } else {
    params["g"] = c.g;
    params["t"] = c.t;
    params["g_value"] = g_value;
  }
  json doc{{"command", "metric-check"},
           {"params", params},
           {"grid", grid_json(grid)},
           {"quasi_hermiticity_residual", quasi},
           {"metric_positive", theta->positive},
           {"metric_cutoff_pmax", theta->cutoff_pmax},
           {"dyson_consistency_residual", consistency},
           {"hermitized_residual", herm.residual},
           {"hermitized_cutoff_pmax", herm.cutoff_pmax},
           {"hermitized_condition_number", herm.condition_number},
           {"thresholds", {{"quasi_hermiticity", c.quasi_tol}, {"dyson_consistency", c.consistency_tol}}},
           {"pass", pass}};
  sink.write(table, doc);
  err << "metric-check: quasi-Hermiticity " << num(quasi) << ", Omega^dagger Omega - Theta " << num(consistency)
      << (pass ? ", pass" : ", FAIL") << '\n';
  return pass ? exit_pass : exit_claim_failed;
}

int cmd_evolve(const Config& c, std::ostream& out, std::ostream& err) {
  Sink sink(c, out);
  if (c.model != "njm") throw Error(ErrorCode::invalid_configuration, "evolve supports --model njm");
  if (!(c.t1 > c.t0)) throw Error(ErrorCode::invalid_configuration, "--t1 must exceed --t0");
  if (!(c.dt > 0.0)) throw Error(ErrorCode::invalid_configuration, "--dt must be positive");
  if (c.every < 1) throw Error(ErrorCode::invalid_configuration, "--every must be at least 1");
  const GridSpec grid = resolve_grid(c, evolution_default_grid());
  const NjmFamily family(parse_schedule(c.g, c.t0, c.t1), grid);

  OperatorFamily generator;
  if (c.generator == "G") {
    generator = [&](double t) { return family.generator(t); };
  } else if (c.generator == "zero") {
    // The Heisenberg picture G = 0 only closes for a stationary metric.
    if (!family.schedule().is_constant()) {
      throw Error(ErrorCode::invalid_configuration,
                  "G = 0 (non-Hermitian Heisenberg picture) is only consistent for a stationary metric; "
                  "g(t) = " + family.schedule().describe() + " is time-dependent");
    }
    const OperatorMatrix zero(Eigen::MatrixXcd::Zero(grid.n_points(), grid.n_points()), Basis::position_grid, grid);
    generator = [zero](double) { return zero; };
  } else {
    throw Error(ErrorCode::invalid_configuration, "--generator must be G or zero");
  }

  EvolutionOptions options;
  options.abort_threshold = c.abort;
  const OperatorMatrix x = build_position(grid);
  const OperatorMatrix p = build_momentum(grid);
  for (const auto& name : c.observe) {
    if (name == "H") {
      options.observables.emplace_back(name, [&](double t) { return family.hamiltonian(t); });
    } else if (name == "X") {
      options.observables.emplace_back(name, [&](double t) { return family.pull_back(x, t); });
    } else if (name == "P") {
      options.observables.emplace_back(name, [&](double) { return p; });
    } else if (name == "h") {
      options.observables.emplace_back(name, [&](double t) { return family.textbook(t); });
    } else {
      throw Error(ErrorCode::invalid_configuration, "unknown observable '" + name + "' (use H, X, P or h)");
    }
  }

  const EvolutionState s0 = family.initial_state(c.t0, c.center, c.width);
  EvolutionTrace trace;
  try {
    trace = evolve_pair(generator, s0, c.t1, c.dt, options);
  } catch (const InstabilityError& e) {
    err << "evolve: " << e.what() << "; last stable time " << num(e.last_stable_time()) << '\n';
    return exit_numerical_failure;
  }

  Table table{{"t", "norm_re", "norm_im", "drift"}, {}};
  for (const auto& obs : trace.observables) {
    table.header.push_back(obs.first + "_re");
    table.header.push_back(obs.first + "_im");
  }
  const cplx n0 = trace.norms.front();
  std::vector<double> max_imag_ratio(trace.observables.size(), 0.0);
  json rows = json::array();
  for (std::size_t i = 0; i < trace.times.size(); ++i) {
    const double drift = std::abs(trace.norms[i] - n0) / std::abs(n0);
    for (std::size_t o = 0; o < trace.observables.size(); ++o) {
      const cplx v = trace.observables[o].second[i];
      const double scale = std::abs(v.real());
      max_imag_ratio[o] = std::max(max_imag_ratio[o], scale > 0.0 ? std::abs(v.imag()) / scale : std::abs(v.imag()));
    }
    const bool last = i + 1 == trace.times.size();
    if (i % static_cast<std::size_t>(c.every) != 0 && !last) continue;
    std::vector<std::string> row{num(trace.times[i]), num(trace.norms[i].real()), num(trace.norms[i].imag()),
                                 num(drift)};
    json jr{{"t", trace.times[i]}, {"norm", cplx_json(trace.norms[i])}, {"drift", drift}};
    for (const auto& obs : trace.observables) {
      const cplx v = obs.second[i];
      row.push_back(num(v.real()));
      row.push_back(num(v.imag()));
      jr[obs.first] = cplx_json(v);
    }
    table.rows.push_back(std::move(row));
    rows.push_back(std::move(jr));
  }
  const bool pass = trace.drift < c.drift_tol;
  json reality = json::object();
  for (std::size_t o = 0; o < trace.observables.size(); ++o) reality[trace.observables[o].first] = max_imag_ratio[o];
  json doc{{"command", "evolve"},
           {"params", {{"model", c.model}, {"g", c.g}, {"t0", c.t0}, {"t1", c.t1}, {"dt", trace.step},
                       {"center", c.center}, {"width", c.width}, {"generator", c.generator}}},
           {"grid", grid_json(grid)},
           {"drift", trace.drift},
           {"drift_threshold", c.drift_tol},
           {"max_imag_over_real", reality},
           {"pass", pass},
           {"trace", rows}};
  sink.write(table, doc);
  err << "evolve: drift " << num(trace.drift);
  for (std::size_t o = 0; o < trace.observables.size(); ++o) {
    err << ", max |Im " << trace.observables[o].first << "|/|Re| " << num(max_imag_ratio[o]);
  }
  err << (pass ? ", pass" : ", FAIL") << '\n';
  return pass ? exit_pass : exit_claim_failed;
}

std::array<double, 3> parse_kappas(const std::string& text) {
  std::array<double, 3> out{};
  std::stringstream ss(text);
  std::string item;
  int count = 0;
  while (std::getline(ss, item, ',')) {
    if (count == 3) break;
    try {
      std::size_t used = 0;
      out[count] = std::stod(item, &used);
      if (used != item.size()) throw std::invalid_argument("trailing");
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::invalid_configuration, "--kappas needs three numbers k0,k1,k2");
    }
    ++count;
  }
  if (count != 3 || std::getline(ss, item, ',')) {
    throw Error(ErrorCode::invalid_configuration, "--kappas needs three numbers k0,k1,k2");
  }
  return out;
}

int cmd_ft_verify(const Config& c, std::ostream& out, std::ostream& err) {
  Sink sink(c, out);
  const GridSpec grid = resolve_grid(c, evolution_default_grid());
  if (!(c.fd > 0.0)) throw Error(ErrorCode::invalid_configuration, "--fd must be positive");
  FTParams p;
  p.alpha = Schedule::parse(c.alpha);
  p.beta = Schedule::parse(c.beta);
  p.gamma = Schedule::parse(c.gamma);
  p.delta = Schedule::parse(c.delta_schedule);
  p.kappas = parse_kappas(c.kappas);

  const MasslessCheck massless = ft_massless_c2(p.kappas);
  p.c2 = c.c2.value_or(massless.c2);
  const Schedule sigma = c.sigma.empty() ? Schedule::polynomial({p.kappas[0], p.kappas[1], p.kappas[2]})
                                         : Schedule::parse(c.sigma);
  const FTConstraintOutput constraint = ft_constraints(sigma, p.c2, c.ft_t);

  const bool stationary = p.alpha.is_constant() && p.beta.is_constant() && p.gamma.is_constant() &&
                          p.delta.is_constant();
  const CoriolisConvergence conv = ft_validate_coriolis(p, c.ft_t, c.fd, grid);
  const double sigma_norm = ft_coriolis_analytic(p, c.ft_t, grid).entries.norm();
  const bool coriolis_ok = stationary ? (sigma_norm == 0.0 && conv.residual_h == 0.0)
                                      : (conv.ratio >= 3.5 && conv.ratio <= 4.5);
  const bool massless_ok = massless.max_mass < 1e-12;
  const bool pass = coriolis_ok && massless_ok;

  Table table{{"quantity", "value"},
              {{"t", num(c.ft_t)},
               {"coriolis_norm", num(sigma_norm)},
               {"coriolis_fd_residual_h", num(conv.residual_h)},
               {"coriolis_fd_residual_half", num(conv.residual_half)},
               {"coriolis_fd_ratio", num(conv.ratio)},
               {"coriolis_pass", coriolis_ok ? "1" : "0"},
               {"massless_c2", num(massless.c2)},
               {"massless_max_mass", num(massless.max_mass)},
               {"massless_pass", massless_ok ? "1" : "0"},
               {"constraint_c2", num(p.c2)},
               {"constraint_lambda_sq", num(constraint.lambda_sq)},
               {"constraint_mass", num(constraint.mass)},
               {"pass", pass ? "1" : "0"}}};
  json doc{{"command", "ft-verify"},
           {"params", {{"alpha", p.alpha.describe()}, {"beta", p.beta.describe()}, {"gamma", p.gamma.describe()},
                       {"delta", p.delta.describe()}, {"kappas", p.kappas}, {"t", c.ft_t}, {"fd", c.fd}}},
           {"grid", grid_json(grid)},
           {"coriolis", {{"stationary", stationary}, {"norm", sigma_norm}, {"h", conv.h},
                         {"residual_h", conv.residual_h}, {"residual_half", conv.residual_half},
                         {"ratio", conv.ratio}, {"pass", coriolis_ok}}},
           {"massless", {{"c2", massless.c2}, {"max_mass", massless.max_mass}, {"samples", massless.samples},
                         {"pass", massless_ok}}},
           {"constraints", {{"sigma", sigma.describe()}, {"c2", p.c2}, {"lambda_sq", constraint.lambda_sq},
                            {"mass", constraint.mass}}},
           {"pass", pass}};
  sink.write(table, doc);
  err << "ft-verify: Coriolis ratio " << num(conv.ratio) << ", massless c2 " << num(massless.c2) << ", max |m| "
      << num(massless.max_mass) << (pass ? ", pass" : ", FAIL") << '\n';
  return pass ? exit_pass : exit_claim_failed;
}

// ---------------------------------------------------------------------------
// Argument handling

void add_common(CLI::App& app, Config& c) {
  app.add_option("--n", c.n, "grid points");
  app.add_option("--L", c.L, "grid half-width");
  app.add_option("--out", c.out, "output path, '-' for stdout");
  app.add_option("--format", c.format, "csv or json (default from --out extension)");
  app.add_option("--config", c.config_path, "JSON configuration merged under the flags");
}

void add_model(CLI::App& app, Config& c) {
  app.add_option("--lambda", c.lambda, "coupling lambda");
  app.add_option("--j", c.j, "angular parameter j = 2l + d - 2");
  app.add_option("--eps", c.eps, "complex shift of the real line");
  app.add_option("--delta", c.delta, "Bender-Boettcher exponent");
  app.add_option("--g", c.g, "coupling schedule g(t)");
  app.add_option("--t", c.t, "time at which g is sampled");
  app.add_option("--k", c.k, "number of eigenvalues");
  app.add_option("--tau-abs", c.tau_abs, "absolute reality tolerance");
  app.add_option("--tau-rel", c.tau_rel, "relative reality tolerance");
  app.add_flag("--no-filter", c.no_filter, "keep box-artifact eigenvalues");
}

/// Turns the JSON configuration into flags for the subcommand, skipping keys
/// that the command line already sets.
std::vector<std::string> config_arguments(const std::string& path, const std::vector<std::string>& given) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorCode::invalid_configuration, "cannot read config file " + path);
  json doc;
  try {
    doc = json::parse(f);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::invalid_configuration, std::string("config file: ") + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::invalid_configuration, "config file must hold a JSON object");
  if (doc.contains("grid") && doc["grid"].is_object()) {
    for (const auto& [key, value] : doc["grid"].items()) doc[key] = value;
    doc.erase("grid");
  }
  auto is_given = [&](const std::string& flag) {
    for (const auto& a : given) {
      if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
    }
    return false;
  };
  auto scalar = [](const json& v) -> std::string {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    if (v.is_number()) {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
      return buf;
    }
    throw Error(ErrorCode::invalid_configuration, "config values must be numbers, strings, booleans or lists");
  };
  std::vector<std::string> args;
  for (const auto& [key, value] : doc.items()) {
    if (key == "command" || key == "config") continue;
    const std::string flag = "--" + key;
    if (is_given(flag)) continue;
    if (value.is_boolean()) {
      if (value.get<bool>()) args.push_back(flag);
    } else if (value.is_array()) {
      for (const auto& v : value) {
        args.push_back(flag);
        args.push_back(scalar(v));
      }
    } else {
      args.push_back(flag);
      args.push_back(scalar(value));
    }
  }
  return args;
}

std::optional<std::string> find_config(const std::vector<std::string>& args) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) return args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) return args[i].substr(9);
  }
  return std::nullopt;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Config c;
  CLI::App app{"Numerical laboratory for quasi-Hermitian wrong-sign quartic oscillators", "niplab"};
  app.require_subcommand(1);

  auto* spectrum = app.add_subcommand("spectrum", "eigenvalues of one model");
  add_common(*spectrum, c);
  add_model(*spectrum, c);
  spectrum->add_option("--model", c.model, "aho, qtilde, bb, jm, jm-avatar, bg, bg-avatar, njm, njm-avatar")
      ->required();

  auto* iso = app.add_subcommand("isospectral", "match the spectra of an isospectral pair");
  add_common(*iso, c);
  add_model(*iso, c);
  iso->add_option("--pair", c.pair, "jm, bg, njm or aho-qtilde")->required();
  iso->add_option("--tol", c.tol, "matching tolerance");
  iso->add_option("--mode", c.mode, "bijective or subset (default depends on the pair)");
  iso->add_flag("--relative", c.relative, "tolerance relative to |E|");

  auto* metric = app.add_subcommand("metric-check", "quasi-Hermiticity of the closed-form metric");
  add_common(*metric, c);
  metric->add_option("--model", c.model, "jm or njm")->required();
  metric->add_option("--lambda", c.lambda, "coupling lambda");
  metric->add_option("--g", c.g, "coupling schedule g(t)");
  metric->add_option("--t", c.t, "time at which g is sampled");
  metric->add_option("--theta", c.theta, "closed or identity");
  metric->add_option("--quasi-tol", c.quasi_tol, "threshold on the quasi-Hermiticity residual");
  metric->add_option("--consistency-tol", c.consistency_tol, "threshold on ||Omega^dagger Omega - Theta||");

  auto* evolve = app.add_subcommand("evolve", "ket/ketket evolution in the interaction picture");
  add_common(*evolve, c);
  evolve->add_option("--model", c.model, "njm")->required();
  evolve->add_option("--g", c.g, "coupling schedule g(t)");
  evolve->add_option("--t0", c.t0, "initial time");
  evolve->add_option("--t1", c.t1, "final time");
  evolve->add_option("--dt", c.dt, "RK4 step");
  evolve->add_option("--observe", c.observe, "H, X, P or h (textbook Hamiltonian)");
  evolve->add_option("--abort", c.abort, "drift that aborts the run");
  evolve->add_option("--drift-tol", c.drift_tol, "drift threshold for a passing run");
  evolve->add_option("--center", c.center, "initial Gaussian centre");
  evolve->add_option("--width", c.width, "initial Gaussian width");
  evolve->add_option("--every", c.every, "write every k-th step");
  evolve->add_option("--generator", c.generator, "G or zero");

  auto* ft = app.add_subcommand("ft-verify", "Fring-Tenney Coriolis and constraint checks");
  add_common(*ft, c);
  ft->add_option("--alpha", c.alpha, "alpha(t) schedule");
  ft->add_option("--beta", c.beta, "beta(t) schedule");
  ft->add_option("--gamma", c.gamma, "gamma(t) schedule");
  ft->add_option("--delta", c.delta_schedule, "delta(t) schedule");
  ft->add_option("--kappas", c.kappas, "k0,k1,k2 of the quadratic sigma");
  ft->add_option("--c2", c.c2, "constraint constant (default: the massless value)");
  ft->add_option("--sigma", c.sigma, "sigma(t) schedule (default: the quadratic from --kappas)");
  ft->add_option("--fd", c.fd, "finite-difference step h");
  ft->add_option("--t", c.ft_t, "evaluation time");

  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    if (const auto path = find_config(args)) {
      const auto extra = config_arguments(*path, args);
      std::size_t pos = 0;
      while (pos < args.size() && app.get_subcommand_no_throw(args[pos]) == nullptr) ++pos;
      if (pos == args.size()) throw Error(ErrorCode::invalid_configuration, "no subcommand given");
      args.insert(args.begin() + static_cast<std::ptrdiff_t>(pos) + 1, extra.begin(), extra.end());
    }
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? exit_pass : exit_invalid_config;
  } catch (const Error& e) {
    err << "niplab: " << e.what() << '\n';
    return exit_invalid_config;
  }

  try {
    if (spectrum->parsed()) return cmd_spectrum(c, out, err);
    if (iso->parsed()) return cmd_isospectral(c, out, err);
    if (metric->parsed()) return cmd_metric_check(c, out, err);
    if (evolve->parsed()) return cmd_evolve(c, out, err);
    return cmd_ft_verify(c, out, err);
  } catch (const InstabilityError& e) {
    err << "niplab: " << e.what() << "; last stable time " << num(e.last_stable_time()) << '\n';
    return exit_numerical_failure;
  } catch (const Error& e) {
    err << "niplab: " << to_string(e.code()) << ": " << e.what() << '\n';
    return e.is_configuration() ? exit_invalid_config : exit_numerical_failure;
  } catch (const std::exception& e) {
    err << "niplab: " << e.what() << '\n';
    return exit_numerical_failure;
  }
}

}  // namespace niplab::cli

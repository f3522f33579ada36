#include "metaising/experiment.hpp"

#include <boost/math/distributions/students_t.hpp>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "metaising/droplets.hpp"
#include "metaising/landscape.hpp"

namespace metaising {

using nlohmann::json;

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

const std::vector<std::string> kModes = {"theory", "enumerate", "oracle", "simulate", "capacity", "spectrum", "fit"};

double number(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number()) throw ConfigError(std::string("missing numeric field '") + key + "'");
  return j.at(key).get<double>();
}

std::string sampler_name(Sampler s) { return s == Sampler::kTree ? "tree" : "grouped"; }

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
}

json geometry_json(const CriticalGeometry& g) {
  json j = {{"model", g.model},
            {"volume", g.volume},
            {"gamma", g.gamma},
            {"inv_K_closed", g.inv_k.str()},
            {"inv_K_closed_value", g.inv_k.to_double()},
            {"assumptions_hold", g.assumptions_hold},
            {"warnings", g.warnings}};
  if (g.model == "anisotropic") j["L_V"] = g.l_v;
  if (g.model == "next_nearest") {
    j["ell"] = g.ell;
    j["D"] = g.d_star;
    j["L_star"] = g.l_star;
  }
  if (g.model == "alternating") {
    j["l_b"] = g.l_b;
    j["l_h"] = g.l_h;
    j["epsilon"] = g.epsilon;
    j["mu"] = g.mu;
  }
  return j;
}

json assumptions_json(const AssumptionReport& r) {
  json clauses = json::array();
  for (const auto& c : r.clauses)
    clauses.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}, {"threshold", c.threshold}});
  return {{"all_passed", r.all_passed()}, {"clauses", clauses}};
}

std::vector<std::string> ids_as_strings(const StateSpace& space, const std::vector<StateId>& ids) {
  std::vector<std::string> out;
  for (StateId id : ids) out.push_back(space.config(id).to_string());
  return out;
}

}  // namespace

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

json params_to_json(const ModelParams& p) {
  return std::visit(
      overloaded{[](const Anisotropic& a) { return json{{"type", "anisotropic"}, {"params", {{"J_H", a.j_h}, {"J_V", a.j_v}, {"h", a.h}}}}; },
                 [](const NextNearest& a) {
                   return json{{"type", "next_nearest"}, {"params", {{"J_tilde", a.j_tilde}, {"K_nnn", a.k_nnn}, {"h", a.h}}}};
                 },
                 [](const Alternating& a) {
                   return json{{"type", "alternating"}, {"params", {{"J", a.j}, {"h_odd", a.h_odd}, {"h_even", a.h_even}}}};
                 }},
      p);
}

ModelParams params_from_json(const json& j) {
  if (!j.is_object() || !j.contains("type") || !j.contains("params")) throw ConfigError("model needs 'type' and 'params'");
  const std::string type = j.at("type").get<std::string>();
  const json& p = j.at("params");
  ModelParams out;
  if (type == "anisotropic") out = Anisotropic{number(p, "J_H"), number(p, "J_V"), number(p, "h")};
  else if (type == "next_nearest") out = NextNearest{number(p, "J_tilde"), number(p, "K_nnn"), number(p, "h")};
  else if (type == "alternating") out = Alternating{number(p, "J"), number(p, "h_odd"), number(p, "h_even")};
  else throw ConfigError("unknown model type '" + type + "'");
  try {
    check_params(out);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return out;
}

ExperimentConfig parse_config(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  ExperimentConfig c;
  c.schema_version = j.value("schema_version", kSchemaVersion);
  if (c.schema_version != kSchemaVersion) throw ConfigError("unsupported schema_version");
  c.mode = j.value("mode", std::string("theory"));
  if (std::find(kModes.begin(), kModes.end(), c.mode) == kModes.end()) throw ConfigError("unknown mode '" + c.mode + "'");
  if (c.mode != "fit") {
    if (!j.contains("model")) throw ConfigError("missing 'model'");
    c.params = params_from_json(j.at("model"));
    if (!j.contains("L") || !j.at("L").is_number_integer()) throw ConfigError("missing integer 'L'");
    c.side = j.at("L").get<int>();
    if (c.side < 2) throw ConfigError("L must be at least 2");
    if (std::holds_alternative<Alternating>(c.params) && c.side % 2 != 0)
      throw ConfigError("alternating model needs an even L");
  } else if (j.contains("model")) {
    c.params = params_from_json(j.at("model"));
    c.side = j.value("L", 0);
  }
  if (j.contains("beta")) {
    const json& b = j.at("beta");
    if (b.is_number()) c.betas = {b.get<double>()};
    else if (b.is_array()) c.betas = b.get<std::vector<double>>();
    else throw ConfigError("'beta' must be a number or a list");
    for (double v : c.betas)
      if (!(v >= 0)) throw ConfigError("beta must be non-negative");
  }
  if ((c.mode == "simulate" || c.mode == "spectrum") && c.betas.empty()) throw ConfigError("mode needs a 'beta' grid");
  c.replicas = j.value("replicas", c.replicas);
  c.seed = j.value("seed", c.seed);
  c.budget = j.value("budget", c.budget);
  c.strict = j.value("strict", c.strict);
  c.out_dir = j.value("out_dir", c.out_dir);
  const std::string sampler = j.value("sampler", std::string("tree"));
  if (sampler == "tree") c.sampler = Sampler::kTree;
  else if (sampler == "grouped") c.sampler = Sampler::kGrouped;
  else throw ConfigError("sampler must be 'tree' or 'grouped'");
  c.fit_input = j.value("fit_input", std::string());
  if (c.mode == "fit" && c.fit_input.empty()) throw ConfigError("fit mode needs 'fit_input'");
  if (c.replicas == 0) throw ConfigError("replicas must be positive");
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  try {
    return parse_config(json::parse(in));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
}

json config_to_json(const ExperimentConfig& c) {
  json j = {{"schema_version", c.schema_version},
            {"mode", c.mode},
            {"L", c.side},
            {"beta", c.betas},
            {"replicas", c.replicas},
            {"seed", c.seed},
            {"budget", c.budget},
            {"strict", c.strict},
            {"out_dir", c.out_dir},
            {"sampler", sampler_name(c.sampler)}};
  if (c.mode != "fit" || c.side > 0) j["model"] = params_to_json(c.params);
  if (!c.fit_input.empty()) j["fit_input"] = c.fit_input;
  return j;
}

FitResult fit_gamma(const std::vector<double>& betas, const std::vector<double>& taus, std::optional<double> gamma) {
  if (betas.size() != taus.size()) throw FitError("beta and tau columns differ in length");
  if (betas.size() < 3) throw FitError("need at least 3 beta points");
  const auto n = static_cast<double>(betas.size());
  double mx = 0, my = 0;
  std::vector<double> y;
  for (std::size_t i = 0; i < betas.size(); ++i) {
    if (!(taus[i] > 0)) throw FitError("mean tau must be positive");
    y.push_back(std::log(taus[i]));
    mx += betas[i];
    my += y.back();
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < betas.size(); ++i) {
    sxx += (betas[i] - mx) * (betas[i] - mx);
    sxy += (betas[i] - mx) * (y[i] - my);
  }
  if (sxx <= 0) throw FitError("beta values must not all coincide");
  FitResult r;
  r.n = betas.size();
  r.slope = sxy / sxx;
  r.intercept = my - r.slope * mx;
  double rss = 0;
  for (std::size_t i = 0; i < betas.size(); ++i) {
    const double res = y[i] - r.intercept - r.slope * betas[i];
    rss += res * res;
  }
  const double s2 = rss / (n - 2);
  r.slope_se = std::sqrt(s2 / sxx);
  r.intercept_se = std::sqrt(s2 * (1.0 / n + mx * mx / sxx));
  const double q = boost::math::quantile(boost::math::students_t(n - 2), 0.975);
  r.ci_low = r.slope - q * r.slope_se;
  r.ci_high = r.slope + q * r.slope_se;
  r.gamma_theory = gamma;
  if (gamma) r.mismatch = std::abs(r.slope - *gamma) > 0.05 * std::abs(*gamma);
  return r;
}

std::pair<std::vector<double>, std::vector<double>> read_fit_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FitError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw FitError("empty CSV");
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  const auto col = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw FitError("CSV lacks column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t cb = col("beta"), ct = col("mean_tau");
  std::vector<double> b, t;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() <= std::max(cb, ct)) throw FitError("short CSV row");
    try {
      b.push_back(std::stod(cells[cb]));
      t.push_back(std::stod(cells[ct]));
    } catch (const std::exception&) {
      throw FitError("non-numeric CSV cell");
    }
  }
  return {b, t};
}

namespace {

json fit_json(const FitResult& f) {
  json j = {{"n", f.n},         {"slope", f.slope},   {"intercept", f.intercept}, {"slope_se", f.slope_se},
            {"intercept_se", f.intercept_se}, {"ci_low", f.ci_low}, {"ci_high", f.ci_high}, {"mismatch", f.mismatch}};
  if (f.gamma_theory) j["gamma_theory"] = *f.gamma_theory;
  return j;
}

json run_theory(const ExperimentConfig& c, const Torus& torus) {
  const CriticalGeometry g = critical_geometry(c.params, torus);
  json j = geometry_json(g);
  j["E_star"] = critical_energy(c.params, torus);
  j["critical_inequalities"] = critical_inequalities_hold(c.params, g);
  try {
    const auto gates = enumerate_critical(c.params, torus);
    const auto sum = combinatorial_prefactor(gates);
    j["inv_K_enumerated"] = sum.inv_k.str();
    j["inv_K_enumerated_value"] = sum.inv_k.to_double();
    j["inv_K_equal"] = sum.inv_k == g.inv_k;
    j["P_count"] = gates.protocritical.size();
    j["C_count"] = gates.critical.size();
  } catch (const DropletFitError& e) {
    j["enumeration_error"] = e.what();
  }
  return j;
}

}  // namespace

int run_experiment(const ExperimentConfig& c, std::ostream& log) {
  try {
    namespace fs = std::filesystem;
    fs::create_directories(c.out_dir);
    const fs::path dir(c.out_dir);
    json report = {{"schema_version", kSchemaVersion}, {"config", config_to_json(c)}};

    if (c.mode == "fit") {
      const auto [b, t] = read_fit_csv(c.fit_input);
      std::optional<double> gamma;
      if (c.side > 0) gamma = critical_geometry(c.params, Torus(c.side)).gamma;
      report["fit"] = fit_json(fit_gamma(b, t, gamma));
      write_file(dir / "report.json", report.dump(2) + "\n");
      return kExitOk;
    }

    const Torus torus(c.side);
    const AssumptionReport assumptions = validate_assumptions(c.params, torus);
    report["assumptions"] = assumptions_json(assumptions);
    if (!assumptions.all_passed()) {
      if (c.strict) {
        log << "assumption violated:";
        for (const auto& cl : assumptions.clauses)
          if (!cl.passed) log << " (" << cl.name << ") " << cl.detail;
        log << "\n";
        write_file(dir / "report.json", report.dump(2) + "\n");
        return kExitAssumption;
      }
      log << "warning: assumptions violated; continuing in permissive mode\n";
    }

    if (c.mode == "theory") {
      report["theory"] = run_theory(c, torus);
    } else if (c.mode == "enumerate") {
      const auto gates = enumerate_critical(c.params, torus);
      std::ostringstream csv;
      csv << "set,orbit,seat,state\n";
      for (const auto& p : gates.protocritical) csv << "protocritical,,," << p.to_string() << "\n";
      for (const auto& cs : gates.critical) csv << "critical," << cs.orbit << "," << cs.seat << "," << cs.config.to_string() << "\n";
      for (const auto& s : gates.successors) csv << "successor,,," << s.to_string() << "\n";
      write_file(dir / "enumeration.csv", csv.str());
      report["enumeration"] = {{"P_count", gates.protocritical.size()},
                               {"C_count", gates.critical.size()},
                               {"successor_count", gates.successors.size()},
                               {"orbit_labels", gates.orbit_labels},
                               {"orbit_sizes", gates.orbit_sizes}};
    } else if (c.mode == "oracle" || c.mode == "capacity") {
      const StateSpace space(torus);
      const auto e = state_energies(c.params, space);
      if (c.mode == "oracle") {
        const auto r = analyze_landscape(c.params, space, c.betas);
        report["landscape"] = {{"gamma", r.gamma},
                               {"m", space.config(r.m).to_string()},
                               {"s", space.config(r.s).to_string()},
                               {"S_stab", ids_as_strings(space, r.stable)},
                               {"S_meta", ids_as_strings(space, r.metastable)},
                               {"H1", r.h1},
                               {"H2", r.gate.h2},
                               {"m_is_all_minus", r.m_is_all_minus},
                               {"P_star", ids_as_strings(space, r.gate.protocritical)},
                               {"C_star", ids_as_strings(space, r.gate.critical)},
                               {"inv_K_exact", r.inv_k},
                               {"beta", r.betas},
                               {"mean_hitting_time", r.mean_hitting_times},
                               {"spectral_gap", r.spectral_gaps}};
      } else {
        const auto d = dirichlet_prefactor(space, e, space.all_minus(), space.all_plus());
        json cap = {{"inv_K_dirichlet", d.inv_k}, {"wells", d.problem.wells}, {"nodes", d.problem.n_nodes},
                    {"disconnected", d.capacity.disconnected}};
        try {
          cap["inv_K_enumerated_value"] = combinatorial_prefactor(c.params, torus).inv_k.to_double();
        } catch (const DropletFitError& err) {
          cap["enumeration_error"] = err.what();
        }
        report["capacity"] = cap;
      }
    } else if (c.mode == "spectrum") {
      const StateSpace space(torus);
      std::ostringstream csv;
      csv << "beta,spectral_gap,mean_hitting_time,product\n";
      json rows = json::array();
      for (double b : c.betas) {
        const double gap = spectral_gap(c.params, space, b);
        const double tau = exact_mean_hitting_time(c.params, space, b, space.all_minus(), space.all_plus());
        csv << format_number(b) << "," << format_number(gap) << "," << format_number(tau) << "," << format_number(gap * tau) << "\n";
        rows.push_back({{"beta", b}, {"spectral_gap", gap}, {"mean_hitting_time", tau}});
      }
      write_file(dir / "spectrum.csv", csv.str());
      report["spectrum"] = rows;
    } else if (c.mode == "simulate") {
      const CriticalGeometry g = critical_geometry(c.params, torus);
      StateSet stop(torus);
      stop.insert(SpinConfiguration::all_plus(torus));
      std::optional<GateEnumeration> gates;
      std::optional<StateSet> gate_set;
      try {
        gates = enumerate_critical(c.params, torus);
        gate_set = critical_state_set(*gates, torus);
      } catch (const DropletFitError& e) {
        log << "warning: no gate set (" << e.what() << ")\n";
      }
      KmcOptions opt;
      opt.sampler = c.sampler;
      opt.budget = c.budget;
      opt.gamma = g.gamma;
      std::ostringstream summary, samples;
      summary << "beta,n,mean_tau,se,gate_fraction,ks,events\n";
      samples << "beta,replica,tau,steps,gate,entrance_orbit\n";
      json rows = json::array();
      std::vector<double> means;
      for (double b : c.betas) {
        const auto st = sample_transition(c.params, b, torus, stop, gate_set ? &*gate_set : nullptr, c.replicas, c.seed, opt);
        summary << format_number(b) << "," << st.n << "," << format_number(st.mean) << "," << format_number(st.standard_error)
                << "," << format_number(st.gate_fraction) << "," << format_number(st.ks) << "," << st.total_events << "\n";
        for (const auto& s : st.samples)
          samples << format_number(b) << "," << s.replica << "," << format_number(s.hitting_time) << "," << s.step_count << ","
                  << (s.hit_gate_before_target ? 1 : 0) << "," << s.entrance_orbit << "\n";
        json row = {{"beta", b}, {"n", st.n}, {"mean_tau", st.mean}, {"se", st.standard_error},
                    {"gate_fraction", st.gate_fraction}, {"ks", st.ks}, {"events", st.total_events},
                    {"K_estimate", std::exp(-b * g.gamma) * st.mean}};
        if (gates && !std::holds_alternative<Alternating>(c.params) && st.gate_fraction > 0)
          row["entrance_p_value"] = entrance_uniformity(st, *gates, c.params);
        rows.push_back(row);
        means.push_back(st.mean);
      }
      write_file(dir / "simulation.csv", summary.str());
      write_file(dir / "samples.csv", samples.str());
      report["simulation"] = rows;
      report["theory"] = geometry_json(g);
      if (c.betas.size() >= 3) report["fit"] = fit_json(fit_gamma(c.betas, means, g.gamma));
    }
    write_file(dir / "report.json", report.dump(2) + "\n");
    return kExitOk;
  } catch (const BudgetExceeded& e) {
    log << "budget refusal: " << e.what() << "\n";
    return kExitBudget;
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const FitError& e) {
    log << "fit error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const EnumerationCapError& e) {
    log << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DropletFitError& e) {
    log << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    log << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
}

}  // namespace metaising

#include "metaising/kmc.hpp"

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numeric>

namespace metaising {

std::uint64_t zobrist_key(Site x) {
  // splitmix64 finalizer
  std::uint64_t z = static_cast<std::uint64_t>(x) + 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

GlauberKmc::GlauberKmc(ModelParams params, double beta, SpinConfiguration start, Sampler sampler)
    : params_(std::move(params)), beta_(beta), config_(std::move(start)), sampler_(sampler) {
  if (beta < 0) throw std::invalid_argument("beta must be non-negative");
  check_torus(params_, config_.torus());
  const std::size_t n = config_.size();
  rates_.resize(n);
  keys_.resize(n);
  for (Site x = 0; x < n; ++x) {
    keys_[x] = zobrist_key(x);
    if (config_.plus(x)) hash_ ^= keys_[x];
    rates_[x] = fresh_rate(x);
  }
  if (sampler_ == Sampler::kTree) {
    while (leaves_ < n) leaves_ <<= 1;
    tree_.assign(2 * leaves_, 0.0);
    for (Site x = 0; x < n; ++x) tree_[leaves_ + x] = rates_[x];
    for (std::size_t p = leaves_ - 1; p >= 1; --p) tree_[p] = tree_[2 * p] + tree_[2 * p + 1];
  } else {
    site_class_.resize(n);
    site_slot_.resize(n);
    for (Site x = 0; x < n; ++x) {
      const std::size_t c = class_of(rates_[x]);
      site_class_[x] = c;
      site_slot_[x] = class_sites_[c].size();
      class_sites_[c].push_back(x);
    }
  }
}

double GlauberKmc::fresh_rate(Site x) const { return metropolis_rate(params_, beta_, config_, x); }

std::size_t GlauberKmc::class_of(double rate) {
  const auto key = std::llround(-std::log(rate) * 1e9);
  auto it = class_index_.find(key);
  if (it != class_index_.end()) return it->second;
  const std::size_t c = class_rate_.size();
  class_index_.emplace(key, c);
  class_rate_.push_back(rate);
  class_sites_.emplace_back();
  return c;
}

double GlauberKmc::total_rate() const {
  if (sampler_ == Sampler::kTree) return tree_[1];
  double r = 0;
  for (std::size_t c = 0; c < class_rate_.size(); ++c) r += class_rate_[c] * static_cast<double>(class_sites_[c].size());
  return r;
}

Site GlauberKmc::select(double u) const {
  double target = u * total_rate();
  const std::size_t n = config_.size();
  if (sampler_ == Sampler::kTree) {
    std::size_t p = 1;
    while (p < leaves_) {
      if (target < tree_[2 * p]) {
        p = 2 * p;
      } else {
        target -= tree_[2 * p];
        p = 2 * p + 1;
      }
    }
    Site x = static_cast<Site>(p - leaves_);
    // rounding can land on a zero-rate padding leaf
    while (x >= n || rates_[x] <= 0) --x;
    return x;
  }
  std::size_t last = 0;
  for (std::size_t c = 0; c < class_rate_.size(); ++c) {
    const auto& sites = class_sites_[c];
    if (sites.empty()) continue;
    last = c;
    const double w = class_rate_[c] * static_cast<double>(sites.size());
    if (target < w) {
      const auto i = std::min(static_cast<std::size_t>(target / class_rate_[c]), sites.size() - 1);
      return sites[i];
    }
    target -= w;
  }
  return class_sites_[last].back();
}

void GlauberKmc::refresh(Site x) {
  const double r = fresh_rate(x);
  rates_[x] = r;
  if (sampler_ == Sampler::kTree) {
    std::size_t p = leaves_ + x;
    tree_[p] = r;
    for (p >>= 1; p >= 1; p >>= 1) tree_[p] = tree_[2 * p] + tree_[2 * p + 1];
    return;
  }
  const std::size_t to = class_of(r), from = site_class_[x];
  if (to == from) return;
  auto& src = class_sites_[from];
  const std::size_t slot = site_slot_[x];
  src[slot] = src.back();
  site_slot_[src[slot]] = slot;
  src.pop_back();
  site_class_[x] = to;
  site_slot_[x] = class_sites_[to].size();
  class_sites_[to].push_back(x);
}

void GlauberKmc::apply(Site x) {
  config_.flip(x);
  hash_ ^= keys_[x];
  const Torus& t = config_.torus();
  refresh(x);
  for (Site y : t.nearest(x)) refresh(y);
  if (std::holds_alternative<NextNearest>(params_))
    for (Site y : t.diagonal(x)) refresh(y);
}

GlauberKmc::Step GlauberKmc::step(Philox4x32& rng) {
  Step s;
  s.dt = rng.exponential(total_rate());
  s.site = select(rng.uniform());
  apply(s.site);
  return s;
}

double GlauberKmc::max_rate_drift() const {
  double worst = 0, total = 0;
  for (Site x = 0; x < config_.size(); ++x) {
    const double r = fresh_rate(x);
    total += r;
    const double used = sampler_ == Sampler::kTree ? tree_[leaves_ + x] : class_rate_[site_class_[x]];
    worst = std::max(worst, std::abs(used - r));
  }
  return std::max(worst, std::abs(total_rate() - total));
}

StateSet::StateSet(const Torus& torus) : torus_(torus), counts_(torus.size() + 1, 0) {}

std::uint64_t StateSet::hash_of(const SpinConfiguration& c) const {
  std::uint64_t h = 0;
  for (Site x : c.plus_sites()) h ^= zobrist_key(x);
  return h;
}

void StateSet::insert(const SpinConfiguration& c, int label) {
  if (!(c.torus() == torus_)) throw std::invalid_argument("configuration lives on a different torus");
  if (find(c)) return;
  by_hash_.emplace(hash_of(c), states_.size());
  states_.push_back(c);
  labels_.push_back(label);
  counts_[c.count()] = 1;
}

std::optional<int> StateSet::find(const SpinConfiguration& c, std::uint64_t hash, std::size_t count) const {
  if (!counts_[count]) return std::nullopt;
  auto [lo, hi] = by_hash_.equal_range(hash);
  for (auto it = lo; it != hi; ++it)
    if (states_[it->second] == c) return labels_[it->second];
  return std::nullopt;
}

std::optional<int> StateSet::find(const SpinConfiguration& c) const { return find(c, hash_of(c), c.count()); }

double projected_events(double beta, double gamma, std::size_t n_replicas) {
  return 10.0 * std::exp(beta * gamma) * static_cast<double>(n_replicas);
}

StateSet critical_state_set(const GateEnumeration& gates, const Torus& torus) {
  StateSet set(torus);
  for (const auto& c : gates.critical) set.insert(c.config, c.orbit);
  return set;
}

double ks_exponential(std::vector<double> x) {
  if (x.empty()) throw std::invalid_argument("no samples");
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = 1.0 - std::exp(-x[i] / mean);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  return d;
}

RunStatistics sample_transition(const ModelParams& params, double beta, const Torus& torus, const StateSet& stop,
                                const StateSet* gate, std::size_t n_replicas, std::uint64_t seed,
                                const KmcOptions& options) {
  if (stop.empty()) throw std::invalid_argument("stop set is empty");
  if (n_replicas == 0) throw std::invalid_argument("need at least one replica");
  const double gamma = options.gamma ? *options.gamma : critical_geometry(params, torus).gamma;
  const double projected = projected_events(beta, gamma, n_replicas);
  if (projected > options.budget)
    throw BudgetExceeded("projected " + std::to_string(projected) + " events exceed budget " +
                         std::to_string(options.budget));

  const double cap = options.max_events > 0 ? options.max_events : options.budget;
  RunStatistics st;
  std::size_t orbits = options.orbit_count;
  const SpinConfiguration start = SpinConfiguration::all_minus(torus);
  for (std::size_t r = 0; r < n_replicas; ++r) {
    Philox4x32 rng(seed, r);
    GlauberKmc kmc(params, beta, start, options.sampler);
    TransitionSample ts;
    ts.rng_seed = seed;
    ts.replica = r;
    std::size_t count = 0;
    while (true) {
      const auto s = kmc.step(rng);
      ts.hitting_time += s.dt;
      ++ts.step_count;
      if (static_cast<double>(++st.total_events) > cap) throw BudgetExceeded("event budget exhausted during the run");
      count = kmc.config().plus(s.site) ? count + 1 : count - 1;
      if (gate && !ts.hit_gate_before_target) {
        if (auto label = gate->find(kmc.config(), kmc.hash(), count)) {
          ts.hit_gate_before_target = true;
          ts.entrance_orbit = *label;
          ts.entrance_state = kmc.config().to_string();
        }
      }
      if (stop.find(kmc.config(), kmc.hash(), count)) break;
    }
    if (ts.entrance_orbit >= 0) orbits = std::max(orbits, static_cast<std::size_t>(ts.entrance_orbit) + 1);
    st.samples.push_back(std::move(ts));
  }

  st.n = st.samples.size();
  st.entrance_histogram.assign(orbits, 0);
  std::vector<double> taus;
  double gates_hit = 0;
  for (const auto& s : st.samples) {
    taus.push_back(s.hitting_time);
    if (s.hit_gate_before_target) {
      gates_hit += 1;
      ++st.entrance_histogram[static_cast<std::size_t>(s.entrance_orbit)];
    }
  }
  const double n = static_cast<double>(st.n);
  st.mean = std::accumulate(taus.begin(), taus.end(), 0.0) / n;
  double ss = 0;
  for (double t : taus) ss += (t - st.mean) * (t - st.mean);
  st.standard_error = st.n > 1 ? std::sqrt(ss / (n - 1) / n) : 0.0;
  st.ks = ks_exponential(taus);
  st.gate_fraction = gates_hit / n;
  return st;
}

double chi_square_p_value(double statistic, double dof) {
  if (dof <= 0) return 1.0;
  return boost::math::gamma_q(dof / 2, statistic / 2);
}

double entrance_uniformity(const RunStatistics& run, const GateEnumeration& gates, const ModelParams& params) {
  if (std::holds_alternative<Alternating>(params))
    throw std::invalid_argument("uniform entrance is not claimed for the alternating model");
  const std::size_t k = gates.orbit_sizes.size();
  std::vector<double> observed(k, 0.0);
  for (std::size_t i = 0; i < std::min(k, run.entrance_histogram.size()); ++i)
    observed[i] = static_cast<double>(run.entrance_histogram[i]);
  const double total = std::accumulate(observed.begin(), observed.end(), 0.0);
  const double size = static_cast<double>(std::accumulate(gates.orbit_sizes.begin(), gates.orbit_sizes.end(), std::size_t{0}));
  if (total == 0) throw std::invalid_argument("no gate entrances recorded");
  double chi2 = 0;
  int bins = 0;
  for (std::size_t i = 0; i < k; ++i) {
    const double expected = total * static_cast<double>(gates.orbit_sizes[i]) / size;
    if (expected <= 0) continue;
    chi2 += (observed[i] - expected) * (observed[i] - expected) / expected;
    ++bins;
  }
  return chi_square_p_value(chi2, bins - 1);
}

std::vector<std::uint64_t> occupation_samples(const ModelParams& params, double beta, const Torus& torus, double t,
                                              std::size_t n_replicas, std::uint64_t seed, Sampler sampler) {
  if (torus.size() > 64) throw std::invalid_argument("occupation ids need L*L <= 64");
  std::vector<std::uint64_t> out;
  out.reserve(n_replicas);
  for (std::size_t r = 0; r < n_replicas; ++r) {
    Philox4x32 rng(seed, r);
    GlauberKmc kmc(params, beta, SpinConfiguration::all_minus(torus), sampler);
    double now = 0;
    while (true) {
      const double dt = rng.exponential(kmc.total_rate());
      if (now + dt > t) break;
      now += dt;
      kmc.apply(kmc.select(rng.uniform()));
    }
    out.push_back(kmc.config().to_id());
  }
  return out;
}

}  // namespace metaising

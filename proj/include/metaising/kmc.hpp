#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "metaising/droplets.hpp"
#include "metaising/energy.hpp"
#include "metaising/lattice.hpp"
#include "metaising/rng.hpp"

namespace metaising {

enum class Sampler { kTree, kGrouped };

/// Rejection-free continuous-time Metropolis dynamics on one configuration.
class GlauberKmc {
 public:
  GlauberKmc(ModelParams params, double beta, SpinConfiguration start, Sampler sampler = Sampler::kTree);

  struct Step {
    Site site = 0;
    double dt = 0;
  };

  /// Draws the next flip with probability rate/R and a holding time Exp(R), then applies it.
  Step step(Philox4x32& rng);
  /// Site chosen with probability rate/R for the given uniform in [0, 1); no state change.
  Site select(double u) const;
  void apply(Site x);

  const SpinConfiguration& config() const { return config_; }
  double total_rate() const;
  double rate(Site x) const { return rates_[x]; }
  /// 64-bit Zobrist hash of the current configuration, maintained per flip.
  std::uint64_t hash() const { return hash_; }
  std::uint64_t site_key(Site x) const { return keys_[x]; }
  /// Largest |incremental - recomputed| over all site rates and the total.
  double max_rate_drift() const;

 private:
  void refresh(Site x);
  double fresh_rate(Site x) const;
  std::size_t class_of(double rate);

  ModelParams params_;
  double beta_;
  SpinConfiguration config_;
  Sampler sampler_;
  std::vector<double> rates_;
  std::vector<std::uint64_t> keys_;
  std::uint64_t hash_ = 0;
  // sum tree: leaves at [leaves_, 2 leaves_)
  std::size_t leaves_ = 1;
  std::vector<double> tree_;
  // grouped sampler
  std::vector<double> class_rate_;
  std::vector<std::vector<Site>> class_sites_;
  std::unordered_map<std::int64_t, std::size_t> class_index_;
  std::vector<std::size_t> site_class_, site_slot_;
};

/// Set of configurations with O(1) expected membership from a Zobrist hash,
/// a cached plus-count filter, and exact verification on hash hits.
class StateSet {
 public:
  explicit StateSet(const Torus& torus);
  void insert(const SpinConfiguration& c, int label = 0);
  std::size_t size() const { return states_.size(); }
  bool empty() const { return states_.empty(); }
  /// Label of the matching member, or nothing. `hash` and `count` must
  /// describe `c` (Zobrist hash and number of plus sites).
  std::optional<int> find(const SpinConfiguration& c, std::uint64_t hash, std::size_t count) const;
  std::optional<int> find(const SpinConfiguration& c) const;
  std::uint64_t hash_of(const SpinConfiguration& c) const;

 private:
  Torus torus_;
  std::vector<SpinConfiguration> states_;
  std::vector<int> labels_;
  std::unordered_multimap<std::uint64_t, std::size_t> by_hash_;
  std::vector<char> counts_;
};

/// Zobrist key of a site; shared by GlauberKmc and StateSet.
std::uint64_t zobrist_key(Site x);

class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TransitionSample {
  double hitting_time = 0;
  std::uint64_t step_count = 0;
  bool hit_gate_before_target = false;
  std::string entrance_state;  // "L:hex" of the first gate state visited
  int entrance_orbit = -1;
  std::uint64_t rng_seed = 0;
  std::uint64_t replica = 0;
};

struct RunStatistics {
  std::size_t n = 0;
  double mean = 0;
  double standard_error = 0;
  double ks = 0;  // KS distance of tau / mean to Exp(1)
  double gate_fraction = 0;
  std::vector<std::size_t> entrance_histogram;  // by orbit label
  std::uint64_t total_events = 0;
  std::vector<TransitionSample> samples;
};

struct KmcOptions {
  Sampler sampler = Sampler::kTree;
  double budget = 1e9;                 // refuse when the projected event count exceeds this
  double max_events = 0;               // hard cap on executed events; budget when 0
  std::optional<double> gamma;         // barrier for the projection; closed form when absent
  std::size_t orbit_count = 0;         // histogram size; max gate label + 1 when 0
};

/// Independent replicas from all minus until the first hit of `stop`.
/// Replica r draws from Philox4x32(seed, r).
RunStatistics sample_transition(const ModelParams& params, double beta, const Torus& torus, const StateSet& stop,
                                const StateSet* gate, std::size_t n_replicas, std::uint64_t seed,
                                const KmcOptions& options = {});

/// Projected event count 10 e^{beta gamma} n_replicas used by the budget guard.
double projected_events(double beta, double gamma, std::size_t n_replicas);

/// Gate set built from the enumerated critical states, labelled by orbit.
StateSet critical_state_set(const GateEnumeration& gates, const Torus& torus);

/// Kolmogorov-Smirnov distance of x / mean(x) to the unit exponential.
double ks_exponential(std::vector<double> x);

/// Chi-square p-value of the entrance histogram against counts proportional
/// to orbit size. Throws std::invalid_argument for the alternating model.
double entrance_uniformity(const RunStatistics& run, const GateEnumeration& gates, const ModelParams& params);

/// Chi-square upper-tail probability with `dof` degrees of freedom.
double chi_square_p_value(double statistic, double dof);

/// Final state ids of independent replicas run from all minus for time t (L*L <= 64).
std::vector<std::uint64_t> occupation_samples(const ModelParams& params, double beta, const Torus& torus,
                                              double t, std::size_t n_replicas, std::uint64_t seed,
                                              Sampler sampler = Sampler::kTree);

}  // namespace metaising

#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "metaising/energy.hpp"
#include "metaising/lattice.hpp"

namespace metaising {

using StateId = std::uint64_t;

class EnumerationCapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// All 2^(L*L) configurations of a small torus; state id bit k is site k.
/// Neighbours of a state are the ids differing in exactly one bit.
class StateSpace {
 public:
  /// L <= 4 by default; L = 5 only with `allow_large`.
  explicit StateSpace(Torus torus, bool allow_large = false);

  const Torus& torus() const { return torus_; }
  int sites() const { return static_cast<int>(torus_.size()); }
  std::size_t size() const { return std::size_t{1} << torus_.size(); }
  StateId all_minus() const { return 0; }
  StateId all_plus() const { return size() - 1; }
  SpinConfiguration config(StateId id) const { return SpinConfiguration::from_id(torus_, id); }

 private:
  Torus torus_;
};

/// H(sigma) - H(all minus) for every state. Values closer than `snap` are
/// merged onto the smallest member of their cluster so that equal energies
/// compare equal.
std::vector<double> state_energies(const ModelParams& params, const StateSpace& space, double snap = 1e-9);

/// Phi(a, b) by bisection over the sorted energy levels with a connectivity
/// test at each threshold.
double communication_height_bisection(const StateSpace& space, const std::vector<double>& energies, StateId a,
                                      StateId b);

/// Phi(a, .) for all states by a minimax (bottleneck) Dijkstra from a.
std::vector<double> communication_heights_from(const StateSpace& space, const std::vector<double>& energies,
                                               StateId a);

/// Phi(a, .) by a union-find sweep over the states in energy order.
std::vector<double> communication_heights_sweep(const StateSpace& space, const std::vector<double>& energies,
                                                StateId a);

/// Phi(a, b); both algorithms are run and must agree exactly (throws std::logic_error otherwise).
double communication_height(const StateSpace& space, const std::vector<double>& energies, StateId a, StateId b);

constexpr double kInfiniteStability = std::numeric_limits<double>::infinity();

/// V_sigma for every state; states with no strictly lower state get +infinity.
std::vector<double> stability_levels(const StateSpace& space, const std::vector<double>& energies);

std::vector<StateId> stable_states(const std::vector<double>& energies);
std::vector<StateId> metastable_states(const std::vector<double>& energies, const std::vector<double>& stability);

struct Gate {
  std::vector<StateId> protocritical;
  std::vector<StateId> critical;
  double phi = 0;  // Phi(m, s)
  bool h2 = false;  // |P* ~ eta| constant on C*
};

/// Maximal pair satisfying the three gate clauses.
Gate identify_gate(const StateSpace& space, const std::vector<double>& energies, StateId m, StateId s);

struct GateClauseCheck {
  bool adjacency = false;
  bool protocritical_side = false;
  bool critical_paths = false;
  bool all() const { return adjacency && protocritical_side && critical_paths; }
};

/// Re-verifies the three clauses for a candidate pair from scratch.
GateClauseCheck check_gate_clauses(const StateSpace& space, const std::vector<double>& energies, StateId m,
                                   StateId s, const std::vector<StateId>& protocritical,
                                   const std::vector<StateId>& critical);

struct WeightedEdge {
  std::size_t a = 0, b = 0;
  double w = 1;
};

struct CapacityResult {
  double value = 0;           // sum over edges w (h_a - h_b)^2
  std::vector<double> h;      // minimizer on the nodes
  bool disconnected = false;  // some free nodes touch no boundary node
};

/// Minimizes sum_e w_e (h_a - h_b)^2 with h fixed on the nodes where
/// `boundary` has a value. Dense solve below 5000 unknowns, else Jacobi-preconditioned CG.
CapacityResult weighted_capacity(std::size_t n_nodes, const std::vector<WeightedEdge>& edges,
                                 const std::vector<std::optional<double>>& boundary);

double quadratic_form(const std::vector<WeightedEdge>& edges, const std::vector<double>& h);

struct DirichletProblem {
  std::vector<WeightedEdge> edges;
  std::vector<std::optional<double>> boundary;
  std::vector<std::size_t> node_of_state;  // per state id; npos outside S*
  std::size_t n_nodes = 0;
  std::size_t wells = 0;
};

/// The collapsed network: S_m, S_s, and each well become single nodes.
DirichletProblem dirichlet_problem(const StateSpace& space, const std::vector<double>& energies, StateId m,
                                   StateId s);

struct DirichletResult {
  double inv_k = 0;
  CapacityResult capacity;
  DirichletProblem problem;
};

DirichletResult dirichlet_prefactor(const StateSpace& space, const std::vector<double>& energies, StateId m,
                                    StateId s);

/// E_m[tau_s] at inverse temperature beta.
double exact_mean_hitting_time(const ModelParams& params, const StateSpace& space, double beta, StateId m, StateId s);

/// Second-smallest eigenvalue of -L_beta.
double spectral_gap(const ModelParams& params, const StateSpace& space, double beta);

/// Full spectrum of -L_beta (dense, L <= 3).
std::vector<double> generator_spectrum(const ModelParams& params, const StateSpace& space, double beta);

struct LandscapeReport {
  int side = 0;
  StateId m = 0, s = 0;
  double gamma = 0;
  std::vector<StateId> stable, metastable;
  bool h1 = false;
  bool m_is_all_minus = false;
  Gate gate;
  double inv_k = 0;
  std::vector<double> betas;
  std::vector<double> mean_hitting_times;
  std::vector<double> spectral_gaps;
};

/// Runs every brute-force analysis. m is taken from S_meta when it is a
/// singleton, else all minus; s likewise from S_stab.
LandscapeReport analyze_landscape(const ModelParams& params, const StateSpace& space,
                                  const std::vector<double>& betas = {});

}  // namespace metaising

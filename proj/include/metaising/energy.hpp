#pragma once

#include <string>
#include <variant>
#include <vector>

#include "metaising/lattice.hpp"

namespace metaising {

/// Nearest-neighbour Ising model with direction-dependent couplings.
struct Anisotropic {
  double j_h = 0;  // horizontal bonds
  double j_v = 0;  // vertical bonds
  double h = 0;
};

/// Nearest- plus next-nearest-neighbour attraction. `k_nnn` is the diagonal coupling.
struct NextNearest {
  double j_tilde = 0;
  double k_nnn = 0;
  double h = 0;
  double j() const { return j_tilde + 2 * k_nnn; }
};

/// Field of strength h_even favouring +1 on even rows and h_odd favouring -1 on odd rows.
struct Alternating {
  double j = 0;
  double h_odd = 0;
  double h_even = 0;
  double epsilon() const { return h_even - h_odd; }
  double mu() const { return 2 * j - h_odd; }
};

using ModelParams = std::variant<Anisotropic, NextNearest, Alternating>;

std::string model_name(const ModelParams& params);

/// Throws std::invalid_argument unless every coupling is strictly positive.
void check_params(const ModelParams& params);

/// Throws std::invalid_argument when the model cannot live on the torus
/// (the alternating field needs an even side so row parity survives the wrap).
void check_torus(const ModelParams& params, const Torus& torus);

/// Bond-sum Hamiltonian, constant offset included.
double energy(const ModelParams& params, const SpinConfiguration& config);

/// H(config) - H(all minus) from the droplet geometry alone.
double energy_geometric(const ModelParams& params, const SpinConfiguration& config);

/// H(config with x flipped) - H(config) from the local neighbourhood.
double delta_energy(const ModelParams& params, const SpinConfiguration& config, Site x);

double metropolis_rate(const ModelParams& params, double beta, const SpinConfiguration& config, Site x);

/// Smallest integer strictly greater than v.
int ceil_strict(double v);

/// True when v lies within `tol` of an integer.
bool near_integer(double v, double tol = 1e-9);

struct AssumptionClause {
  std::string name;
  bool passed = false;
  std::string detail;
  double threshold = 0;  // lower bound on |Lambda| for the torus-size clause, else 0
};

struct AssumptionReport {
  std::string model;
  std::vector<AssumptionClause> clauses;
  bool all_passed() const;
  const AssumptionClause& clause(const std::string& name) const;
};

AssumptionReport validate_assumptions(const ModelParams& params, const Torus& torus);

}  // namespace metaising

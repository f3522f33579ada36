#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "metaising/energy.hpp"
#include "metaising/lattice.hpp"
#include "metaising/rational.hpp"

namespace metaising {

/// Closed-form critical quantities of a model on a given torus.
struct CriticalGeometry {
  std::string model;
  std::size_t volume = 0;
  // anisotropic
  int l_v = 0;
  // next-nearest
  int ell = 0;
  int d_star = 0;
  int l_star = 0;
  // alternating
  int l_b = 0;
  int l_h = 0;
  double epsilon = 0;
  double mu = 0;

  double gamma = 0;  // activation energy above the all-minus state
  Rational inv_k;    // 1/K
  bool assumptions_hold = false;
  std::vector<std::string> warnings;
};

CriticalGeometry critical_geometry(const ModelParams& params, const Torus& torus);

/// The strict double inequalities bracketing each critical length.
bool critical_inequalities_hold(const ModelParams& params, const CriticalGeometry& geometry);

/// H(all minus) + gamma.
double critical_energy(const ModelParams& params, const Torus& torus);

class DropletFitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CriticalState {
  SpinConfiguration config;
  int orbit = 0;     // translation orbit: one per (rotation, seat) template
  std::string seat;  // seat class of the attached spin
};

struct GateEnumeration {
  std::vector<SpinConfiguration> protocritical;
  std::vector<CriticalState> critical;
  /// Downhill successors of critical states: the 2pr sets, or the C-bar sets of
  /// the alternating model.
  std::vector<SpinConfiguration> successors;
  std::vector<std::string> orbit_labels;
  std::vector<std::size_t> orbit_sizes;
};

std::vector<SpinConfiguration> enumerate_protocritical(const ModelParams& params, const Torus& torus);
GateEnumeration enumerate_critical(const ModelParams& params, const Torus& torus);

struct PrefactorSum {
  Rational inv_k;
  std::vector<int> protocritical_neighbors;  // |P* ~ eta| per critical state
  std::vector<int> successor_neighbors;
};

/// Sum over critical states of p s / (p + s), with p and s counted by direct
/// single-flip lookup into the enumerated sets.
PrefactorSum combinatorial_prefactor(const ModelParams& params, const Torus& torus);
PrefactorSum combinatorial_prefactor(const GateEnumeration& gates);

struct ReferencePath {
  std::vector<SpinConfiguration> configs;  // all minus ... all plus
  std::vector<Site> flips;                 // flips[k] turns configs[k] into configs[k+1]
  std::vector<double> energies;            // H(configs[k]) - H(all minus)
  double max_energy() const;
  std::size_t argmax() const;
};

ReferencePath reference_path(const ModelParams& params, const Torus& torus);

}  // namespace metaising

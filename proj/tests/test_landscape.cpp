#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "metaising/landscape.hpp"

using namespace metaising;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Widest-path (minimax) heights from one source by a dense O(N^2) scan.
std::vector<double> minimax_from(const StateSpace& sp, const std::vector<double>& e, StateId a) {
  const std::size_t n = sp.size();
  std::vector<double> best(n, kInf);
  std::vector<char> done(n, 0);
  best[a] = e[a];
  for (std::size_t it = 0; it < n; ++it) {
    std::size_t u = n;
    for (std::size_t v = 0; v < n; ++v)
      if (!done[v] && (u == n || best[v] < best[u])) u = v;
    done[u] = 1;
    for (int k = 0; k < sp.sites(); ++k) {
      const std::size_t v = u ^ (std::size_t{1} << k);
      best[v] = std::min(best[v], std::max(best[u], e[v]));
    }
  }
  return best;
}

const std::vector<ModelParams> kModels = {Anisotropic{1.5, 1.2, 1.0}, NextNearest{2.35, 0.55, 1.0},
                                          Alternating{1.1, 0.2, 1.0}};

}  // namespace

TEST_CASE("state space limits") {
  CHECK_THROWS_AS(StateSpace(Torus(5)), EnumerationCapError);
  CHECK_THROWS_AS(StateSpace(Torus(6), true), EnumerationCapError);
  CHECK_NOTHROW(StateSpace(Torus(4)));
  const StateSpace sp{Torus{3}};
  CHECK(sp.size() == 512);
  CHECK(sp.all_plus() == 511);
  CHECK(sp.config(5).plus(0));
  CHECK(sp.config(5).plus(2));
}

TEST_CASE("energies are snapped and relative to all minus") {
  const StateSpace sp{Torus{3}};
  for (const auto& p : kModels) {
    if (std::holds_alternative<Alternating>(p)) continue;
    const auto e = state_energies(p, sp);
    CHECK(e[0] == 0.0);
    for (StateId id = 0; id < sp.size(); id += 37)
      CHECK(e[id] == doctest::Approx(energy(p, sp.config(id)) - energy(p, sp.config(0))).epsilon(1e-9));
  }
}

TEST_CASE("communication heights agree across algorithms") {
  std::mt19937_64 rng(12);
  for (const auto& p : kModels) {
    const int side = std::holds_alternative<Alternating>(p) ? 4 : 3;
    const StateSpace sp{Torus{side}};
    const auto e = state_energies(p, sp);
    const auto dijkstra = communication_heights_from(sp, e, 0);
    const auto sweep = communication_heights_sweep(sp, e, 0);
    CHECK(dijkstra == sweep);
    if (side == 3) CHECK(dijkstra == minimax_from(sp, e, 0));
    for (int k = 0; k < 10; ++k) {
      const StateId b = rng() % sp.size();
      CHECK(communication_height_bisection(sp, e, 0, b) == dijkstra[b]);
      CHECK(communication_height(sp, e, 0, b) == dijkstra[b]);
    }
  }
}

TEST_CASE("communication height properties") {
  const StateSpace sp{Torus{3}};
  const auto e = state_energies(Anisotropic{1.5, 1.2, 1.0}, sp);
  std::mt19937_64 rng(13);
  for (int k = 0; k < 20; ++k) {
    const StateId a = rng() % sp.size(), b = rng() % sp.size(), c = rng() % sp.size();
    const auto from_a = communication_heights_from(sp, e, a);
    const auto from_b = communication_heights_from(sp, e, b);
    CHECK(from_a[b] == from_b[a]);
    CHECK(from_a[a] == e[a]);
    CHECK(from_a[b] >= std::max(e[a], e[b]));
    CHECK(from_a[c] <= std::max(from_a[b], from_b[c]));
  }
}

TEST_CASE("stability levels match a brute-force oracle") {
  for (const auto& p : {ModelParams{Anisotropic{1.5, 1.2, 1.0}}, ModelParams{NextNearest{2.35, 0.55, 1.0}}}) {
    const StateSpace sp{Torus{3}};
    const auto e = state_energies(p, sp);
    const auto v = stability_levels(sp, e);
    for (StateId a = 0; a < sp.size(); a += 3) {
      const auto h = minimax_from(sp, e, a);
      double expect = kInf;
      for (StateId b = 0; b < sp.size(); ++b)
        if (e[b] < e[a]) expect = std::min(expect, h[b] - e[a]);
      CHECK(v[a] == doctest::Approx(expect).epsilon(1e-12));
    }
    const auto stable = stable_states(e);
    REQUIRE(stable.size() == 1);
    CHECK(stable[0] == sp.all_plus());
    CHECK(std::isinf(v[sp.all_plus()]));
    const auto meta = metastable_states(e, v);
    REQUIRE(meta.size() == 1);
    CHECK(meta[0] == sp.all_minus());
  }
}

TEST_CASE("gate identification satisfies the clause checker") {
  const std::vector<std::pair<ModelParams, int>> cases = {
      {Anisotropic{1.5, 1.2, 1.0}, 3}, {NextNearest{2.35, 0.55, 1.0}, 3}, {Anisotropic{1.5, 1.2, 1.0}, 4},
      {Alternating{1.1, 0.2, 1.0}, 4}};
  for (const auto& [p, side] : cases) {
    const StateSpace sp{Torus{side}};
    const auto e = state_energies(p, sp);
    const auto gate = identify_gate(sp, e, sp.all_minus(), sp.all_plus());
    CHECK_FALSE(gate.critical.empty());
    CHECK_FALSE(gate.protocritical.empty());
    for (StateId c : gate.critical) CHECK(e[c] == gate.phi);
    for (StateId q : gate.protocritical) CHECK(e[q] < gate.phi);
    CHECK(check_gate_clauses(sp, e, sp.all_minus(), sp.all_plus(), gate.protocritical, gate.critical).all());
    // states on the wrong side are rejected
    auto bad_c = gate.critical;
    bad_c.push_back(sp.all_minus());
    CHECK_FALSE(check_gate_clauses(sp, e, sp.all_minus(), sp.all_plus(), gate.protocritical, bad_c).critical_paths);
    auto bad_p = gate.protocritical;
    bad_p.push_back(sp.all_plus());
    CHECK_FALSE(
        check_gate_clauses(sp, e, sp.all_minus(), sp.all_plus(), bad_p, gate.critical).protocritical_side);
  }
}

TEST_CASE("anisotropic landscape on L = 4") {
  const StateSpace sp{Torus{4}};
  const auto r = analyze_landscape(Anisotropic{1.5, 1.2, 1.0}, sp);
  CHECK(r.h1);
  CHECK(r.m_is_all_minus);
  CHECK(r.gamma == doctest::Approx(7.6));
  CHECK(r.gate.protocritical.size() == 4);
  CHECK(r.gate.critical.size() == 32);
  CHECK(r.inv_k == doctest::Approx(64.0 / 3));
}

TEST_CASE("weighted capacity against series and parallel networks") {
  // 0 - 2 - 3 - 1 in series
  const std::vector<WeightedEdge> chain = {{0, 2, 2.0}, {2, 3, 3.0}, {3, 1, 6.0}};
  const std::vector<std::optional<double>> bnd = {1.0, 0.0, std::nullopt, std::nullopt};
  const auto series = weighted_capacity(4, chain, bnd);
  CHECK(series.value == doctest::Approx(1.0 / (0.5 + 1.0 / 3 + 1.0 / 6)));
  CHECK_FALSE(series.disconnected);
  CHECK(series.h[2] == doctest::Approx(0.5));

  const std::vector<WeightedEdge> par = {{0, 1, 1.5}, {0, 2, 2.0}, {2, 1, 2.0}};
  const auto parallel = weighted_capacity(3, par, {1.0, 0.0, std::nullopt});
  CHECK(parallel.value == doctest::Approx(1.5 + 1.0));
  CHECK(quadratic_form(par, parallel.h) == doctest::Approx(parallel.value));

  const auto island = weighted_capacity(4, {{0, 1, 1.0}, {2, 3, 1.0}}, {1.0, 0.0, std::nullopt, std::nullopt});
  CHECK(island.disconnected);
  CHECK(island.value == doctest::Approx(1.0));
}

TEST_CASE("dirichlet prefactor consistency") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0, 1);
  for (const auto& [p, side] : std::vector<std::pair<ModelParams, int>>{{Anisotropic{1.5, 1.2, 1.0}, 3},
                                                                         {NextNearest{2.35, 0.55, 1.0}, 3},
                                                                         {Alternating{1.1, 0.2, 1.0}, 4}}) {
    const StateSpace sp{Torus{side}};
    const auto e = state_energies(p, sp);
    const auto fwd = dirichlet_prefactor(sp, e, sp.all_minus(), sp.all_plus());
    const auto bwd = dirichlet_prefactor(sp, e, sp.all_plus(), sp.all_minus());
    CHECK(fwd.inv_k > 0);
    CHECK(std::abs(fwd.inv_k - bwd.inv_k) < 1e-9);
    const auto& prob = fwd.problem;
    CHECK(quadratic_form(prob.edges, fwd.capacity.h) == doctest::Approx(fwd.inv_k).epsilon(1e-9));
    // any competitor with the same boundary values costs at least as much
    for (int k = 0; k < 5; ++k) {
      auto h = fwd.capacity.h;
      for (std::size_t i = 0; i < h.size(); ++i)
        if (!prob.boundary[i]) h[i] = std::clamp(h[i] + 0.2 * (u(rng) - 0.5), 0.0, 1.0);
      CHECK(quadratic_form(prob.edges, h) >= fwd.inv_k - 1e-12);
    }
    // adding a conductor never lowers the capacity
    auto more = prob.edges;
    more.push_back({0, prob.n_nodes - 1, 0.5});
    CHECK(weighted_capacity(prob.n_nodes, more, prob.boundary).value >= fwd.inv_k - 1e-12);
  }
}

TEST_CASE("infinite temperature is a birth-death chain on the Hamming weight") {
  const StateSpace sp{Torus{2}};
  const Anisotropic p{1.5, 1.2, 1.0};
  // all rates are 1 at beta = 0; T_k is the mean time to go from weight k to k + 1
  const int n = 4;
  double total = 0, t_prev = 0;
  for (int k = 0; k < n; ++k) {
    const double t_k = (1 + k * t_prev) / (n - k);
    total += t_k;
    t_prev = t_k;
  }
  CHECK(exact_mean_hitting_time(p, sp, 0.0, sp.all_minus(), sp.all_plus()) == doctest::Approx(total));
  CHECK(spectral_gap(p, sp, 0.0) == doctest::Approx(2.0));
  const auto eig = generator_spectrum(p, sp, 0.0);
  for (int j = 0; j <= n; ++j) {
    const auto count = std::count_if(eig.begin(), eig.end(), [&](double x) { return std::abs(x - 2 * j) < 1e-9; });
    const int binom = j == 0 || j == n ? 1 : (j == 2 ? 6 : 4);
    CHECK(count == binom);
  }
}

TEST_CASE("generator spectrum and gap") {
  const StateSpace sp{Torus{3}};
  const NextNearest p{0.45, 0.1, 0.15};
  const auto eig = generator_spectrum(p, sp, 1.5);
  REQUIRE(eig.size() == 512);
  CHECK(std::abs(eig.front()) < 1e-9);
  for (double x : eig) CHECK(x > -1e-9);
  CHECK(spectral_gap(p, sp, 1.5) == doctest::Approx(eig[1]).epsilon(1e-8));
  const double tau = exact_mean_hitting_time(p, sp, 2.0, sp.all_minus(), sp.all_plus());
  CHECK(tau > 1);
  CHECK(spectral_gap(p, sp, 2.0) * tau == doctest::Approx(1.0).epsilon(0.15));
}

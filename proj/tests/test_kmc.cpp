#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

#include "metaising/kmc.hpp"
#include "metaising/landscape.hpp"

using namespace metaising;

namespace {

StateSet only(const SpinConfiguration& c) {
  StateSet s(c.torus());
  s.insert(c);
  return s;
}

// Pearson statistic after merging cells with expectation below 5.
double pooled_p_value(const std::vector<double>& observed, const std::vector<double>& expected) {
  double stat = 0, o = 0, e = 0;
  int cells = 0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    o += observed[i];
    e += expected[i];
    if (e >= 5) {
      stat += (o - e) * (o - e) / e;
      ++cells;
      o = e = 0;
    }
  }
  if (e > 0) {
    stat += (o - e) * (o - e) / e;
    ++cells;
  }
  return chi_square_p_value(stat, cells - 1);
}

const std::vector<ModelParams> kModels = {Anisotropic{1.5, 1.2, 1.0}, NextNearest{2.35, 0.55, 1.0},
                                          Alternating{1.1, 0.2, 1.0}};

}  // namespace

TEST_CASE("philox known answers") {
  using B = std::array<std::uint32_t, 4>;
  CHECK(Philox4x32::block({0, 0, 0, 0}, {0, 0}) == B{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(Philox4x32::block({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        B{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(Philox4x32::block({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        B{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("philox streams") {
  Philox4x32 a(7, 0), b(7, 0), c(7, 1), d(8, 0);
  bool differs_c = false, differs_d = false;
  for (int k = 0; k < 16; ++k) {
    const auto x = a();
    CHECK(x == b());
    differs_c = differs_c || x != c();
    differs_d = differs_d || x != d();
  }
  CHECK(differs_c);
  CHECK(differs_d);
  Philox4x32 u(1, 2);
  double sum = 0;
  for (int k = 0; k < 100000; ++k) {
    const double x = u.uniform();
    CHECK_UNARY(x > 0 && x < 1);
    sum += x;
  }
  CHECK(sum / 100000 == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("total rate from all minus") {
  const Torus t(6);
  for (const auto& p : kModels) {
    const double beta = 0.7;
    GlauberKmc kmc(p, beta, SpinConfiguration(t));
    double expected = 0;
    for (Site x = 0; x < t.size(); ++x) expected += metropolis_rate(p, beta, SpinConfiguration(t), x);
    CHECK(kmc.total_rate() == doctest::Approx(expected));
  }
  GlauberKmc hot(Anisotropic{1.5, 1.2, 1.0}, 0.0, SpinConfiguration(t));
  CHECK(hot.total_rate() == 36.0);
}

TEST_CASE("incremental rates do not drift") {
  for (auto sampler : {Sampler::kTree, Sampler::kGrouped})
    for (const auto& p : kModels) {
      GlauberKmc kmc(p, 0.8, SpinConfiguration(Torus(8)), sampler);
      Philox4x32 rng(3, 0);
      for (int k = 0; k < 100000; ++k) kmc.step(rng);
      CHECK(kmc.max_rate_drift() < 1e-9);
      StateSet s(Torus(8));
      CHECK(kmc.hash() == s.hash_of(kmc.config()));
    }
}

TEST_CASE("one-step distribution matches the rates") {
  std::mt19937_64 gen(17);
  const Torus t(5);
  SpinConfiguration c(t);
  std::bernoulli_distribution coin(0.4);
  for (Site x = 0; x < t.size(); ++x) c.set(x, coin(gen));
  const NextNearest p{2.35, 0.55, 1.0};
  const double beta = 0.6;
  for (auto sampler : {Sampler::kTree, Sampler::kGrouped}) {
    GlauberKmc kmc(p, beta, c, sampler);
    Philox4x32 rng(5, 9);
    std::vector<double> counts(t.size(), 0), expected(t.size(), 0);
    const int n = 100000;
    for (int k = 0; k < n; ++k) counts[kmc.select(rng.uniform())] += 1;
    const double total = kmc.total_rate();
    for (Site x = 0; x < t.size(); ++x) expected[x] = n * metropolis_rate(p, beta, c, x) / total;
    CHECK(pooled_p_value(counts, expected) > 1e-3);
  }
}

TEST_CASE("state set membership") {
  const Torus t(6);
  StateSet s(t);
  CHECK(s.empty());
  const auto a = SpinConfiguration::from_sites(t, {1, 2, 3});
  const auto b = SpinConfiguration::from_sites(t, {1, 2, 4});
  s.insert(a, 5);
  CHECK(s.size() == 1);
  CHECK(s.find(a) == 5);
  CHECK_FALSE(s.find(b).has_value());
  CHECK_FALSE(s.find(SpinConfiguration(t)).has_value());
  std::uint64_t h = 0;
  for (Site x : {1u, 2u, 3u}) h ^= zobrist_key(x);
  CHECK(s.hash_of(a) == h);
}

TEST_CASE("hitting time is the sum of holding times and runs are reproducible") {
  const Torus t(3);
  const Anisotropic p{0.8, 0.7, 1.0};
  const auto stop = only(SpinConfiguration::all_plus(t));
  KmcOptions opt;
  opt.gamma = 2.4;
  const auto r1 = sample_transition(p, 1.5, t, stop, nullptr, 20, 99, opt);
  const auto r2 = sample_transition(p, 1.5, t, stop, nullptr, 20, 99, opt);
  REQUIRE(r1.samples.size() == 20);
  for (std::size_t k = 0; k < 20; ++k) {
    CHECK(r1.samples[k].hitting_time == r2.samples[k].hitting_time);
    CHECK(r1.samples[k].step_count == r2.samples[k].step_count);
    CHECK(r1.samples[k].replica == k);
  }
  // replay replica 3 by hand
  Philox4x32 rng(99, 3);
  GlauberKmc kmc(p, 1.5, SpinConfiguration(t));
  double tau = 0;
  std::uint64_t steps = 0;
  while (!kmc.config().full()) {
    tau += kmc.step(rng).dt;
    ++steps;
  }
  CHECK(tau == r1.samples[3].hitting_time);
  CHECK(steps == r1.samples[3].step_count);
  const auto r3 = sample_transition(p, 1.5, t, stop, nullptr, 20, 100, opt);
  CHECK(r3.samples[0].hitting_time != r1.samples[0].hitting_time);
}

TEST_CASE("budget guard") {
  const Torus t(7);
  const Anisotropic p{0.8, 0.7, 1.0};
  const auto stop = only(SpinConfiguration::all_plus(t));
  CHECK(projected_events(2.0, 3.0, 10) == doctest::Approx(100 * std::exp(6.0)));
  KmcOptions opt;
  opt.budget = 1e6;
  CHECK_THROWS_AS(sample_transition(p, 5.0, t, stop, nullptr, 100, 1, opt), BudgetExceeded);
  opt.budget = 1e12;
  opt.max_events = 50;
  CHECK_THROWS_AS(sample_transition(p, 5.0, t, stop, nullptr, 100, 1, opt), BudgetExceeded);
  CHECK_THROWS_AS(sample_transition(p, 1.0, t, StateSet(t), nullptr, 1, 1), std::invalid_argument);
}

TEST_CASE("kolmogorov-smirnov distance") {
  std::mt19937_64 gen(4);
  std::exponential_distribution<double> ex(3.0);
  std::vector<double> x(5000);
  for (auto& v : x) v = ex(gen);
  CHECK(ks_exponential(x) < 0.03);
  std::vector<double> flat(5000, 1.0);
  CHECK(ks_exponential(flat) > 0.6);
  CHECK(chi_square_p_value(0.0, 3) == doctest::Approx(1.0));
  CHECK(chi_square_p_value(7.814727903, 3) == doctest::Approx(0.05).epsilon(1e-6));
}

TEST_CASE("entrance uniformity") {
  const Torus t(7);
  const Anisotropic p{0.8, 0.7, 1.0};
  const auto gates = enumerate_critical(p, t);
  RunStatistics run;
  run.entrance_histogram = gates.orbit_sizes;
  CHECK(entrance_uniformity(run, gates, p) == doctest::Approx(1.0));
  run.entrance_histogram.assign(gates.orbit_sizes.size(), 0);
  run.entrance_histogram[0] = 500;
  CHECK(entrance_uniformity(run, gates, p) < 1e-6);
  const Alternating alt{1.1, 0.2, 1.0};
  CHECK_THROWS_AS(entrance_uniformity(run, enumerate_critical(alt, Torus(10)), alt), std::invalid_argument);
}

TEST_CASE("samplers agree in distribution") {
  const Torus t(3);
  const NextNearest p{0.45, 0.1, 0.15};
  const auto stop = only(SpinConfiguration::all_plus(t));
  KmcOptions tree, grouped;
  tree.gamma = grouped.gamma = 4.2;
  grouped.sampler = Sampler::kGrouped;
  const auto a = sample_transition(p, 2.0, t, stop, nullptr, 1000, 11, tree);
  const auto b = sample_transition(p, 2.0, t, stop, nullptr, 1000, 12, grouped);
  const double z = (a.mean - b.mean) / std::hypot(a.standard_error, b.standard_error);
  CHECK(std::abs(z) < 4);
}

TEST_CASE("mean hitting time agrees with the exact solver") {
  const Torus t(3);
  const StateSpace sp{t};
  const Anisotropic p{0.8, 0.7, 1.0};
  const double exact = exact_mean_hitting_time(p, sp, 2.0, sp.all_minus(), sp.all_plus());
  KmcOptions opt;
  opt.gamma = 2.4;
  const auto run = sample_transition(p, 2.0, t, only(SpinConfiguration::all_plus(t)), nullptr, 1000, 5, opt);
  CHECK(std::abs(run.mean - exact) < 4 * run.standard_error);
}

TEST_CASE("occupation matches Gibbs weights") {
  const Torus t(3);
  const StateSpace sp{t};
  const Anisotropic p{0.8, 0.7, 1.0};
  const double beta = 0.8;
  const auto e = state_energies(p, sp);
  for (auto sampler : {Sampler::kTree, Sampler::kGrouped}) {
    const auto ids = occupation_samples(p, beta, t, 60.0, 4000, 8, sampler);
    // pool by energy level: every state of one level has the same weight
    std::map<double, std::pair<double, double>> level;  // energy -> (observed, weight)
    double z = 0;
    for (StateId id = 0; id < sp.size(); ++id) {
      level[e[id]].second += std::exp(-beta * e[id]);
      z += std::exp(-beta * e[id]);
    }
    for (auto id : ids) level[e[id]].first += 1;
    std::vector<double> obs, exp;
    for (const auto& [en, v] : level) {
      obs.push_back(v.first);
      exp.push_back(v.second / z * static_cast<double>(ids.size()));
    }
    CHECK(pooled_p_value(obs, exp) > 1e-3);
  }
}

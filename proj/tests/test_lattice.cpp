#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>

#include "metaising/lattice.hpp"

using namespace metaising;

namespace {

SpinConfiguration random_config(const Torus& t, std::mt19937_64& rng, double p = 0.5) {
  std::bernoulli_distribution coin(p);
  SpinConfiguration c(t);
  for (Site s = 0; s < t.size(); ++s) c.set(s, coin(rng));
  return c;
}

// Discordant nearest-neighbour pairs counted straight from coordinates.
std::pair<int, int> discordant_bonds(const SpinConfiguration& c) {
  const Torus& t = c.torus();
  int horizontal = 0, vertical = 0;
  for (int y = 0; y < t.side(); ++y)
    for (int x = 0; x < t.side(); ++x) {
      const bool a = c.plus(t.site(x, y));
      horizontal += a != c.plus(t.site(x + 1, y));
      vertical += a != c.plus(t.site(x, y + 1));
    }
  return {horizontal, vertical};
}

int discordant_diagonals(const SpinConfiguration& c) {
  const Torus& t = c.torus();
  int n = 0;
  for (int y = 0; y < t.side(); ++y)
    for (int x = 0; x < t.side(); ++x) {
      const bool a = c.plus(t.site(x, y));
      n += a != c.plus(t.site(x + 1, y + 1));
      n += a != c.plus(t.site(x + 1, y - 1));
    }
  return n;
}

}  // namespace

TEST_CASE("torus neighbour tables are regular and involutive") {
  for (int side : {2, 3, 5, 8}) {
    const Torus t(side);
    for (Site s = 0; s < t.size(); ++s) {
      const auto nn = t.nearest(s);
      const auto dg = t.diagonal(s);
      CHECK(t.nearest(nn[0])[1] == s);
      CHECK(t.nearest(nn[2])[3] == s);
      CHECK(t.diagonal(dg[0])[2] == s);
      CHECK(t.diagonal(dg[1])[3] == s);
    }
  }
  const Torus t(5);
  CHECK(t.site(-1, 0) == t.site(4, 0));
  CHECK(t.site(0, 5) == 0);
  CHECK_FALSE(t.odd_row(t.site(3, 0)));
  CHECK(t.odd_row(t.site(3, 1)));
  CHECK_THROWS_AS(Torus(1), std::invalid_argument);
}

TEST_CASE("flip is an involution and serialization round-trips") {
  std::mt19937_64 rng(3);
  const Torus t(7);
  for (int k = 0; k < 50; ++k) {
    const auto c = random_config(t, rng);
    const Site x = static_cast<Site>(rng() % t.size());
    CHECK(c.flipped(x).flipped(x) == c);
    CHECK(SpinConfiguration::parse(c.to_string()) == c);
  }
  const Torus small(4);
  for (std::uint64_t id : {0ull, 1ull, 0xbeefull, 0xffffull}) CHECK(SpinConfiguration::from_id(small, id).to_id() == id);
  CHECK(SpinConfiguration::from_sites(small, {0, 5}).hex() == "1200");
  CHECK_THROWS(SpinConfiguration::parse("4:zz"));
}

TEST_CASE("connected components use four-adjacency") {
  const Torus t(6);
  CHECK(connected_components(SpinConfiguration(t)).empty());
  const auto square = SpinConfiguration::from_sites(t, rectangle_sites(t, 1, 1, 2, 2));
  const auto one = connected_components(square);
  REQUIRE(one.size() == 1);
  CHECK(one[0].count() == 4);
  const auto kiss = SpinConfiguration::from_sites(t, {t.site(1, 1), t.site(2, 2)});
  CHECK(connected_components(kiss).size() == 2);
  // wrap joins the two edge columns
  const auto wrapped = SpinConfiguration::from_sites(t, {t.site(0, 3), t.site(5, 3)});
  CHECK(connected_components(wrapped).size() == 1);
}

TEST_CASE("boundary lengths") {
  const Torus t(8);
  CHECK(boundary_lengths(SpinConfiguration::from_sites(t, {9})) == std::pair{2, 2});
  for (auto [w, h] : {std::pair{3, 2}, std::pair{1, 5}, std::pair{4, 4}}) {
    const auto r = SpinConfiguration::from_sites(t, rectangle_sites(t, 6, 5, w, h));
    CHECK(boundary_lengths(r) == std::pair{2 * h, 2 * w});
  }
  std::mt19937_64 rng(11);
  for (int k = 0; k < 200; ++k) {
    const auto c = random_config(Torus(6), rng, 0.3 + 0.4 * (k % 2));
    CHECK(boundary_lengths(c) == discordant_bonds(c));
    const auto [v, h] = boundary_lengths(c);
    CHECK((v + h) % 2 == 0);
  }
  CHECK(boundary_lengths(SpinConfiguration::all_plus(t)) == std::pair{0, 0});
}

TEST_CASE("corner count") {
  const Torus t(8);
  CHECK(corner_count(SpinConfiguration::from_sites(t, {9})) == 4);
  CHECK(corner_count(SpinConfiguration::from_sites(t, rectangle_sites(t, 2, 3, 4, 2))) == 4);
  // diagonal contact: 3 convex corners each plus 4 at the shared vertex
  CHECK(corner_count(SpinConfiguration::from_sites(t, {t.site(1, 1), t.site(2, 2)})) == 10);
  CHECK(corner_count(SpinConfiguration(t)) == 0);
  CHECK(corner_count(SpinConfiguration::all_plus(t)) == 0);
  // each unit of perimeter meets two diagonal bonds, each corner removes one discordant diagonal
  std::mt19937_64 rng(5);
  for (int k = 0; k < 200; ++k) {
    const auto c = random_config(Torus(7), rng);
    const auto [v, h] = boundary_lengths(c);
    CHECK(corner_count(c) == 2 * (v + h) - discordant_diagonals(c));
  }
}

TEST_CASE("rectangular envelope") {
  const Torus t(8);
  auto env = rectangular_envelope(SpinConfiguration::from_sites(t, rectangle_sites(t, 6, 7, 3, 2)));
  CHECK(env.width == 3);
  CHECK(env.height == 2);
  CHECK(env.x0 == 6);
  CHECK(env.y0 == 7);
  env = rectangular_envelope(SpinConfiguration::from_sites(t, {t.site(0, 0), t.site(1, 0), t.site(0, 1)}));
  CHECK(env.width == 2);
  CHECK(env.height == 2);
  env = rectangular_envelope(SpinConfiguration::from_sites(t, rectangle_sites(t, 0, 3, 8, 1)));
  CHECK(env.wraps_horizontally);
  CHECK_FALSE(env.wraps_vertically);
  CHECK(env.height == 1);

  const auto report = analyze_geometry(SpinConfiguration::from_sites(t, rectangle_sites(t, 1, 1, 2, 3)));
  CHECK(report.area == 6);
  CHECK(report.perimeter() == 10);
  CHECK(report.envelopes.size() == 1);
  const auto empty = analyze_geometry(SpinConfiguration(t));
  CHECK(empty.area == 0);
  CHECK(empty.corners == 0);
  CHECK(empty.components.empty());
}

TEST_CASE("shape classification") {
  const Torus t(20);
  auto dot = classify_component(SpinConfiguration::from_sites(t, {5}));
  CHECK(dot.kind == ShapeKind::kRectangle);
  CHECK(dot.width == 1);
  CHECK(dot.height == 1);

  OctagonParams p{15, 12, 5, 6, 4, 3};
  CHECK(p.edge_n() == 6);
  const auto oct = classify_component(SpinConfiguration::from_sites(t, octagon_sites(t, 2, 3, p)));
  CHECK(oct.kind == ShapeKind::kOctagon);
  CHECK(oct.octagon == p);
  CHECK(oct.stable_octagon);

  for (int d_n = 3; d_n <= 9; ++d_n)
    for (int l = 1; l <= 3; ++l) {
      OctagonParams q{d_n, d_n + 1, l, l, l, l};
      if (q.edge_n() < 1 || q.edge_w() < 1) continue;
      const auto c = classify_component(SpinConfiguration::from_sites(t, octagon_sites(t, 7, 1, q)));
      CHECK(c.octagon == q);
    }

  const auto pm = classify_component(SpinConfiguration::from_sites(t, rectangle_sites(t, 4, 2, 2, 3)));
  CHECK(pm.stable_rectangle_pm);
  const auto odd_start = classify_component(SpinConfiguration::from_sites(t, rectangle_sites(t, 4, 1, 2, 3)));
  CHECK_FALSE(odd_start.stable_rectangle_pm);

  // a centred bump on a 3x3 square is a cut-corner octagon, an offset one is not
  auto centred = rectangle_sites(t, 4, 4, 3, 3);
  centred.push_back(t.site(7, 5));
  CHECK(classify_component(SpinConfiguration::from_sites(t, centred)).kind == ShapeKind::kOctagon);
  auto with_bump = rectangle_sites(t, 4, 4, 3, 4);
  with_bump.push_back(t.site(7, 4));
  const auto bumped = classify_component(SpinConfiguration::from_sites(t, with_bump));
  CHECK(bumped.kind == ShapeKind::kOther);
  REQUIRE(bumped.protuberances.size() == 1);
  CHECK(bumped.protuberances[0] == t.site(7, 4));
  CHECK(bumped.singleton_columns == 1);

  const auto band = classify_component(SpinConfiguration::from_sites(t, rectangle_sites(t, 0, 0, 20, 2)));
  CHECK(band.kind == ShapeKind::kWrappingRectangle);
}

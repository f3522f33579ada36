#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace metaising {

using Site = std::uint32_t;

/// Periodic L x L square lattice. Sites are numbered row-major, site = y * L + x,
/// where x is the column (horizontal, "east" is +x) and y the row ("north" is +y).
/// Row 0 is an even row.
class Torus {
 public:
  explicit Torus(int side);

  int side() const { return side_; }
  std::size_t size() const { return static_cast<std::size_t>(side_) * side_; }

  int x(Site s) const { return static_cast<int>(s % side_); }
  int y(Site s) const { return static_cast<int>(s / side_); }
  bool odd_row(Site s) const { return (y(s) & 1) != 0; }

  /// Site at (x, y), coordinates taken modulo the side length.
  Site site(int x, int y) const;

  /// East, west, north, south neighbours.
  std::array<Site, 4> nearest(Site s) const;
  /// NE, NW, SW, SE neighbours (Euclidean distance sqrt(2)).
  std::array<Site, 4> diagonal(Site s) const;

  bool operator==(const Torus&) const = default;

 private:
  int side_;
};

/// A spin configuration stored as the set of (+1)-sites.
class SpinConfiguration {
 public:
  explicit SpinConfiguration(Torus torus);

  static SpinConfiguration all_minus(Torus torus) { return SpinConfiguration(torus); }
  static SpinConfiguration all_plus(Torus torus);
  static SpinConfiguration from_sites(Torus torus, const std::vector<Site>& plus_sites);
  /// Inverse of `to_id`; only valid while L*L <= 64.
  static SpinConfiguration from_id(Torus torus, std::uint64_t id);
  /// Parses the "L:hex" form produced by `to_string`.
  static SpinConfiguration parse(std::string_view text);

  const Torus& torus() const { return torus_; }
  std::size_t size() const { return torus_.size(); }

  bool plus(Site s) const { return (words_[s >> 6] >> (s & 63)) & 1u; }
  int spin(Site s) const { return plus(s) ? 1 : -1; }
  void set(Site s, bool value);
  void flip(Site s) { words_[s >> 6] ^= (std::uint64_t{1} << (s & 63)); }
  SpinConfiguration flipped(Site s) const;

  std::size_t count() const;
  bool empty() const { return count() == 0; }
  bool full() const { return count() == size(); }
  std::vector<Site> plus_sites() const;

  std::uint64_t to_id() const;
  /// Hex digits of the bitset, four sites per digit, site 4k+j in bit j of digit k.
  std::string hex() const;
  /// "L:hex", the canonical serialization used in reports and as set keys.
  std::string to_string() const;

  const std::vector<std::uint64_t>& words() const { return words_; }

  bool operator==(const SpinConfiguration& other) const {
    return torus_ == other.torus_ && words_ == other.words_;
  }

 private:
  Torus torus_;
  std::vector<std::uint64_t> words_;
};

struct SpinConfigurationHash {
  std::size_t operator()(const SpinConfiguration& c) const;
};

/// Minimal bounding window of a droplet on the torus. An axis whose every
/// coordinate is occupied has no strict window and is flagged as wrapping.
struct Envelope {
  int x0 = 0;
  int width = 0;  // P_H
  bool wraps_horizontally = false;
  int y0 = 0;
  int height = 0;  // P_V
  bool wraps_vertically = false;
};

struct GeometryReport {
  std::size_t area = 0;
  std::size_t area_odd_rows = 0;
  std::size_t area_even_rows = 0;
  int vertical_boundary = 0;    // |d_V|, unit edges of vertical orientation
  int horizontal_boundary = 0;  // |d_H|
  int corners = 0;              // |A|
  std::vector<SpinConfiguration> components;
  std::vector<Envelope> envelopes;

  int perimeter() const { return vertical_boundary + horizontal_boundary; }
};

/// 4-connected components; diagonal contact does not connect.
std::vector<SpinConfiguration> connected_components(const SpinConfiguration& config);

/// (|d_V|, |d_H|): unit boundary edges split by orientation. A vertical edge
/// separates horizontally adjacent sites of opposite spin.
std::pair<int, int> boundary_lengths(const SpinConfiguration& config);

/// Right angles of the boundary polygon. A vertex where two plus sites touch
/// only diagonally contributes 4.
int corner_count(const SpinConfiguration& config);

Envelope rectangular_envelope(const SpinConfiguration& component);

GeometryReport analyze_geometry(const SpinConfiguration& config);

enum class ShapeKind { kRectangle, kOctagon, kWrappingRectangle, kOther };

struct OctagonParams {
  int d_n = 0;  // horizontal extent
  int d_w = 0;  // vertical extent
  int l_ne = 1, l_nw = 1, l_sw = 1, l_se = 1;

  int edge_n() const { return d_n - (l_ne - 1) - (l_nw - 1); }
  int edge_s() const { return d_n - (l_se - 1) - (l_sw - 1); }
  int edge_w() const { return d_w - (l_nw - 1) - (l_sw - 1); }
  int edge_e() const { return d_w - (l_ne - 1) - (l_se - 1); }
  bool stable() const;
  bool operator==(const OctagonParams&) const = default;
};

struct ComponentShape {
  ShapeKind kind = ShapeKind::kOther;
  Envelope envelope;
  int width = 0;   // l1 for rectangles
  int height = 0;  // l2 for rectangles
  OctagonParams octagon;       // filled for kOctagon (and for rectangles with all cuts 1)
  bool stable_octagon = false;
  /// Rectangle whose bottom and top rows are even, width >= 2, odd height >= 3.
  bool stable_rectangle_pm = false;
  std::vector<Site> protuberances;
  int singleton_rows = 0;
  int singleton_columns = 0;
};

ComponentShape classify_component(const SpinConfiguration& component);

/// Sites of an octagon whose bounding box has its south-west corner at (x0, y0).
/// Corners are cut by (l - 1) oblique bars each.
std::vector<Site> octagon_sites(const Torus& torus, int x0, int y0, const OctagonParams& p);
std::vector<Site> rectangle_sites(const Torus& torus, int x0, int y0, int width, int height);

}  // namespace metaising

#include "metaising/lattice.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <deque>
#include <stdexcept>

namespace metaising {

namespace {

int wrap(int v, int n) {
  int r = v % n;
  return r < 0 ? r + n : r;
}

std::size_t word_count(const Torus& t) { return (t.size() + 63) / 64; }

}  // namespace

Torus::Torus(int side) : side_(side) {
  if (side < 2) throw std::invalid_argument("torus side must be at least 2");
  if (side > 4096) throw std::invalid_argument("torus side too large");
}

Site Torus::site(int x, int y) const {
  return static_cast<Site>(wrap(y, side_) * side_ + wrap(x, side_));
}

std::array<Site, 4> Torus::nearest(Site s) const {
  const int cx = x(s), cy = y(s);
  return {site(cx + 1, cy), site(cx - 1, cy), site(cx, cy + 1), site(cx, cy - 1)};
}

std::array<Site, 4> Torus::diagonal(Site s) const {
  const int cx = x(s), cy = y(s);
  return {site(cx + 1, cy + 1), site(cx - 1, cy + 1), site(cx - 1, cy - 1), site(cx + 1, cy - 1)};
}

SpinConfiguration::SpinConfiguration(Torus torus) : torus_(torus), words_(word_count(torus), 0) {}

SpinConfiguration SpinConfiguration::all_plus(Torus torus) {
  SpinConfiguration c(torus);
  for (Site s = 0; s < torus.size(); ++s) c.set(s, true);
  return c;
}

SpinConfiguration SpinConfiguration::from_sites(Torus torus, const std::vector<Site>& plus_sites) {
  SpinConfiguration c(torus);
  for (Site s : plus_sites) {
    if (s >= torus.size()) throw std::out_of_range("site outside torus");
    c.set(s, true);
  }
  return c;
}

SpinConfiguration SpinConfiguration::from_id(Torus torus, std::uint64_t id) {
  if (torus.size() > 64) throw std::invalid_argument("state ids need L*L <= 64");
  SpinConfiguration c(torus);
  c.words_[0] = id;
  return c;
}

SpinConfiguration SpinConfiguration::parse(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) throw std::invalid_argument("expected L:hex");
  int side = 0;
  const auto sv = text.substr(0, colon);
  auto [ptr, ec] = std::from_chars(sv.data(), sv.data() + sv.size(), side);
  if (ec != std::errc() || ptr != sv.data() + sv.size()) throw std::invalid_argument("bad side length");
  Torus torus(side);
  const auto hex = text.substr(colon + 1);
  if (hex.size() != (torus.size() + 3) / 4) throw std::invalid_argument("hex length does not match L");
  SpinConfiguration c(torus);
  for (std::size_t k = 0; k < hex.size(); ++k) {
    const char ch = hex[k];
    int v;
    if (ch >= '0' && ch <= '9') v = ch - '0';
    else if (ch >= 'a' && ch <= 'f') v = ch - 'a' + 10;
    else if (ch >= 'A' && ch <= 'F') v = ch - 'A' + 10;
    else throw std::invalid_argument("bad hex digit");
    for (int j = 0; j < 4; ++j) {
      if (!((v >> j) & 1)) continue;
      const std::size_t s = 4 * k + j;
      if (s >= torus.size()) throw std::invalid_argument("bits beyond L*L set");
      c.set(static_cast<Site>(s), true);
    }
  }
  return c;
}

void SpinConfiguration::set(Site s, bool value) {
  const std::uint64_t mask = std::uint64_t{1} << (s & 63);
  if (value) words_[s >> 6] |= mask;
  else words_[s >> 6] &= ~mask;
}

SpinConfiguration SpinConfiguration::flipped(Site s) const {
  SpinConfiguration c = *this;
  c.flip(s);
  return c;
}

std::size_t SpinConfiguration::count() const {
  std::size_t n = 0;
  for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

std::vector<Site> SpinConfiguration::plus_sites() const {
  std::vector<Site> out;
  for (std::size_t w = 0; w < words_.size(); ++w) {
    std::uint64_t bits = words_[w];
    while (bits) {
      const int b = std::countr_zero(bits);
      out.push_back(static_cast<Site>(w * 64 + b));
      bits &= bits - 1;
    }
  }
  return out;
}

std::uint64_t SpinConfiguration::to_id() const {
  if (size() > 64) throw std::invalid_argument("state ids need L*L <= 64");
  return words_[0];
}

std::string SpinConfiguration::hex() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  const std::size_t n = (size() + 3) / 4;
  std::string out(n, '0');
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t s = 4 * k;
    const unsigned v = static_cast<unsigned>((words_[s >> 6] >> (s & 63)) & 0xF);
    out[k] = kDigits[v];
  }
  return out;
}

std::string SpinConfiguration::to_string() const { return std::to_string(torus_.side()) + ":" + hex(); }

std::size_t SpinConfigurationHash::operator()(const SpinConfiguration& c) const {
  std::uint64_t h = 0x9e3779b97f4a7c15ULL ^ static_cast<std::uint64_t>(c.torus().side());
  for (auto w : c.words()) {
    h ^= w + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return static_cast<std::size_t>(h);
}

std::vector<SpinConfiguration> connected_components(const SpinConfiguration& config) {
  const Torus& t = config.torus();
  std::vector<SpinConfiguration> out;
  std::vector<char> seen(t.size(), 0);
  std::deque<Site> queue;
  for (Site start : config.plus_sites()) {
    if (seen[start]) continue;
    SpinConfiguration comp(t);
    seen[start] = 1;
    queue.push_back(start);
    while (!queue.empty()) {
      const Site s = queue.front();
      queue.pop_front();
      comp.set(s, true);
      for (Site n : t.nearest(s)) {
        if (config.plus(n) && !seen[n]) {
          seen[n] = 1;
          queue.push_back(n);
        }
      }
    }
    out.push_back(std::move(comp));
  }
  return out;
}

std::pair<int, int> boundary_lengths(const SpinConfiguration& config) {
  const Torus& t = config.torus();
  int vertical = 0, horizontal = 0;
  for (Site s = 0; s < t.size(); ++s) {
    const auto nn = t.nearest(s);
    if (config.plus(s) != config.plus(nn[0])) ++vertical;    // east bond
    if (config.plus(s) != config.plus(nn[2])) ++horizontal;  // north bond
  }
  return {vertical, horizontal};
}

int corner_count(const SpinConfiguration& config) {
  const Torus& t = config.torus();
  int corners = 0;
  for (int y = 0; y < t.side(); ++y) {
    for (int x = 0; x < t.side(); ++x) {
      const bool a = config.plus(t.site(x, y));
      const bool b = config.plus(t.site(x + 1, y));
      const bool c = config.plus(t.site(x, y + 1));
      const bool d = config.plus(t.site(x + 1, y + 1));
      const int k = a + b + c + d;
      if (k == 1 || k == 3) corners += 1;
      else if (k == 2 && a == d) corners += 4;  // diagonal contact
    }
  }
  return corners;
}

namespace {

// Minimal circular window covering all occupied coordinates.
void axis_window(const std::vector<char>& occupied, int& start, int& length, bool& wraps) {
  const int n = static_cast<int>(occupied.size());
  if (std::all_of(occupied.begin(), occupied.end(), [](char c) { return c != 0; })) {
    start = 0;
    length = n;
    wraps = true;
    return;
  }
  wraps = false;
  if (std::none_of(occupied.begin(), occupied.end(), [](char c) { return c != 0; })) {
    start = 0;
    length = 0;
    return;
  }
  // Every maximal empty run yields a candidate window starting right after it.
  int best_len = n + 1, best_start = n;
  for (int i = 0; i < n; ++i) {
    if (occupied[i] || !occupied[wrap(i + 1, n)]) continue;
    // i is the last empty cell of a run; find the run length going backwards.
    int run = 0;
    while (run < n && !occupied[wrap(i - run, n)]) ++run;
    const int cand_start = wrap(i + 1, n);
    const int cand_len = n - run;
    if (cand_len < best_len || (cand_len == best_len && cand_start < best_start)) {
      best_len = cand_len;
      best_start = cand_start;
    }
  }
  start = best_start;
  length = best_len;
}

}  // namespace

Envelope rectangular_envelope(const SpinConfiguration& component) {
  const Torus& t = component.torus();
  std::vector<char> cols(t.side(), 0), rows(t.side(), 0);
  for (Site s : component.plus_sites()) {
    cols[t.x(s)] = 1;
    rows[t.y(s)] = 1;
  }
  Envelope e;
  axis_window(cols, e.x0, e.width, e.wraps_horizontally);
  axis_window(rows, e.y0, e.height, e.wraps_vertically);
  return e;
}

GeometryReport analyze_geometry(const SpinConfiguration& config) {
  GeometryReport r;
  const Torus& t = config.torus();
  for (Site s : config.plus_sites()) {
    ++r.area;
    if (t.odd_row(s)) ++r.area_odd_rows;
    else ++r.area_even_rows;
  }
  std::tie(r.vertical_boundary, r.horizontal_boundary) = boundary_lengths(config);
  r.corners = corner_count(config);
  r.components = connected_components(config);
  for (const auto& c : r.components) r.envelopes.push_back(rectangular_envelope(c));
  return r;
}

bool OctagonParams::stable() const {
  return edge_n() >= 2 && edge_s() >= 2 && edge_w() >= 2 && edge_e() >= 2 && l_ne >= 2 && l_nw >= 2 &&
         l_sw >= 2 && l_se >= 2;
}

std::vector<Site> rectangle_sites(const Torus& torus, int x0, int y0, int width, int height) {
  std::vector<Site> out;
  out.reserve(static_cast<std::size_t>(width) * height);
  for (int j = 0; j < height; ++j)
    for (int i = 0; i < width; ++i) out.push_back(torus.site(x0 + i, y0 + j));
  return out;
}

std::vector<Site> octagon_sites(const Torus& torus, int x0, int y0, const OctagonParams& p) {
  std::vector<Site> out;
  for (int j = 0; j < p.d_w; ++j) {
    for (int i = 0; i < p.d_n; ++i) {
      const int east = p.d_n - 1 - i, north = p.d_w - 1 - j;
      if (east + north < p.l_ne - 1) continue;
      if (i + north < p.l_nw - 1) continue;
      if (i + j < p.l_sw - 1) continue;
      if (east + j < p.l_se - 1) continue;
      out.push_back(torus.site(x0 + i, y0 + j));
    }
  }
  return out;
}

ComponentShape classify_component(const SpinConfiguration& component) {
  const Torus& t = component.torus();
  ComponentShape shape;
  shape.envelope = rectangular_envelope(component);
  const auto sites = component.plus_sites();

  std::vector<int> row_count(t.side(), 0), col_count(t.side(), 0);
  for (Site s : sites) {
    ++row_count[t.y(s)];
    ++col_count[t.x(s)];
    int nn = 0;
    for (Site n : t.nearest(s)) nn += component.plus(n);
    if (nn == 1) shape.protuberances.push_back(s);
  }
  shape.singleton_rows = static_cast<int>(std::count(row_count.begin(), row_count.end(), 1));
  shape.singleton_columns = static_cast<int>(std::count(col_count.begin(), col_count.end(), 1));

  const Envelope& e = shape.envelope;
  if (sites.empty()) return shape;
  const std::size_t box = static_cast<std::size_t>(e.width) * e.height;
  if (e.wraps_horizontally || e.wraps_vertically) {
    if (sites.size() == box) {
      shape.kind = ShapeKind::kWrappingRectangle;
      shape.width = e.width;
      shape.height = e.height;
    }
    return shape;
  }

  shape.width = e.width;
  shape.height = e.height;
  if (sites.size() == box) {
    shape.kind = ShapeKind::kRectangle;
    shape.octagon = OctagonParams{e.width, e.height, 1, 1, 1, 1};
    const bool bottom_even = (e.y0 % 2) == 0;
    const bool top_even = ((e.y0 + e.height - 1) % 2) == 0;
    shape.stable_rectangle_pm = bottom_even && top_even && e.width >= 2 && e.height >= 3;
    return shape;
  }

  // Octagon candidate: read the corner cuts off the top and bottom rows.
  auto inside = [&](int i, int j) { return component.plus(t.site(e.x0 + i, e.y0 + j)); };
  auto run_from_left = [&](int j) {
    int k = 0;
    while (k < e.width && !inside(k, j)) ++k;
    return k;
  };
  auto run_from_right = [&](int j) {
    int k = 0;
    while (k < e.width && !inside(e.width - 1 - k, j)) ++k;
    return k;
  };
  OctagonParams p;
  p.d_n = e.width;
  p.d_w = e.height;
  p.l_nw = run_from_left(e.height - 1) + 1;
  p.l_ne = run_from_right(e.height - 1) + 1;
  p.l_sw = run_from_left(0) + 1;
  p.l_se = run_from_right(0) + 1;
  if (p.edge_n() < 1 || p.edge_s() < 1 || p.edge_w() < 1 || p.edge_e() < 1) return shape;
  auto expected = octagon_sites(t, e.x0, e.y0, p);
  if (expected.size() != sites.size()) return shape;
  for (Site s : expected)
    if (!component.plus(s)) return shape;
  shape.kind = ShapeKind::kOctagon;
  shape.octagon = p;
  shape.stable_octagon = p.stable();
  return shape;
}

}  // namespace metaising

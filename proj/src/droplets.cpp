#include "metaising/droplets.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>
#include <utility>

namespace metaising {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

using Offset = std::pair<int, int>;
using Shape = std::vector<Offset>;

Shape rect(int x0, int y0, int w, int h) {
  Shape s;
  for (int y = y0; y < y0 + h; ++y)
    for (int x = x0; x < x0 + w; ++x) s.emplace_back(x, y);
  return s;
}

Shape with(Shape s, std::initializer_list<Offset> extra) {
  s.insert(s.end(), extra.begin(), extra.end());
  return s;
}

Shape octagon(int d_n, int d_w, int l) {
  Shape s;
  for (int j = 0; j < d_w; ++j)
    for (int i = 0; i < d_n; ++i) {
      const int e = d_n - 1 - i, n = d_w - 1 - j;
      if (e + n < l - 1 || i + n < l - 1 || i + j < l - 1 || e + j < l - 1) continue;
      s.emplace_back(i, j);
    }
  return s;
}

struct Extent {
  int w = 0, h = 0;
};

Extent extent(const Shape& s) {
  int x0 = std::numeric_limits<int>::max(), x1 = std::numeric_limits<int>::min();
  int y0 = x0, y1 = x1;
  for (auto [x, y] : s) {
    x0 = std::min(x0, x);
    x1 = std::max(x1, x);
    y0 = std::min(y0, y);
    y1 = std::max(y1, y);
  }
  return {x1 - x0 + 1, y1 - y0 + 1};
}

SpinConfiguration place(const Torus& t, const Shape& s, int ax, int ay) {
  SpinConfiguration c(t);
  for (auto [x, y] : s) c.set(t.site(ax + x, ay + y), true);
  return c;
}

// Critical template: the shape, its seat class, and the shapes one flip
// further downhill.
struct CriticalTemplate {
  Shape shape;
  std::string seat;
  std::vector<Shape> successors;
};

struct Templates {
  std::vector<Shape> protocritical;
  std::vector<CriticalTemplate> critical;
  bool even_anchor = false;  // alternating: only anchors on even rows
};

Templates anisotropic_templates(int lv) {
  Templates t;
  const int w = lv - 1, h = lv;
  // tall (w x h) with seats on the vertical sides, wide (h x w) with seats on
  // the horizontal sides
  const Shape tall = rect(0, 0, w, h), wide = rect(0, 0, h, w);
  for (int px : {-1, w}) t.protocritical.push_back(with(tall, {{px, 0}}));
  for (int py : {-1, w}) t.protocritical.push_back(with(wide, {{0, py}}));
  for (int px : {-1, w})
    for (int y = 0; y < h; ++y) {
      CriticalTemplate ct{with(tall, {{px, y}}), (y == 0 || y == h - 1) ? "corner" : "interior", {}};
      for (int dy : {-1, 1})
        if (y + dy >= 0 && y + dy < h) ct.successors.push_back(with(ct.shape, {{px, y + dy}}));
      t.critical.push_back(std::move(ct));
    }
  for (int py : {-1, w})
    for (int x = 0; x < h; ++x) {
      CriticalTemplate ct{with(wide, {{x, py}}), (x == 0 || x == h - 1) ? "corner" : "interior", {}};
      for (int dx : {-1, 1})
        if (x + dx >= 0 && x + dx < h) ct.successors.push_back(with(ct.shape, {{x + dx, py}}));
      t.critical.push_back(std::move(ct));
    }
  // P* lists each rectangle once per protuberance side; keep the bare
  // rectangles as the protocritical set.
  t.protocritical = {tall, wide};
  return t;
}

Templates next_nearest_templates(int ell, int d) {
  Templates t;
  const Shape tall = octagon(d - 1, d, ell), wide = octagon(d, d - 1, ell);
  t.protocritical = {tall, wide};
  // seats strictly inside the longest edges
  const int lo = ell, hi = d - ell - 1;
  for (int px : {-1, d - 1})
    for (int y = lo; y <= hi; ++y) {
      CriticalTemplate ct{with(tall, {{px, y}}), (y == lo || y == hi) ? "end" : "interior", {}};
      for (int dy : {-1, 1})
        if (y + dy >= lo && y + dy <= hi) ct.successors.push_back(with(ct.shape, {{px, y + dy}}));
      t.critical.push_back(std::move(ct));
    }
  for (int py : {-1, d - 1})
    for (int x = lo; x <= hi; ++x) {
      CriticalTemplate ct{with(wide, {{x, py}}), (x == lo || x == hi) ? "end" : "interior", {}};
      for (int dx : {-1, 1})
        if (x + dx >= lo && x + dx <= hi) ct.successors.push_back(with(ct.shape, {{x + dx, py}}));
      t.critical.push_back(std::move(ct));
    }
  return t;
}

Templates alternating_templates(int lb) {
  Templates t;
  t.even_anchor = true;
  const int lh = 2 * lb - 1;
  // P1: (lb-1) x lh rectangle with an even-row protuberance on a vertical side
  const int w1 = lb - 1;
  const Shape r1 = rect(0, 0, w1, lh);
  for (int px : {-1, w1})
    for (int y = 0; y < lh; y += 2) {
      const Shape p1 = with(r1, {{px, y}});
      t.protocritical.push_back(p1);
      for (int dy : {-1, 1}) {
        const int yo = y + dy;
        if (yo < 0 || yo >= lh) continue;
        CriticalTemplate ct{with(p1, {{px, yo}}), "C1", {}};
        ct.successors.push_back(with(ct.shape, {{px, yo + dy}}));
        t.critical.push_back(std::move(ct));
      }
    }
  // P2: lb x (lh-2) rectangle with a two-site bar above or below
  const int w2 = lb, h2 = lh - 2;
  const Shape r2 = rect(0, 0, w2, h2);
  for (int side = 0; side < 2; ++side) {
    const int yo = side == 0 ? h2 : -1;       // odd row next to the rectangle
    const int ye = side == 0 ? h2 + 1 : -2;   // even row beyond it
    for (int x = 0; x + 1 < w2; ++x) t.protocritical.push_back(with(r2, {{x, yo}, {x + 1, yo}}));
    for (int x = 0; x < w2; ++x) {
      const Shape p2 = with(r2, {{x, yo}, {x, ye}});
      t.protocritical.push_back(p2);
      for (int dx : {-1, 1}) {
        const int xo = x + dx;
        if (xo < 0 || xo >= w2) continue;
        CriticalTemplate ct{with(p2, {{xo, yo}}), "C2", {}};
        ct.successors.push_back(with(ct.shape, {{xo, ye}}));
        t.critical.push_back(std::move(ct));
      }
    }
  }
  return t;
}

Templates templates_for(const ModelParams& params, const CriticalGeometry& g) {
  return std::visit(overloaded{[&](const Anisotropic&) { return anisotropic_templates(g.l_v); },
                               [&](const NextNearest&) { return next_nearest_templates(g.ell, g.d_star); },
                               [&](const Alternating&) {
                                 if (g.l_b < 2) throw DropletFitError("critical length l_b < 2: no critical droplet");
                                 return alternating_templates(g.l_b);
                               }},
                    params);
}

void check_fit(const Templates& tp, const Torus& torus) {
  for (const auto& ct : tp.critical)
    for (const auto& s : ct.successors) {
      const Extent e = extent(s);
      if (e.w > torus.side() - 2 || e.h > torus.side() - 2)
        throw DropletFitError("critical droplet (" + std::to_string(e.w) + "x" + std::to_string(e.h) +
                              ") does not fit on a torus of side " + std::to_string(torus.side()));
    }
}

std::vector<std::pair<int, int>> anchors(const Torus& t, bool even_only) {
  std::vector<std::pair<int, int>> a;
  for (int y = 0; y < t.side(); ++y) {
    if (even_only && (y & 1)) continue;
    for (int x = 0; x < t.side(); ++x) a.emplace_back(x, y);
  }
  return a;
}

void push_unique(std::vector<SpinConfiguration>& out,
                 std::unordered_set<SpinConfiguration, SpinConfigurationHash>& seen, SpinConfiguration c) {
  if (seen.insert(c).second) out.push_back(std::move(c));
}

}  // namespace

CriticalGeometry critical_geometry(const ModelParams& params, const Torus& torus) {
  check_params(params);
  check_torus(params, torus);
  CriticalGeometry g;
  g.model = model_name(params);
  g.volume = torus.size();
  const auto volume = static_cast<std::int64_t>(torus.size());
  const AssumptionReport report = validate_assumptions(params, torus);
  g.assumptions_hold = report.all_passed();
  for (const auto& c : report.clauses)
    if (!c.passed) g.warnings.push_back("assumption " + c.name + " violated: " + c.detail);

  std::visit(overloaded{[&](const Anisotropic& p) {
                          const int lv = ceil_strict(2 * p.j_v / p.h);
                          g.l_v = lv;
                          g.gamma = 2.0 * lv * (p.j_h + p.j_v) - p.h * (1.0 + static_cast<double>(lv - 1) * lv);
                          g.inv_k = Rational(4 * (2 * lv - 1) * volume, 3);
                        },
                        [&](const NextNearest& p) {
                          const int ell = ceil_strict(2 * p.k_nnn / p.h);
                          const int d = ceil_strict(2 * p.j() / p.h);
                          g.ell = ell;
                          g.d_star = d;
                          g.l_star = d - 2 * (ell - 1);
                          const double f = -p.k_nnn * (2 * ell - 1) + 0.5 * p.h * (ell - 1) * ell;
                          const double e_q = -p.h * (d - 1.0) * d + 2 * p.j() * (2.0 * d - 1) + 4 * f;
                          g.gamma = e_q + 2 * p.j() - 4 * p.k_nnn - p.h;
                          g.inv_k = Rational(4 * (2 * g.l_star - 5) * volume, 3);
                        },
                        [&](const Alternating& p) {
                          g.epsilon = p.epsilon();
                          g.mu = p.mu();
                          if (g.epsilon <= 0) {
                            g.warnings.push_back("epsilon <= 0: critical length undefined");
                            g.gamma = std::numeric_limits<double>::infinity();
                            return;
                          }
                          const int lb = ceil_strict(g.mu / g.epsilon);
                          g.l_b = lb;
                          g.l_h = 2 * lb - 1;
                          g.gamma = 4 * p.j * lb + g.mu * (lb - 1) - g.epsilon * (static_cast<double>(lb) * (lb - 1) + 1);
                          g.inv_k = Rational(14 * (lb - 1) * volume, 3);
                        }},
             params);
  return g;
}

bool critical_inequalities_hold(const ModelParams& params, const CriticalGeometry& g) {
  return std::visit(
      overloaded{[&](const Anisotropic& p) { return (g.l_v - 1) * p.h < 2 * p.j_v && 2 * p.j_v < g.l_v * p.h; },
                 [&](const NextNearest& p) {
                   return (g.ell - 1) * p.h < 2 * p.k_nnn && 2 * p.k_nnn < g.ell * p.h &&
                          (g.d_star - 1) * p.h < 2 * p.j() && 2 * p.j() < g.d_star * p.h;
                 },
                 [&](const Alternating&) {
                   return g.epsilon > 0 && (g.l_b - 1) * g.epsilon < g.mu && g.mu < g.l_b * g.epsilon;
                 }},
      params);
}

double critical_energy(const ModelParams& params, const Torus& torus) {
  return energy(params, SpinConfiguration::all_minus(torus)) + critical_geometry(params, torus).gamma;
}

std::vector<SpinConfiguration> enumerate_protocritical(const ModelParams& params, const Torus& torus) {
  return enumerate_critical(params, torus).protocritical;
}

GateEnumeration enumerate_critical(const ModelParams& params, const Torus& torus) {
  const CriticalGeometry g = critical_geometry(params, torus);
  const Templates tp = templates_for(params, g);
  check_fit(tp, torus);
  const auto where = anchors(torus, tp.even_anchor);

  GateEnumeration out;
  std::unordered_set<SpinConfiguration, SpinConfigurationHash> seen_p, seen_c, seen_s;
  for (const auto& shape : tp.protocritical)
    for (auto [ax, ay] : where) push_unique(out.protocritical, seen_p, place(torus, shape, ax, ay));

  for (std::size_t k = 0; k < tp.critical.size(); ++k) {
    const auto& ct = tp.critical[k];
    const int orbit = static_cast<int>(out.orbit_labels.size());
    std::size_t added = 0;
    for (auto [ax, ay] : where) {
      SpinConfiguration c = place(torus, ct.shape, ax, ay);
      if (!seen_c.insert(c).second) continue;
      out.critical.push_back({std::move(c), orbit, ct.seat});
      ++added;
      for (const auto& s : ct.successors) push_unique(out.successors, seen_s, place(torus, s, ax, ay));
    }
    out.orbit_labels.push_back(ct.seat + "#" + std::to_string(k));
    out.orbit_sizes.push_back(added);
  }
  return out;
}

PrefactorSum combinatorial_prefactor(const GateEnumeration& gates) {
  const std::unordered_set<SpinConfiguration, SpinConfigurationHash> p_set(gates.protocritical.begin(),
                                                                           gates.protocritical.end());
  const std::unordered_set<SpinConfiguration, SpinConfigurationHash> s_set(gates.successors.begin(),
                                                                           gates.successors.end());
  PrefactorSum r;
  for (const auto& cs : gates.critical) {
    int p = 0, s = 0;
    SpinConfiguration probe = cs.config;
    for (Site x = 0; x < probe.size(); ++x) {
      probe.flip(x);
      if (p_set.count(probe)) ++p;
      if (s_set.count(probe)) ++s;
      probe.flip(x);
    }
    r.protocritical_neighbors.push_back(p);
    r.successor_neighbors.push_back(s);
    if (p + s > 0) r.inv_k += Rational(p * s, p + s);
  }
  return r;
}

PrefactorSum combinatorial_prefactor(const ModelParams& params, const Torus& torus) {
  return combinatorial_prefactor(enumerate_critical(params, torus));
}

double ReferencePath::max_energy() const { return energies.at(argmax()); }

std::size_t ReferencePath::argmax() const {
  if (energies.empty()) throw std::logic_error("empty path");
  return static_cast<std::size_t>(std::max_element(energies.begin(), energies.end()) - energies.begin());
}

namespace {

class PathBuilder {
 public:
  PathBuilder(const ModelParams& params, const Torus& torus) : params_(params), torus_(torus), current_(torus) {
    path_.configs.push_back(current_);
    path_.energies.push_back(0.0);
  }

  void add(int x, int y) { add_site(torus_.site(x, y)); }

  void add_site(Site s) {
    if (current_.plus(s)) return;
    const double e = path_.energies.back() + delta_energy(params_, current_, s);
    current_.flip(s);
    path_.flips.push_back(s);
    path_.configs.push_back(current_);
    path_.energies.push_back(e);
  }

  // Adds every missing target site, cheapest first among those touching the
  // droplet, lowest index on ties.
  void fill_greedy(const std::vector<Site>& target) {
    std::set<Site> missing;
    for (Site s : target)
      if (!current_.plus(s)) missing.insert(s);
    while (!missing.empty()) {
      Site best = *missing.begin();
      double best_d = std::numeric_limits<double>::infinity();
      bool best_adj = false;
      for (Site s : missing) {
        bool adj = false;
        for (Site n : torus_.nearest(s)) adj = adj || current_.plus(n);
        const double d = delta_energy(params_, current_, s);
        if ((adj && !best_adj) || (adj == best_adj && d < best_d - 1e-12)) {
          best = s;
          best_d = d;
          best_adj = adj;
        }
      }
      add_site(best);
      missing.erase(best);
    }
  }

  const SpinConfiguration& current() const { return current_; }
  ReferencePath take() { return std::move(path_); }

 private:
  ModelParams params_;
  Torus torus_;
  SpinConfiguration current_;
  ReferencePath path_;
};

std::vector<Site> all_sites(const Torus& t) {
  std::vector<Site> v(t.size());
  for (Site s = 0; s < t.size(); ++s) v[s] = s;
  return v;
}

void anisotropic_path(PathBuilder& b, const Torus& t, int lv) {
  const int side = t.side();
  b.add(0, 0);
  int w = 1, h = 1;
  while (!(w == lv - 1 && h == lv) && h < side && w < side) {
    if (w == h) {
      for (int x = 0; x < w; ++x) b.add(x, h);
      ++h;
    } else {
      for (int y = 0; y < h; ++y) b.add(w, y);
      ++w;
    }
  }
  for (; w < side; ++w)
    for (int y = 0; y < h; ++y) b.add(w, y);
  for (; h < side; ++h)
    for (int x = 0; x < side; ++x) b.add(x, h);
}

void alternating_path(PathBuilder& b, const Torus& t, int lb) {
  const int side = t.side();
  b.add(0, 0);
  int w = 1, h = 1;
  for (int l = 1; l <= lb - 1 && w < side && h + 2 <= side; ++l) {
    for (int y = 0; y < h; ++y) b.add(w, y);
    ++w;
    for (int x = 0; x < w; ++x) {
      b.add(x, h);
      b.add(x, h + 1);
    }
    h += 2;
  }
  for (; w < side; ++w)
    for (int y = 0; y < h; ++y) b.add(w, y);
  for (; h + 2 <= side; h += 2)
    for (int x = 0; x < side; ++x) {
      b.add(x, h);
      b.add(x, h + 1);
    }
  for (; h < side; ++h)
    for (int x = 0; x < side; ++x) b.add(x, h);
}

std::vector<Site> oct_sites(const Torus& t, int x0, int y0, int dn, int dw, int ne, int nw, int sw, int se) {
  OctagonParams p;
  p.d_n = dn;
  p.d_w = dw;
  p.l_ne = ne;
  p.l_nw = nw;
  p.l_sw = sw;
  p.l_se = se;
  return octagon_sites(t, x0, y0, p);
}

void next_nearest_path(PathBuilder& b, const Torus& t, int ell) {
  const int side = t.side();
  const int c = side / 2;
  int x0 = c, y0 = c, d = 1;
  b.add(x0, y0);
  // grow the cut length together with the extent
  for (int l = 1; l < ell && d + 3 < side; ++l) {
    --x0;
    --y0;
    b.fill_greedy(oct_sites(t, x0, y0, d + 2, d + 2, l + 1, l + 1, l + 1, l + 1));
    b.fill_greedy(oct_sites(t, x0, y0, d + 3, d + 2, l + 1, l + 1, l + 1, l + 1));
    b.fill_greedy(oct_sites(t, x0, y0, d + 3, d + 3, l + 1, l + 1, l + 1, l + 1));
    d += 3;
  }
  const int l = ell;
  while (d + 1 <= side - 1) {
    // east column, then the two eastern oblique bars
    b.fill_greedy(oct_sites(t, x0, y0, d + 1, d, l + 1, l, l, l + 1));
    b.fill_greedy(oct_sites(t, x0, y0, d + 1, d, l + 1, l, l, l));
    b.fill_greedy(oct_sites(t, x0, y0, d + 1, d, l, l, l, l));
    // south row, then the two southern oblique bars
    --y0;
    b.fill_greedy(oct_sites(t, x0, y0, d + 1, d + 1, l, l, l + 1, l + 1));
    b.fill_greedy(oct_sites(t, x0, y0, d + 1, d + 1, l, l, l, l + 1));
    b.fill_greedy(oct_sites(t, x0, y0, d + 1, d + 1, l, l, l, l));
    ++d;
  }
  b.fill_greedy(all_sites(t));
}

}  // namespace

ReferencePath reference_path(const ModelParams& params, const Torus& torus) {
  const CriticalGeometry g = critical_geometry(params, torus);
  PathBuilder b(params, torus);
  std::visit(overloaded{[&](const Anisotropic&) { anisotropic_path(b, torus, g.l_v); },
                        [&](const NextNearest&) { next_nearest_path(b, torus, g.ell); },
                        [&](const Alternating&) {
                          if (g.l_b < 2) throw DropletFitError("critical length l_b < 2: no reference path");
                          alternating_path(b, torus, g.l_b);
                        }},
             params);
  b.fill_greedy(all_sites(torus));
  return b.take();
}

}  // namespace metaising

#include "metaising/landscape.hpp"

#include <Eigen/Dense>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <unordered_map>
#include <unordered_set>

namespace metaising {

namespace {

constexpr std::size_t kNone = static_cast<std::size_t>(-1);
constexpr std::size_t kDenseLimit = 5000;

class Dsu {
 public:
  explicit Dsu(std::size_t n) : parent_(n), rank_(n, 0) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  std::size_t unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return a;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
    return a;
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<int> rank_;
};

std::vector<StateId> energy_order(const std::vector<double>& e) {
  std::vector<StateId> order(e.size());
  std::iota(order.begin(), order.end(), StateId{0});
  std::stable_sort(order.begin(), order.end(), [&](StateId a, StateId b) { return e[a] < e[b]; });
  return order;
}

bool connected_below(const StateSpace& space, const std::vector<double>& e, StateId a, StateId b, double t) {
  if (e[a] > t || e[b] > t) return false;
  std::vector<char> seen(space.size(), 0);
  std::vector<StateId> stack{a};
  seen[a] = 1;
  const int n = space.sites();
  while (!stack.empty()) {
    const StateId u = stack.back();
    stack.pop_back();
    if (u == b) return true;
    for (int k = 0; k < n; ++k) {
      const StateId v = u ^ (StateId{1} << k);
      if (!seen[v] && e[v] <= t) {
        seen[v] = 1;
        stack.push_back(v);
      }
    }
  }
  return false;
}

}  // namespace

StateSpace::StateSpace(Torus torus, bool allow_large) : torus_(torus) {
  const int cap = allow_large ? 5 : 4;
  if (torus.side() > cap)
    throw EnumerationCapError("state-space enumeration limited to L <= " + std::to_string(cap));
}

std::vector<double> state_energies(const ModelParams& params, const StateSpace& space, double snap) {
  const std::size_t n = space.size();
  std::vector<double> e(n);
  const double e0 = energy(params, space.config(0));
  for (StateId id = 0; id < n; ++id) e[id] = energy(params, space.config(id)) - e0;
  const auto order = energy_order(e);
  double rep = e[order[0]];
  for (StateId id : order) {
    if (e[id] - rep > snap) rep = e[id];
    e[id] = rep;
  }
  return e;
}

double communication_height_bisection(const StateSpace& space, const std::vector<double>& e, StateId a, StateId b) {
  std::vector<double> levels;
  const double floor = std::max(e[a], e[b]);
  for (double v : e)
    if (v >= floor) levels.push_back(v);
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  std::size_t lo = 0, hi = levels.size() - 1;
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (connected_below(space, e, a, b, levels[mid])) hi = mid;
    else lo = mid + 1;
  }
  return levels[lo];
}

std::vector<double> communication_heights_from(const StateSpace& space, const std::vector<double>& e, StateId a) {
  std::vector<double> dist(space.size(), std::numeric_limits<double>::infinity());
  std::vector<char> done(space.size(), 0);
  using Item = std::pair<double, StateId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  dist[a] = e[a];
  pq.emplace(dist[a], a);
  const int n = space.sites();
  while (!pq.empty()) {
    const auto [d, u] = pq.top();
    pq.pop();
    if (done[u]) continue;
    done[u] = 1;
    for (int k = 0; k < n; ++k) {
      const StateId v = u ^ (StateId{1} << k);
      const double nd = std::max(d, e[v]);
      if (nd < dist[v]) {
        dist[v] = nd;
        pq.emplace(nd, v);
      }
    }
  }
  return dist;
}

std::vector<double> communication_heights_sweep(const StateSpace& space, const std::vector<double>& e, StateId a) {
  const std::size_t n = space.size();
  const int bits = space.sites();
  std::vector<double> phi(n, std::numeric_limits<double>::infinity());
  std::vector<char> added(n, 0);
  std::vector<std::vector<StateId>> members(n);
  Dsu dsu(n);
  for (StateId v : energy_order(e)) {
    const double t = e[v];
    added[v] = 1;
    members[v] = {v};
    std::vector<std::size_t> roots;
    for (int k = 0; k < bits; ++k) {
      const StateId w = v ^ (StateId{1} << k);
      if (added[w]) roots.push_back(dsu.find(w));
    }
    std::sort(roots.begin(), roots.end());
    roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
    const std::size_t a_root = added[a] && v != a ? dsu.find(a) : kNone;
    const bool touches_a = v == a || std::find(roots.begin(), roots.end(), a_root) != roots.end();
    if (touches_a) {
      phi[v] = t;
      for (std::size_t r : roots)
        if (r != a_root)
          for (StateId x : members[r]) phi[x] = t;
    }
    std::size_t root = v;
    for (std::size_t r : roots) {
      const std::size_t merged = dsu.unite(root, r);
      const std::size_t other = merged == root ? r : root;
      auto& big = members[merged];
      auto& small = members[other];
      if (big.size() < small.size()) big.swap(small);
      big.insert(big.end(), small.begin(), small.end());
      small.clear();
      small.shrink_to_fit();
      root = merged;
    }
  }
  return phi;
}

double communication_height(const StateSpace& space, const std::vector<double>& e, StateId a, StateId b) {
  const double x = communication_height_bisection(space, e, a, b);
  const double y = communication_heights_from(space, e, a)[b];
  if (x != y) throw std::logic_error("communication height algorithms disagree");
  return x;
}

std::vector<double> stability_levels(const StateSpace& space, const std::vector<double>& e) {
  const std::size_t n = space.size();
  const int bits = space.sites();
  std::vector<double> v(n, kInfiniteStability);
  std::vector<char> added(n, 0);
  std::vector<double> comp_min(n);
  std::vector<std::vector<StateId>> pending(n);  // unresolved states, all at the component minimum
  Dsu dsu(n);
  for (StateId x : energy_order(e)) {
    const double t = e[x];
    added[x] = 1;
    comp_min[x] = t;
    pending[x] = {x};
    for (int k = 0; k < bits; ++k) {
      const StateId w = x ^ (StateId{1} << k);
      if (!added[w]) continue;
      std::size_t ra = dsu.find(x), rb = dsu.find(w);
      if (ra == rb) continue;
      if (comp_min[ra] > comp_min[rb]) std::swap(ra, rb);
      // ra holds the lower minimum; rb's pending states now see a lower state at level t
      if (comp_min[ra] < comp_min[rb]) {
        for (StateId p : pending[rb]) v[p] = t - e[p];
        pending[rb].clear();
      }
      const double lo = comp_min[ra];
      auto pa = std::move(pending[ra]);
      auto pb = std::move(pending[rb]);
      if (pa.size() < pb.size()) pa.swap(pb);
      pa.insert(pa.end(), pb.begin(), pb.end());
      const std::size_t r = dsu.unite(ra, rb);
      comp_min[r] = lo;
      pending[r] = std::move(pa);
    }
  }
  return v;
}

std::vector<StateId> stable_states(const std::vector<double>& e) {
  const double lo = *std::min_element(e.begin(), e.end());
  std::vector<StateId> out;
  for (StateId id = 0; id < e.size(); ++id)
    if (e[id] == lo) out.push_back(id);
  return out;
}

std::vector<StateId> metastable_states(const std::vector<double>& e, const std::vector<double>& stability) {
  const double lo = *std::min_element(e.begin(), e.end());
  double best = -1;
  for (StateId id = 0; id < e.size(); ++id)
    if (e[id] != lo) best = std::max(best, stability[id]);
  std::vector<StateId> out;
  for (StateId id = 0; id < e.size(); ++id)
    if (e[id] != lo && stability[id] == best) out.push_back(id);
  return out;
}

Gate identify_gate(const StateSpace& space, const std::vector<double>& e, StateId m, StateId s) {
  const std::size_t n = space.size();
  const int bits = space.sites();
  const auto phi_m = communication_heights_from(space, e, m);
  const auto phi_s = communication_heights_from(space, e, s);
  Gate g;
  g.phi = phi_m[s];

  std::vector<char> in_p(n, 0), in_c(n, 0), allowed(n, 0);
  for (StateId id = 0; id < n; ++id) {
    in_p[id] = phi_m[id] < phi_s[id];
    allowed[id] = phi_m[id] >= phi_s[id] && e[id] <= g.phi;
  }
  // states that reach s inside the allowed set
  std::vector<StateId> stack{s};
  in_c[s] = 1;
  while (!stack.empty()) {
    const StateId u = stack.back();
    stack.pop_back();
    for (int k = 0; k < bits; ++k) {
      const StateId w = u ^ (StateId{1} << k);
      if (allowed[w] && !in_c[w]) {
        in_c[w] = 1;
        stack.push_back(w);
      }
    }
  }
  auto has_neighbor_in = [&](StateId u, const std::vector<char>& set) {
    for (int k = 0; k < bits; ++k)
      if (set[u ^ (StateId{1} << k)]) return true;
    return false;
  };
  for (bool changed = true; changed;) {
    changed = false;
    std::vector<char> np(n, 0), nc(n, 0);
    for (StateId id = 0; id < n; ++id) {
      np[id] = in_p[id] && has_neighbor_in(id, in_c);
      nc[id] = in_c[id] && has_neighbor_in(id, in_p);
    }
    changed = np != in_p || nc != in_c;
    in_p.swap(np);
    in_c.swap(nc);
  }
  for (StateId id = 0; id < n; ++id) {
    if (in_p[id]) g.protocritical.push_back(id);
    if (in_c[id]) g.critical.push_back(id);
  }
  g.h2 = true;
  int first = -1;
  for (StateId c : g.critical) {
    int cnt = 0;
    for (int k = 0; k < bits; ++k) cnt += in_p[c ^ (StateId{1} << k)];
    if (first < 0) first = cnt;
    else if (cnt != first) g.h2 = false;
  }
  return g;
}

GateClauseCheck check_gate_clauses(const StateSpace& space, const std::vector<double>& e, StateId m, StateId s,
                                   const std::vector<StateId>& protocritical, const std::vector<StateId>& critical) {
  const int bits = space.sites();
  const auto phi_m = communication_heights_sweep(space, e, m);
  const auto phi_s = communication_heights_sweep(space, e, s);
  const double top = phi_m[s];
  const std::unordered_set<StateId> p(protocritical.begin(), protocritical.end());
  const std::unordered_set<StateId> c(critical.begin(), critical.end());
  GateClauseCheck r;

  auto touches = [&](StateId u, const std::unordered_set<StateId>& set) {
    for (int k = 0; k < bits; ++k)
      if (set.count(u ^ (StateId{1} << k))) return true;
    return false;
  };
  r.adjacency = !p.empty() && !c.empty();
  for (StateId x : protocritical) r.adjacency = r.adjacency && touches(x, c);
  for (StateId x : critical) r.adjacency = r.adjacency && touches(x, p);

  r.protocritical_side = true;
  for (StateId x : protocritical) r.protocritical_side = r.protocritical_side && phi_m[x] < phi_s[x];

  auto ok = [&](StateId x) { return phi_m[x] >= phi_s[x] && e[x] - e[m] <= top - e[m]; };
  Dsu dsu(space.size());
  for (StateId u = 0; u < space.size(); ++u) {
    if (!ok(u)) continue;
    for (int k = 0; k < bits; ++k) {
      const StateId w = u ^ (StateId{1} << k);
      if (w > u && ok(w)) dsu.unite(u, w);
    }
  }
  r.critical_paths = true;
  for (StateId x : critical) r.critical_paths = r.critical_paths && ok(x) && dsu.find(x) == dsu.find(s);
  return r;
}

double quadratic_form(const std::vector<WeightedEdge>& edges, const std::vector<double>& h) {
  double sum = 0;
  for (const auto& ed : edges) {
    const double d = h[ed.a] - h[ed.b];
    sum += ed.w * d * d;
  }
  return sum;
}

CapacityResult weighted_capacity(std::size_t n_nodes, const std::vector<WeightedEdge>& edges,
                                 const std::vector<std::optional<double>>& boundary) {
  if (boundary.size() != n_nodes) throw std::invalid_argument("boundary vector size mismatch");
  std::vector<std::vector<std::size_t>> adj(n_nodes);
  for (const auto& ed : edges) {
    if (ed.a >= n_nodes || ed.b >= n_nodes) throw std::invalid_argument("edge endpoint out of range");
    adj[ed.a].push_back(ed.b);
    adj[ed.b].push_back(ed.a);
  }
  // free nodes reachable from the boundary
  std::vector<char> reached(n_nodes, 0);
  std::vector<std::size_t> stack;
  for (std::size_t i = 0; i < n_nodes; ++i)
    if (boundary[i]) {
      reached[i] = 1;
      stack.push_back(i);
    }
  while (!stack.empty()) {
    const std::size_t u = stack.back();
    stack.pop_back();
    for (std::size_t v : adj[u])
      if (!reached[v]) {
        reached[v] = 1;
        stack.push_back(v);
      }
  }
  CapacityResult r;
  r.h.assign(n_nodes, 0.0);
  std::vector<std::size_t> index(n_nodes, kNone);
  std::size_t m = 0;
  for (std::size_t i = 0; i < n_nodes; ++i) {
    if (boundary[i]) r.h[i] = *boundary[i];
    else if (reached[i]) index[i] = m++;
    else r.disconnected = true;
  }
  if (m > 0) {
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
    std::vector<Eigen::Triplet<double>> trip;
    for (const auto& ed : edges) {
      const std::size_t ia = index[ed.a], ib = index[ed.b];
      if (ia != kNone) trip.emplace_back(ia, ia, ed.w);
      if (ib != kNone) trip.emplace_back(ib, ib, ed.w);
      if (ia != kNone && ib != kNone) {
        trip.emplace_back(ia, ib, -ed.w);
        trip.emplace_back(ib, ia, -ed.w);
      } else if (ia != kNone && boundary[ed.b]) {
        rhs[static_cast<Eigen::Index>(ia)] += ed.w * *boundary[ed.b];
      } else if (ib != kNone && boundary[ed.a]) {
        rhs[static_cast<Eigen::Index>(ib)] += ed.w * *boundary[ed.a];
      }
    }
    Eigen::SparseMatrix<double> a(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    a.setFromTriplets(trip.begin(), trip.end());
    Eigen::VectorXd x;
    if (m < kDenseLimit) {
      const Eigen::MatrixXd dense(a);
      x = dense.ldlt().solve(rhs);
    } else {
      Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper> cg;
      cg.setTolerance(1e-12);
      cg.setMaxIterations(static_cast<Eigen::Index>(10 * m));
      cg.compute(a);
      x = cg.solve(rhs);
      if (cg.info() != Eigen::Success) throw std::runtime_error("capacity solve did not converge");
    }
    for (std::size_t i = 0; i < n_nodes; ++i)
      if (index[i] != kNone) r.h[i] = x[static_cast<Eigen::Index>(index[i])];
  }
  r.value = quadratic_form(edges, r.h);
  return r;
}

DirichletProblem dirichlet_problem(const StateSpace& space, const std::vector<double>& e, StateId m, StateId s) {
  const std::size_t n = space.size();
  const int bits = space.sites();
  const auto phi_m = communication_heights_from(space, e, m);
  const auto phi_s = communication_heights_from(space, e, s);
  const double top = phi_m[s];

  DirichletProblem p;
  p.node_of_state.assign(n, kNone);
  p.boundary = {1.0, 0.0};
  p.n_nodes = 2;
  for (StateId id = 0; id < n; ++id) {
    if (e[id] > top) continue;
    if (phi_m[id] < phi_s[id] && phi_s[id] == top) p.node_of_state[id] = 0;
    else if (phi_s[id] < phi_m[id] && phi_m[id] == top) p.node_of_state[id] = 1;
  }
  for (StateId id = 0; id < n; ++id) {
    if (e[id] > top || p.node_of_state[id] != kNone) continue;
    const std::size_t node = p.n_nodes++;
    p.boundary.emplace_back(std::nullopt);
    p.node_of_state[id] = node;
    if (e[id] == top) continue;
    ++p.wells;
    std::vector<StateId> stack{id};
    while (!stack.empty()) {
      const StateId u = stack.back();
      stack.pop_back();
      for (int k = 0; k < bits; ++k) {
        const StateId w = u ^ (StateId{1} << k);
        if (e[w] < top && p.node_of_state[w] == kNone) {
          p.node_of_state[w] = node;
          stack.push_back(w);
        }
      }
    }
  }
  std::unordered_map<std::uint64_t, double> weight;
  for (StateId u = 0; u < n; ++u) {
    const std::size_t a = p.node_of_state[u];
    if (a == kNone) continue;
    for (int k = 0; k < bits; ++k) {
      const StateId w = u ^ (StateId{1} << k);
      if (w < u) continue;
      const std::size_t b = p.node_of_state[w];
      if (b == kNone || b == a) continue;
      const std::size_t lo = std::min(a, b), hi = std::max(a, b);
      weight[static_cast<std::uint64_t>(lo) * p.n_nodes + hi] += 1.0;
    }
  }
  p.edges.reserve(weight.size());
  for (const auto& [key, w] : weight) p.edges.push_back({key / p.n_nodes, key % p.n_nodes, w});
  std::sort(p.edges.begin(), p.edges.end(),
            [](const WeightedEdge& x, const WeightedEdge& y) { return std::tie(x.a, x.b) < std::tie(y.a, y.b); });
  return p;
}

DirichletResult dirichlet_prefactor(const StateSpace& space, const std::vector<double>& e, StateId m, StateId s) {
  DirichletResult r;
  r.problem = dirichlet_problem(space, e, m, s);
  r.capacity = weighted_capacity(r.problem.n_nodes, r.problem.edges, r.problem.boundary);
  r.inv_k = r.capacity.value;
  return r;
}

double exact_mean_hitting_time(const ModelParams& params, const StateSpace& space, double beta, StateId m, StateId s) {
  if (beta < 0) throw std::invalid_argument("beta must be non-negative");
  if (m == s) return 0.0;
  const auto e = state_energies(params, space, 0.0);
  const std::size_t n = space.size();
  const int bits = space.sites();
  auto idx = [&](StateId id) { return static_cast<Eigen::Index>(id < s ? id : id - 1); };
  const auto unknowns = static_cast<Eigen::Index>(n - 1);
  if (n - 1 < kDenseLimit) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(unknowns, unknowns);
    for (StateId u = 0; u < n; ++u) {
      if (u == s) continue;
      for (int k = 0; k < bits; ++k) {
        const StateId w = u ^ (StateId{1} << k);
        const double c = std::exp(-beta * std::max(0.0, e[w] - e[u]));
        a(idx(u), idx(u)) += c;
        if (w != s) a(idx(u), idx(w)) -= c;
      }
    }
    const Eigen::VectorXd x = a.partialPivLu().solve(Eigen::VectorXd::Ones(unknowns));
    return x[idx(m)];
  }
  // symmetric form: conductance pi(u) c(u, w), source pi(u), energies relative to m
  std::vector<Eigen::Triplet<double>> trip;
  Eigen::VectorXd rhs(unknowns);
  for (StateId u = 0; u < n; ++u) {
    if (u == s) continue;
    rhs[idx(u)] = std::exp(-beta * (e[u] - e[m]));
    double diag = 0;
    for (int k = 0; k < bits; ++k) {
      const StateId w = u ^ (StateId{1} << k);
      const double c = std::exp(-beta * (std::max(e[u], e[w]) - e[m]));
      diag += c;
      if (w != s) trip.emplace_back(idx(u), idx(w), -c);
    }
    trip.emplace_back(idx(u), idx(u), diag);
  }
  Eigen::SparseMatrix<double> a(unknowns, unknowns);
  a.setFromTriplets(trip.begin(), trip.end());
  Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper> cg;
  cg.setTolerance(1e-12);
  cg.setMaxIterations(100 * unknowns);
  cg.compute(a);
  const Eigen::VectorXd x = cg.solve(rhs);
  if (cg.info() != Eigen::Success) throw std::runtime_error("hitting-time solve did not converge");
  return x[idx(m)];
}

namespace {

Eigen::SparseMatrix<double> symmetrized_generator(const ModelParams& params, const StateSpace& space, double beta) {
  const auto e = state_energies(params, space, 0.0);
  const std::size_t n = space.size();
  const int bits = space.sites();
  std::vector<Eigen::Triplet<double>> trip;
  for (StateId u = 0; u < n; ++u) {
    double diag = 0;
    for (int k = 0; k < bits; ++k) {
      const StateId w = u ^ (StateId{1} << k);
      diag += std::exp(-beta * std::max(0.0, e[w] - e[u]));
      trip.emplace_back(u, w, -std::exp(-0.5 * beta * std::abs(e[w] - e[u])));
    }
    trip.emplace_back(u, u, diag);
  }
  Eigen::SparseMatrix<double> a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  a.setFromTriplets(trip.begin(), trip.end());
  return a;
}

}  // namespace

std::vector<double> generator_spectrum(const ModelParams& params, const StateSpace& space, double beta) {
  if (space.size() > kDenseLimit) throw EnumerationCapError("dense spectrum limited to L <= 3");
  const Eigen::MatrixXd a(symmetrized_generator(params, space, beta));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd ev = solver.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

double spectral_gap(const ModelParams& params, const StateSpace& space, double beta) {
  if (beta < 0) throw std::invalid_argument("beta must be non-negative");
  if (space.size() <= kDenseLimit) return generator_spectrum(params, space, beta)[1];

  // inverse iteration orthogonal to the ground state sqrt(pi)
  const auto a = symmetrized_generator(params, space, beta);
  const auto e = state_energies(params, space, 0.0);
  const double lo = *std::min_element(e.begin(), e.end());
  const auto n = static_cast<Eigen::Index>(space.size());
  Eigen::VectorXd ground(n);
  for (Eigen::Index i = 0; i < n; ++i) ground[i] = std::exp(-0.5 * beta * (e[static_cast<std::size_t>(i)] - lo));
  ground.normalize();
  Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper> cg;
  cg.setTolerance(1e-12);
  cg.compute(a);
  Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(n, -1.0, 1.0);
  double lambda = 0;
  for (int it = 0; it < 200; ++it) {
    x -= ground.dot(x) * ground;
    x.normalize();
    const double next = x.dot(a * x);
    if (it > 0 && std::abs(next - lambda) <= 1e-12 * std::abs(next)) return next;
    lambda = next;
    const Eigen::VectorXd y = cg.solve(x);
    x = y;
  }
  return lambda;
}

LandscapeReport analyze_landscape(const ModelParams& params, const StateSpace& space, const std::vector<double>& betas) {
  LandscapeReport r;
  r.side = space.torus().side();
  const auto e = state_energies(params, space);
  const auto v = stability_levels(space, e);
  r.stable = stable_states(e);
  r.metastable = metastable_states(e, v);
  r.h1 = r.stable.size() == 1 && r.metastable.size() == 1;
  r.m = r.metastable.size() == 1 ? r.metastable[0] : space.all_minus();
  r.s = r.stable.size() == 1 ? r.stable[0] : space.all_plus();
  r.m_is_all_minus = r.m == space.all_minus();
  r.gate = identify_gate(space, e, r.m, r.s);
  r.gamma = r.gate.phi - e[r.m];
  r.inv_k = dirichlet_prefactor(space, e, r.m, r.s).inv_k;
  r.betas = betas;
  for (double b : betas) {
    r.mean_hitting_times.push_back(exact_mean_hitting_time(params, space, b, r.m, r.s));
    r.spectral_gaps.push_back(spectral_gap(params, space, b));
  }
  return r;
}

}  // namespace metaising

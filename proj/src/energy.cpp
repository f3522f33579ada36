#include "metaising/energy.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace metaising {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Compensated summation keeps the bond sum reproducible to the last few ulps.
class KahanSum {
 public:
  void add(double v) {
    const double y = v - carry_;
    const double t = sum_ + y;
    carry_ = (t - sum_) - y;
    sum_ = t;
  }
  double value() const { return sum_; }

 private:
  double sum_ = 0;
  double carry_ = 0;
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

}  // namespace

std::string model_name(const ModelParams& params) {
  return std::visit(overloaded{[](const Anisotropic&) { return std::string("anisotropic"); },
                               [](const NextNearest&) { return std::string("next_nearest"); },
                               [](const Alternating&) { return std::string("alternating"); }},
                    params);
}

void check_params(const ModelParams& params) {
  auto positive = [](double v, const char* name) {
    if (!(v > 0) || !std::isfinite(v)) throw std::invalid_argument(std::string(name) + " must be positive");
  };
  std::visit(overloaded{[&](const Anisotropic& p) {
                          positive(p.j_h, "J_H");
                          positive(p.j_v, "J_V");
                          positive(p.h, "h");
                        },
                        [&](const NextNearest& p) {
                          positive(p.j_tilde, "J_tilde");
                          positive(p.k_nnn, "K_nnn");
                          positive(p.h, "h");
                        },
                        [&](const Alternating& p) {
                          positive(p.j, "J");
                          positive(p.h_odd, "h_odd");
                          positive(p.h_even, "h_even");
                        }},
             params);
}

void check_torus(const ModelParams& params, const Torus& torus) {
  if (std::holds_alternative<Alternating>(params) && torus.side() % 2 != 0)
    throw std::invalid_argument("alternating-field model requires an even torus side");
}

double energy(const ModelParams& params, const SpinConfiguration& config) {
  const Torus& t = config.torus();
  check_torus(params, t);
  KahanSum sum;
  std::visit(overloaded{[&](const Anisotropic& p) {
                          for (Site s = 0; s < t.size(); ++s) {
                            const auto nn = t.nearest(s);
                            const int sv = config.spin(s);
                            sum.add(-0.5 * p.j_h * sv * config.spin(nn[0]));
                            sum.add(-0.5 * p.j_v * sv * config.spin(nn[2]));
                            sum.add(-0.5 * p.h * sv);
                          }
                        },
                        [&](const NextNearest& p) {
                          for (Site s = 0; s < t.size(); ++s) {
                            const auto nn = t.nearest(s);
                            const auto dg = t.diagonal(s);
                            const int sv = config.spin(s);
                            sum.add(-0.5 * p.j_tilde * sv * config.spin(nn[0]));
                            sum.add(-0.5 * p.j_tilde * sv * config.spin(nn[2]));
                            sum.add(-0.5 * p.k_nnn * sv * config.spin(dg[0]));
                            sum.add(-0.5 * p.k_nnn * sv * config.spin(dg[3]));
                            sum.add(-0.5 * p.h * sv);
                          }
                        },
                        [&](const Alternating& p) {
                          for (Site s = 0; s < t.size(); ++s) {
                            const auto nn = t.nearest(s);
                            const int sv = config.spin(s);
                            sum.add(-0.5 * p.j * sv * config.spin(nn[0]));
                            sum.add(-0.5 * p.j * sv * config.spin(nn[2]));
                            if (t.odd_row(s)) sum.add(0.5 * p.h_odd * sv);
                            else sum.add(-0.5 * p.h_even * sv);
                          }
                        }},
             params);
  return sum.value();
}

double energy_geometric(const ModelParams& params, const SpinConfiguration& config) {
  check_torus(params, config.torus());
  const auto [dv, dh] = boundary_lengths(config);
  return std::visit(
      overloaded{[&](const Anisotropic& p) {
                   return -p.h * static_cast<double>(config.count()) + p.j_h * dv + p.j_v * dh;
                 },
                 [&](const NextNearest& p) {
                   return -p.h * static_cast<double>(config.count()) + p.j() * (dv + dh) -
                          p.k_nnn * corner_count(config);
                 },
                 [&](const Alternating& p) {
                   const Torus& t = config.torus();
                   std::size_t odd = 0, even = 0;
                   for (Site s : config.plus_sites()) (t.odd_row(s) ? odd : even) += 1;
                   return p.h_odd * static_cast<double>(odd) - p.h_even * static_cast<double>(even) +
                          p.j * (dv + dh);
                 }},
      params);
}

double delta_energy(const ModelParams& params, const SpinConfiguration& config, Site x) {
  const Torus& t = config.torus();
  const auto nn = t.nearest(x);
  const int s = config.spin(x);
  return std::visit(overloaded{[&](const Anisotropic& p) {
                                 const int sh = config.spin(nn[0]) + config.spin(nn[1]);
                                 const int sv = config.spin(nn[2]) + config.spin(nn[3]);
                                 return s * (p.j_h * sh + p.j_v * sv + p.h);
                               },
                               [&](const NextNearest& p) {
                                 int sn = 0, sd = 0;
                                 for (Site n : nn) sn += config.spin(n);
                                 for (Site d : t.diagonal(x)) sd += config.spin(d);
                                 return s * (p.j_tilde * sn + p.k_nnn * sd + p.h);
                               },
                               [&](const Alternating& p) {
                                 int sn = 0;
                                 for (Site n : nn) sn += config.spin(n);
                                 const double field = t.odd_row(x) ? -p.h_odd : p.h_even;
                                 return s * (p.j * sn + field);
                               }},
                    params);
}

double metropolis_rate(const ModelParams& params, double beta, const SpinConfiguration& config, Site x) {
  if (beta < 0) throw std::invalid_argument("beta must be non-negative");
  const double d = delta_energy(params, config, x);
  return d > 0 ? std::exp(-beta * d) : 1.0;
}

int ceil_strict(double v) { return static_cast<int>(std::floor(v)) + 1; }

bool near_integer(double v, double tol) { return std::abs(v - std::round(v)) <= tol; }

bool AssumptionReport::all_passed() const {
  for (const auto& c : clauses)
    if (!c.passed) return false;
  return true;
}

const AssumptionClause& AssumptionReport::clause(const std::string& name) const {
  for (const auto& c : clauses)
    if (c.name == name) return c;
  throw std::out_of_range("no assumption clause " + name);
}

AssumptionReport validate_assumptions(const ModelParams& params, const Torus& torus) {
  check_params(params);
  const double volume = static_cast<double>(torus.size());
  constexpr double kInf = std::numeric_limits<double>::infinity();
  AssumptionReport r;
  r.model = model_name(params);
  auto size_clause = [&](double root) {
    AssumptionClause c{"d", false, "", kInf};
    if (std::isfinite(root) && root > 0) {
      c.threshold = root * root;
      c.passed = volume > c.threshold;
    } else if (std::isfinite(root)) {
      c.threshold = 0;
      c.passed = true;
    }
    c.detail = "|Lambda| = " + fmt(volume) + " > " + fmt(c.threshold);
    return c;
  };

  std::visit(overloaded{[&](const Anisotropic& p) {
                          r.clauses.push_back({"a", p.j_h > p.j_v, "J_H > J_V", 0});
                          r.clauses.push_back({"b", 2 * p.j_v > p.h, "2 J_V > h", 0});
                          const double ratio = 2 * p.j_v / p.h;
                          r.clauses.push_back({"c", !near_integer(ratio), "2 J_V / h = " + fmt(ratio) + " not integer", 0});
                          const int lv = ceil_strict(ratio);
                          const double d1 = p.h * lv - 2 * p.j_v;
                          const double d2 = 2 * p.j_v - p.h * (lv - 1);
                          double root = kInf;
                          if (d1 > 0 && d2 > 0)
                            root = std::max(2 * p.j_h / d1, 2 * p.j_h * (lv - 1) / d2 + lv);
                          r.clauses.push_back(size_clause(root));
                        },
                        [&](const NextNearest& p) {
                          r.clauses.push_back({"a", 2 * p.k_nnn > p.h, "2 K > h", 0});
                          r.clauses.push_back({"b", p.j_tilde >= 2 * p.k_nnn + p.h, "J_tilde >= 2 K + h", 0});
                          const double rj = 2 * p.j() / p.h, rk = 2 * p.k_nnn / p.h;
                          r.clauses.push_back({"c", !near_integer(rj) && !near_integer(rk),
                                               "2 J / h = " + fmt(rj) + ", 2 K / h = " + fmt(rk) + " not integer", 0});
                          const int d = ceil_strict(rj);
                          const double den = 2 * p.j() - p.h * (d - 1);
                          const double root = den > 0 ? 2 * p.j() * (d - 1) / den + d : kInf;
                          r.clauses.push_back(size_clause(root));
                        },
                        [&](const Alternating& p) {
                          r.clauses.push_back({"a", p.h_even > p.h_odd, "h_even > h_odd", 0});
                          r.clauses.push_back({"b", p.j > p.h_even, "J > h_even", 0});
                          const double eps = p.epsilon(), mu = p.mu();
                          if (eps <= 0) {
                            r.clauses.push_back({"c", false, "epsilon <= 0", 0});
                            r.clauses.push_back({"d", false, "undefined for epsilon <= 0", kInf});
                            return;
                          }
                          const double ratio = mu / eps;
                          r.clauses.push_back({"c", !near_integer(ratio), "mu / epsilon = " + fmt(ratio) + " not integer", 0});
                          const int lb = ceil_strict(ratio);
                          const int lh = 2 * lb - 1;
                          const double den = 4 * p.j - eps * (lb - 1);
                          double root = kInf;
                          if (den > 0) root = 2.0 * ceil_strict((2 * p.j * (lh - 1) + p.h_odd) / den) + lh;
                          r.clauses.push_back(size_clause(root));
                        }},
             params);
  return r;
}

}  // namespace metaising

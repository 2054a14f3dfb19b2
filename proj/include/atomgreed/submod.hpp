#ifndef ATOMGREED_SUBMOD_HPP
#define ATOMGREED_SUBMOD_HPP

// Set functions over a small ground set [p] (subsets are bitmasks), the
// disjoint and subset submodularity ratios, greedy set maximization and
// exhaustive optima.

#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "atomgreed/objectives.hpp"
#include "atomgreed/random.hpp"
#include "atomgreed/solvers.hpp"

namespace atomgreed {

using Subset = std::uint32_t;

inline int cardinality(Subset s) { return std::popcount(s); }
inline bool contains(Subset s, int i) { return (s >> i) & 1u; }
inline Subset with(Subset s, int i) { return s | (Subset{1} << i); }
inline Subset full_set(int p) { return p >= 32 ? ~Subset{0} : (Subset{1} << p) - 1; }

// Zero-based members of s, e.g. {0, 2} for 0b101.
inline std::vector<int> members(Subset s) {
  std::vector<int> out;
  for (int i = 0; s; ++i, s >>= 1)
    if (s & 1u) out.push_back(i);
  return out;
}

enum class SetFunctionKind { FromObjective, SigmoidComposition, Tabulated };

inline constexpr int kMaxTabulatedP = 16;

// Evaluator over subsets of [p]. Values are memoized in a dense table; the
// cache is shared between copies and guarded by a mutex.
class SetFunction {
 public:
  SetFunction(int p, std::function<double(Subset)> eval, SetFunctionKind kind)
      : p_(p), kind_(kind), state_(std::make_shared<State>()) {
    if (p < 0 || p > kMaxTabulatedP)
      throw InvalidArgument("SetFunction: ground set size must lie in [0, " +
                            std::to_string(kMaxTabulatedP) + "]");
    state_->eval = std::move(eval);
    state_->values.assign(std::size_t{1} << p, std::numeric_limits<double>::quiet_NaN());
  }

  int p() const { return p_; }
  SetFunctionKind kind() const { return kind_; }

  double operator()(Subset s) const {
    if (s > full_set(p_)) throw InvalidArgument("SetFunction: subset outside the ground set");
    std::lock_guard lock(state_->mutex);
    double& slot = state_->values[s];
    if (std::isnan(slot)) slot = state_->eval(s);
    return slot;
  }

  // Dense table of all 2^p values, index = bitmask.
  std::vector<double> tabulate() const {
    std::vector<double> out(std::size_t{1} << p_);
    for (Subset s = 0; s < out.size(); ++s) out[s] = (*this)(s);
    return out;
  }

 private:
  struct State {
    std::function<double(Subset)> eval;
    std::vector<double> values;
    std::mutex mutex;
  };
  int p_;
  SetFunctionKind kind_;
  std::shared_ptr<State> state_;
};

inline SetFunction tabulated(int p, std::vector<double> values) {
  if (p < 0 || p > kMaxTabulatedP) throw InvalidArgument("tabulated: p out of range");
  if (values.size() != (std::size_t{1} << p))
    throw InvalidArgument("tabulated: expected " + std::to_string(std::size_t{1} << p) +
                          " values, got " + std::to_string(values.size()));
  auto table = std::make_shared<std::vector<double>>(std::move(values));
  return SetFunction(p, [table](Subset s) { return (*table)[s]; }, SetFunctionKind::Tabulated);
}

// g(S) = max_{x in span(atoms of S)} f(x) - f(0).
inline SetFunction g_from_objective(const Objective& obj, const AtomicSet& set) {
  auto atoms = enumerate(set);
  if (!atoms) throw NotEnumerable("g_from_objective: " + set.name() + " is not enumerable");
  if (atoms->size() > 16)
    throw CapExceeded("g_from_objective: limited to 16 atoms, got " + std::to_string(atoms->size()));
  auto shared = std::make_shared<std::vector<Atom>>(std::move(*atoms));
  const int p = static_cast<int>(shared->size());
  return SetFunction(
      p,
      [obj, shared](Subset s) {
        std::vector<Atom> chosen;
        for (int i : members(s)) chosen.push_back((*shared)[static_cast<std::size_t>(i)]);
        return refit(obj, std::move(chosen)).g_value;
      },
      SetFunctionKind::FromObjective);
}

// ---------------------------------------------------------------------------
// Ratios.

inline constexpr double kVacuousDenominator = 1e-12;
inline constexpr int kMaxRatioP = 12;

struct RatioResult {
  std::optional<double> value;  // nullopt when every comparison was vacuous
  // gamma: (first, second) = (P, Q). kappa: (T, V) with element `index`.
  Subset first = 0;
  Subset second = 0;
  int index = -1;
  std::size_t skipped_pairs = 0;
};

namespace detail {

inline std::vector<double> table_for_ratio(const SetFunction& g, const char* who) {
  if (g.p() > kMaxRatioP)
    throw CapExceeded(std::string(who) + ": exhaustive search limited to p <= " +
                      std::to_string(kMaxRatioP));
  return g.tabulate();
}

inline void check_ratio_args(const SetFunction& g, Subset u, int k, const char* who) {
  if (k < 1) throw InvalidArgument(std::string(who) + ": k must be >= 1");
  if (u > full_set(g.p())) throw InvalidArgument(std::string(who) + ": U outside the ground set");
}

inline void consider(RatioResult& r, double num, double den, Subset a, Subset b, int i) {
  if (den < kVacuousDenominator) {
    ++r.skipped_pairs;
    return;
  }
  const double ratio = num / den;
  if (!r.value || ratio < *r.value) {
    r.value = ratio;
    r.first = a;
    r.second = b;
    r.index = i;
  }
}

}  // namespace detail

// gamma_{U,k}: min over P subset U, nonempty Q disjoint from P with |Q| <= k of
// sum_{i in Q} [g(P+i) - g(P)] / [g(P u Q) - g(P)].
inline RatioResult gamma_disjoint(const SetFunction& g, Subset u, int k) {
  detail::check_ratio_args(g, u, k, "gamma_disjoint");
  const auto t = detail::table_for_ratio(g, "gamma_disjoint");
  const Subset all = full_set(g.p());
  RatioResult out;
  for (Subset pset = u;; pset = (pset - 1) & u) {
    const Subset rest = all & ~pset;
    for (Subset q = rest; q; q = (q - 1) & rest) {
      if (cardinality(q) > k) continue;
      double num = 0;
      for (int i : members(q)) num += t[with(pset, i)] - t[pset];
      detail::consider(out, num, t[pset | q] - t[pset], pset, q, -1);
    }
    if (pset == 0) break;
  }
  return out;
}

enum class KappaReading {
  Display,    // T ranges over all subsets of U
  FixedBase,  // T = U
};

// kappa_{U,k}: min over T subset U, V superset U with |V \ U| <= k, i not in V,
// of [g(T+i) - g(T)] / [g(V+i) - g(V)].
inline RatioResult kappa_subset(const SetFunction& g, Subset u, int k,
                                KappaReading reading = KappaReading::Display) {
  detail::check_ratio_args(g, u, k, "kappa_subset");
  const auto t = detail::table_for_ratio(g, "kappa_subset");
  const Subset all = full_set(g.p());
  const Subset outside = all & ~u;
  RatioResult out;
  for (Subset extra = outside;; extra = (extra - 1) & outside) {
    if (cardinality(extra) <= k) {
      const Subset v = u | extra;
      for (int i = 0; i < g.p(); ++i) {
        if (contains(v, i)) continue;
        const double den = t[with(v, i)] - t[v];
        if (reading == KappaReading::FixedBase) {
          detail::consider(out, t[with(u, i)] - t[u], den, u, v, i);
          continue;
        }
        for (Subset tt = u;; tt = (tt - 1) & u) {
          detail::consider(out, t[with(tt, i)] - t[tt], den, tt, v, i);
          if (tt == 0) break;
        }
      }
    }
    if (extra == 0) break;
  }
  return out;
}

// min over all T subset V subset [p] and i not in V.
inline RatioResult kappa_lattice(const SetFunction& g) {
  const auto t = detail::table_for_ratio(g, "kappa_lattice");
  const Subset all = full_set(g.p());
  RatioResult out;
  for (Subset v = 0; v <= all; ++v) {
    for (int i = 0; i < g.p(); ++i) {
      if (contains(v, i)) continue;
      const double den = t[with(v, i)] - t[v];
      for (Subset tt = v;; tt = (tt - 1) & v) {
        detail::consider(out, t[with(tt, i)] - t[tt], den, tt, v, i);
        if (tt == 0) break;
      }
    }
  }
  return out;
}

inline bool is_monotone(const SetFunction& g, double tol = 1e-12) {
  const auto t = g.tabulate();
  for (Subset s = 0; s < t.size(); ++s)
    for (int i = 0; i < g.p(); ++i)
      if (!contains(s, i) && t[with(s, i)] < t[s] - tol) return false;
  return true;
}

// Diminishing returns: g(A+i) - g(A) >= g(A+i+j) - g(A+j) for all A, i, j.
inline bool is_submodular(const SetFunction& g, double tol = 1e-12) {
  const auto t = g.tabulate();
  for (Subset s = 0; s < t.size(); ++s)
    for (int i = 0; i < g.p(); ++i)
      for (int j = i + 1; j < g.p(); ++j) {
        if (contains(s, i) || contains(s, j)) continue;
        if (t[with(s, i)] - t[s] < t[with(with(s, i), j)] - t[with(s, j)] - tol) return false;
      }
  return true;
}

// ---------------------------------------------------------------------------
// Generators.

inline double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Unimodal u_i(t) = (t/p) exp(1 - t/p): u(0) = 0, maximum u(p) = 1.
inline double unimodal(double t, double peak) { return (t / peak) * std::exp(1.0 - t / peak); }

inline void check_doubly_stochastic(const Matrix& q, double tol = 1e-10) {
  if (q.rows() != q.cols()) throw InvalidArgument("doubly stochastic check: Q must be square");
  if ((q - q.transpose()).cwiseAbs().maxCoeff() > tol)
    throw InvalidArgument("doubly stochastic check: Q is not symmetric");
  if (q.minCoeff() < -tol) throw InvalidArgument("doubly stochastic check: negative entry");
  const double rows = (q.rowwise().sum().array() - 1.0).abs().maxCoeff();
  const double cols = (q.colwise().sum().array() - 1.0).abs().maxCoeff();
  if (rows > tol || cols > tol)
    throw InvalidArgument("doubly stochastic check: row/column sums deviate from 1");
}

// g(S) = h(z_S) - h(0) with h(z) = q(logistic(z)), q(y) = -1/2 y^T Q y + 1^T y,
// and z_S the vector of peak values u_i(p_i) on S, 0 elsewhere.
inline SetFunction make_sigmoid_composition(const Matrix& q, const std::vector<double>& peaks) {
  check_doubly_stochastic(q);
  const Index n = q.rows();
  if (static_cast<Index>(peaks.size()) != n)
    throw DimensionMismatch("make_sigmoid_composition: one peak per coordinate required");
  Vector at_peak(n);
  for (Index i = 0; i < n; ++i) {
    const double p = peaks[static_cast<std::size_t>(i)];
    if (!(p > 0)) throw InvalidArgument("make_sigmoid_composition: peaks must be positive");
    at_peak(i) = unimodal(p, p);
  }
  auto h = [q](const Vector& z) {
    const Vector y = z.unaryExpr([](double x) { return logistic(x); });
    return -0.5 * y.dot(q * y) + y.sum();
  };
  const double h0 = h(Vector::Zero(n));
  return SetFunction(
      static_cast<int>(n),
      [h, h0, at_peak](Subset s) {
        Vector z = Vector::Zero(at_peak.size());
        for (int i : members(s)) z(i) = at_peak(i);
        return h(z) - h0;
      },
      SetFunctionKind::SigmoidComposition);
}

// Symmetric doubly stochastic matrix: Sinkhorn balancing of a symmetric
// positive matrix followed by symmetrization.
inline Matrix random_doubly_stochastic(Index n, Rng& rng) {
  if (n < 1) throw InvalidArgument("random_doubly_stochastic: n must be >= 1");
  std::uniform_real_distribution<double> unif(0.05, 1.0);
  Matrix m(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) m(i, j) = unif(rng);
  m = 0.5 * (m + m.transpose());
  for (int it = 0; it < 10000; ++it) {
    m = m.array().colwise() / m.rowwise().sum().array();
    m = m.array().rowwise() / m.colwise().sum().array();
    if (it >= 199) {
      const double dev = (m.rowwise().sum().array() - 1.0).abs().maxCoeff();
      if (dev < 1e-14) break;
    }
  }
  return 0.5 * (m + m.transpose());
}

// g(S) = sum over nonempty R subset S, |R| <= max_order, of m_R ~ U[0,1).
inline SetFunction random_monotone(std::uint64_t seed, int p, int max_order = -1) {
  if (p < 0 || p > kMaxRatioP) throw InvalidArgument("random_monotone: p must lie in [0, 12]");
  if (max_order < 0) max_order = p;
  Rng rng = make_rng(seed, 0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const std::size_t size = std::size_t{1} << p;
  std::vector<double> mass(size, 0.0);
  for (Subset r = 1; r < size; ++r) {
    const double draw = unif(rng);
    if (cardinality(r) <= max_order) mass[r] = draw;
  }
  // zeta transform: g(S) = sum_{R subset S} m_R
  for (int i = 0; i < p; ++i)
    for (Subset s = 0; s < size; ++s)
      if (contains(s, i)) mass[s] += mass[s & ~(Subset{1} << i)];
  return tabulated(p, std::move(mass));
}

// ---------------------------------------------------------------------------
// Maximization.

struct SetGreedyTrace {
  std::vector<Subset> prefixes;  // S_0 .. S_r
  std::vector<double> values;    // g(S_0) .. g(S_r)
  std::vector<int> picks;        // s_1 .. s_r
};

inline SetGreedyTrace set_greedy(const SetFunction& g, int r) {
  if (r < 0 || r > g.p()) throw InvalidArgument("set_greedy: need 0 <= r <= p");
  SetGreedyTrace out;
  Subset s = 0;
  out.prefixes.push_back(s);
  out.values.push_back(g(s));
  for (int t = 0; t < r; ++t) {
    int best = -1;
    double best_val = -INFINITY;
    for (int i = 0; i < g.p(); ++i) {
      if (contains(s, i)) continue;
      const double v = g(with(s, i));
      if (v > best_val) {
        best_val = v;
        best = i;
      }
    }
    s = with(s, best);
    out.picks.push_back(best);
    out.prefixes.push_back(s);
    out.values.push_back(best_val);
  }
  return out;
}

struct SubsetOptimum {
  Subset subset = 0;
  double value = 0;
};

inline double binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  double c = 1;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

// Exact maximizer over |S| <= r; ties go to the smallest bitmask.
inline SubsetOptimum brute_force_opt(const SetFunction& g, int r) {
  if (r < 0) throw InvalidArgument("brute_force_opt: r must be >= 0");
  if (binomial(g.p(), std::min(r, g.p())) > 1e6)
    throw CapExceeded("brute_force_opt: more than 1e6 candidate subsets");
  SubsetOptimum best{0, g(0)};
  for (Subset s = 1; s <= full_set(g.p()); ++s) {
    if (cardinality(s) > r) continue;
    const double v = g(s);
    if (v > best.value) best = {s, v};
  }
  return best;
}

}  // namespace atomgreed

#endif  // ATOMGREED_SUBMOD_HPP

#ifndef ATOMGREED_CONDNUM_HPP
#define ATOMGREED_CONDNUM_HPP

// Atomic condition number theta(A) = min_{|v|=1} max_j |<v, a_j>| and its
// sparse variant theta_r for finite atom sets: local search (upper
// estimate), exact vertex enumeration of {x : |A^T x| <= 1} for small
// instances, and brute force over r-subsets.

#include <algorithm>
#include <bitset>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "atomgreed/atoms.hpp"
#include "atomgreed/linalg.hpp"
#include "atomgreed/random.hpp"

namespace atomgreed {

enum class ThetaMethod { ClosedForm, LocalSearch, ExactVertex, BruteForceSubsets };

inline const char* to_string(ThetaMethod m) {
  switch (m) {
    case ThetaMethod::ClosedForm: return "ClosedForm";
    case ThetaMethod::LocalSearch: return "LocalSearch";
    case ThetaMethod::ExactVertex: return "ExactVertex";
    case ThetaMethod::BruteForceSubsets: return "BruteForceSubsets";
  }
  return "?";
}

struct ConditionEstimate {
  double theta_hat = 0;
  ThetaMethod method = ThetaMethod::LocalSearch;
  Vector witness;                    // unit vector attaining theta_hat
  std::vector<Index> witness_subset; // theta_r only
  int restarts_used = 0;
  Certainty flag = Certainty::UpperEstimate;
};

// max_j |<v, a_j>|
inline double atom_alignment(const Matrix& a, const Vector& v) {
  return (a.transpose() * v).cwiseAbs().maxCoeff();
}

struct LocalSearchOptions {
  int restarts = 50;
  int iters = 2000;
  std::uint64_t seed = 0;
  bool polish = true;
};

inline constexpr Index kExactMaxDim = 8;
inline constexpr Index kExactMaxAtoms = 128;
inline constexpr std::size_t kExactMaxVertices = 200000;

namespace detail {

// Unit vector orthogonal to every column of a (a has rank < rows).
inline Vector null_witness(const Matrix& a) {
  Eigen::JacobiSVD<Matrix> s(a, Eigen::ComputeFullU);
  return s.matrixU().col(a.rows() - 1);
}

inline bool rank_deficient(const Matrix& a) {
  return a.cols() < a.rows() || numerical_rank(a) < a.rows();
}

// Tries to improve v by jumping to the polytope vertex cut out by the n most
// active, linearly independent constraints.
inline Vector vertex_snap(const Matrix& a, const Vector& v) {
  const Index n = a.rows();
  const Vector s = a.transpose() * v;
  std::vector<Index> order(static_cast<std::size_t>(a.cols()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&s](Index i, Index j) { return std::abs(s(i)) > std::abs(s(j)); });
  std::vector<Vector> picked;
  std::vector<Index> rows;
  for (Index j : order) {
    std::vector<Vector> trial = picked;
    trial.push_back(a.col(j));
    if (static_cast<Index>(orthonormalize(trial, 1e-8).size()) == static_cast<Index>(trial.size())) {
      picked = std::move(trial);
      rows.push_back(j);
      if (static_cast<Index>(rows.size()) == n) break;
    }
  }
  if (static_cast<Index>(rows.size()) < n) return v;
  Matrix aj(n, n);
  Vector rhs(n);
  for (Index k = 0; k < n; ++k) {
    aj.col(k) = a.col(rows[k]);
    rhs(k) = s(rows[k]) < 0 ? -1.0 : 1.0;
  }
  const Vector x = aj.transpose().fullPivLu().solve(rhs);
  const double norm = x.norm();
  if (!(norm > 0) || !x.allFinite()) return v;
  const Vector cand = x / norm;
  return atom_alignment(a, cand) < atom_alignment(a, v) ? cand : v;
}

inline ConditionEstimate local_search(const Matrix& a, const LocalSearchOptions& opts) {
  if (opts.restarts < 1) throw InvalidArgument("theta_local_search: restarts must be >= 1");
  if (opts.iters < 0) throw InvalidArgument("theta_local_search: iters must be >= 0");
  ConditionEstimate out;
  out.method = ThetaMethod::LocalSearch;
  out.restarts_used = opts.restarts;
  if (rank_deficient(a)) {
    out.theta_hat = 0;
    out.witness = null_witness(a);
    out.flag = Certainty::Exact;
    return out;
  }
  out.flag = Certainty::UpperEstimate;
  const Index n = a.rows();
  double best = INFINITY;
  Vector best_v;
  for (int rs = 0; rs < opts.restarts; ++rs) {
    Rng rng = make_rng(opts.seed, static_cast<std::uint64_t>(rs));
    Vector v = random_unit(n, rng);
    Vector local_v = v;
    double local = atom_alignment(a, v);
    for (int it = 1; it <= opts.iters; ++it) {
      const Vector s = a.transpose() * v;
      Index j = 0;
      s.cwiseAbs().maxCoeff(&j);
      const double val = std::abs(s(j));
      if (val < local) {
        local = val;
        local_v = v;
      }
      Vector g = (s(j) < 0 ? -1.0 : 1.0) * a.col(j);
      g -= g.dot(v) * v;
      v -= (0.5 / std::sqrt(static_cast<double>(it))) * g;
      v.normalize();
    }
    if (const double val = atom_alignment(a, v); val < local) {
      local = val;
      local_v = v;
    }
    if (opts.polish) {
      local_v = vertex_snap(a, local_v);
      local = atom_alignment(a, local_v);
    }
    if (local < best) {
      best = local;
      best_v = local_v;
    }
  }
  out.theta_hat = std::min(best, 1.0);
  out.witness = best_v;
  return out;
}

// Double-description vertex enumeration of {x : |a_j^T x| <= 1}, returning
// the vertex of largest norm. Requires full row rank.
inline ConditionEstimate exact_vertex(const Matrix& a) {
  using Bits = std::bitset<2 * kExactMaxDim + 2 * kExactMaxAtoms>;
  const Index n = a.rows();
  const Index m = a.cols();
  ConditionEstimate out;
  out.method = ThetaMethod::ExactVertex;
  out.flag = Certainty::Exact;
  if (rank_deficient(a)) {
    out.theta_hat = 0;
    out.witness = null_witness(a);
    return out;
  }

  if (m == n) {
    // Vertices of the polytope are A^{-T} s, s in {-1,1}^n.
    const Eigen::FullPivLU<Matrix> lu(a.transpose());
    double best = -1;
    Vector best_x;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << (n - 1)); ++mask) {
      Vector s = Vector::Ones(n);
      for (Index i = 1; i < n; ++i)
        if ((mask >> (i - 1)) & 1u) s(i) = -1;
      const Vector x = lu.solve(s);
      const double r2 = x.squaredNorm();
      if (r2 > best) {
        best = r2;
        best_x = x;
      }
    }
    out.theta_hat = 1.0 / std::sqrt(best);
    out.witness = best_x.normalized();
    return out;
  }

  const Vector sigma = singular_values(a);
  double max_col = 0;
  for (Index j = 0; j < m; ++j) max_col = std::max(max_col, a.col(j).norm());
  const double box = 2.0 * std::sqrt(static_cast<double>(m)) * max_col / sigma(n - 1) + 1.0;
  constexpr double eps = 1e-9;

  struct Vertex {
    Vector x;
    Bits active;
  };
  std::vector<Vertex> verts;
  // Box constraint 2i is x_i <= box, 2i+1 is -x_i <= box.
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    Vertex v{Vector(n), Bits()};
    for (Index i = 0; i < n; ++i) {
      const bool neg = (mask >> i) & 1u;
      v.x(i) = neg ? -box : box;
      v.active.set(static_cast<std::size_t>(2 * i + (neg ? 1 : 0)));
    }
    verts.push_back(std::move(v));
  }

  auto add_halfspace = [&](const Vector& h, std::size_t id) {
    std::vector<double> slack(verts.size());
    std::vector<std::size_t> plus, minus;
    for (std::size_t i = 0; i < verts.size(); ++i) {
      slack[i] = 1.0 - h.dot(verts[i].x);
      if (slack[i] > eps) plus.push_back(i);
      else if (slack[i] < -eps) minus.push_back(i);
      else verts[i].active.set(id);
    }
    if (minus.empty()) return;
    std::vector<Vertex> next;
    next.reserve(verts.size());
    for (std::size_t i = 0; i < verts.size(); ++i)
      if (slack[i] >= -eps) next.push_back(verts[i]);
    for (std::size_t p : plus) {
      for (std::size_t q : minus) {
        const Bits common = verts[p].active & verts[q].active;
        if (static_cast<Index>(common.count()) < n - 1) continue;
        bool adjacent = true;
        for (std::size_t r = 0; r < verts.size() && adjacent; ++r) {
          if (r == p || r == q) continue;
          if ((common & ~verts[r].active).none()) adjacent = false;
        }
        if (!adjacent) continue;
        const double t = slack[p] / (slack[p] - slack[q]);
        Vertex v{verts[p].x + t * (verts[q].x - verts[p].x), common};
        v.active.set(id);
        next.push_back(std::move(v));
        if (next.size() > kExactMaxVertices)
          throw CapExceeded("theta_exact_small: vertex count exceeded " +
                            std::to_string(kExactMaxVertices));
      }
    }
    verts = std::move(next);
  };

  for (Index j = 0; j < m; ++j) {
    const Vector col = a.col(j);
    add_halfspace(col, static_cast<std::size_t>(2 * n + 2 * j));
    add_halfspace(-col, static_cast<std::size_t>(2 * n + 2 * j + 1));
  }

  double best = -1;
  Vector best_x;
  for (const Vertex& v : verts) {
    const double r2 = v.x.squaredNorm();
    if (r2 > best) {
      best = r2;
      best_x = v.x;
    }
  }
  out.witness = best_x.normalized();
  out.theta_hat = atom_alignment(a, out.witness);
  return out;
}

inline void check_finite_set(const Matrix& a, const char* who) {
  if (a.rows() == 0 || a.cols() == 0) throw InvalidArgument(std::string(who) + ": empty atom matrix");
  if (!a.allFinite()) throw InvalidArgument(std::string(who) + ": non-finite atoms");
}

}  // namespace detail

inline ConditionEstimate theta_local_search(const Matrix& a, const LocalSearchOptions& opts = {}) {
  detail::check_finite_set(a, "theta_local_search");
  return detail::local_search(a, opts);
}

inline ConditionEstimate theta_exact_small(const Matrix& a) {
  detail::check_finite_set(a, "theta_exact_small");
  if (a.rows() > kExactMaxDim || a.cols() > kExactMaxAtoms) {
    throw CapExceeded("theta_exact_small: limited to n <= " + std::to_string(kExactMaxDim) +
                      ", m <= " + std::to_string(kExactMaxAtoms) + "; got " +
                      std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
  }
  return detail::exact_vertex(a);
}

enum class SubsetInner { GridOrLocalSearch, ExactVertex };

struct BruteForceOptions {
  SubsetInner inner = SubsetInner::GridOrLocalSearch;
  int grid_points = 10000;
  LocalSearchOptions local;
};

namespace detail {

// min over unit c in R^2 of max_j |<c, b_j>|, angular grid over [0, pi)
// followed by successive zoom passes around the best angle.
inline Vector angular_min(const Matrix& b, int points) {
  auto eval = [&b](double phi) {
    Vector c(2);
    c << std::cos(phi), std::sin(phi);
    return (b.transpose() * c).cwiseAbs().maxCoeff();
  };
  const double pi = std::acos(-1.0);
  double width = pi / points;
  double best_phi = 0;
  double best = eval(0);
  for (int k = 1; k < points; ++k) {
    const double phi = k * width;
    const double v = eval(phi);
    if (v < best) {
      best = v;
      best_phi = phi;
    }
  }
  for (int pass = 0; pass < 6; ++pass) {
    const double lo = best_phi - width;
    const double step = 2 * width / 100;
    for (int k = 0; k <= 100; ++k) {
      const double phi = lo + k * step;
      const double v = eval(phi);
      if (v < best) {
        best = v;
        best_phi = phi;
      }
    }
    width = step;
  }
  Vector c(2);
  c << std::cos(best_phi), std::sin(best_phi);
  return c;
}

}  // namespace detail

// theta_r = min over r-subsets L of min_{unit v in span L} max_j |<v, a_j>|.
inline ConditionEstimate theta_r_bruteforce(const Matrix& a, Index r, const BruteForceOptions& opts = {}) {
  detail::check_finite_set(a, "theta_r_bruteforce");
  if (r < 1) throw InvalidArgument("theta_r_bruteforce: r must be >= 1");
  if (a.cols() > 12 || r > 3)
    throw CapExceeded("theta_r_bruteforce: limited to m <= 12, r <= 3");
  const Index m = a.cols();
  const Index size = std::min(r, m);

  ConditionEstimate out;
  out.method = ThetaMethod::BruteForceSubsets;
  out.flag = Certainty::Exact;
  out.theta_hat = INFINITY;
  bool all_exact = true;

  std::vector<Index> idx(static_cast<std::size_t>(size));
  std::iota(idx.begin(), idx.end(), Index{0});
  for (;;) {
    std::vector<Vector> cols;
    for (Index j : idx) cols.push_back(a.col(j));
    const Matrix q = as_columns(orthonormalize(cols), a.rows());
    const Matrix b = q.transpose() * a;  // atoms seen from inside span(L)
    Vector c;
    bool exact = true;
    if (q.cols() == 1) {
      c = Vector::Ones(1);
    } else if (opts.inner == SubsetInner::ExactVertex) {
      c = detail::exact_vertex(b).witness;
    } else if (q.cols() == 2) {
      c = detail::angular_min(b, opts.grid_points);
    } else {
      c = detail::local_search(b, opts.local).witness;
      exact = false;
    }
    const Vector v = q * c;
    const double val = atom_alignment(a, v);
    if (val < out.theta_hat) {
      out.theta_hat = val;
      out.witness = v;
      out.witness_subset = idx;
    }
    all_exact = all_exact && exact;

    Index pos = size - 1;
    while (pos >= 0 && idx[pos] == m - size + pos) --pos;
    if (pos < 0) break;
    ++idx[pos];
    for (Index k = pos + 1; k < size; ++k) idx[k] = idx[k - 1] + 1;
  }
  if (!all_exact) out.flag = Certainty::UpperEstimate;
  out.restarts_used = all_exact ? 0 : opts.local.restarts;
  return out;
}

struct Diagnostics {
  double mean_coherence;
  double sigma_min;
};

inline Diagnostics diagnostics(const Matrix& a) {
  detail::check_finite_set(a, "diagnostics");
  double sum = 0;
  std::size_t pairs = 0;
  for (Index i = 0; i < a.cols(); ++i)
    for (Index j = i + 1; j < a.cols(); ++j) {
      sum += std::abs(a.col(i).dot(a.col(j)));
      ++pairs;
    }
  const Vector sigma = singular_values(a);
  return {pairs ? sum / static_cast<double>(pairs) : 0.0, sigma(sigma.size() - 1)};
}

// Best available value for a finite atom matrix: exact within the caps,
// local search otherwise.
inline ConditionEstimate theta_auto(const Matrix& a, const LocalSearchOptions& opts = {}) {
  if (a.rows() <= kExactMaxDim && a.cols() <= kExactMaxAtoms) {
    try {
      return theta_exact_small(a);
    } catch (const CapExceeded&) {
    }
  }
  return theta_local_search(a, opts);
}

}  // namespace atomgreed

#endif  // ATOMGREED_CONDNUM_HPP

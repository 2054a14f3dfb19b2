#ifndef ATOMGREED_SOLVERS_HPP
#define ATOMGREED_SOLVERS_HPP

// Refit over the span of an active set, forward greedy (linear oracle or
// exhaustive gain oracle) and thresholded forward-backward greedy.

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "atomgreed/atoms.hpp"
#include "atomgreed/bounds.hpp"
#include "atomgreed/objectives.hpp"

namespace atomgreed {

struct ActiveSet {
  std::vector<Atom> atoms;
  Matrix basis;        // dim x k, orthonormal columns spanning the atoms
  Vector refit_point;  // maximizer of f over span(basis)
  double g_value = 0;  // f(refit_point) - f(0)
};

enum class StepType { Forward, Backward };

inline const char* to_string(StepType s) { return s == StepType::Forward ? "forward" : "backward"; }

struct IterationRecord {
  Index t = 0;        // step counter (forward and backward steps alike)
  StepType step = StepType::Forward;
  std::string atom_tag;
  double g_value = 0;
  double grad_norm = 0;  // at the new refit point
  double gain = 0;       // g change of this step (negative for removals)
  double bound_value = std::numeric_limits<double>::quiet_NaN();
  Index size = 0;        // active-set size after the step
  Vector point;          // refit point after the step
};

struct SolveTrace {
  std::vector<IterationRecord> iterations;
  ActiveSet final;
  bool stopped_early = false;
  std::string stop_reason;
  // Atoms in selection order, including ones later removed.
  std::vector<AtomTag> selected;
};

enum class Oracle { OMPSel, PureGreedy };

struct RefitOptions {
  double tol = 1e-9;
  int max_iters = 10000;
};

namespace detail {

inline Matrix span_basis(const std::vector<Atom>& atoms, Index dim) {
  std::vector<Vector> vecs;
  for (const Atom& a : atoms)
    for (Vector& v : spanning_vectors(a)) vecs.push_back(std::move(v));
  const auto q = orthonormalize(vecs);
  return as_columns(q, dim);
}

// Maximizes f(Q c) by gradient ascent with backtracking.
inline Vector ascend(const Objective& obj, const Matrix& q, const RefitOptions& opts) {
  Vector c = Vector::Zero(q.cols());
  const double safe = 1.0 / obj.lip;
  double step = safe;
  double value = obj.value(q * c);
  double gnorm = INFINITY;
  for (int it = 0; it < opts.max_iters; ++it) {
    const Vector d = q.transpose() * obj.gradient(q * c);
    gnorm = d.norm();
    if (gnorm <= opts.tol) return c;
    step *= 2.0;
    for (;;) {
      const Vector trial = c + step * d;
      const double tv = obj.value(q * trial);
      // 1/L always increases f; near the optimum rounding hides that, so
      // accept it without the test rather than stalling
      if (step <= safe || tv >= value + 0.5 * step * gnorm * gnorm) {
        c = trial;
        value = tv;
        break;
      }
      step *= 0.5;
    }
  }
  const double last = (q.transpose() * obj.gradient(q * c)).norm();
  if (last <= opts.tol) return c;
  throw NonConvergence("refit: gradient ascent hit the iteration cap", last);
}

}  // namespace detail

// B^(U): maximizer of f over span(atoms) and g(U) = f(B) - f(0).
inline ActiveSet refit(const Objective& obj, std::vector<Atom> atoms, const RefitOptions& opts = {}) {
  ActiveSet out;
  out.basis = detail::span_basis(atoms, obj.dim);
  out.atoms = std::move(atoms);
  if (out.basis.cols() == 0) {
    out.refit_point = Vector::Zero(obj.dim);
    out.g_value = 0;
    return out;
  }
  Vector c;
  if (obj.quadratic) {
    c = solve_lsq(obj.quadratic->design * out.basis, obj.quadratic->target);
  } else {
    c = detail::ascend(obj, out.basis, opts);
  }
  out.refit_point = out.basis * c;
  out.g_value = obj.value(out.refit_point) - obj.at_zero();
  return out;
}

// Whether every direction of `atom` already lies in the span of `basis`.
inline bool in_span(const Atom& atom, const Matrix& basis, double tol = 1e-10) {
  for (const Vector& w : spanning_vectors(atom))
    if ((w - project(w, basis)).norm() >= tol) return false;
  return true;
}

struct GreedyOptions {
  Oracle oracle = Oracle::OMPSel;
  double beta = 1.0;
  bool adversarial = false;  // worst atom still meeting the beta condition
  std::optional<BoundParams> bound;
  double reference_value = std::numeric_limits<double>::quiet_NaN();  // g(U*)
  double stop_tol = 1e-10;
  RefitOptions refit;
};

namespace detail {

struct Candidate {
  Atom atom;
  ActiveSet next;
};

inline std::optional<Candidate> pure_greedy_step(const AtomicSet& set, const Objective& obj,
                                                 const ActiveSet& cur, const Vector& grad,
                                                 double beta, bool adversarial,
                                                 const RefitOptions& ropts) {
  auto atoms = enumerate(set);
  if (!atoms) throw NotEnumerable("PureGreedy: " + set.name() + " is not enumerable");
  std::vector<Candidate> cands;
  for (Atom& a : *atoms) {
    if (in_span(a, cur.basis)) continue;
    Atom oriented = orient(set, std::move(a), grad);
    std::vector<Atom> next_atoms = cur.atoms;
    next_atoms.push_back(oriented);
    cands.push_back({std::move(oriented), refit(obj, std::move(next_atoms), ropts)});
  }
  if (cands.empty()) return std::nullopt;
  double best = -INFINITY;
  for (const auto& c : cands) best = std::max(best, c.next.g_value);
  const double base = cur.g_value;
  std::size_t pick = 0;
  if (!adversarial) {
    for (std::size_t i = 1; i < cands.size(); ++i)
      if (cands[i].next.g_value > cands[pick].next.g_value) pick = i;
  } else {
    const double threshold = base + beta * (best - base) * (1 - 1e-12);
    double worst = INFINITY;
    for (std::size_t i = 0; i < cands.size(); ++i) {
      const double v = cands[i].next.g_value;
      if (v >= threshold && v < worst) {
        worst = v;
        pick = i;
      }
    }
  }
  return std::move(cands[pick]);
}

// Linear-oracle atom, falling back to the best atom outside the current span
// when the oracle returns a duplicate. nullopt means no atom can help.
inline std::optional<Atom> ompsel_step(const AtomicSet& set, const ActiveSet& cur, const Vector& grad,
                                       double beta, bool adversarial, double stop_tol) {
  Atom a = adversarial ? adversarial_select(set, grad, beta) : select_atom(set, grad, beta);
  if (!in_span(a, cur.basis)) return a;
  auto atoms = enumerate(set);
  if (!atoms) return std::nullopt;
  std::optional<Atom> best;
  double best_score = stop_tol;
  for (Atom& c : *atoms) {
    if (in_span(c, cur.basis)) continue;
    const double s = selection_score(c, grad);
    if (s > best_score) {
      best_score = s;
      best = orient(set, std::move(c), grad);
    }
  }
  return best;
}

}  // namespace detail

inline SolveTrace greedy(const AtomicSet& set, const Objective& obj, Index r, const GreedyOptions& opts = {}) {
  if (r < 1) throw InvalidArgument("greedy: r must be >= 1");
  if (set.ambient_dim() != obj.dim) throw DimensionMismatch("greedy: set and objective dims differ");
  if (opts.oracle == Oracle::PureGreedy && !set.enumerable())
    throw NotEnumerable("greedy: PureGreedy needs an enumerable set, got " + set.name());

  SolveTrace trace;
  ActiveSet cur = refit(obj, {}, opts.refit);
  for (Index t = 1; t <= r; ++t) {
    const Vector grad = obj.gradient(cur.refit_point);
    if (grad.norm() < opts.stop_tol) {
      trace.stopped_early = true;
      trace.stop_reason = "stationary";
      break;
    }
    std::optional<ActiveSet> next;
    std::optional<Atom> atom;
    try {
      if (opts.oracle == Oracle::PureGreedy) {
        auto c = detail::pure_greedy_step(set, obj, cur, grad, opts.beta, opts.adversarial, opts.refit);
        if (c) {
          atom = std::move(c->atom);
          next = std::move(c->next);
        }
      } else {
        atom = detail::ompsel_step(set, cur, grad, opts.beta, opts.adversarial, opts.stop_tol);
      }
    } catch (const ZeroGradient&) {
      trace.stopped_early = true;
      trace.stop_reason = "stationary";
      break;
    }
    if (!atom) {
      trace.stopped_early = true;
      trace.stop_reason = "no_improving_atom";
      break;
    }
    if (!next) {
      std::vector<Atom> atoms = cur.atoms;
      atoms.push_back(*atom);
      next = refit(obj, std::move(atoms), opts.refit);
    }
    IterationRecord rec;
    rec.t = t;
    rec.step = StepType::Forward;
    rec.atom_tag = describe(atom->tag);
    rec.g_value = next->g_value;
    rec.grad_norm = obj.gradient(next->refit_point).norm();
    rec.gain = next->g_value - cur.g_value;
    rec.size = static_cast<Index>(next->atoms.size());
    rec.point = next->refit_point;
    if (opts.bound) rec.bound_value = greedy_bound(*opts.bound, t).fraction * opts.reference_value;
    trace.iterations.push_back(std::move(rec));
    trace.selected.push_back(atom->tag);
    cur = std::move(*next);
  }
  if (!trace.stopped_early) trace.stop_reason = "budget";
  trace.final = std::move(cur);
  return trace;
}

inline SolveTrace greedy(const AtomicSet& set, const Objective& obj, Index r, double beta, Oracle oracle) {
  GreedyOptions opts;
  opts.beta = beta;
  opts.oracle = oracle;
  return greedy(set, obj, r, opts);
}

struct FobaOptions {
  Oracle oracle = Oracle::OMPSel;
  double beta = 1.0;
  double nu = 0.0;
  bool adversarial = false;
  // Backward phase only entered once |S| reaches this size.
  Index min_size_for_backward = 0;
  // Total step cap guarding against slow progress on continuous families.
  Index max_steps = 0;  // 0: 100 * k
  std::optional<double> c;  // contraction constant for the bound column
  double reference_value = std::numeric_limits<double>::quiet_NaN();
  double stop_tol = 1e-10;
  RefitOptions refit;
};

inline SolveTrace foba(const AtomicSet& set, const Objective& obj, Index k, const FobaOptions& opts = {}) {
  if (k < 1) throw InvalidArgument("foba: k must be >= 1");
  if (!(opts.nu >= 0 && opts.nu < 1)) throw InvalidArgument("foba: nu must lie in [0,1)");
  if (set.ambient_dim() != obj.dim) throw DimensionMismatch("foba: set and objective dims differ");
  if (opts.oracle == Oracle::PureGreedy && !set.enumerable())
    throw NotEnumerable("foba: PureGreedy needs an enumerable set, got " + set.name());

  const Index max_steps = opts.max_steps > 0 ? opts.max_steps : 100 * k;
  SolveTrace trace;
  ActiveSet cur = refit(obj, {}, opts.refit);
  Index t = 0;
  auto bound_at = [&](Index size) {
    if (!opts.c) return std::numeric_limits<double>::quiet_NaN();
    return foba_bound(*opts.c, size, k).fraction * opts.reference_value;
  };

  while (static_cast<Index>(cur.atoms.size()) < k) {
    if (t >= max_steps) {
      trace.stopped_early = true;
      trace.stop_reason = "step_cap";
      break;
    }
    // forward
    const Vector grad = obj.gradient(cur.refit_point);
    if (grad.norm() < opts.stop_tol) {
      trace.stopped_early = true;
      trace.stop_reason = "stationary";
      break;
    }
    std::optional<Atom> atom;
    std::optional<ActiveSet> next;
    try {
      if (opts.oracle == Oracle::PureGreedy) {
        auto c = detail::pure_greedy_step(set, obj, cur, grad, opts.beta, opts.adversarial, opts.refit);
        if (c) {
          atom = std::move(c->atom);
          next = std::move(c->next);
        }
      } else {
        atom = detail::ompsel_step(set, cur, grad, opts.beta, opts.adversarial, opts.stop_tol);
      }
    } catch (const ZeroGradient&) {
      trace.stopped_early = true;
      trace.stop_reason = "stationary";
      break;
    }
    if (!atom) {
      trace.stopped_early = true;
      trace.stop_reason = "no_improving_atom";
      break;
    }
    if (!next) {
      std::vector<Atom> atoms = cur.atoms;
      atoms.push_back(*atom);
      next = refit(obj, std::move(atoms), opts.refit);
    }
    const double d_plus = next->g_value - cur.g_value;
    ++t;
    {
      IterationRecord rec;
      rec.t = t;
      rec.step = StepType::Forward;
      rec.atom_tag = describe(atom->tag);
      rec.g_value = next->g_value;
      rec.grad_norm = obj.gradient(next->refit_point).norm();
      rec.gain = d_plus;
      rec.size = static_cast<Index>(next->atoms.size());
      rec.point = next->refit_point;
      rec.bound_value = bound_at(rec.size);
      trace.iterations.push_back(std::move(rec));
    }
    trace.selected.push_back(atom->tag);
    cur = std::move(*next);

    if (static_cast<Index>(cur.atoms.size()) < opts.min_size_for_backward) continue;
    // backward
    double damage = 0;
    while (cur.atoms.size() > 1 && t < max_steps) {
      std::optional<ActiveSet> best;
      std::size_t best_p = 0;
      for (std::size_t p = 0; p < cur.atoms.size(); ++p) {
        std::vector<Atom> rest;
        for (std::size_t q = 0; q < cur.atoms.size(); ++q)
          if (q != p) rest.push_back(cur.atoms[q]);
        ActiveSet cand = refit(obj, std::move(rest), opts.refit);
        if (!best || cand.g_value > best->g_value) {
          best = std::move(cand);
          best_p = p;
        }
      }
      const double d_minus = std::max(cur.g_value - best->g_value, 0.0);
      if (!(damage + d_minus < opts.nu * d_plus)) break;
      ++t;
      damage += d_minus;
      IterationRecord rec;
      rec.t = t;
      rec.step = StepType::Backward;
      rec.atom_tag = describe(cur.atoms[best_p].tag);
      rec.g_value = best->g_value;
      rec.grad_norm = obj.gradient(best->refit_point).norm();
      rec.gain = -d_minus;
      rec.size = static_cast<Index>(best->atoms.size());
      rec.point = best->refit_point;
      rec.bound_value = bound_at(rec.size);
      trace.iterations.push_back(std::move(rec));
      cur = std::move(*best);
    }
  }
  if (!trace.stopped_early) trace.stop_reason = "budget";
  trace.final = std::move(cur);
  return trace;
}

}  // namespace atomgreed

#endif  // ATOMGREED_SOLVERS_HPP

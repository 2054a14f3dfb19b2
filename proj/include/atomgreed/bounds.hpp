#ifndef ATOMGREED_BOUNDS_HPP
#define ATOMGREED_BOUNDS_HPP

// Approximation-guarantee curves for greedy, forward-backward and
// set-function greedy, plus the gamma/kappa sandwich checker.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "atomgreed/atoms.hpp"

namespace atomgreed {

enum class BoundLabel { Guaranteed, Conservative, Indicative };

inline const char* to_string(BoundLabel l) {
  switch (l) {
    case BoundLabel::Guaranteed: return "guaranteed";
    case BoundLabel::Conservative: return "conservative guarantee";
    case BoundLabel::Indicative: return "indicative only";
  }
  return "?";
}

// A lower bound on theta only makes the curve smaller, so it stays valid;
// an upper estimate may overstate it.
inline BoundLabel label_for(Certainty theta_flag) {
  switch (theta_flag) {
    case Certainty::Exact: return BoundLabel::Guaranteed;
    case Certainty::LowerBound: return BoundLabel::Conservative;
    case Certainty::UpperEstimate: return BoundLabel::Indicative;
  }
  return BoundLabel::Indicative;
}

struct BoundParams {
  double beta = 1.0;
  double theta = 1.0;
  Certainty theta_flag = Certainty::Exact;
  double sigma = 1.0;
  Index r = 1;
  double kappa = 1.0;
  double c = 1.0;

  void validate() const {
    auto in_unit = [](double x) { return x > 0 && x <= 1 + 1e-12; };
    if (!in_unit(beta)) throw InvalidArgument("BoundParams: beta must lie in (0,1]");
    if (!in_unit(theta)) throw InvalidArgument("BoundParams: theta must lie in (0,1]");
    if (!in_unit(sigma)) throw InvalidArgument("BoundParams: sigma must lie in (0,1]");
    if (!(kappa > 0)) throw InvalidArgument("BoundParams: kappa must be positive");
    if (r < 1) throw InvalidArgument("BoundParams: r must be >= 1");
  }

  BoundLabel label() const { return label_for(theta_flag); }
};

struct GreedyBound {
  double fraction;     // guaranteed fraction of g(U*)
  double contraction;  // per-step factor on the optimality gap
};

inline GreedyBound greedy_bound(const BoundParams& p, Index t) {
  p.validate();
  if (t < 0) throw InvalidArgument("greedy_bound: t must be >= 0");
  const double rate = p.beta * p.theta * p.theta * p.sigma;
  return {-std::expm1(-rate * static_cast<double>(t)), 1.0 - rate};
}

struct FobaBound {
  double fraction;
  double relaxation;  // 1 - exp(-c), reported at size == k, NaN otherwise
};

inline FobaBound foba_bound(double c, Index size, Index k) {
  if (!(c > 0 && c <= 1 + 1e-12)) throw InvalidArgument("foba_bound: c must lie in (0,1]");
  if (k < 1 || size < 0 || size > k) throw InvalidArgument("foba_bound: need 0 <= size <= k");
  const double step = 1.0 - c / static_cast<double>(k);
  const double fraction = 1.0 - std::pow(step, static_cast<double>(size));
  return {fraction, size == k ? -std::expm1(-c) : NAN};
}

struct WksubBound {
  double fraction;
  double relaxation;  // 1 - exp(-kappa) at i == r, NaN otherwise
  bool clamped;       // kappa > r: per-step contraction clamped at 0
};

inline WksubBound wksub_bound(double kappa, Index r, Index i) {
  if (!(kappa > 0)) throw InvalidArgument("wksub_bound: kappa must be positive");
  if (r < 1 || i < 0 || i > r) throw InvalidArgument("wksub_bound: need 0 <= i <= r");
  const double raw = 1.0 - kappa / static_cast<double>(r);
  const bool clamped = raw < 0;
  const double step = std::max(raw, 0.0);
  const double fraction = i == 0 ? 0.0 : 1.0 - std::pow(step, static_cast<double>(i));
  return {fraction, i == r ? -std::expm1(-kappa) : NAN, clamped};
}

struct SandwichResult {
  bool pass;
  bool lower_checked;  // false when gamma >= 2
  double lower;        // gamma / (2 - gamma), NaN when unchecked
  double upper;        // gamma
  double lower_margin; // kappa - lower
  double upper_margin; // upper - kappa
};

inline SandwichResult sandwich_check(double gamma, double kappa, double tol = 1e-9) {
  if (!(gamma > 0)) throw InvalidArgument("sandwich_check: gamma must be positive");
  SandwichResult out{};
  out.upper = gamma;
  out.upper_margin = gamma - kappa;
  out.lower_checked = gamma < 2;
  if (out.lower_checked) {
    out.lower = gamma / (2 - gamma);
    out.lower_margin = kappa - out.lower;
  } else {
    out.lower = NAN;
    out.lower_margin = NAN;
  }
  out.pass = out.upper_margin >= -tol && (!out.lower_checked || out.lower_margin >= -tol);
  return out;
}

struct BoundPoint {
  Index t;
  double value;
};

// Greedy curve scaled by `reference` (typically g(U*)) for t = 0..t_max.
inline std::vector<BoundPoint> bound_curve(const BoundParams& p, Index t_max, double reference = 1.0) {
  std::vector<BoundPoint> out;
  for (Index t = 0; t <= t_max; ++t) out.push_back({t, greedy_bound(p, t).fraction * reference});
  return out;
}

}  // namespace atomgreed

#endif  // ATOMGREED_BOUNDS_HPP

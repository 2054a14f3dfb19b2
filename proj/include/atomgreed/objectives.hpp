#ifndef ATOMGREED_OBJECTIVES_HPP
#define ATOMGREED_OBJECTIVES_HPP

// Concave smooth objectives with restricted strong-concavity / smoothness
// constants, and the sparse-recovery instance generator.

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

#include "atomgreed/atoms.hpp"
#include "atomgreed/random.hpp"

namespace atomgreed {

// f(x) = -1/2 ||design x - target||^2.
struct QuadraticData {
  Matrix design;
  Vector target;
};

struct Objective {
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> gradient;
  double mu = 0.0;   // strong concavity; 0 means unknown
  double lip = 1.0;  // smoothness
  std::optional<QuadraticData> quadratic;
  Index dim = 0;

  double operator()(const Vector& x) const { return value(x); }
  double at_zero() const { return value(Vector::Zero(dim)); }
};

inline Objective make_least_squares(Matrix phi, Vector b) {
  if (phi.rows() != b.size()) {
    throw DimensionMismatch("make_least_squares: design has " + std::to_string(phi.rows()) +
                            " rows but target has " + std::to_string(b.size()));
  }
  if (!phi.allFinite() || !b.allFinite())
    throw InvalidArgument("make_least_squares: non-finite data");
  const Vector sigma = singular_values(phi);
  Objective obj;
  obj.dim = phi.cols();
  obj.lip = sigma.size() > 0 ? sigma(0) * sigma(0) : 0.0;
  obj.mu = phi.rows() >= phi.cols() && sigma.size() > 0
               ? sigma(sigma.size() - 1) * sigma(sigma.size() - 1)
               : 0.0;
  if (!(obj.lip > 0)) obj.lip = 1.0;
  obj.quadratic = QuadraticData{phi, b};
  obj.value = [phi, b](const Vector& x) { return -0.5 * (phi * x - b).squaredNorm(); };
  obj.gradient = [phi, b](const Vector& x) -> Vector { return -(phi.transpose() * (phi * x - b)); };
  return obj;
}

// Wraps a user-supplied concave smooth function.
inline Objective make_smooth_concave(std::function<double(const Vector&)> value,
                                     std::function<Vector(const Vector&)> gradient,
                                     Index dim, double mu, double lip) {
  if (dim <= 0) throw InvalidArgument("make_smooth_concave: dim must be positive");
  if (!(lip > 0) || mu < 0 || mu > lip)
    throw InvalidArgument("make_smooth_concave: need 0 <= mu <= lip, lip > 0");
  Objective obj;
  obj.value = std::move(value);
  obj.gradient = std::move(gradient);
  obj.dim = dim;
  obj.mu = mu;
  obj.lip = lip;
  return obj;
}

// f o P_V for the subspace V spanned by the orthonormal columns of `basis`.
inline Objective compose_with_projection(const Objective& f, const Matrix& basis) {
  if (basis.rows() != f.dim)
    throw DimensionMismatch("compose_with_projection: basis rows differ from objective dim");
  const Matrix p = basis * basis.transpose();
  Objective out;
  out.dim = f.dim;
  out.lip = f.lip;
  out.mu = basis.cols() == f.dim ? f.mu : 0.0;
  if (f.quadratic) out.quadratic = QuadraticData{f.quadratic->design * p, f.quadratic->target};
  auto value = f.value;
  auto gradient = f.gradient;
  out.value = [value, p](const Vector& x) { return value(p * x); };
  out.gradient = [gradient, p](const Vector& x) -> Vector { return p * gradient(p * x); };
  return out;
}

struct RestrictedConstants {
  double mu;
  double lip;
};

// Extreme eigenvalues of Phi_S^T Phi_S over all supports |S| = r.
inline RestrictedConstants restricted_constants(const Objective& obj, const AtomicSet& set, Index r) {
  if (!obj.quadratic) throw InvalidArgument("restricted_constants: objective is not quadratic");
  const auto* basis = set.as<StandardBasis>();
  if (!basis) throw InvalidArgument("restricted_constants: only the standard basis is supported");
  const Index n = basis->n;
  if (n != obj.dim) throw DimensionMismatch("restricted_constants: set and objective dims differ");
  if (n > 20) throw CapExceeded("restricted_constants: support enumeration limited to n <= 20");
  if (r < 1 || r > n) throw InvalidArgument("restricted_constants: need 1 <= r <= n");

  const Matrix gram = obj.quadratic->design.transpose() * obj.quadratic->design;
  RestrictedConstants out{INFINITY, 0.0};
  std::vector<Index> idx(static_cast<std::size_t>(r));
  std::iota(idx.begin(), idx.end(), Index{0});
  Matrix sub(r, r);
  for (;;) {
    for (Index a = 0; a < r; ++a)
      for (Index b = 0; b < r; ++b) sub(a, b) = gram(idx[a], idx[b]);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(sub, Eigen::EigenvaluesOnly);
    out.mu = std::min(out.mu, std::max(eig.eigenvalues()(0), 0.0));
    out.lip = std::max(out.lip, eig.eigenvalues()(r - 1));
    // next r-combination in lexicographic order
    Index pos = r - 1;
    while (pos >= 0 && idx[pos] == n - r + pos) --pos;
    if (pos < 0) break;
    ++idx[pos];
    for (Index q = pos + 1; q < r; ++q) idx[q] = idx[q - 1] + 1;
  }
  return out;
}

struct RecoveryInstance {
  AtomicSet atomic_set;
  std::vector<Atom> true_atoms;
  std::vector<double> true_weights;
  Vector signal;
  Vector target;
  Vector validation_target;
  double noise_level = 0.0;
  std::uint64_t seed = 0;
};

namespace detail {

inline Vector scaled_noise(Index n, double level, double signal_norm, Rng& rng) {
  if (level == 0.0) return Vector::Zero(n);
  Vector e = random_unit(n, rng);
  return e * (level * signal_norm);
}

}  // namespace detail

// Plants `sparsity` distinct atoms with +-1 weights; the target carries
// Gaussian noise scaled to exactly noise_level * ||signal||.
inline std::pair<RecoveryInstance, Objective> make_recovery_instance(const AtomicSet& set, Index sparsity,
                                                                     double noise_level,
                                                                     std::uint64_t seed) {
  if (sparsity < 1) throw InvalidArgument("make_recovery_instance: sparsity must be >= 1");
  if (!(noise_level >= 0)) throw InvalidArgument("make_recovery_instance: noise_level must be >= 0");
  if (auto count = set.atom_count(); count && static_cast<std::uint64_t>(sparsity) > *count) {
    throw InvalidArgument("make_recovery_instance: sparsity " + std::to_string(sparsity) +
                          " exceeds the " + std::to_string(*count) + " available atoms");
  }
  Rng rng = make_rng(seed, 0);
  std::vector<Atom> atoms;
  while (static_cast<Index>(atoms.size()) < sparsity) {
    Atom a = random_atom(set, rng);
    const bool dup = std::any_of(atoms.begin(), atoms.end(),
                                 [&a](const Atom& b) { return same_atom(a, b); });
    if (!dup) atoms.push_back(std::move(a));
  }
  std::bernoulli_distribution coin(0.5);
  std::vector<double> weights;
  Vector signal = Vector::Zero(set.ambient_dim());
  for (const Atom& a : atoms) {
    weights.push_back(coin(rng) ? 1.0 : -1.0);
    signal += weights.back() * a.embedding;
  }
  const double norm = signal.norm();
  Rng noise_rng = make_rng(seed, 1);
  Vector target = signal + detail::scaled_noise(signal.size(), noise_level, norm, noise_rng);
  Vector validation = signal + detail::scaled_noise(signal.size(), noise_level, norm, noise_rng);

  const Index n = set.ambient_dim();
  Objective obj = make_least_squares(Matrix::Identity(n, n), target);
  RecoveryInstance inst{set, std::move(atoms), std::move(weights), std::move(signal),
                        std::move(target), std::move(validation), noise_level, seed};
  return {std::move(inst), std::move(obj)};
}

}  // namespace atomgreed

#endif  // ATOMGREED_OBJECTIVES_HPP

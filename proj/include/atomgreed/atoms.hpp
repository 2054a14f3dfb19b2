#ifndef ATOMGREED_ATOMS_HPP
#define ATOMGREED_ATOMS_HPP

// Atomic-set families, their linear selection oracles, enumeration, and
// the closed-form (sparse) atomic condition numbers of each family.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "atomgreed/linalg.hpp"
#include "atomgreed/random.hpp"

namespace atomgreed {

// How much a reported condition number can be trusted.
enum class Certainty { Exact, UpperEstimate, LowerBound };

inline const char* to_string(Certainty c) {
  switch (c) {
    case Certainty::Exact: return "Exact";
    case Certainty::UpperEstimate: return "UpperEstimate";
    case Certainty::LowerBound: return "LowerBound";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Atom tags. Tags are sign-canonical (first nonzero entry positive); the
// embedding of a selected atom carries whatever sign aligns it with the
// gradient.

struct BasisIndex {
  Index index;
};
struct SignPattern {
  std::vector<int> signs;  // entries in {-1, +1}, signs[0] == +1
};
struct RankOnePair {
  Vector u;  // unit, rows
  Vector v;  // unit, cols
};
struct GroupTag {
  Index group;
  std::vector<Index> members;
};
struct TwoOrthoIndex {
  int basis;  // 0: standard basis, 1: psi
  Index index;
};
struct OrthogonalPayload {
  Matrix q;  // orthogonal, unscaled
};
struct ColumnIndex {
  Index column;
};

using AtomTag = std::variant<BasisIndex, SignPattern, RankOnePair, GroupTag,
                             TwoOrthoIndex, OrthogonalPayload, ColumnIndex>;

inline std::string describe(const AtomTag& tag) {
  std::ostringstream os;
  std::visit(
      [&os](const auto& t) {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, BasisIndex>) {
          os << "e" << t.index;
        } else if constexpr (std::is_same_v<T, SignPattern>) {
          os << "sign:";
          for (int s : t.signs) os << (s > 0 ? '+' : '-');
        } else if constexpr (std::is_same_v<T, RankOnePair>) {
          Index iu = 0, iv = 0;
          t.u.cwiseAbs().maxCoeff(&iu);
          t.v.cwiseAbs().maxCoeff(&iv);
          os << "rank1:peak(" << iu << ";" << iv << ")";
        } else if constexpr (std::is_same_v<T, GroupTag>) {
          os << "group" << t.group;
        } else if constexpr (std::is_same_v<T, TwoOrthoIndex>) {
          os << (t.basis == 0 ? "e" : "psi") << t.index;
        } else if constexpr (std::is_same_v<T, OrthogonalPayload>) {
          os << "orth:trace(" << t.q.trace() << ")";
        } else {
          os << "col" << t.column;
        }
      },
      tag);
  return os.str();
}

struct Atom {
  Vector embedding;  // unit norm
  AtomTag tag;
};

// Flips `v` so its first entry with magnitude above 1e-14 is positive.
// Returns the sign that was applied.
inline double canonical_sign(const Vector& v) {
  for (Index i = 0; i < v.size(); ++i)
    if (std::abs(v(i)) > 1e-14) return v(i) < 0 ? -1.0 : 1.0;
  return 1.0;
}

// Vectors spanning the subspace an atom contributes to an active set.
// Group atoms contribute the whole coordinate subspace of the group.
inline std::vector<Vector> spanning_vectors(const Atom& atom) {
  if (const auto* g = std::get_if<GroupTag>(&atom.tag)) {
    std::vector<Vector> out;
    for (Index i : g->members) out.push_back(Vector::Unit(atom.embedding.size(), i));
    return out;
  }
  return {atom.embedding};
}

// ---------------------------------------------------------------------------
// Atomic-set families.

struct StandardBasis {
  Index n;
};
struct RankOne {
  Index rows;
  Index cols;
};
struct GroupSparse {
  Index n;
  std::vector<std::vector<Index>> groups;
};
struct TwoOrtho {
  Matrix psi;  // n x n orthogonal
};
struct SignVectors {
  Index n;
};
struct OrthogonalMatrices {
  Index n;
};
struct FiniteSet {
  Matrix atoms;  // n x m, unit columns
};

using AtomicSetKind = std::variant<StandardBasis, RankOne, GroupSparse,
                                   TwoOrtho, SignVectors, OrthogonalMatrices,
                                   FiniteSet>;

class AtomicSet {
 public:
  static AtomicSet standard_basis(Index n) {
    require_positive(n, "standard_basis");
    return AtomicSet(StandardBasis{n});
  }
  static AtomicSet rank_one(Index rows, Index cols) {
    require_positive(rows, "rank_one");
    require_positive(cols, "rank_one");
    return AtomicSet(RankOne{rows, cols});
  }
  static AtomicSet group_sparse(Index n, std::vector<std::vector<Index>> groups) {
    require_positive(n, "group_sparse");
    std::vector<int> seen(static_cast<std::size_t>(n), 0);
    for (auto& g : groups) {
      if (g.empty()) throw InvalidArgument("group_sparse: empty group");
      std::sort(g.begin(), g.end());
      for (Index i : g) {
        if (i < 0 || i >= n)
          throw InvalidArgument("group_sparse: index out of range");
        if (seen[static_cast<std::size_t>(i)]++)
          throw InvalidArgument("group_sparse: groups overlap");
      }
    }
    for (int s : seen)
      if (s == 0) throw InvalidArgument("group_sparse: groups do not cover [n]");
    return AtomicSet(GroupSparse{n, std::move(groups)});
  }
  static AtomicSet two_ortho(Matrix psi) {
    if (psi.rows() != psi.cols() || psi.rows() == 0)
      throw InvalidArgument("two_ortho: psi must be square");
    const Matrix gram = psi.transpose() * psi;
    if ((gram - Matrix::Identity(psi.rows(), psi.cols())).cwiseAbs().maxCoeff() >= 1e-10)
      throw InvalidArgument("two_ortho: psi is not orthogonal");
    return AtomicSet(TwoOrtho{std::move(psi)});
  }
  static AtomicSet sign_vectors(Index n) {
    require_positive(n, "sign_vectors");
    return AtomicSet(SignVectors{n});
  }
  static AtomicSet orthogonal_matrices(Index n) {
    require_positive(n, "orthogonal_matrices");
    return AtomicSet(OrthogonalMatrices{n});
  }
  static AtomicSet finite_set(Matrix atoms) {
    if (atoms.cols() == 0 || atoms.rows() == 0)
      throw InvalidArgument("finite_set: empty atom matrix");
    for (Index j = 0; j < atoms.cols(); ++j) {
      if (std::abs(atoms.col(j).norm() - 1.0) > 1e-8)
        throw InvalidArgument("finite_set: column " + std::to_string(j) +
                              " is not unit norm");
    }
    return AtomicSet(FiniteSet{std::move(atoms)});
  }

  const AtomicSetKind& kind() const { return kind_; }

  template <class T>
  const T* as() const {
    return std::get_if<T>(&kind_);
  }

  Index ambient_dim() const {
    return std::visit(
        [](const auto& k) -> Index {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, RankOne>) return k.rows * k.cols;
          else if constexpr (std::is_same_v<T, OrthogonalMatrices>) return k.n * k.n;
          else if constexpr (std::is_same_v<T, TwoOrtho>) return k.psi.rows();
          else if constexpr (std::is_same_v<T, FiniteSet>) return k.atoms.rows();
          else return k.n;
        },
        kind_);
  }

  std::string name() const {
    return std::visit(
        [](const auto& k) -> std::string {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, StandardBasis>) return "standard_basis";
          else if constexpr (std::is_same_v<T, RankOne>) return "rank_one";
          else if constexpr (std::is_same_v<T, GroupSparse>) return "group_sparse";
          else if constexpr (std::is_same_v<T, TwoOrtho>) return "two_ortho";
          else if constexpr (std::is_same_v<T, SignVectors>) return "sign_vectors";
          else if constexpr (std::is_same_v<T, OrthogonalMatrices>) return "orthogonal_matrices";
          else return "finite_set";
        },
        kind_);
  }

  bool enumerable() const {
    return !as<RankOne>() && !as<OrthogonalMatrices>();
  }

  // Number of atoms up to sign; nullopt for continuous families.
  std::optional<std::uint64_t> atom_count() const {
    if (const auto* k = as<StandardBasis>()) return static_cast<std::uint64_t>(k->n);
    if (const auto* k = as<GroupSparse>()) return k->groups.size();
    if (const auto* k = as<TwoOrtho>()) return 2 * static_cast<std::uint64_t>(k->psi.rows());
    if (const auto* k = as<SignVectors>())
      return k->n > 63 ? UINT64_MAX : (std::uint64_t{1} << (k->n - 1));
    if (const auto* k = as<FiniteSet>()) return static_cast<std::uint64_t>(k->atoms.cols());
    return std::nullopt;
  }

 private:
  explicit AtomicSet(AtomicSetKind kind) : kind_(std::move(kind)) {}
  static void require_positive(Index n, const char* who) {
    if (n <= 0) throw InvalidArgument(std::string(who) + ": dimension must be positive");
  }

  AtomicSetKind kind_;
};

// ---------------------------------------------------------------------------
// Selection.

namespace detail {

inline void check_gradient(const AtomicSet& set, const Vector& g) {
  if (g.size() != set.ambient_dim()) {
    throw DimensionMismatch("select_atom: gradient has dimension " +
                            std::to_string(g.size()) + ", atomic set lives in " +
                            std::to_string(set.ambient_dim()));
  }
  if (!(g.norm() > 0)) throw ZeroGradient("select_atom: zero gradient");
}

// First index of the maximum; strict comparison keeps ties at the lowest index.
inline Index argmax_abs(const Vector& v) {
  Index best = 0;
  for (Index i = 1; i < v.size(); ++i)
    if (std::abs(v(i)) > std::abs(v(best))) best = i;
  return best;
}

inline Atom signed_unit(Index n, Index i, double sign, AtomTag tag) {
  Vector e = Vector::Zero(n);
  e(i) = sign < 0 ? -1.0 : 1.0;
  return Atom{std::move(e), std::move(tag)};
}

inline Atom align(Atom atom, const Vector& g) {
  if (atom.embedding.dot(g) < 0) atom.embedding = -atom.embedding;
  return atom;
}

// Top singular pair of a matrix by power iteration on m^T m.
inline std::pair<Vector, Vector> top_singular_pair_power(const Matrix& m) {
  Rng rng(derive_seed(static_cast<std::uint64_t>(m.rows()) * 1000003u +
                          static_cast<std::uint64_t>(m.cols()),
                      0));
  Vector v = random_unit(m.cols(), rng);
  const Matrix gram = m.transpose() * m;
  double change = INFINITY;
  for (int it = 0; it < 5000; ++it) {
    Vector next = gram * v;
    const double norm = next.norm();
    if (norm == 0) break;
    next /= norm;
    change = (next - v).norm();
    v = next;
    if (change < 1e-9) {
      Vector u = m * v;
      return {u / u.norm(), v};
    }
  }
  throw NonConvergence("rank-one selection: power iteration did not converge", change);
}

inline Atom make_rank_one_atom(Vector u, Vector v) {
  if (canonical_sign(u) < 0) {
    u = -u;
    v = -v;
  }
  const Matrix outer = u * v.transpose();
  return Atom{flatten(outer), RankOnePair{std::move(u), std::move(v)}};
}

inline Atom make_sign_atom(std::vector<int> signs) {
  const Index n = static_cast<Index>(signs.size());
  Vector e(n);
  for (Index i = 0; i < n; ++i) e(i) = signs[static_cast<std::size_t>(i)];
  e /= std::sqrt(static_cast<double>(n));
  if (signs.front() < 0)
    for (int& s : signs) s = -s;
  return Atom{std::move(e), SignPattern{std::move(signs)}};
}

inline Atom make_orthogonal_atom(Matrix q) {
  if (canonical_sign(flatten(q)) < 0) q = -q;
  Vector e = flatten(q) / std::sqrt(static_cast<double>(q.rows()));
  return Atom{std::move(e), OrthogonalPayload{std::move(q)}};
}

inline Atom make_group_atom(const GroupSparse& k, Index group, const Vector& g) {
  Vector e = Vector::Zero(k.n);
  for (Index i : k.groups[static_cast<std::size_t>(group)]) e(i) = g(i);
  const double norm = e.norm();
  if (norm > 0) {
    e /= norm;
  } else {
    for (Index i : k.groups[static_cast<std::size_t>(group)]) e(i) = 1.0;
    e /= e.norm();
  }
  return Atom{std::move(e), GroupTag{group, k.groups[static_cast<std::size_t>(group)]}};
}

}  // namespace detail

// Linear selection oracle: the atom maximizing |<g, a>|, signed so that
// <g, atom> >= 0. The exact maximizer satisfies the beta-precision
// condition for every beta in (0, 1].
inline Atom select_atom(const AtomicSet& set, const Vector& g, double beta = 1.0) {
  if (!(beta > 0 && beta <= 1)) throw InvalidArgument("select_atom: beta must lie in (0,1]");
  detail::check_gradient(set, g);
  return std::visit(
      [&g](const auto& k) -> Atom {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, StandardBasis>) {
          const Index i = detail::argmax_abs(g);
          return detail::signed_unit(k.n, i, g(i), BasisIndex{i});
        } else if constexpr (std::is_same_v<T, SignVectors>) {
          std::vector<int> s(static_cast<std::size_t>(k.n));
          for (Index i = 0; i < k.n; ++i) s[static_cast<std::size_t>(i)] = g(i) < 0 ? -1 : 1;
          return detail::make_sign_atom(std::move(s));
        } else if constexpr (std::is_same_v<T, RankOne>) {
          const Matrix gm = reshape(g, k.rows, k.cols);
          Vector u, v;
          if (std::min(k.rows, k.cols) <= 64) {
            const Svd s = svd(gm);
            u = s.u.col(0);
            v = s.v.col(0);
          } else {
            std::tie(u, v) = detail::top_singular_pair_power(gm);
          }
          return detail::align(detail::make_rank_one_atom(u, v), g);
        } else if constexpr (std::is_same_v<T, OrthogonalMatrices>) {
          const Svd s = svd(reshape(g, k.n, k.n));
          const Matrix polar = s.u * s.v.transpose();
          return detail::align(detail::make_orthogonal_atom(polar), g);
        } else if constexpr (std::is_same_v<T, TwoOrtho>) {
          const Index n = k.psi.rows();
          const Vector coeffs = k.psi.transpose() * g;
          const Index i = detail::argmax_abs(g);
          const Index j = detail::argmax_abs(coeffs);
          if (std::abs(g(i)) >= std::abs(coeffs(j)))
            return detail::signed_unit(n, i, g(i), TwoOrthoIndex{0, i});
          Vector psi = k.psi.col(j) * canonical_sign(k.psi.col(j));
          return detail::align(Atom{std::move(psi), TwoOrthoIndex{1, j}}, g);
        } else if constexpr (std::is_same_v<T, GroupSparse>) {
          Index best = 0;
          double best_norm = -1;
          for (std::size_t p = 0; p < k.groups.size(); ++p) {
            double sq = 0;
            for (Index i : k.groups[p]) sq += g(i) * g(i);
            if (sq > best_norm) {
              best_norm = sq;
              best = static_cast<Index>(p);
            }
          }
          return detail::make_group_atom(k, best, g);
        } else {
          const Vector scores = k.atoms.transpose() * g;
          const Index j = detail::argmax_abs(scores);
          Vector col = k.atoms.col(j) * canonical_sign(k.atoms.col(j));
          return detail::align(Atom{std::move(col), ColumnIndex{j}}, g);
        }
      },
      set.kind());
}

// Every atom up to sign, in canonical order; nullopt for the continuous
// families. Group atoms are represented by their normalized indicator and
// carry the member list in their tag.
inline std::optional<std::vector<Atom>> enumerate(const AtomicSet& set) {
  return std::visit(
      [](const auto& k) -> std::optional<std::vector<Atom>> {
        using T = std::decay_t<decltype(k)>;
        std::vector<Atom> out;
        if constexpr (std::is_same_v<T, StandardBasis>) {
          for (Index i = 0; i < k.n; ++i) out.push_back(detail::signed_unit(k.n, i, 1, BasisIndex{i}));
        } else if constexpr (std::is_same_v<T, SignVectors>) {
          if (k.n > 20) throw CapExceeded("enumerate: sign vectors limited to n <= 20");
          const std::uint64_t count = std::uint64_t{1} << (k.n - 1);
          out.reserve(count);
          for (std::uint64_t mask = 0; mask < count; ++mask) {
            std::vector<int> s(static_cast<std::size_t>(k.n), 1);
            for (Index i = 1; i < k.n; ++i)
              if ((mask >> (k.n - 1 - i)) & 1u) s[static_cast<std::size_t>(i)] = -1;
            out.push_back(detail::make_sign_atom(std::move(s)));
          }
        } else if constexpr (std::is_same_v<T, TwoOrtho>) {
          const Index n = k.psi.rows();
          for (Index i = 0; i < n; ++i) out.push_back(detail::signed_unit(n, i, 1, TwoOrthoIndex{0, i}));
          for (Index j = 0; j < n; ++j)
            out.push_back(Atom{k.psi.col(j) * canonical_sign(k.psi.col(j)), TwoOrthoIndex{1, j}});
        } else if constexpr (std::is_same_v<T, GroupSparse>) {
          for (std::size_t p = 0; p < k.groups.size(); ++p)
            out.push_back(detail::make_group_atom(k, static_cast<Index>(p), Vector::Zero(k.n)));
        } else if constexpr (std::is_same_v<T, FiniteSet>) {
          for (Index j = 0; j < k.atoms.cols(); ++j)
            out.push_back(Atom{k.atoms.col(j) * canonical_sign(k.atoms.col(j)), ColumnIndex{j}});
        } else {
          return std::nullopt;
        }
        return out;
      },
      set.kind());
}

// Alignment score of an atom with g: |<g, a>| for vector atoms, the norm of
// the projection onto the group for group atoms.
inline double selection_score(const Atom& atom, const Vector& g) {
  if (const auto* grp = std::get_if<GroupTag>(&atom.tag)) {
    double sq = 0;
    for (Index i : grp->members) sq += g(i) * g(i);
    return std::sqrt(sq);
  }
  return std::abs(atom.embedding.dot(g));
}

// Re-targets an enumerated atom at gradient g: vector atoms are sign
// aligned, group atoms become the normalized projection of g.
inline Atom orient(const AtomicSet& set, Atom atom, const Vector& g) {
  if (const auto* grp = std::get_if<GroupTag>(&atom.tag)) {
    return detail::make_group_atom(*set.as<GroupSparse>(), grp->group, g);
  }
  return detail::align(std::move(atom), g);
}

// Degraded oracle for enumerable sets: among atoms still meeting
// |<g,v>| >= beta * max_a |<g,a>|, returns the one with the smallest score.
inline Atom adversarial_select(const AtomicSet& set, const Vector& g, double beta) {
  if (!(beta > 0 && beta <= 1)) throw InvalidArgument("adversarial_select: beta must lie in (0,1]");
  detail::check_gradient(set, g);
  auto atoms = enumerate(set);
  if (!atoms) throw NotEnumerable("adversarial_select: " + set.name() + " is not enumerable");
  std::vector<double> scores;
  scores.reserve(atoms->size());
  double best = 0;
  for (const Atom& a : *atoms) {
    scores.push_back(selection_score(a, g));
    best = std::max(best, scores.back());
  }
  const double threshold = beta * best * (1 - 1e-12);
  std::size_t pick = 0;
  double worst = INFINITY;
  for (std::size_t i = 0; i < atoms->size(); ++i) {
    if (scores[i] >= threshold && scores[i] < worst) {
      worst = scores[i];
      pick = i;
    }
  }
  return orient(set, std::move((*atoms)[pick]), g);
}

// A random atom of the family (used to plant sparse signals).
inline Atom random_atom(const AtomicSet& set, Rng& rng) {
  return std::visit(
      [&rng, &set](const auto& k) -> Atom {
        using T = std::decay_t<decltype(k)>;
        auto pick = [&rng](Index n) {
          return std::uniform_int_distribution<Index>(0, n - 1)(rng);
        };
        if constexpr (std::is_same_v<T, StandardBasis>) {
          const Index i = pick(k.n);
          return detail::signed_unit(k.n, i, 1, BasisIndex{i});
        } else if constexpr (std::is_same_v<T, SignVectors>) {
          std::vector<int> s(static_cast<std::size_t>(k.n));
          std::bernoulli_distribution coin(0.5);
          for (auto& x : s) x = coin(rng) ? 1 : -1;
          return detail::make_sign_atom(std::move(s));
        } else if constexpr (std::is_same_v<T, RankOne>) {
          Vector u = random_unit(k.rows, rng);
          Vector v = random_unit(k.cols, rng);
          return detail::make_rank_one_atom(std::move(u), std::move(v));
        } else if constexpr (std::is_same_v<T, OrthogonalMatrices>) {
          return detail::make_orthogonal_atom(random_orthogonal(k.n, rng));
        } else if constexpr (std::is_same_v<T, TwoOrtho>) {
          const Index n = k.psi.rows();
          const Index i = pick(2 * n);
          if (i < n) return detail::signed_unit(n, i, 1, TwoOrthoIndex{0, i});
          return Atom{k.psi.col(i - n) * canonical_sign(k.psi.col(i - n)), TwoOrthoIndex{1, i - n}};
        } else if constexpr (std::is_same_v<T, GroupSparse>) {
          const Index p = pick(static_cast<Index>(k.groups.size()));
          Vector g = Vector::Zero(k.n);
          for (Index i : k.groups[static_cast<std::size_t>(p)]) g(i) = std::normal_distribution<double>()(rng);
          return detail::make_group_atom(k, p, g);
        } else {
          const Index j = pick(k.atoms.cols());
          (void)set;
          return Atom{k.atoms.col(j) * canonical_sign(k.atoms.col(j)), ColumnIndex{j}};
        }
      },
      set.kind());
}

// Atoms a, b coincide up to sign (group atoms: same group).
inline bool same_atom(const Atom& a, const Atom& b) {
  const auto* ga = std::get_if<GroupTag>(&a.tag);
  const auto* gb = std::get_if<GroupTag>(&b.tag);
  if (ga || gb) return ga && gb && ga->group == gb->group;
  return std::abs(a.embedding.dot(b.embedding)) > 1 - 1e-9;
}

// ---------------------------------------------------------------------------
// Closed-form condition numbers.

struct ThetaValue {
  double value;
  Certainty flag;
};

inline std::optional<ThetaValue> theta_closed_form(const AtomicSet& set) {
  auto inv_sqrt = [](double x) { return 1.0 / std::sqrt(x); };
  if (const auto* k = set.as<StandardBasis>()) return ThetaValue{inv_sqrt(k->n), Certainty::Exact};
  if (const auto* k = set.as<RankOne>())
    return ThetaValue{inv_sqrt(std::min(k->rows, k->cols)), Certainty::Exact};
  if (const auto* k = set.as<GroupSparse>())
    return ThetaValue{inv_sqrt(static_cast<double>(k->groups.size())), Certainty::Exact};
  if (const auto* k = set.as<SignVectors>()) return ThetaValue{inv_sqrt(k->n), Certainty::Exact};
  if (const auto* k = set.as<OrthogonalMatrices>()) return ThetaValue{inv_sqrt(k->n), Certainty::Exact};
  if (const auto* k = set.as<TwoOrtho>())
    return ThetaValue{inv_sqrt(k->psi.rows()), Certainty::LowerBound};
  return std::nullopt;
}

inline double mutual_coherence(const Matrix& b1, const Matrix& b2) {
  if (b1.rows() != b2.rows())
    throw DimensionMismatch("mutual_coherence: bases have different row counts");
  if (b1.cols() == 0 || b2.cols() == 0) return 0.0;
  return (b1.transpose() * b2).cwiseAbs().maxCoeff();
}

inline std::optional<ThetaValue> theta_r_closed_form(const AtomicSet& set, Index r) {
  if (r < 1) throw InvalidArgument("theta_r_closed_form: r must be >= 1");
  auto capped = [r](Index cap) {
    return ThetaValue{1.0 / std::sqrt(static_cast<double>(std::min(r, cap))), Certainty::Exact};
  };
  if (const auto* k = set.as<StandardBasis>()) return capped(k->n);
  if (const auto* k = set.as<RankOne>()) return capped(std::min(k->rows, k->cols));
  if (const auto* k = set.as<GroupSparse>()) return capped(static_cast<Index>(k->groups.size()));
  if (const auto* k = set.as<SignVectors>()) return ThetaValue{1.0 / std::sqrt(k->n), Certainty::Exact};
  if (const auto* k = set.as<OrthogonalMatrices>()) return ThetaValue{1.0 / std::sqrt(k->n), Certainty::Exact};
  if (const auto* k = set.as<TwoOrtho>()) {
    const Index n = k->psi.rows();
    const double mu = mutual_coherence(Matrix::Identity(n, n), k->psi);
    if (static_cast<double>(r) * mu <= 1.0 + 1e-9)
      return ThetaValue{1.0 / std::sqrt(10.0 * static_cast<double>(r)), Certainty::LowerBound};
    // Outside the coherence regime only theta_r >= theta >= n^{-1/2} survives.
    return ThetaValue{1.0 / std::sqrt(static_cast<double>(n)), Certainty::LowerBound};
  }
  return std::nullopt;
}

// Scaled Hadamard basis H / sqrt(n). Powers of four use Kronecker powers of
// the regular 4x4 matrix J - 2I (all row and column sums equal); other
// powers of two use the Sylvester construction.
inline Matrix make_hadamard(Index n) {
  if (n < 1 || (n & (n - 1)) != 0)
    throw InvalidArgument("make_hadamard: n must be a power of two, got " + std::to_string(n));
  Matrix h = Matrix::Ones(1, 1);
  Index size = 1;
  const Matrix regular4 = Matrix::Ones(4, 4) - 2.0 * Matrix::Identity(4, 4);
  Matrix sylvester2(2, 2);
  sylvester2 << 1, 1, 1, -1;
  auto kron = [](const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Index i = 0; i < a.rows(); ++i)
      for (Index j = 0; j < a.cols(); ++j)
        out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
  };
  while (size * 4 <= n) {
    h = kron(h, regular4);
    size *= 4;
  }
  if (size < n) h = kron(h, sylvester2);
  return h / std::sqrt(static_cast<double>(n));
}

}  // namespace atomgreed

#endif  // ATOMGREED_ATOMS_HPP

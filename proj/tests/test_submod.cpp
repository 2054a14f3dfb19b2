#include <gtest/gtest.h>

#include <cmath>
#include <thread>

#include "atomgreed/submod.hpp"
#include "oracles.hpp"

using namespace atomgreed;

namespace {

SetFunction modular(std::vector<double> w) {
  const int p = static_cast<int>(w.size());
  std::vector<double> t(std::size_t{1} << p, 0.0);
  for (Subset s = 0; s < t.size(); ++s)
    for (int i : members(s)) t[s] += w[static_cast<std::size_t>(i)];
  return tabulated(p, std::move(t));
}

SetFunction sqrt_card(int p) {
  std::vector<double> t(std::size_t{1} << p);
  for (Subset s = 0; s < t.size(); ++s) t[s] = std::sqrt(static_cast<double>(cardinality(s)));
  return tabulated(p, std::move(t));
}

// sqrt of a positive modular function: monotone submodular.
SetFunction concave_of_modular(std::uint64_t seed, int p) {
  Rng rng(seed);
  std::uniform_real_distribution<double> unif(0.1, 1.0);
  std::vector<double> w(static_cast<std::size_t>(p));
  for (double& x : w) x = unif(rng);
  std::vector<double> t(std::size_t{1} << p, 0.0);
  for (Subset s = 0; s < t.size(); ++s) {
    double sum = 0;
    for (int i : members(s)) sum += w[static_cast<std::size_t>(i)];
    t[s] = std::sqrt(sum);
  }
  return tabulated(p, std::move(t));
}

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Index>(xs.size()));
  Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

}  // namespace

TEST(SubsetHelpers, Basics) {
  EXPECT_EQ(cardinality(0b1011u), 3);
  EXPECT_TRUE(contains(0b100u, 2));
  EXPECT_EQ(with(0b1u, 3), 0b1001u);
  EXPECT_EQ(full_set(4), 0b1111u);
  EXPECT_EQ(members(0b1010u), (std::vector<int>{1, 3}));
}

TEST(GFromObjective, IdentityDesign) {
  const Objective f = make_least_squares(Matrix::Identity(3, 3), vec({1, 2, 3}));
  const SetFunction g = g_from_objective(f, AtomicSet::standard_basis(3));
  EXPECT_EQ(g.p(), 3);
  EXPECT_NEAR(g(0b100u), 4.5, 1e-12);
  EXPECT_NEAR(g(0b111u), 7.0, 1e-12);
  EXPECT_EQ(g(0), 0.0);
  EXPECT_EQ(g.kind(), SetFunctionKind::FromObjective);
}

TEST(GFromObjective, MonotoneOnRandomInstances) {
  Rng rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const Objective f = make_least_squares(gaussian_matrix(8, 5, rng), gaussian_vector(8, rng));
    const SetFunction g = g_from_objective(f, AtomicSet::standard_basis(5));
    EXPECT_TRUE(is_monotone(g, 1e-10));
    for (Subset s = 0; s < 32; ++s) {
      std::vector<int> idx = members(s);
      EXPECT_NEAR(g(s), oracle::support_gain(f.quadratic->design, f.quadratic->target, idx), 1e-9);
    }
  }
}

TEST(GFromObjective, Errors) {
  const Objective f = make_least_squares(Matrix::Identity(4, 4), Vector::Ones(4));
  EXPECT_THROW(g_from_objective(f, AtomicSet::rank_one(2, 2)), NotEnumerable);
  const Objective big = make_least_squares(Matrix::Identity(17, 17), Vector::Ones(17));
  EXPECT_THROW(g_from_objective(big, AtomicSet::standard_basis(17)), CapExceeded);
}

TEST(SetFunction, ConcurrentEvaluationIsConsistent) {
  Rng rng(1);
  const Objective f = make_least_squares(gaussian_matrix(10, 8, rng), gaussian_vector(10, rng));
  const SetFunction g = g_from_objective(f, AtomicSet::standard_basis(8));
  std::vector<std::vector<double>> seen(4);
  std::vector<std::thread> pool;
  for (int w = 0; w < 4; ++w)
    pool.emplace_back([&, w] {
      for (Subset s = 0; s < 256; ++s) seen[static_cast<std::size_t>(w)].push_back(g((s * 37 + w) % 256));
    });
  for (auto& t : pool) t.join();
  for (int w = 0; w < 4; ++w)
    for (Subset s = 0; s < 256; ++s)
      EXPECT_EQ(seen[static_cast<std::size_t>(w)][s], g((s * 37 + static_cast<Subset>(w)) % 256));
}

TEST(Tabulated, Validation) {
  EXPECT_THROW(tabulated(2, {0, 1, 2}), InvalidArgument);
  EXPECT_THROW(tabulated(17, {}), InvalidArgument);
  const SetFunction g = tabulated(1, {0, 2});
  EXPECT_THROW(g(0b10u), InvalidArgument);
}

TEST(Gamma, ModularIsOne) {
  const SetFunction g = modular({0.5, 2, 1, 3});
  for (Subset u : {0u, 0b1u, 0b101u})
    for (int k = 1; k <= 3; ++k) EXPECT_NEAR(*gamma_disjoint(g, u, k).value, 1.0, 1e-12);
}

TEST(Gamma, SqrtCardinality) {
  const auto r = gamma_disjoint(sqrt_card(3), 0, 2);
  EXPECT_NEAR(*r.value, 1.0, 1e-12);
  EXPECT_EQ(cardinality(r.second), 1);
}

TEST(Gamma, AtLeastRestrictedConditionRatio) {
  Rng rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    const Index n = 6;
    const Objective f = make_least_squares(gaussian_matrix(10, n, rng), gaussian_vector(10, rng));
    const auto set = AtomicSet::standard_basis(n);
    const SetFunction g = g_from_objective(f, set);
    for (Subset u : {0u, 0b1u, 0b110u}) {
      for (int k = 1; k <= 3; ++k) {
        const Index size = cardinality(u) + k;
        const auto rc = restricted_constants(f, set, size);
        EXPECT_GE(*gamma_disjoint(g, u, k).value, rc.mu / rc.lip - 1e-9);
      }
    }
  }
}

TEST(Gamma, SubmodularAtLeastOne) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const SetFunction g = concave_of_modular(seed, 5);
    ASSERT_TRUE(is_submodular(g));
    for (Subset u : {0u, 0b11u})
      for (int k = 1; k <= 3; ++k) EXPECT_GE(*gamma_disjoint(g, u, k).value, 1.0 - 1e-12);
  }
}

TEST(Gamma, MatchesNaiveEnumeration) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const int p = 3 + static_cast<int>(seed % 4);
    const SetFunction g = random_monotone(seed, p);
    const auto t = g.tabulate();
    for (Subset u : {0u, 0b1u, 0b11u, 0b101u}) {
      for (int k = 1; k <= 3; ++k) {
        const auto naive = oracle::naive_gamma(t, p, u, k);
        const auto got = gamma_disjoint(g, u, k);
        ASSERT_EQ(naive.defined, got.value.has_value());
        if (naive.defined) EXPECT_NEAR(*got.value, naive.value, 1e-12);
      }
    }
  }
}

TEST(Gamma, VacuousPairsAreSkipped) {
  const auto none = gamma_disjoint(tabulated(2, {0, 0, 0, 0}), 0b1u, 2);
  EXPECT_FALSE(none.value.has_value());
  EXPECT_GT(none.skipped_pairs, 0u);
  // element 1 never adds value
  const auto r = gamma_disjoint(tabulated(2, {0, 1, 0, 1}), 0, 1);
  EXPECT_NEAR(*r.value, 1.0, 1e-12);
  EXPECT_EQ(r.skipped_pairs, 1u);
  EXPECT_FALSE(kappa_subset(tabulated(2, {0, 0, 0, 0}), 0, 1).value.has_value());
}

TEST(Kappa, ModularIsOne) {
  const SetFunction g = modular({0.5, 2, 1, 3});
  for (Subset u : {0u, 0b10u})
    for (int k = 1; k <= 2; ++k) EXPECT_NEAR(*kappa_subset(g, u, k).value, 1.0, 1e-12);
  EXPECT_NEAR(*kappa_lattice(g).value, 1.0, 1e-12);
}

TEST(Kappa, SqrtCardinality) {
  EXPECT_NEAR(*kappa_subset(sqrt_card(3), 0, 1).value, 1.0, 1e-12);
}

TEST(Kappa, CanExceedGammaWhenBaseLiesInsideU) {
  // U = {0,1}: gamma is attained at P = {} with Q = U, a pair kappa never sees
  const SetFunction g = tabulated(3, {0, 0.1, 0.1, 1, 1, 1.1, 1.1, 2});
  ASSERT_TRUE(is_monotone(g));
  const auto gm = gamma_disjoint(g, 0b011, 2);
  const auto kp = kappa_subset(g, 0b011, 2);
  EXPECT_NEAR(*gm.value, 0.2, 1e-12);
  EXPECT_EQ(gm.first, 0u);
  EXPECT_EQ(gm.second, 0b011u);
  EXPECT_NEAR(*kp.value, 1.0, 1e-12);
}

TEST(Kappa, BoundedByGammaAtFullBase) {
  // telescoping over U + x_1 + ... + x_j only needs supersets of U, so kappa
  // is at most every ratio gamma_{U,Q} with Q outside U
  int compared = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const int p = 2 + static_cast<int>(seed % 5);
    const int k = 1 + static_cast<int>(seed % 3);
    const SetFunction g = random_monotone(seed, p);
    const auto t = g.tabulate();
    Rng rng(seed);
    const Subset u = static_cast<Subset>(rng() % (Subset{1} << (p - 1)));
    const auto kp = kappa_subset(g, u, k);
    if (!kp.value) continue;
    const Subset rest = full_set(p) & ~u;
    for (Subset q = rest; q; q = (q - 1) & rest) {
      if (cardinality(q) > k) continue;
      const double den = t[u | q] - t[u];
      if (!(den > 1e-12)) continue;
      double num = 0;
      for (int i : members(q)) num += t[with(u, i)] - t[u];
      EXPECT_LE(*kp.value, num / den + 1e-9) << "seed " << seed;
      ++compared;
    }
  }
  EXPECT_GT(compared, 200);
}

TEST(Kappa, MatchesNaiveEnumeration) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const int p = 3 + static_cast<int>(seed % 4);
    const SetFunction g = random_monotone(seed + 100, p);
    const auto t = g.tabulate();
    for (Subset u : {0u, 0b1u, 0b11u, 0b101u}) {
      for (int k = 1; k <= 2; ++k) {
        const auto naive = oracle::naive_kappa(t, p, u, k);
        const auto got = kappa_subset(g, u, k);
        ASSERT_EQ(naive.defined, got.value.has_value());
        if (naive.defined) EXPECT_NEAR(*got.value, naive.value, 1e-12);
      }
    }
  }
}

TEST(Kappa, FixedBaseReadingNeverBelowDisplay) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const SetFunction g = random_monotone(seed, 5);
    const auto a = kappa_subset(g, 0b11u, 2, KappaReading::Display);
    const auto b = kappa_subset(g, 0b11u, 2, KappaReading::FixedBase);
    EXPECT_GE(*b.value, *a.value - 1e-12);
  }
}

TEST(Kappa, WitnessReproducesValue) {
  const SetFunction g = random_monotone(4, 5);
  const auto r = kappa_subset(g, 0b1u, 2);
  ASSERT_TRUE(r.value);
  const double num = g(with(r.first, r.index)) - g(r.first);
  const double den = g(with(r.second, r.index)) - g(r.second);
  EXPECT_NEAR(num / den, *r.value, 1e-12);
}

TEST(Ratios, Caps) {
  const SetFunction big = tabulated(13, std::vector<double>(std::size_t{1} << 13, 0.0));
  EXPECT_THROW(gamma_disjoint(big, 0, 1), CapExceeded);
  EXPECT_THROW(kappa_subset(sqrt_card(3), 0, 0), InvalidArgument);
}

TEST(Sigmoid, ClosedFormValue) {
  const SetFunction g = make_sigmoid_composition(Matrix::Identity(2, 2), {1, 1});
  EXPECT_EQ(g(0), 0.0);
  EXPECT_NEAR(g(0b01u), 0.088835, 1e-6);
  const double s1 = logistic(1.0);
  EXPECT_NEAR(g(0b01u), (-0.5 * (s1 * s1 + 0.25) + s1 + 0.5) - 0.75, 1e-15);
  EXPECT_GE(g(0b11u), g(0b01u));
  EXPECT_GE(g(0b01u), 0.0);
}

TEST(Sigmoid, UnimodalPeak) {
  EXPECT_DOUBLE_EQ(unimodal(2.0, 2.0), 1.0);
  EXPECT_EQ(unimodal(0.0, 2.0), 0.0);
  EXPECT_LT(unimodal(1.5, 2.0), 1.0);
  EXPECT_LT(unimodal(2.5, 2.0), 1.0);
}

TEST(Sigmoid, RandomInstancesMonotoneWithUnitKappa) {
  Rng rng(11);
  std::uniform_real_distribution<double> peak(0.5, 3.0);
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = 2 + trial % 5;
    const Matrix q = random_doubly_stochastic(n, rng);
    EXPECT_NO_THROW(check_doubly_stochastic(q));
    std::vector<double> peaks(static_cast<std::size_t>(n));
    for (double& p : peaks) p = peak(rng);
    const SetFunction g = make_sigmoid_composition(q, peaks);
    EXPECT_TRUE(is_monotone(g));
    EXPECT_GE(*kappa_lattice(g).value, 1 - 1e-9);
  }
}

TEST(Sigmoid, Validation) {
  Matrix q(2, 2);
  q << 0.5, 0.6, 0.6, 0.5;
  EXPECT_THROW(make_sigmoid_composition(q, {1, 1}), InvalidArgument);
  EXPECT_THROW(make_sigmoid_composition(Matrix::Identity(2, 2), {1}), DimensionMismatch);
  EXPECT_THROW(make_sigmoid_composition(Matrix::Identity(2, 2), {1, 0}), InvalidArgument);
}

TEST(SetGreedy, ModularPicksHeaviest) {
  const SetFunction g = modular({3, 1, 2});
  const auto tr = set_greedy(g, 2);
  EXPECT_EQ(tr.prefixes.back(), 0b101u);
  EXPECT_DOUBLE_EQ(tr.values.back(), 5.0);
  EXPECT_EQ(tr.picks, (std::vector<int>{0, 2}));
  for (int r = 0; r <= 3; ++r) EXPECT_DOUBLE_EQ(set_greedy(g, r).values.back(), brute_force_opt(g, r).value);
}

TEST(SetGreedy, ValuesNondecreasing) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto tr = set_greedy(random_monotone(seed, 7), 5);
    for (std::size_t i = 1; i < tr.values.size(); ++i) EXPECT_GE(tr.values[i], tr.values[i - 1]);
  }
}

TEST(SetGreedy, PerStepInequalityAndFinalBound) {
  const int p = 8, r = 3;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const SetFunction g = random_monotone(seed, p);
    const auto tr = set_greedy(g, r);
    const double opt = brute_force_opt(g, r).value;
    double kappa = INFINITY;
    for (int i = 0; i < r; ++i) {
      const double ki = *kappa_subset(g, tr.prefixes[static_cast<std::size_t>(i)], r).value;
      kappa = std::min(kappa, ki);
      const double gain = tr.values[static_cast<std::size_t>(i + 1)] - tr.values[static_cast<std::size_t>(i)];
      EXPECT_LE(opt, tr.values[static_cast<std::size_t>(i)] + (r / ki) * gain + 1e-9);
    }
    EXPECT_GE(tr.values.back(), wksub_bound(kappa, r, r).fraction * opt - 1e-9);
  }
}

TEST(BruteForceOpt, Examples) {
  const auto m = brute_force_opt(modular({3, 1, 2}), 2);
  EXPECT_EQ(m.subset, 0b101u);
  EXPECT_DOUBLE_EQ(m.value, 5.0);
  const Objective f = make_least_squares(Matrix::Identity(3, 3), vec({1, 2, 3}));
  const auto o = brute_force_opt(g_from_objective(f, AtomicSet::standard_basis(3)), 1);
  EXPECT_EQ(o.subset, 0b100u);
  EXPECT_NEAR(o.value, 4.5, 1e-12);
}

TEST(RandomMonotone, ModularWhenFirstOrder) {
  const SetFunction g = random_monotone(5, 5, 1);
  EXPECT_NEAR(*gamma_disjoint(g, 0b1u, 2).value, 1.0, 1e-12);
  EXPECT_NEAR(*kappa_subset(g, 0b1u, 2).value, 1.0, 1e-12);
}

TEST(RandomMonotone, MonotoneScaledDeterministic) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const SetFunction g = random_monotone(seed, 6);
    EXPECT_EQ(g(0), 0.0);
    EXPECT_TRUE(is_monotone(g));
    EXPECT_EQ(g.tabulate(), random_monotone(seed, 6).tabulate());
  }
  EXPECT_THROW(random_monotone(0, 13), InvalidArgument);
}

// Atomic condition numbers of a clean and a slightly corrupted basis, plus
// a random dictionary, using the exact and local-search estimators.

#include <cstdio>

#include "atomgreed/atomgreed.hpp"

using namespace atomgreed;

namespace {

void report(const char* name, const Matrix& a) {
  const ConditionEstimate exact = theta_exact_small(a);
  const ConditionEstimate local = theta_local_search(a);
  const ConditionEstimate pairs = theta_r_bruteforce(a, 2);
  const Diagnostics d = diagnostics(a);
  std::printf("%-10s theta exact %.6f  local %.6f  theta_2 %.6f (%s)  coherence %.3f  sigma_min %.3f\n", name,
              exact.theta_hat, local.theta_hat, pairs.theta_hat, to_string(pairs.flag), d.mean_coherence,
              d.sigma_min);
}

}  // namespace

int main() {
  const Index n = 5;
  report("identity", Matrix::Identity(n, n));

  Matrix corrupted(n, n + 1);
  corrupted.leftCols(n) = Matrix::Identity(n, n);
  corrupted.col(n) = (Vector::Unit(n, 0) + 1e-3 * Vector::Ones(n)).normalized();
  report("corrupted", corrupted);

  Rng rng = make_rng(7, 0);
  report("gaussian", normalize_columns(gaussian_matrix(n, 10, rng)));
}

// Plants a 5-sparse signal in R^100, adds 10% noise and recovers it with
// OMPSel greedy, printing the trace and the guarantee curve side by side.

#include <cstdio>
#include <iostream>

#include "atomgreed/atomgreed.hpp"

using namespace atomgreed;

int main() {
  const auto set = AtomicSet::standard_basis(100);
  const auto [inst, f] = make_recovery_instance(set, 5, 0.1, 42);
  const double reference = refit(f, inst.true_atoms).g_value;

  GreedyOptions opts;
  const ThetaValue theta = *theta_r_closed_form(set, 10);
  opts.bound = BoundParams{1.0, theta.value, theta.flag, f.mu / f.lip, 5};
  opts.reference_value = reference;
  const SolveTrace tr = greedy(set, f, 5, opts);

  std::printf("planted:");
  for (const Atom& a : inst.true_atoms) std::printf(" %s", describe(a.tag).c_str());
  std::printf("\nreference g = %.6f (%s)\n", reference, to_string(label_for(theta.flag)));
  std::printf("%3s %6s %12s %12s\n", "t", "atom", "g", "bound");
  for (const auto& rec : tr.iterations)
    std::printf("%3lld %6s %12.6f %12.6f\n", static_cast<long long>(rec.t), rec.atom_tag.c_str(), rec.g_value,
                rec.bound_value);
  std::cout << "stop: " << tr.stop_reason << "\n";
}

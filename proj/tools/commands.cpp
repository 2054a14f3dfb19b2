#include "commands.hpp"

#include <algorithm>
#include <cctype>
#include <atomic>
#include <exception>
#include <fstream>
#include <iostream>
#include <mutex>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <thread>
#include <vector>

namespace atomgreed::cli {

namespace {

const std::set<std::string> kCommonFields = {"command", "seed", "trials", "output_path", "threads"};

// Typed access to config fields; every error names the offending line.
class Reader {
 public:
  Reader(const Config& cfg, const std::string& command, std::set<std::string> fields) : cfg_(cfg) {
    fields.insert(kCommonFields.begin(), kCommonFields.end());
    for (auto it = cfg.json.begin(); it != cfg.json.end(); ++it) {
      if (!fields.count(it.key()))
        throw ConfigError(cfg.where(it.key()) + "unknown field '" + it.key() + "' for command '" +
                          command + "'");
    }
    if (cfg.json.contains("command")) {
      const Json& c = cfg.json.at("command");
      if (!c.is_string() || c.get<std::string>() != command)
        throw ConfigError(cfg.where("command") + "config is for command " + c.dump() +
                          ", not '" + command + "'");
    }
  }

  bool has(const std::string& key) const { return cfg_.json.contains(key); }
  const Json& raw(const std::string& key) const { return cfg_.json.at(key); }
  std::string where(const std::string& key) const { return cfg_.where(key); }

  long long integer(const std::string& key, long long def, long long lo, long long hi) const {
    if (!has(key)) return def;
    const Json& v = raw(key);
    if (!v.is_number_integer()) fail(key, "must be an integer");
    const auto x = v.get<long long>();
    if (x < lo || x > hi)
      fail(key, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "], got " +
                    std::to_string(x));
    return x;
  }

  std::uint64_t seed(const std::string& key, std::uint64_t def) const {
    if (!has(key)) return def;
    const Json& v = raw(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
      fail(key, "must be a nonnegative integer");
    return v.get<std::uint64_t>();
  }

  double real(const std::string& key, double def, double lo, double hi) const {
    if (!has(key)) return def;
    const Json& v = raw(key);
    if (!v.is_number()) fail(key, "must be a number");
    const double x = v.get<double>();
    if (!(x >= lo && x <= hi))
      fail(key, "must lie in [" + format_real(lo) + ", " + format_real(hi) + "], got " + format_real(x));
    return x;
  }

  std::string choice(const std::string& key, const std::string& def, const std::set<std::string>& options) const {
    if (!has(key)) return def;
    const Json& v = raw(key);
    if (!v.is_string() || !options.count(v.get<std::string>())) {
      std::string list;
      for (const auto& o : options) list += (list.empty() ? "" : ", ") + o;
      fail(key, "must be one of {" + list + "}");
    }
    return v.get<std::string>();
  }

  std::vector<double> reals(const std::string& key, std::vector<double> def, double lo, double hi) const {
    if (!has(key)) return def;
    const Json& v = raw(key);
    if (!v.is_array() || v.empty()) fail(key, "must be a nonempty array of numbers");
    std::vector<double> out;
    for (const Json& e : v) {
      if (!e.is_number()) fail(key, "must be a nonempty array of numbers");
      const double x = e.get<double>();
      if (!(x >= lo && x <= hi)) fail(key, "entries must lie in [" + format_real(lo) + ", " + format_real(hi) + "]");
      out.push_back(x);
    }
    return out;
  }

  std::vector<AtomicSet> atomic_sets(std::vector<AtomicSet> def) const {
    std::vector<AtomicSet> out;
    auto parse_one = [this](const Json& j, const std::string& key) {
      try {
        return atomic_set_from_json(j);
      } catch (const std::exception& e) {
        fail(key, e.what());
      }
    };
    if (has("atomic_set")) out.push_back(parse_one(raw("atomic_set"), "atomic_set"));
    if (has("atomic_sets")) {
      if (!raw("atomic_sets").is_array()) fail("atomic_sets", "must be an array of atomic sets");
      for (const Json& j : raw("atomic_sets")) out.push_back(parse_one(j, "atomic_sets"));
    }
    return out.empty() ? def : out;
  }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    throw ConfigError(cfg_.where(key) + "field '" + key + "' " + what);
  }

 private:
  const Config& cfg_;
};

struct Common {
  std::uint64_t seed;
  int trials;
  int threads;
};

Common read_common(const Reader& rd, const Overrides& ov, int default_trials) {
  Common c{};
  c.seed = ov.seed ? *ov.seed : rd.seed("seed", 0);
  c.trials = ov.trials ? *ov.trials : static_cast<int>(rd.integer("trials", default_trials, 1, 1000000));
  if (c.trials < 1) throw ConfigError("--trials must be >= 1");
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  c.threads = static_cast<int>(rd.integer("threads", hw, 1, 256));
  return c;
}

// Runs job(i) for i in [0, count) on a worker pool and returns the results
// in index order, so output never depends on scheduling.
template <class Job>
auto run_indexed(int count, int threads, Job job) {
  using Result = decltype(job(0));
  std::vector<Result> results(static_cast<std::size_t>(count));
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (int i = next++; i < count; i = next++) {
      try {
        results[static_cast<std::size_t>(i)] = job(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const int n = std::min(threads, count);
  if (n <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  return results;
}

std::string csv_row(std::initializer_list<std::string> fields) {
  std::string out;
  for (const auto& f : fields) out += (out.empty() ? "" : ",") + f;
  return out + "\n";
}

std::string sibling_path(const std::string& path, const std::string& suffix) {
  const auto dot = path.rfind('.');
  const auto slash = path.find_last_of('/');
  const bool has_ext = dot != std::string::npos && (slash == std::string::npos || dot > slash);
  return (has_ext ? path.substr(0, dot) : path) + "." + suffix + ".csv";
}

}  // namespace

int Config::line_of(const std::string& key) const {
  const std::string quoted = "\"" + key + "\"";
  std::size_t pos = 0;
  while ((pos = text.find(quoted, pos)) != std::string::npos) {
    std::size_t after = pos + quoted.size();
    while (after < text.size() && std::isspace(static_cast<unsigned char>(text[after]))) ++after;
    if (after < text.size() && text[after] == ':')
      return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(pos), '\n'));
    pos = after;
  }
  return 0;
}

std::string Config::where(const std::string& key) const {
  const int line = line_of(key);
  return source + (line > 0 ? ":" + std::to_string(line) : "") + ": ";
}

Config parse_config(const std::string& text, const std::string& source) {
  Config cfg;
  cfg.text = text;
  cfg.source = source;
  try {
    cfg.json = Json::parse(text);
  } catch (const Json::parse_error& e) {
    const std::size_t byte = std::min<std::size_t>(e.byte, text.size());
    const int line = 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(byte > 0 ? byte - 1 : 0), '\n'));
    throw ConfigError(source + ":" + std::to_string(line) + ": invalid JSON: " + e.what());
  }
  if (!cfg.json.is_object()) throw ConfigError(source + ":1: config must be a JSON object");
  return cfg;
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

Objective make_bounds_instance(std::uint64_t seed, Index n, Index rows, Index r, double noise_level) {
  Rng rng = make_rng(seed, 0);
  const Matrix phi = gaussian_matrix(rows, n, rng) / std::sqrt(static_cast<double>(rows));
  std::vector<Index> coords(static_cast<std::size_t>(n));
  std::iota(coords.begin(), coords.end(), Index{0});
  std::shuffle(coords.begin(), coords.end(), rng);
  Vector x = Vector::Zero(n);
  std::bernoulli_distribution coin(0.5);
  for (Index i = 0; i < std::min(r, n); ++i) x(coords[static_cast<std::size_t>(i)]) = coin(rng) ? 1.0 : -1.0;
  Vector b = phi * x;
  b += random_unit(rows, rng) * (noise_level * b.norm());
  return make_least_squares(phi, b);
}

// ---------------------------------------------------------------------------

int cmd_recover(const Config& cfg, const Overrides& ov, std::ostream& out) {
  Reader rd(cfg, "recover", {"atomic_set", "atomic_sets", "sparsity", "noise_level", "iterations", "beta", "oracle"});
  const Common common = read_common(rd, ov, 20);
  const Index sparsity = rd.integer("sparsity", 5, 1, 100000);
  const double noise = rd.real("noise_level", 0.1, 0.0, 1e6);
  const Index iterations = rd.integer("iterations", 2 * sparsity, 1, 1000000);
  const double beta = rd.real("beta", 1.0, 1e-12, 1.0);
  const Oracle oracle = rd.choice("oracle", "ompsel", {"ompsel", "pure_greedy"}) == "ompsel"
                            ? Oracle::OMPSel
                            : Oracle::PureGreedy;
  const auto sets = rd.atomic_sets({AtomicSet::standard_basis(100)});
  for (const auto& set : sets) {
    if (auto count = set.atom_count(); count && static_cast<std::uint64_t>(sparsity) > *count)
      rd.fail(rd.has("atomic_sets") ? "atomic_sets" : "atomic_set",
              "has fewer atoms than sparsity " + std::to_string(sparsity));
    if (oracle == Oracle::PureGreedy && !set.enumerable())
      rd.fail("oracle", "pure_greedy needs enumerable atomic sets, got " + set.name());
  }

  out << schema_line("recover") << "\n";
  out << "trial,iter,atomset,g_value,validation_value,grad_norm,atom_tag,bound_value\n";
  for (std::size_t s = 0; s < sets.size(); ++s) {
    const AtomicSet& set = sets[s];
    const std::uint64_t set_seed = derive_seed(common.seed, s);
    auto rows = run_indexed(common.trials, common.threads, [&](int trial) {
      auto [inst, obj] = make_recovery_instance(set, sparsity, noise, derive_seed(set_seed, static_cast<std::uint64_t>(trial)));
      const Objective validation = make_least_squares(Matrix::Identity(obj.dim, obj.dim), inst.validation_target);
      const double f0 = obj.at_zero();
      const double v0 = validation.at_zero();
      const double reference = refit(obj, inst.true_atoms).g_value;

      GreedyOptions opts;
      opts.oracle = oracle;
      opts.beta = beta;
      if (auto theta = theta_r_closed_form(set, 2 * sparsity)) {
        BoundParams bp;
        bp.beta = beta;
        bp.theta = theta->value;
        bp.theta_flag = theta->flag;
        bp.sigma = obj.mu / obj.lip;
        bp.r = sparsity;
        opts.bound = bp;
        opts.reference_value = reference;
      }
      const SolveTrace trace = greedy(set, obj, iterations, opts);
      std::string buf;
      for (const auto& rec : trace.iterations) {
        buf += csv_row({std::to_string(trial), std::to_string(rec.t), set.name(), format_real(rec.g_value),
                        format_real(validation.value(rec.point) - v0), format_real(rec.grad_norm),
                        csv_field(rec.atom_tag), format_real(rec.bound_value)});
      }
      buf += csv_row({std::to_string(trial), std::to_string(sparsity), set.name(), format_real(obj.value(inst.signal) - f0),
                      format_real(validation.value(inst.signal) - v0), format_real(obj.gradient(inst.signal).norm()),
                      "reference", "nan"});
      return buf;
    });
    for (const auto& r : rows) out << r;
  }
  return kOk;
}

int cmd_condnum(const Config& cfg, const Overrides& ov, std::ostream& out) {
  Reader rd(cfg, "condnum", {"n", "lambda_points", "sign_vector", "random_n", "random_m", "method", "restarts", "iters"});
  const Common common = read_common(rd, ov, 20);
  const Index n = rd.integer("n", 5, 2, kExactMaxDim);
  const Index points = rd.integer("lambda_points", 101, 2, 100000);
  const Index rn = rd.integer("random_n", n, 1, 1000);
  const Index rm = rd.integer("random_m", n, 1, 100000);
  const std::string method = rd.choice("method", "auto", {"auto", "exact", "local"});
  LocalSearchOptions ls;
  ls.restarts = static_cast<int>(rd.integer("restarts", 50, 1, 1000000));
  ls.iters = static_cast<int>(rd.integer("iters", 2000, 0, 100000000));
  ls.seed = common.seed;

  std::vector<double> def_sign(static_cast<std::size_t>(n), 1.0);
  def_sign[0] = -1.0;
  const auto sign = rd.reals("sign_vector", def_sign, -1.0, 1.0);
  if (static_cast<Index>(sign.size()) != n) rd.fail("sign_vector", "must have n = " + std::to_string(n) + " entries");
  for (double s : sign)
    if (s != 1.0 && s != -1.0) rd.fail("sign_vector", "entries must be +1 or -1");
  if (sign[0] != -1.0) rd.fail("sign_vector", "first entry must be -1");
  if (method == "exact" && (rn > kExactMaxDim || rm > kExactMaxAtoms))
    rd.fail("method", "exact is limited to n <= " + std::to_string(kExactMaxDim) + ", m <= " + std::to_string(kExactMaxAtoms));

  auto estimate = [&](const Matrix& a) {
    if (method == "exact") return theta_exact_small(a);
    if (method == "local") return theta_local_search(a, ls);
    return theta_auto(a, ls);
  };
  auto row = [&](const std::string& id, double lambda, const Matrix& a) {
    const ConditionEstimate e = estimate(a);
    const Diagnostics d = diagnostics(a);
    std::ostringstream os;
    write_condnum_row(os, {id, lambda, e.theta_hat, d.mean_coherence, d.sigma_min, e.method, e.flag});
    return os.str();
  };

  Vector s(n);
  for (Index i = 0; i < n; ++i) s(i) = sign[static_cast<std::size_t>(i)];
  write_condnum_header(out);
  auto lambda_rows = run_indexed(static_cast<int>(points), common.threads, [&](int i) {
    const double lambda = static_cast<double>(i) / static_cast<double>(points - 1);
    Matrix a = Matrix::Identity(n, n);
    a.col(0) = (lambda * Vector::Unit(n, 0) + (1 - lambda) * s).normalized();
    char id[32];
    std::snprintf(id, sizeof id, "lambda_%03d", i);
    return row(id, lambda, a);
  });
  for (const auto& r : lambda_rows) out << r;
  const std::uint64_t random_seed = derive_seed(common.seed, 1);
  auto random_rows = run_indexed(common.trials, common.threads, [&](int i) {
    Rng rng = make_rng(random_seed, static_cast<std::uint64_t>(i));
    const Matrix a = normalize_columns(gaussian_matrix(rn, rm, rng));
    char id[32];
    std::snprintf(id, sizeof id, "random_%03d", i);
    return row(id, std::numeric_limits<double>::quiet_NaN(), a);
  });
  for (const auto& r : random_rows) out << r;
  return kOk;
}

int cmd_submod(const Config& cfg, const Overrides& ov, std::ostream& out, std::ostream& sigmoid_out,
               std::ostream& wksub_out) {
  Reader rd(cfg, "submod", {"p", "k", "u_choice", "max_order", "sigmoid_instances", "sigmoid_n",
                            "wksub_instances", "wksub_p", "wksub_r"});
  const Common common = read_common(rd, ov, 1000);
  const int p = static_cast<int>(rd.integer("p", 5, 1, kMaxRatioP));
  const int k = static_cast<int>(rd.integer("k", 2, 1, kMaxRatioP));
  const std::string u_choice = rd.choice("u_choice", "random", {"random", "empty"});
  const int max_order = static_cast<int>(rd.integer("max_order", p, 1, kMaxRatioP));
  const int sig_count = static_cast<int>(rd.integer("sigmoid_instances", 100, 0, 1000000));
  const int sig_n = static_cast<int>(rd.integer("sigmoid_n", 6, 1, kMaxRatioP));
  const int wk_count = static_cast<int>(rd.integer("wksub_instances", 100, 0, 1000000));
  const int wk_p = static_cast<int>(rd.integer("wksub_p", 8, 1, kMaxRatioP));
  const int wk_r = static_cast<int>(rd.integer("wksub_r", 3, 1, kMaxRatioP));
  if (wk_r > wk_p) rd.fail("wksub_r", "must not exceed wksub_p");

  out << schema_line("submod") << "\n";
  out << "seed,p,k,gamma,kappa,lower,upper,pass\n";
  const std::uint64_t sandwich_seed = derive_seed(common.seed, 0);
  auto rows = run_indexed(common.trials, common.threads, [&](int i) {
    const std::uint64_t s = derive_seed(sandwich_seed, static_cast<std::uint64_t>(i));
    const SetFunction g = random_monotone(s, p, max_order);
    Subset u = 0;
    if (u_choice == "random") {
      Rng rng = make_rng(s, 1);
      std::uniform_int_distribution<Subset> pick(0, full_set(p));
      do u = pick(rng);
      while (cardinality(u) > p - 1);
    }
    const RatioResult gamma = gamma_disjoint(g, u, k);
    const RatioResult kappa = kappa_subset(g, u, k);
    double lower = std::numeric_limits<double>::quiet_NaN();
    bool pass = false;
    if (gamma.value && kappa.value) {
      const SandwichResult sw = sandwich_check(*gamma.value, *kappa.value);
      lower = sw.lower;
      pass = sw.pass;
    }
    const double nan = std::numeric_limits<double>::quiet_NaN();
    return csv_row({std::to_string(s), std::to_string(p), std::to_string(k), format_real(gamma.value.value_or(nan)),
                    format_real(kappa.value.value_or(nan)), format_real(lower), format_real(gamma.value.value_or(nan)),
                    pass ? "true" : "false"});
  });
  for (const auto& r : rows) out << r;

  sigmoid_out << schema_line("submod_sigmoid") << "\n";
  sigmoid_out << "instance,n,kappa,pass\n";
  const std::uint64_t sig_seed = derive_seed(common.seed, 1);
  auto sig_rows = run_indexed(sig_count, common.threads, [&](int i) {
    Rng rng = make_rng(sig_seed, static_cast<std::uint64_t>(i));
    const int n = 1 + i % sig_n;
    const Matrix q = random_doubly_stochastic(n, rng);
    std::uniform_real_distribution<double> peak(0.5, 2.0);
    std::vector<double> peaks(static_cast<std::size_t>(n));
    for (double& x : peaks) x = peak(rng);
    const RatioResult kappa = kappa_lattice(make_sigmoid_composition(q, peaks));
    const bool pass = kappa.value && *kappa.value >= 1 - 1e-9;
    return csv_row({std::to_string(i), std::to_string(n),
                    format_real(kappa.value.value_or(std::numeric_limits<double>::quiet_NaN())),
                    pass ? "true" : "false"});
  });
  for (const auto& r : sig_rows) sigmoid_out << r;

  wksub_out << schema_line("submod_wksub") << "\n";
  wksub_out << "instance,p,r,kappa,greedy_value,optimum,bound,pass\n";
  const std::uint64_t wk_seed = derive_seed(common.seed, 2);
  auto wk_rows = run_indexed(wk_count, common.threads, [&](int i) {
    const SetFunction g = random_monotone(derive_seed(wk_seed, static_cast<std::uint64_t>(i)), wk_p);
    const SetGreedyTrace tr = set_greedy(g, wk_r);
    const SubsetOptimum opt = brute_force_opt(g, wk_r);
    double kappa = INFINITY;
    for (int step = 0; step < wk_r; ++step) {
      const RatioResult kr = kappa_subset(g, tr.prefixes[static_cast<std::size_t>(step)], wk_r);
      if (kr.value) kappa = std::min(kappa, *kr.value);
    }
    bool pass = std::isfinite(kappa) && kappa > 0;
    double bound = std::numeric_limits<double>::quiet_NaN();
    if (pass) {
      for (int step = 0; step <= wk_r; ++step) {
        const double b = wksub_bound(kappa, wk_r, step).fraction * opt.value;
        if (tr.values[static_cast<std::size_t>(step)] < b - 1e-9) pass = false;
        if (step == wk_r) bound = b;
      }
    }
    return csv_row({std::to_string(i), std::to_string(wk_p), std::to_string(wk_r), format_real(kappa),
                    format_real(tr.values.back()), format_real(opt.value), format_real(bound), pass ? "true" : "false"});
  });
  for (const auto& r : wk_rows) wksub_out << r;
  return kOk;
}

int cmd_bounds_check(const Config& cfg, const Overrides& ov, std::ostream& out) {
  Reader rd(cfg, "bounds-check", {"n", "r", "rows", "noise_level", "nu_values", "betas"});
  const Common common = read_common(rd, ov, 50);
  const Index n = rd.integer("n", 8, 1, 10);
  const Index r = rd.integer("r", 3, 1, n);
  const Index rows = rd.integer("rows", 2 * n, std::min<Index>(2 * r, n), 100000);
  const double noise = rd.real("noise_level", 0.1, 0.0, 1e6);
  const auto nus = rd.reals("nu_values", {0.0, 0.3, 0.6, 0.9}, 0.0, 0.999999);
  const auto betas = rd.reals("betas", {0.5}, 1e-12, 1.0);
  constexpr double tol = 1e-9;

  const AtomicSet set = AtomicSet::standard_basis(n);
  const ThetaValue theta = *theta_r_closed_form(set, 2 * r);

  struct SeedReport {
    double greedy_margin = INFINITY;
    int greedy_violations = 0;
    std::vector<double> foba_margin;
    std::vector<int> foba_violations;
    bool nu0_identical = true;
    std::vector<double> beta_margin;
    std::vector<int> beta_violations;
  };
  auto reports = run_indexed(common.trials, common.threads, [&](int i) {
    SeedReport rep;
    const Objective obj = make_bounds_instance(derive_seed(common.seed, static_cast<std::uint64_t>(i)), n, rows, r, noise);
    const double gstar = brute_force_opt(g_from_objective(obj, set), static_cast<int>(r)).value;
    const RestrictedConstants rc = restricted_constants(obj, set, std::min(2 * r, n));
    BoundParams bp;
    bp.theta = theta.value;
    bp.theta_flag = theta.flag;
    bp.sigma = rc.mu / rc.lip;
    bp.r = r;

    GreedyOptions gopts;
    gopts.bound = bp;
    gopts.reference_value = gstar;
    const SolveTrace gt = greedy(set, obj, r, gopts);
    for (const auto& rec : gt.iterations) {
      const double m = rec.g_value - rec.bound_value;
      rep.greedy_margin = std::min(rep.greedy_margin, m);
      if (m < -tol) ++rep.greedy_violations;
    }

    const double c = bp.beta * bp.theta * bp.theta * bp.sigma;
    for (double nu : nus) {
      FobaOptions fo;
      fo.nu = nu;
      fo.c = c;
      fo.reference_value = gstar;
      const SolveTrace ft = foba(set, obj, r, fo);
      const double m = ft.final.g_value - foba_bound(c, r, r).fraction * gstar;
      rep.foba_margin.push_back(m);
      rep.foba_violations.push_back(m < -tol ? 1 : 0);
      if (nu == 0.0) {
        bool same = ft.iterations.size() == gt.iterations.size();
        for (std::size_t k = 0; same && k < ft.iterations.size(); ++k)
          same = ft.iterations[k].atom_tag == gt.iterations[k].atom_tag &&
                 ft.iterations[k].g_value == gt.iterations[k].g_value;
        rep.nu0_identical = rep.nu0_identical && same;
      }
    }

    for (double beta : betas) {
      GreedyOptions ao = gopts;
      ao.beta = beta;
      ao.adversarial = true;
      ao.bound->beta = beta;
      const SolveTrace at = greedy(set, obj, r, ao);
      double margin = INFINITY;
      int violations = 0;
      for (const auto& rec : at.iterations) {
        const double m = rec.g_value - rec.bound_value;
        margin = std::min(margin, m);
        if (m < -tol) ++violations;
      }
      rep.beta_margin.push_back(margin);
      rep.beta_violations.push_back(violations);
    }
    return rep;
  });

  Json report;
  report["instances"] = common.trials;
  report["n"] = n;
  report["r"] = r;
  report["rows"] = rows;
  report["theta_2r"] = theta.value;
  report["theta_flag"] = to_string(theta.flag);
  report["label"] = to_string(label_for(theta.flag));

  bool all_pass = true;
  {
    double margin = INFINITY;
    int violations = 0;
    for (const auto& rep : reports) {
      margin = std::min(margin, rep.greedy_margin);
      violations += rep.greedy_violations;
    }
    report["greedy"] = {{"violations", violations}, {"min_margin", margin}, {"pass", violations == 0}};
    all_pass = all_pass && violations == 0;
  }
  Json foba_json = Json::array();
  for (std::size_t j = 0; j < nus.size(); ++j) {
    double margin = INFINITY;
    int violations = 0;
    for (const auto& rep : reports) {
      margin = std::min(margin, rep.foba_margin[j]);
      violations += rep.foba_violations[j];
    }
    Json entry = {{"nu", nus[j]}, {"violations", violations}, {"min_margin", margin}, {"pass", violations == 0}};
    if (nus[j] == 0.0) {
      bool identical = true;
      for (const auto& rep : reports) identical = identical && rep.nu0_identical;
      entry["identical_to_greedy"] = identical;
      entry["pass"] = violations == 0 && identical;
    }
    all_pass = all_pass && entry["pass"].get<bool>();
    foba_json.push_back(std::move(entry));
  }
  report["foba"] = std::move(foba_json);
  Json beta_json = Json::array();
  for (std::size_t j = 0; j < betas.size(); ++j) {
    double margin = INFINITY;
    int violations = 0;
    for (const auto& rep : reports) {
      margin = std::min(margin, rep.beta_margin[j]);
      violations += rep.beta_violations[j];
    }
    beta_json.push_back({{"beta", betas[j]}, {"adversarial", true}, {"violations", violations},
                         {"min_margin", margin}, {"pass", violations == 0}});
    all_pass = all_pass && violations == 0;
  }
  report["degraded_oracle"] = std::move(beta_json);
  report["pass"] = all_pass;
  out << report.dump(2) << "\n";
  return all_pass ? kOk : kCheckFailed;
}

int run(const std::string& command, const std::string& config_path, const Overrides& ov, std::ostream& err) {
  try {
    const Config cfg = load_config(config_path);
    std::string out_path;
    if (ov.out) {
      out_path = *ov.out;
    } else if (cfg.json.contains("output_path")) {
      if (!cfg.json.at("output_path").is_string())
        throw ConfigError(cfg.where("output_path") + "field 'output_path' must be a string");
      out_path = cfg.json.at("output_path").get<std::string>();
    }
    auto open = [](const std::string& path) {
      std::ofstream f(path, std::ios::binary);
      if (!f) throw ConfigError(path + ": cannot open output file");
      return f;
    };
    if (command == "submod") {
      // Buffer so config errors never leave partial files behind.
      std::ostringstream main, sig, wk;
      const int code = cmd_submod(cfg, ov, main, sig, wk);
      if (out_path.empty()) {
        std::cout << main.str() << sig.str() << wk.str();
      } else {
        open(out_path) << main.str();
        open(sibling_path(out_path, "sigmoid")) << sig.str();
        open(sibling_path(out_path, "wksub")) << wk.str();
      }
      return code;
    }
    std::ostringstream buf;
    int code;
    if (command == "recover") code = cmd_recover(cfg, ov, buf);
    else if (command == "condnum") code = cmd_condnum(cfg, ov, buf);
    else if (command == "bounds-check") code = cmd_bounds_check(cfg, ov, buf);
    else throw ConfigError("unknown command '" + command + "'");
    if (out_path.empty()) std::cout << buf.str();
    else open(out_path) << buf.str();
    return code;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const atomgreed::Error& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  }
}

}  // namespace atomgreed::cli

#ifndef ATOMGREED_IO_HPP
#define ATOMGREED_IO_HPP

// CSV emitters for traces, bound curves and condition-number sweeps,
// finite atom sets from CSV, and JSON forms of atomic sets, recovery
// instances and tabulated set functions.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "atomgreed/atoms.hpp"
#include "atomgreed/bounds.hpp"
#include "atomgreed/condnum.hpp"
#include "atomgreed/objectives.hpp"
#include "atomgreed/solvers.hpp"
#include "atomgreed/submod.hpp"

namespace atomgreed {

using Json = nlohmann::json;

inline constexpr int kCsvSchemaVersion = 1;

// 12 significant digits; nan/inf spelled the way CSV readers expect.
inline std::string format_real(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

inline std::string schema_line(const std::string& table) {
  return "# schema=" + table + " version=" + std::to_string(kCsvSchemaVersion);
}

// Quotes a field when it contains a separator or a quote.
inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline void write_trace_csv(std::ostream& os, const SolveTrace& trace) {
  os << schema_line("trace") << "\n";
  os << "t,step_type,atom_tag,g_value,grad_norm,gain,bound_value\n";
  for (const auto& r : trace.iterations) {
    os << r.t << ',' << to_string(r.step) << ',' << csv_field(r.atom_tag) << ','
       << format_real(r.g_value) << ',' << format_real(r.grad_norm) << ',' << format_real(r.gain)
       << ',' << format_real(r.bound_value) << "\n";
  }
}

inline void write_bound_curve_csv(std::ostream& os, const std::vector<BoundPoint>& curve) {
  os << schema_line("bound_curve") << "\n";
  os << "t,bound_value\n";
  for (const auto& p : curve) os << p.t << ',' << format_real(p.value) << "\n";
}

struct CondnumRow {
  std::string instance_id;
  double lambda = std::numeric_limits<double>::quiet_NaN();
  double theta_hat = 0;
  double mean_coherence = 0;
  double sigma_min = 0;
  ThetaMethod method = ThetaMethod::ExactVertex;
  Certainty flag = Certainty::Exact;
};

inline void write_condnum_header(std::ostream& os) {
  os << schema_line("condnum") << "\n";
  os << "instance_id,lambda,theta_hat,mean_coherence,sigma_min,method,flag\n";
}

inline void write_condnum_row(std::ostream& os, const CondnumRow& r) {
  os << csv_field(r.instance_id) << ',' << format_real(r.lambda) << ',' << format_real(r.theta_hat)
     << ',' << format_real(r.mean_coherence) << ',' << format_real(r.sigma_min) << ','
     << to_string(r.method) << ',' << to_string(r.flag) << "\n";
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

// Columns already unit to within a few ulps are left alone so that saved
// sets reload bit for bit.
inline constexpr double kUnitSlack = 1e-15;

inline Matrix unit_columns(Matrix a, const std::string& where) {
  for (Index j = 0; j < a.cols(); ++j) {
    const double norm = a.col(j).norm();
    if (!(norm > 0)) throw InvalidArgument(where + ": atom " + std::to_string(j) + " is zero");
    if (std::abs(norm - 1.0) > kUnitSlack) a.col(j) /= norm;
  }
  return a;
}

}  // namespace detail

// One atom per column under the header atom_0,atom_1,...; columns are
// renormalized, with a warning on `warn` when a norm was off by > 1e-6.
inline AtomicSet load_finite_set_csv(std::istream& is, std::ostream& warn = std::cerr) {
  std::string line;
  std::vector<std::string> header;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    header = detail::split_csv_line(line);
    break;
  }
  if (header.empty()) throw InvalidArgument("finite set CSV: missing header row");
  for (std::size_t j = 0; j < header.size(); ++j)
    if (header[j] != "atom_" + std::to_string(j))
      throw InvalidArgument("finite set CSV: header column " + std::to_string(j) + " is '" +
                            header[j] + "', expected 'atom_" + std::to_string(j) + "'");
  std::vector<std::vector<double>> rows;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    auto fields = detail::split_csv_line(line);
    if (fields.size() != header.size())
      throw InvalidArgument("finite set CSV: line " + std::to_string(lineno) + " has " +
                            std::to_string(fields.size()) + " fields, expected " +
                            std::to_string(header.size()));
    std::vector<double> row;
    for (const auto& f : fields) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(f, &used));
        if (used != f.size()) throw std::invalid_argument(f);
      } catch (const std::exception&) {
        throw InvalidArgument("finite set CSV: line " + std::to_string(lineno) +
                              ": not a number: '" + f + "'");
      }
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InvalidArgument("finite set CSV: no data rows");
  Matrix a(static_cast<Index>(rows.size()), static_cast<Index>(header.size()));
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j) a(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  for (Index j = 0; j < a.cols(); ++j) {
    const double norm = a.col(j).norm();
    if (!(norm > 0)) throw InvalidArgument("finite set CSV: column " + std::to_string(j) + " is zero");
    if (std::abs(norm - 1.0) > 1e-6)
      warn << "warning: atom_" << j << " had norm " << format_real(norm) << "; renormalized\n";
    if (std::abs(norm - 1.0) > detail::kUnitSlack) a.col(j) /= norm;
  }
  return AtomicSet::finite_set(std::move(a));
}

inline void write_finite_set_csv(std::ostream& os, const Matrix& a) {
  for (Index j = 0; j < a.cols(); ++j) os << (j ? "," : "") << "atom_" << j;
  os << "\n";
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) os << (j ? "," : "") << format_real(a(i, j));
    os << "\n";
  }
}

// ---------------------------------------------------------------------------
// JSON.

inline Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Matrix matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_array())
    throw InvalidArgument("matrix JSON: expected a nonempty array of rows");
  Matrix m(static_cast<Index>(j.size()), static_cast<Index>(j[0].size()));
  for (Index i = 0; i < m.rows(); ++i) {
    if (j[i].size() != static_cast<std::size_t>(m.cols()))
      throw InvalidArgument("matrix JSON: ragged rows");
    for (Index c = 0; c < m.cols(); ++c) m(i, c) = j[i][c].get<double>();
  }
  return m;
}

inline Json vector_to_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

inline Json to_json(const AtomTag& tag) {
  return std::visit(
      [](const auto& t) -> Json {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, BasisIndex>) return {{"type", "basis"}, {"index", t.index}};
        else if constexpr (std::is_same_v<T, SignPattern>) return {{"type", "sign"}, {"signs", t.signs}};
        else if constexpr (std::is_same_v<T, RankOnePair>)
          return {{"type", "rank_one"}, {"u", vector_to_json(t.u)}, {"v", vector_to_json(t.v)}};
        else if constexpr (std::is_same_v<T, GroupTag>)
          return {{"type", "group"}, {"group", t.group}, {"members", t.members}};
        else if constexpr (std::is_same_v<T, TwoOrthoIndex>)
          return {{"type", "two_ortho"}, {"basis", t.basis}, {"index", t.index}};
        else if constexpr (std::is_same_v<T, OrthogonalPayload>)
          return {{"type", "orthogonal"}, {"q", matrix_to_json(t.q)}};
        else return {{"type", "column"}, {"column", t.column}};
      },
      tag);
}

inline Json to_json(const AtomicSet& set) {
  return std::visit(
      [](const auto& k) -> Json {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, StandardBasis>) return {{"kind", "standard_basis"}, {"n", k.n}};
        else if constexpr (std::is_same_v<T, RankOne>)
          return {{"kind", "rank_one"}, {"rows", k.rows}, {"cols", k.cols}};
        else if constexpr (std::is_same_v<T, GroupSparse>)
          return {{"kind", "group_sparse"}, {"n", k.n}, {"groups", k.groups}};
        else if constexpr (std::is_same_v<T, TwoOrtho>)
          return {{"kind", "two_ortho"}, {"psi", matrix_to_json(k.psi)}};
        else if constexpr (std::is_same_v<T, SignVectors>) return {{"kind", "sign_vectors"}, {"n", k.n}};
        else if constexpr (std::is_same_v<T, OrthogonalMatrices>)
          return {{"kind", "orthogonal_matrices"}, {"n", k.n}};
        else return {{"kind", "finite_set"}, {"atoms", matrix_to_json(k.atoms)}};
      },
      set.kind());
}

namespace detail {

inline void reject_unknown(const Json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) throw InvalidArgument("unknown field '" + it.key() + "' in " + where);
  }
}

inline Index get_dim(const Json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw InvalidArgument(where + ": missing field '" + key + "'");
  if (!j.at(key).is_number_integer())
    throw InvalidArgument(where + ": field '" + key + "' must be an integer");
  return j.at(key).get<Index>();
}

}  // namespace detail

// Accepts the forms written by to_json plus {"kind":"two_ortho","hadamard":n}
// and {"kind":"group_sparse","n":n,"group_size":s} (consecutive blocks).
inline AtomicSet atomic_set_from_json(const Json& j) {
  const std::string where = "atomic_set";
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string())
    throw InvalidArgument(where + ": expected an object with a string 'kind'");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "standard_basis") {
    detail::reject_unknown(j, {"kind", "n"}, where);
    return AtomicSet::standard_basis(detail::get_dim(j, "n", where));
  }
  if (kind == "rank_one") {
    detail::reject_unknown(j, {"kind", "rows", "cols"}, where);
    return AtomicSet::rank_one(detail::get_dim(j, "rows", where), detail::get_dim(j, "cols", where));
  }
  if (kind == "sign_vectors") {
    detail::reject_unknown(j, {"kind", "n"}, where);
    return AtomicSet::sign_vectors(detail::get_dim(j, "n", where));
  }
  if (kind == "orthogonal_matrices") {
    detail::reject_unknown(j, {"kind", "n"}, where);
    return AtomicSet::orthogonal_matrices(detail::get_dim(j, "n", where));
  }
  if (kind == "group_sparse") {
    detail::reject_unknown(j, {"kind", "n", "groups", "group_size"}, where);
    const Index n = detail::get_dim(j, "n", where);
    std::vector<std::vector<Index>> groups;
    if (j.contains("groups")) {
      groups = j.at("groups").get<std::vector<std::vector<Index>>>();
    } else {
      const Index size = detail::get_dim(j, "group_size", where);
      if (size < 1) throw InvalidArgument(where + ": group_size must be >= 1");
      for (Index start = 0; start < n; start += size) {
        std::vector<Index> g;
        for (Index i = start; i < std::min(n, start + size); ++i) g.push_back(i);
        groups.push_back(std::move(g));
      }
    }
    return AtomicSet::group_sparse(n, std::move(groups));
  }
  if (kind == "two_ortho") {
    detail::reject_unknown(j, {"kind", "psi", "hadamard"}, where);
    if (j.contains("hadamard")) return AtomicSet::two_ortho(make_hadamard(detail::get_dim(j, "hadamard", where)));
    if (!j.contains("psi")) throw InvalidArgument(where + ": two_ortho needs 'psi' or 'hadamard'");
    return AtomicSet::two_ortho(matrix_from_json(j.at("psi")));
  }
  if (kind == "finite_set") {
    detail::reject_unknown(j, {"kind", "atoms", "csv"}, where);
    if (j.contains("csv")) {
      std::ifstream in(j.at("csv").get<std::string>());
      if (!in) throw InvalidArgument(where + ": cannot open " + j.at("csv").get<std::string>());
      return load_finite_set_csv(in);
    }
    if (!j.contains("atoms")) throw InvalidArgument(where + ": finite_set needs 'atoms' or 'csv'");
    return AtomicSet::finite_set(detail::unit_columns(matrix_from_json(j.at("atoms")), where));
  }
  throw InvalidArgument(where + ": unknown kind '" + kind + "'");
}

inline Json to_json(const RecoveryInstance& inst) {
  Json atoms = Json::array();
  for (const Atom& a : inst.true_atoms) atoms.push_back(to_json(a.tag));
  return {{"seed", inst.seed},
          {"atomic_set", to_json(inst.atomic_set)},
          {"atoms", std::move(atoms)},
          {"weights", inst.true_weights},
          {"noise_level", inst.noise_level}};
}

inline Json to_json(const SetFunction& g) { return {{"p", g.p()}, {"values", g.tabulate()}}; }

inline SetFunction set_function_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("p") || !j.contains("values"))
    throw InvalidArgument("set function JSON: expected {\"p\", \"values\"}");
  detail::reject_unknown(j, {"p", "values"}, "set function JSON");
  return tabulated(j.at("p").get<int>(), j.at("values").get<std::vector<double>>());
}

}  // namespace atomgreed

#endif  // ATOMGREED_IO_HPP

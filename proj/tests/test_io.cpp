#include <gtest/gtest.h>

#include <sstream>

#include "atomgreed/io.hpp"

using namespace atomgreed;

namespace {

std::vector<std::string> lines_of(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  for (std::string line; std::getline(is, line);) out.push_back(line);
  return out;
}

}  // namespace

TEST(FormatReal, TwelveDigits) {
  EXPECT_EQ(format_real(1.0 / 3.0), "0.333333333333");
  EXPECT_EQ(format_real(2.0), "2");
  EXPECT_EQ(format_real(NAN), "nan");
  EXPECT_EQ(format_real(-INFINITY), "-inf");
}

TEST(CsvField, Quoting) {
  EXPECT_EQ(csv_field("e3"), "e3");
  EXPECT_EQ(csv_field("a,b"), "\"a,b\"");
  EXPECT_EQ(csv_field("say \"x\""), "\"say \"\"x\"\"\"");
}

TEST(TraceCsv, SchemaAndColumns) {
  const Objective f = make_least_squares(Matrix::Identity(3, 3), Vector::LinSpaced(3, 1, 3));
  const SolveTrace tr = greedy(AtomicSet::standard_basis(3), f, 2, 1.0, Oracle::OMPSel);
  std::ostringstream os;
  write_trace_csv(os, tr);
  const auto lines = lines_of(os.str());
  ASSERT_EQ(lines.size(), 4u);
  EXPECT_EQ(lines[0], "# schema=trace version=1");
  EXPECT_EQ(lines[1], "t,step_type,atom_tag,g_value,grad_norm,gain,bound_value");
  EXPECT_EQ(lines[2], "1,forward,e2,4.5,2.2360679775,4.5,nan");
  EXPECT_EQ(lines[3].substr(0, 13), "2,forward,e1,");
}

TEST(BoundCurveCsv, Rows) {
  BoundParams p;
  std::ostringstream os;
  write_bound_curve_csv(os, bound_curve(p, 2));
  const auto lines = lines_of(os.str());
  ASSERT_EQ(lines.size(), 5u);
  EXPECT_EQ(lines[1], "t,bound_value");
  EXPECT_EQ(lines[2], "0,0");
  EXPECT_EQ(lines[3], "1," + format_real(1 - std::exp(-1.0)));
}

TEST(CondnumCsv, Row) {
  std::ostringstream os;
  write_condnum_header(os);
  write_condnum_row(os, {"lambda_000", 0.0, 0.5, 0.1, 0.9, ThetaMethod::ExactVertex, Certainty::Exact});
  const auto lines = lines_of(os.str());
  EXPECT_EQ(lines[1], "instance_id,lambda,theta_hat,mean_coherence,sigma_min,method,flag");
  EXPECT_EQ(lines[2], "lambda_000,0,0.5,0.1,0.9,ExactVertex,Exact");
}

TEST(FiniteSetCsv, RoundTrip) {
  Rng rng(2);
  const Matrix a = normalize_columns(gaussian_matrix(3, 4, rng));
  std::stringstream ss;
  write_finite_set_csv(ss, a);
  std::ostringstream warn;
  const AtomicSet set = load_finite_set_csv(ss, warn);
  EXPECT_LT((set.as<FiniteSet>()->atoms - a).cwiseAbs().maxCoeff(), 1e-11);
  EXPECT_TRUE(warn.str().empty());
}

TEST(FiniteSetCsv, RenormalizesWithWarning) {
  std::istringstream in("atom_0,atom_1\n2,0\n0,1\n");
  std::ostringstream warn;
  const AtomicSet set = load_finite_set_csv(in, warn);
  EXPECT_EQ(set.as<FiniteSet>()->atoms, Matrix::Identity(2, 2));
  EXPECT_NE(warn.str().find("atom_0"), std::string::npos);
  EXPECT_EQ(warn.str().find("atom_1"), std::string::npos);
}

TEST(FiniteSetCsv, Errors) {
  std::ostringstream warn;
  std::istringstream bad_header("a,b\n1,0\n");
  EXPECT_THROW(load_finite_set_csv(bad_header, warn), InvalidArgument);
  std::istringstream ragged("atom_0,atom_1\n1\n");
  EXPECT_THROW(load_finite_set_csv(ragged, warn), InvalidArgument);
  std::istringstream nan_cell("atom_0\nx\n");
  EXPECT_THROW(load_finite_set_csv(nan_cell, warn), InvalidArgument);
  std::istringstream zero("atom_0\n0\n");
  EXPECT_THROW(load_finite_set_csv(zero, warn), InvalidArgument);
}

TEST(AtomicSetJson, RoundTripEveryKind) {
  Rng rng(3);
  const std::vector<AtomicSet> sets = {
      AtomicSet::standard_basis(4),
      AtomicSet::rank_one(2, 3),
      AtomicSet::group_sparse(4, {{0, 3}, {1, 2}}),
      AtomicSet::two_ortho(make_hadamard(4)),
      AtomicSet::sign_vectors(3),
      AtomicSet::orthogonal_matrices(2),
      AtomicSet::finite_set(normalize_columns(gaussian_matrix(3, 2, rng))),
  };
  for (const auto& s : sets) {
    const Json j = to_json(s);
    const AtomicSet back = atomic_set_from_json(Json::parse(j.dump()));
    EXPECT_EQ(back.name(), s.name());
    EXPECT_EQ(to_json(back), j);
  }
}

TEST(AtomicSetJson, ShorthandsAndErrors) {
  const auto h = atomic_set_from_json(Json::parse(R"({"kind":"two_ortho","hadamard":8})"));
  EXPECT_EQ(h.ambient_dim(), 8);
  const auto g = atomic_set_from_json(Json::parse(R"({"kind":"group_sparse","n":5,"group_size":2})"));
  EXPECT_EQ(g.as<GroupSparse>()->groups.size(), 3u);
  EXPECT_THROW(atomic_set_from_json(Json::parse(R"({"kind":"standard_basis","n":3,"x":1})")), InvalidArgument);
  EXPECT_THROW(atomic_set_from_json(Json::parse(R"({"kind":"nope"})")), InvalidArgument);
  EXPECT_THROW(atomic_set_from_json(Json::parse(R"({"kind":"standard_basis","n":2.5})")), InvalidArgument);
}

TEST(RecoveryInstanceJson, Fields) {
  const auto [inst, f] = make_recovery_instance(AtomicSet::standard_basis(6), 2, 0.1, 17);
  const Json j = to_json(inst);
  EXPECT_EQ(j.at("seed"), 17);
  EXPECT_EQ(j.at("atomic_set").at("kind"), "standard_basis");
  EXPECT_EQ(j.at("atoms").size(), 2u);
  EXPECT_EQ(j.at("atoms")[0].at("type"), "basis");
  EXPECT_EQ(j.at("weights").size(), 2u);
  EXPECT_DOUBLE_EQ(j.at("noise_level").get<double>(), 0.1);
}

TEST(SetFunctionJson, RoundTrip) {
  const SetFunction g = random_monotone(8, 4);
  const Json j = to_json(g);
  EXPECT_EQ(j.at("p"), 4);
  EXPECT_EQ(j.at("values").size(), 16u);
  const SetFunction back = set_function_from_json(Json::parse(j.dump(17)));
  EXPECT_EQ(back.tabulate(), g.tabulate());
  EXPECT_THROW(set_function_from_json(Json::parse(R"({"p":2,"values":[0,1,2]})")), InvalidArgument);
  EXPECT_THROW(set_function_from_json(Json::parse(R"({"p":1,"values":[0,1],"extra":0})")), InvalidArgument);
}

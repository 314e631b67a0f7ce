#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"
#include "qcvx/corpus.hpp"
#include "qcvx/io.hpp"
#include "qcvx/legendre.hpp"

using namespace qcvx;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result call(std::vector<std::string> args) {
  args.insert(args.begin(), "qcvx");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string tmp(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("qcvx_cli_" + name)).string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("slab example") {
  const auto r = call({"slab", "--v1", "0,0", "--c1", "0", "--v2", "1,0", "--c2", "0.5", "--radius", "1",
                       "--no-timestamp"});
  REQUIRE(r.code == 0);
  CHECK(r.out == "width,lo,hi,m,e\n1,0.5,1.5,0.5,1;0\n");

  const auto s = call({"slab", "--v1", "0,0", "--c1", "0", "--v2", "1,0", "--c2", "0.5", "--radius", "1",
                       "--format", "structured", "--no-timestamp"});
  REQUIRE(s.code == 0);
  const auto j = nlohmann::json::parse(s.out);
  CHECK(j["rows"][0]["width"] == 1.0);
  CHECK(j["rows"][0]["lo"] == 0.5);
  CHECK(j["rows"][0]["hi"] == 1.5);
}

TEST_CASE("exit codes and usage") {
  const auto bad = call({"frobnicate"});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("Usage") != std::string::npos);
  CHECK(call({"slab", "--bogus", "1"}).code == 2);
  CHECK(call({}).code == 2);
  CHECK(call({"prox", "--y", "0"}).code == 2);  // no --in
  CHECK(call({"slab", "--v1", "0", "--c1", "0", "--v2", "0", "--c2", "1", "--radius", "1"}).code == 2);
  CHECK(call({"verify", "--suite", "nonexistent"}).code == 2);
  CHECK(call({"--format", "xml", "slab"}).code == 2);
  CHECK(call({"--help"}).code == 0);
}

TEST_CASE("gen is deterministic and round-trips exactly") {
  const auto a = tmp("gen_a.json"), b = tmp("gen_b.json"), c = tmp("gen_c.json");
  REQUIRE(call({"gen", "--seed", "42", "--dim", "2", "--nodes", "17", "--out", a, "--no-timestamp"}).code == 0);
  REQUIRE(call({"gen", "--seed", "42", "--dim", "2", "--nodes", "17", "--out", b, "--no-timestamp"}).code == 0);
  REQUIRE(call({"gen", "--seed", "43", "--dim", "2", "--nodes", "17", "--out", c, "--no-timestamp"}).code == 0);
  CHECK((slurp(a) == slurp(b)));
  CHECK(slurp(a + ".oracle.json") == slurp(b + ".oracle.json"));
  CHECK((slurp(a) != slurp(c)));

  const auto d = GridDomain::cube(2, -1, 1, 17);
  const auto f = corpus::rasterize(corpus::gen_max_quadratics(42, d, 3, -1, 2), d);
  const auto back = io::read_grid_function(a);
  CHECK(back.domain() == d);
  CHECK(back.values() == f.values());

  const auto side = nlohmann::json::parse(slurp(a + ".oracle.json"));
  CHECK(side["pieces"].size() == 3);
  CHECK(side["seed"] == 42);
  CHECK_FALSE(side.contains("timestamp"));

  const auto to_stdout = call({"gen", "--seed", "42", "--dim", "2", "--nodes", "17"});
  CHECK((to_stdout.out == slurp(a)));
  for (const auto& p : {a, b, c}) {
    std::filesystem::remove(p);
    std::filesystem::remove(p + ".oracle.json");
  }
}

TEST_CASE("transform twice recovers the convex envelope") {
  const auto f = tmp("tf_f.json"), g = tmp("tf_g.json"), ff = tmp("tf_ff.json");
  REQUIRE(call({"gen", "--seed", "5", "--nodes", "201", "--out", f, "--no-timestamp"}).code == 0);
  REQUIRE(call({"transform", "--in", f, "--out", g}).code == 0);
  REQUIRE(call({"transform", "--in", g, "--out", ff}).code == 0);
  const auto orig = io::read_grid_function(f);
  const auto twice = io::read_grid_function(ff);
  const auto env = legendre::biconjugate_envelope(orig);
  REQUIRE(twice.domain() == orig.domain());
  for (std::size_t i = 0; i < orig.size(); ++i) CHECK(std::abs(twice[i] - env[i]) <= 1e-6 * (1 + orig.sup_norm()));
  for (const auto& p : {f, g, ff}) std::filesystem::remove(p);
}

TEST_CASE("analysis subcommands on a generated function") {
  const auto f = tmp("an_f.json");
  REQUIRE(call({"gen", "--seed", "3", "--nodes", "101", "--curv-lo", "0.5", "--curv-hi", "1.5", "--out", f,
                "--no-timestamp"})
              .code == 0);
  const auto env = call({"envelope", "--in", f});
  CHECK(env.code == 0);
  CHECK(io::grid_function_from_json(nlohmann::json::parse(env.out)).values() == io::read_grid_function(f).values());

  const auto mod = call({"modulus", "--in", f, "--no-timestamp"});
  CHECK(mod.code == 0);
  CHECK(mod.out.rfind("modulus,lambda_max,convexity_defect\n0,", 0) == 0);

  const auto sd = call({"subdiff", "--in", f, "--node", "50", "--no-timestamp"});
  CHECK(sd.code == 0);
  CHECK(sd.out.find("# with_subgradient,1") != std::string::npos);

  const auto cs = call({"contact", "--in", f, "--lambda", "2", "--format", "structured", "--no-timestamp"});
  REQUIRE(cs.code == 0);
  const auto cj = nlohmann::json::parse(cs.out);
  // Kinks of u are concave kinks of q_A - u, so only smooth stretches are contacts.
  CHECK(cj["summary"]["members"].get<std::size_t>() > 0);
  CHECK(cj["summary"]["members"].get<std::size_t>() == cj["rows"].size());

  const auto vm = call({"vertexmap", "--in", f, "--radius", "0.5", "--format", "structured", "--no-timestamp"});
  REQUIRE(vm.code == 0);
  const auto vj = nlohmann::json::parse(vm.out);
  CHECK(vj["summary"]["pairs"] == vj["rows"].size());
  CHECK(vj["summary"]["contraction_defect"].get<double>() <= 1e-8);

  const auto pr = call({"prox", "--in", f, "--y", "0.1", "--radius", "0.5", "--no-timestamp"});
  CHECK(pr.code == 0);
  const auto al = call({"alexandrov", "--in", f, "--no-timestamp"});
  CHECK(al.code == 0);
  CHECK(al.out.rfind("tested,passed,fraction\n", 0) == 0);
  std::filesystem::remove(f);
}

TEST_CASE("measure on the quarter paraboloid") {
  const auto f = tmp("ms_f.json");
  const auto d = GridDomain::line(-1.5, 1.5, 301);
  std::vector<double> v(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) v[i] = 0.25 * d.coord(i, 0) * d.coord(i, 0);
  io::write_grid_function(f, GridFunction(d, v));
  const auto r = call({"measure", "--in", f, "--x0", "0", "--rho", "1", "--radius", "0.25", "--R", "1",
                       "--format", "structured", "--no-timestamp"});
  REQUIRE(r.code == 0);
  const auto row = nlohmann::json::parse(r.out)["rows"][0];
  CHECK(row["coverage_failures"] == 0);
  CHECK(row["lhs"].get<double>() == doctest::Approx(1.0));
  std::filesystem::remove(f);
}

TEST_CASE("verify reports are byte-identical without timestamps") {
  const auto a = call({"verify", "--suite", "slab", "--seed", "1", "--no-timestamp"});
  const auto b = call({"verify", "--suite", "slab", "--seed", "1", "--no-timestamp"});
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.find(",PASS,") != std::string::npos);
  const auto c = call({"verify", "--suite", "slab", "--seed", "1"});
  CHECK(c.out.find("# timestamp,") != std::string::npos);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "seqlab/cli.hpp"
#include "seqlab/json_io.hpp"

using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
  json doc() const { return json::parse(out); }
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = seqlab::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string temp_file(const std::string& name, const std::string& body) {
  const std::string path = "/tmp/seqlab_cli_" + name;
  std::ofstream(path) << body;
  return path;
}

}  // namespace

TEST_CASE("verify") {
  auto r = run({"verify", "--group", "zpxz2:5", "--t", "3", "--alternating", "--ordering", "[[1,0],[2,1],[3,0],[1,1]]"});
  CHECK(r.code == 0);
  auto j = r.doc();
  CHECK(j["conflicts"].empty());
  CHECK(j["valid"] == true);
  CHECK(j["alternating"] == true);
  CHECK(j["partial_sums"] == json::parse("[[0,0],[1,0],[3,1],[1,1],[2,0]]"));

  r = run({"verify", "--group", "cyclic:5", "--t", "2", "--ordering", "[1,4,2]"});
  CHECK(r.code == 1);
  CHECK(r.doc()["conflicts"] == json::parse("[[0,2]]"));

  // not alternating: valid windows but fails the class
  r = run({"verify", "--group", "zpxz2:5", "--t", "1", "--alternating", "--ordering", "[[1,0],[2,0]]"});
  CHECK(r.code == 1);
  CHECK(r.doc()["alternating"] == false);
}

TEST_CASE("input from a file") {
  const auto path = temp_file("ordering.json", "[[1,0],[2,1],[3,0],[1,1]]");
  const auto r = run({"verify", "--group", "zpxz2:5", "--t", "3", "--file", path});
  CHECK(r.code == 0);
  CHECK(r.doc()["ordering"].size() == 4);
  CHECK(run({"verify", "--group", "zpxz2:5", "--t", "3", "--file", "/nonexistent.json"}).code == 2);
  const auto bad = temp_file("bad.json", "[[1,0],");
  const auto e = run({"verify", "--group", "zpxz2:5", "--t", "3", "--file", bad});
  CHECK(e.code == 2);
  CHECK(e.doc().contains("error"));
}

TEST_CASE("errors and usage") {
  auto r = run({"verify", "--group", "cyclic:5", "--t", "2", "--ordering", "[1,1]"});
  CHECK(r.code == 2);
  CHECK(r.doc()["kind"] == "precondition");
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"verify", "--group", "cyclic:5"}).code == 2);
  CHECK(run({"verify", "--group", "cyclic:5", "--t", "x", "--ordering", "[1]"}).code == 2);
  CHECK(run({"--help"}).code == 0);
  CHECK(run({}).code == 2);
  CHECK(run({"group", "--group", "dihedral:9"}).code == 2);
}

TEST_CASE("tables") {
  const auto r = run({"tables", "--id", "1", "--rows", "4,6,8"});
  CHECK(r.code == 0);
  const auto j = r.doc();
  REQUIRE(j["rows"].size() == 3);
  for (const auto& row : j["rows"]) CHECK(row["matches_table"] == true);
  CHECK(j["all_match"] == true);
  CHECK(run({"tables", "--id", "9"}).code == 2);
}

TEST_CASE("coeff") {
  auto r = run({"coeff", "--family", "q", "--k", "6", "--t", "5", "--u", "1"});
  CHECK(r.code == 0);
  auto j = r.doc();
  CHECK(j["value"] == "-4");
  CHECK(j["degree"] == 12);
  CHECK(j["monomial"] == json::parse("[2,2,2,2,2,2]"));

  r = run({"coeff", "--family", "q", "--k", "8", "--t", "7", "--u", "1", "--monomial", "[3,2,3,3,3,3,3,3]",
           "--mod-primes", "1000003,998244353"});
  CHECK(r.code == 0);
  j = r.doc();
  CHECK(j["residues"].size() == 2);

  // off-degree: zero without any work
  r = run({"coeff", "--family", "q", "--k", "4", "--t", "3", "--monomial", "[1,1,1,1]"});
  CHECK(r.code == 0);
  CHECK(r.doc()["value"] == "0");
  CHECK(run({"coeff", "--family", "q", "--k", "4", "--t", "3", "--monomial", "[1,1]"}).code == 2);
}

TEST_CASE("frontier cap from the environment") {
  ::setenv("SEQLAB_FRONTIER_CAP", "10", 1);
  const auto r = run({"coeff", "--family", "q", "--k", "10", "--t", "8", "--u", "1", "--monomial", "[3,4,4,4,4,4,4,4,4,4]"});
  ::unsetenv("SEQLAB_FRONTIER_CAP");
  CHECK(r.code == 2);
  const auto j = r.doc();
  CHECK(j["kind"] == "resource_cap");
  CHECK(j["frontier_peak"].get<long long>() > 10);
  CHECK(run({"coeff", "--family", "q", "--k", "10", "--t", "8", "--u", "1", "--monomial", "[3,4,4,4,4,4,4,4,4,4]"}).code == 0);
}

TEST_CASE("verify-all") {
  auto r = run({"verify-all", "--group", "dihedral:10", "--k", "8", "--t", "4", "--alternating"});
  CHECK(r.code == 0);
  auto j = r.doc();
  CHECK(j["failures"].empty());
  CHECK(j["subsets_checked"] == 5);

  r = run({"verify-all", "--group", "zpxz2:5", "--k", "4", "--t", "3", "--alternating", "--format", "csv"});
  CHECK(r.code == 0);
  std::istringstream lines(r.out);
  std::string line;
  std::getline(lines, line);
  CHECK(line == "subset,sequenced,ordering");
  int rows = 0;
  while (std::getline(lines, line)) ++rows;
  CHECK(rows == 60);

  // an impossible t on a tiny set fails
  r = run({"verify-all", "--group", "dihedral:10", "--k", "8", "--t", "8", "--alternating"});
  CHECK(r.code == 1);
  CHECK_FALSE(r.doc()["failures"].empty());

  r = run({"verify-all", "--group", "dihedral:46", "--k", "8", "--t", "3", "--cap", "10"});
  CHECK(r.code == 2);
}

TEST_CASE("construct and search") {
  auto r = run({"construct", "--method", "t3", "--group", "dihedral:10", "--set", "[[1,0],[2,0],[1,1],[2,1]]"});
  CHECK(r.code == 0);
  CHECK(r.doc()["verification"]["valid"] == true);

  r = run({"construct", "--method", "prefix", "--group", "cyclic:7", "--set", "[1,2,3,4,5,6]", "--t", "2",
           "--length", "5"});
  CHECK(r.code == 0);

  r = run({"construct", "--method", "t4", "--group", "dihedral:22", "--set", "[[1,0],[2,0],[1,1],[2,1]]"});
  CHECK(r.code == 2);

  r = run({"search", "--group", "cyclic:4", "--set", "[1,3]", "--t", "2"});
  CHECK(r.code == 1);
  CHECK(r.doc()["found"] == false);
  r = run({"search", "--group", "zpxz2:5", "--set", "[[2,1],[3,1],[1,0],[4,0]]", "--t", "3", "--alternating"});
  CHECK(r.code == 0);
  CHECK(r.doc()["verification"]["valid"] == true);
}

TEST_CASE("bound and group") {
  auto j = run({"bound", "--t", "2", "--ell", "100", "--variant", "plain"}).doc();
  CHECK(j["value"] == "269/1700");
  CHECK(j["below_one"] == true);

  auto r = run({"group", "--group", "dihedral:10", "--sum", "[[1,1],[1,1]]"});
  CHECK(r.code == 0);
  CHECK(r.doc()["sum"] == json::parse("[0,0]"));
  j = run({"group", "--group", "dihedral:10", "--inverse", "[2,0]"}).doc();
  CHECK(j["inverse"] == json::parse("[3,0]"));
}

TEST_CASE("reports are deterministic and independent of jobs") {
  const std::vector<std::string> est = {"estimate", "--group", "dihedral:22", "--t", "2", "--ell", "10",
                                        "--variant", "plain", "--samples", "3000", "--seed", "5"};
  auto a = run(est), b = run(est);
  auto with_jobs = est;
  with_jobs.insert(with_jobs.end(), {"--jobs", "3"});
  auto c = run(with_jobs);
  REQUIRE(a.code == 0);
  auto ja = a.doc(), jb = b.doc(), jc = c.doc();
  seqlab::io::strip_timing(ja);
  seqlab::io::strip_timing(jb);
  seqlab::io::strip_timing(jc);
  CHECK(ja == jb);
  CHECK(ja["seed"] == 5);
  REQUIRE(ja.contains("mean"));
  ja.erase("jobs");
  jc.erase("jobs");
  CHECK(ja == jc);

  const std::vector<std::string> va = {"verify-all", "--group", "dihedral:14", "--k", "6", "--t", "5",
                                       "--alternating", "--jobs", "1"};
  auto v1 = run(va).doc();
  auto va3 = va;
  va3.back() = "3";
  auto v3 = run(va3).doc();
  CHECK(v1["failures"] == v3["failures"]);
}

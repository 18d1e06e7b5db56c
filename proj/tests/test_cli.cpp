#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "paraode/bench.hpp"

using namespace paraode;

namespace {

int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.push_back("paraode");
  for (const std::string& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name) : path("/tmp/paraode_test_" + name) {}
  ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("method names round-trip and reject unknowns") {
  CHECK(method_name(method_by_name("paraieks")) == "paraieks");
  CHECK(method_name(method_by_name("ieks")) == "ieks");
  CHECK(method_name(method_by_name("eks")) == "eks");
  CHECK_THROWS_AS(method_by_name("rk45"), InvalidInputError);
}

TEST_CASE("the CSV schema is stable") {
  CHECK(std::string(kRunRecordHeader) ==
        "problem,method,nu,grid_size,rmse,runtime_seconds,iterations,sigma_hat,converged,"
        "combine_invocations,sequential_depth");

  RunRecord rec;
  rec.problem = "logistic";
  rec.method = "paraieks";
  rec.nu = 2;
  rec.grid_size = 32;
  rec.rmse = 0.5;
  rec.runtime_seconds = 0.25;
  rec.iterations = 7;
  rec.sigma_hat = 4.0;
  rec.converged = true;
  rec.combine_invocations = 62;
  rec.sequential_depth = 10;
  CHECK(csv_row(rec) == "logistic,paraieks,2,32,0.5,0.25,7,4,true,62,10");

  rec.rmse.reset();
  rec.converged = false;
  CHECK(csv_row(rec) == "logistic,paraieks,2,32,,0.25,7,4,false,62,10");

  const std::string csv = to_csv({rec});
  CHECK(csv == std::string(kRunRecordHeader) + "\n" + csv_row(rec) + "\n");
}

TEST_CASE("the chart renderer tolerates empty and partial input") {
  CHECK(to_svg({}).substr(0, 4) == "<svg");
  RunRecord rec;
  rec.problem = "logistic";
  rec.method = "eks";
  rec.nu = 1;
  rec.grid_size = 16;
  rec.runtime_seconds = 0.5;  // no rmse: the cell is skipped, not drawn
  std::string svg = to_svg({rec});
  CHECK(svg.substr(0, 4) == "<svg");
  rec.rmse = 1e-3;
  RunRecord rec2 = rec;
  rec2.grid_size = 32;
  rec2.rmse = 1e-4;
  rec2.runtime_seconds = 1.0;
  svg = to_svg({rec, rec2});
  CHECK(svg.substr(0, 4) == "<svg");
  CHECK(svg.find("polyline") != std::string::npos);
  CHECK(svg.find("logistic") != std::string::npos);
}

TEST_CASE("solve subcommand writes a machine-readable report") {
  TempFile tmp("solve.json");
  const int code = run({"solve", "--problem", "logistic", "--n", "30", "--nu", "2", "--out",
                        tmp.path});
  CHECK(code == 0);
  const nlohmann::json doc = nlohmann::json::parse(slurp(tmp.path));
  CHECK(doc["problem"] == "logistic");
  CHECK(doc["method"] == "paraieks");
  CHECK(doc["nu"] == 2);
  CHECK(doc["grid_size"] == 30);
  CHECK(doc["grid"].size() == 31);
  CHECK(doc["mean"].size() == 31);
  CHECK(doc["std"].size() == 31);
  CHECK(doc["converged"] == true);
  CHECK(doc["sigma_hat"].get<double>() > 0.0);
  CHECK(doc["iterations"].get<int>() >= 2);
  CHECK(doc["objective_trace"].size() == doc["iterations"].get<std::size_t>());
  // Loose accuracy screen on the terminal value; the solver tests pin this
  // down properly.
  const double terminal = doc["mean"][30][0].get<double>();
  CHECK(terminal == doctest::Approx(0.9955).epsilon(1e-2));
}

TEST_CASE("solve output is identical across worker counts") {
  TempFile a("solve_w1.json");
  TempFile b("solve_w4.json");
  CHECK(run({"solve", "--problem", "vanderpol", "--n", "25", "--workers", "1", "--out", a.path}) ==
        0);
  CHECK(run({"solve", "--problem", "vanderpol", "--n", "25", "--workers", "4", "--out", b.path}) ==
        0);
  CHECK(slurp(a.path) == slurp(b.path));
}

TEST_CASE("solve rejects unusable arguments") {
  CHECK(run({"solve", "--problem", "logistic", "--n", "1"}) == 1);
  CHECK(run({"solve", "--problem", "nosuch"}) == 1);
  CHECK(run({"solve", "--problem", "logistic", "--nu", "9"}) == 1);
  CHECK(run({"--bogus-flag"}) == 1);
  CHECK(run({}) == 1);
}

TEST_CASE("an exhausted iteration budget exits with the non-convergence code") {
  TempFile tmp("solve_budget.json");
  const int code = run({"solve", "--problem", "vanderpol", "--n", "40", "--max-iterations", "1",
                        "--out", tmp.path});
  CHECK(code == 2);
  const nlohmann::json doc = nlohmann::json::parse(slurp(tmp.path));
  CHECK(doc["converged"] == false);
  CHECK(doc["iterations"] == 1);
}

TEST_CASE("benchmark subcommand emits the CSV schema and a chart") {
  TempFile csv("bench.csv");
  TempFile svg("bench.svg");
  const int code = run({"benchmark", "--problems", "logistic", "--methods", "eks", "--nu", "1",
                        "--grid-sizes", "16,32", "--repeats", "1", "--out", csv.path, "--svg",
                        svg.path});
  CHECK(code == 0);
  std::istringstream lines(slurp(csv.path));
  std::string line;
  REQUIRE(std::getline(lines, line));
  CHECK(line == kRunRecordHeader);
  int rows = 0;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    ++rows;
    CHECK(line.substr(0, 13) == "logistic,eks,");
  }
  CHECK(rows == 2);
  CHECK(slurp(svg.path).substr(0, 4) == "<svg");
}

TEST_CASE("compare subcommand validates agreement between the two smoother paths") {
  CHECK(run({"compare", "--problems", "logistic"}) == 0);
  CHECK(run({"compare", "--problems", "logistic", "--tolerance", "0"}) == 1);
}

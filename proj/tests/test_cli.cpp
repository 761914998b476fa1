#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

namespace {

namespace fs = std::filesystem;
using Json = nlohmann::json;

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args, bool merge_stderr = false) {
  const std::string cmd = std::string(GAUSSMINK_CLI_PATH) + " " + args + (merge_stderr ? " 2>&1" : " 2>/dev/null");
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

fs::path workdir() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / ("gaussmink_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

const char* kSquare = R"({"dimension":2,"normals":[[1,0],[0,1],[-1,0],[0,-1]],"support":[1,1,1,1]})";

}  // namespace

TEST_CASE("constants") {
  const auto r = run("constants --n 2 --p 1");
  CHECK(r.code == 0);
  CHECK(r.out.find("r_half=1.17741002") != std::string::npos);
  CHECK(r.out.find("a_half=0.67448975") != std::string::npos);
  CHECK(r.out.find("mass_bound=0.364082243") != std::string::npos);
}

TEST_CASE("measure of the square") {
  const auto sq = workdir() / "square.json";
  write(sq, kSquare);
  const auto r = run("measure --input " + sq.string() + " --p 1");
  REQUIRE(r.code == 0);
  const auto j = Json::parse(r.out);
  REQUIRE(j["edges"].size() == 4);
  for (const auto& e : j["edges"]) CHECK(e["mass"].get<double>() == 0.165190871);
  CHECK(run("measure --input " + sq.string() + " --p 1").out == r.out);
  CHECK(run("measure --input " + (workdir() / "missing.json").string()).code == 2);
}

TEST_CASE("solve-smooth cos family") {
  const auto out = workdir() / "smooth.json";
  const auto r = run("solve-smooth --family cos --amplitude 0.2 --frequency 2 --p 1 --output " + out.string());
  CHECK(r.code == 0);
  const auto j = Json::parse(slurp(out));
  CHECK(j["converged"] == true);
  CHECK(j["residual"].get<double>() <= 1e-9);
  const std::string first = slurp(out);
  run("solve-smooth --family cos --amplitude 0.2 --frequency 2 --p 1 --output " + out.string());
  CHECK(slurp(out) == first);

  const auto svg = run("plot --input " + out.string());
  CHECK(svg.code == 0);
  CHECK(svg.out.find("<polyline") != std::string::npos);
}

TEST_CASE("solve-smooth refuses densities above the mass bound") {
  const auto r = run("solve-smooth --family constant --base-radius 1.2 --p 1", true);
  CHECK(r.code == 2);
  CHECK(r.out.find("not below the bound") != std::string::npos);
}

TEST_CASE("solve-smooth logs a re-chosen start") {
  const auto r = run("solve-smooth --family cos --p 1 --resolution 128 --start-radius 1", true);
  CHECK(r.code == 0);
  CHECK(r.out.find("c0-rechosen") != std::string::npos);
}

TEST_CASE("generate and solve-discrete") {
  const auto bad = workdir() / "bad.json";
  CHECK(run("generate --name hemisphere-bad --output " + bad.string()).code == 0);
  const auto r = run("solve-discrete --input " + bad.string(), true);
  CHECK(r.code == 2);
  CHECK(r.out.find("closed hemisphere") != std::string::npos);

  const auto mgon = workdir() / "mgon.json";
  CHECK(run("generate --name uniform-mgon --m 8 --mass 0.3 --output " + mgon.string()).code == 0);
  CHECK(Json::parse(slurp(mgon))["atoms"].size() == 8);
  const auto sol = run("solve-discrete --input " + mgon.string());
  CHECK(sol.code == 0);
  const auto j = Json::parse(sol.out);
  CHECK(j["converged"] == true);
  CHECK(j["body"]["support"].size() == 8);
  CHECK(run("solve-discrete --input " + mgon.string()).out == sol.out);

  const auto even = run("generate --name random-even --seed 7");
  REQUIRE(even.code == 0);
  const auto atoms = Json::parse(even.out)["atoms"];
  CHECK(atoms.size() % 2 == 0);
  for (std::size_t i = 0; i < atoms.size(); i += 2) {
    CHECK(atoms[i]["mass"] == atoms[i + 1]["mass"]);
    CHECK(atoms[i]["direction"][0].get<double>() == -atoms[i + 1]["direction"][0].get<double>());
  }
  CHECK(run("generate --name random-even --seed 7").out == even.out);
  CHECK(run("generate --name nothing").code == 2);
}

TEST_CASE("verify") {
  const auto json = workdir() / "suite.json";
  const auto r = run("verify --seed 3 --instances 5 --output " + json.string());
  CHECK(r.code == 0);
  CHECK(r.out.find("isoperimetric") != std::string::npos);
  CHECK(r.out.find("FAIL") == std::string::npos);
  CHECK(run("verify --seed 3 --instances 5").out == r.out);

  const auto suite = Json::parse(slurp(json));
  REQUIRE(suite.is_array());
  const auto witness = workdir() / "witness.json";
  write(witness, suite[0].dump());
  const auto replay = run("verify --input " + witness.string());
  CHECK(replay.code == 0);
  CHECK(Json::parse(replay.out)["worst_violation"] == suite[0]["worst_violation"]);

  // a body that breaks the ball bound cannot exist, but a forged witness with a tiny tolerance fails
  write(witness, R"({"check":"mixed_measure","K":)" + std::string(kSquare) + R"(,"L":)" + kSquare + R"(,"p":0.5})");
  CHECK(run("verify --input " + witness.string()).code == 2);
}

TEST_CASE("usage errors") {
  CHECK(run("").code == 2);
  CHECK(run("--help").code == 0);
  CHECK(run("frobnicate").code == 2);
  CHECK(run("solve-smooth --family cos --resolution 10").code == 2);
  CHECK(run("solve-smooth --family triangle").code == 2);
  CHECK(run("constants --p nan").code == 2);
}

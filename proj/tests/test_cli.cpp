#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include "cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = sinkchain::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

double field(const std::string& text, const std::string& key) {
  const std::regex re("(^|\\s)" + key + "=([-0-9.e+]+)");
  std::smatch m;
  REQUIRE(std::regex_search(text, m, re));
  return std::stod(m[2]);
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("sinkchain_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

const std::vector<std::string> kPaperNoise{"--n", "3", "--gamma", "0.25", "--big-gamma", "0.5",
                                           "--gamma-sink", "1"};

std::vector<std::string> with(std::vector<std::string> head, const std::vector<std::string>& tail) {
  head.insert(head.end(), tail.begin(), tail.end());
  return head;
}

}  // namespace

TEST_CASE("simulate: single site") {
  const Result r = run({"simulate", "--n", "1", "--lambda", "1", "--gamma", "0", "--big-gamma", "0.5",
                        "--gamma-sink", "1", "--scenario", "quantum"});
  CHECK(r.code == 0);
  CHECK(std::abs(field(r.out, "eta") - 0.666667) < 1e-6);
}

TEST_CASE("simulate: both scenarios at the crossing point") {
  const fs::path dir = scratch("both");
  const Result r = run(with({"simulate", "--lambda", "0.84", "--scenario", "both", "--out",
                             (dir / "traj.csv").string()},
                            kPaperNoise));
  CHECK(r.code == 0);
  CHECK(field(r.out, "\\|eta_Q-eta_C\\|") <= 5e-3);
  CHECK(r.out.find("tau=") != std::string::npos);
  const std::string q = slurp(dir / "traj_quantum.csv");
  CHECK(q.substr(0, q.find('\n')) == "t,p_sink,coherence");
  CHECK(fs::exists(dir / "traj_classical.csv"));
  fs::remove_all(dir);
}

TEST_CASE("simulate: invalid values and flags") {
  const Result neg = run({"simulate", "--n", "2", "--lambda", "-1", "--gamma", "0", "--big-gamma", "0.5",
                          "--gamma-sink", "1", "--scenario", "quantum"});
  CHECK(neg.code == 2);
  CHECK(neg.err.find("lambda") != std::string::npos);

  const Result missing = run({"simulate", "--n", "2", "--scenario", "quantum"});
  CHECK(missing.code == 2);

  const Result badScenario = run(with({"simulate", "--lambda", "1", "--scenario", "hybrid"}, kPaperNoise));
  CHECK(badScenario.code == 2);

  const Result badTmax = run(with({"simulate", "--lambda", "1", "--scenario", "quantum", "--t-max", "soon"},
                                  kPaperNoise));
  CHECK(badTmax.code == 2);
  CHECK(badTmax.err.find("t_max") != std::string::npos);

  CHECK(run({}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
}

TEST_CASE("simulate: finite horizon without convergence exits 3") {
  const Result r = run(with({"simulate", "--lambda", "1", "--scenario", "quantum", "--t-max", "0.5"},
                            kPaperNoise));
  CHECK(r.code == 3);
  CHECK(r.out.find("not converged") != std::string::npos);
}

TEST_CASE("simulate: --dump-config round-trips") {
  const fs::path dir = scratch("dump");
  const Result first = run(with({"simulate", "--lambda", "1.25", "--scenario", "quantum", "--dump-config",
                                 "--t-max", "7"},
                                kPaperNoise));
  REQUIRE(first.code == 0);
  std::ofstream(dir / "config.json") << first.out;
  const Result second = run({"simulate", "--config", (dir / "config.json").string(), "--scenario", "quantum",
                             "--dump-config"});
  CHECK(second.code == 0);
  CHECK(second.out == first.out);
  fs::remove_all(dir);
}

TEST_CASE("find-lambda-qc") {
  const Result r = run(with({"find-lambda-qc", "--bracket", "0.1,2.0"}, kPaperNoise));
  CHECK(r.code == 0);
  const double coarse = field(r.out, "lambda_qc");
  CHECK(std::abs(coarse - 0.84) <= 0.05);

  const Result fine = run(with({"find-lambda-qc", "--bracket", "0.1,2.0", "--tol", "1e-4"}, kPaperNoise));
  CHECK(fine.code == 0);
  CHECK(std::abs(field(fine.out, "lambda_qc") - coarse) <= 1e-3);

  const Result single = run({"find-lambda-qc", "--n", "1", "--gamma", "0.25", "--big-gamma", "0.5",
                             "--gamma-sink", "1", "--bracket", "0.1,2.0"});
  CHECK(single.code == 4);

  const Result noSign = run(with({"find-lambda-qc", "--bracket", "1.5,3"}, kPaperNoise));
  CHECK(noSign.code == 4);
  CHECK(noSign.err.find("wider") != std::string::npos);
}

TEST_CASE("sweep: single point matches simulate") {
  const fs::path dir = scratch("sweep");
  std::ofstream(dir / "point.json") << R"({
    "chain": {"N": 3, "lambda": 1.0, "gamma": 0.25, "Gamma": 0.5, "Gamma_s": 1.0},
    "sweep": {"axes": [{"parameter": "lambda", "values": [1.0]}]}
  })";
  const Result sweep = run({"sweep", "--config", (dir / "point.json").string(), "--out-dir",
                            (dir / "out").string(), "--name", "point"});
  REQUIRE(sweep.code == 0);
  const std::string data = slurp(dir / "out" / "point_data.csv");
  std::istringstream lines(data);
  std::string header, row;
  std::getline(lines, header);
  std::getline(lines, row);
  CHECK_FALSE(std::getline(lines, header));
  std::vector<std::string> cells;
  std::stringstream rs(row);
  for (std::string c; std::getline(rs, c, ',');) cells.push_back(c);
  REQUIRE(cells.size() >= 10);

  const Result sim = run(with({"simulate", "--lambda", "1.0", "--scenario", "both"}, kPaperNoise));
  REQUIRE(sim.code == 0);
  CHECK(std::abs(std::stod(cells[6]) - field(sim.out, "eta_Q")) < 1e-6);
  CHECK(std::abs(std::stod(cells[7]) - field(sim.out, "eta_C")) < 1e-6);
  CHECK(std::abs(std::stod(cells[9]) - field(sim.out, "I")) < 1e-6);
  CHECK(std::abs(std::stod(cells[10]) - field(sim.out, "C_max")) < 1e-6);
  CHECK(fs::exists(dir / "out" / "point_meta.json"));

  const Result dump = run({"sweep", "--config", (dir / "point.json").string(), "--dump-config"});
  REQUIRE(dump.code == 0);
  std::ofstream(dir / "dumped.json") << dump.out;
  const Result again = run({"sweep", "--config", (dir / "dumped.json").string(), "--dump-config"});
  CHECK(again.out == dump.out);

  std::ofstream(dir / "typo.json") << R"({"chain": {"N": 3, "lamda": 1.0}, "sweep": {}})";
  CHECK(run({"sweep", "--config", (dir / "typo.json").string()}).code == 2);
  CHECK(run({"sweep"}).code == 2);
  fs::remove_all(dir);
}

TEST_CASE("reproduce: unknown figure lists valid ids") {
  const Result r = run({"reproduce", "--figure", "fig12"});
  CHECK(r.code == 2);
  CHECK(r.err.find("fig2") != std::string::npos);
  CHECK(r.err.find("fig9") != std::string::npos);
}

TEST_CASE("reproduce: fig9 carries MHz inputs and ns integrals") {
  const fs::path dir = scratch("fig9");
  const Result r = run({"reproduce", "--figure", "fig9", "--out-dir", dir.string()});
  REQUIRE(r.code == 0);
  const std::string data = slurp(dir / "fig9_data.csv");
  CHECK(data.substr(0, data.find('\n')) == "lambda,gamma,I_ns,eta_Q,eta_C,eta_diff,converged");
  const std::string meta = slurp(dir / "fig9_meta.json");
  CHECK(meta.find("\"MHz\"") != std::string::npos);
  CHECK(meta.find("\"integral_unit\": \"ns\"") != std::string::npos);

  const fs::path dir2 = scratch("fig9_meta");
  const Result again = run({"reproduce", "--meta", (dir / "fig9_meta.json").string(), "--out-dir", dir2.string()});
  REQUIRE(again.code == 0);
  CHECK(slurp(dir2 / "fig9_data.csv") == data);
  fs::remove_all(dir);
  fs::remove_all(dir2);
}

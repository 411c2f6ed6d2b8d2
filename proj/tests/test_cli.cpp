#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "gamow/io.hpp"

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// runs the cli with stdout/stderr captured to files next to the test binary
Run cli(const std::string& args) {
  const std::string cmd = std::string("\"") + GAMOW_CLI_PATH + "\" " + args +
                          " > cli_stdout.txt 2> cli_stderr.txt";
  const int status = std::system(cmd.c_str());
  const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return {code, slurp("cli_stdout.txt"), slurp("cli_stderr.txt")};
}

std::vector<std::vector<double>> csv_rows(const std::string& text, std::string* header = nullptr) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::vector<double>> rows;
  bool first = true;
  while (std::getline(in, line)) {
    if (first) {
      first = false;
      if (header) *header = line;
      continue;
    }
    if (line.empty()) continue;
    std::vector<double> row;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

const std::string kData = GAMOW_DATA_DIR;

}  // namespace

TEST_CASE("evolve: order 1 ket decays as exp(-gamma t / 2)") {
  const Run r = cli("evolve --er 1.5 --gamma 0.8 --order 1 --k 0 --t-max 5 --steps 10");
  REQUIRE(r.code == 0);
  std::string header;
  const auto rows = csv_rows(r.out, &header);
  CHECK(header == "t,re_c0,im_c0");
  REQUIRE(rows.size() == 11);
  for (const auto& row : rows) {
    REQUIRE(row.size() == 3);
    CHECK(std::hypot(row[1], row[2]) == doctest::Approx(std::exp(-0.4 * row[0])).epsilon(1e-14));
  }
}

TEST_CASE("evolve: column count follows the order") {
  const Run r = cli("evolve --er 1 --gamma 1 --order 3 --k 2 --t-max 1 --steps 3");
  REQUIRE(r.code == 0);
  const auto rows = csv_rows(r.out);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].size() == 7);
  // at t = 0 the state is the basis vector |f_2>
  CHECK(rows[0][5] == 1.0);
  CHECK(rows[0][1] == 0.0);
}

TEST_CASE("evolve: negative time is rejected") {
  const Run r = cli("evolve --er 1 --gamma 1 --t-max -1");
  CHECK(r.code == 2);
  CHECK(r.err.find("t >= 0") != std::string::npos);
}

TEST_CASE("evolve: bad arguments") {
  CHECK(cli("evolve --er 1 --gamma 0 --t-max 1").code == 2);
  CHECK(cli("evolve --er 1 --gamma 1 --order 2 --k 2 --t-max 1").code == 2);
  CHECK(cli("").code == 2);
  CHECK(cli("nonsense").code == 2);
}

TEST_CASE("density: norm ratio is exp(-gamma t)") {
  const Run r = cli("density --er 1 --gamma 1 --order 3 --n 1 --t-max 4 --steps 2");
  REQUIRE(r.code == 0);
  std::string header;
  const auto rows = csv_rows(r.out.substr(0, r.out.find("is_exponential")), &header);
  CHECK(header == "t,frobenius_norm,norm_ratio,max_deviation");
  REQUIRE(rows.size() == 3);
  CHECK(rows[1][0] == 2.0);
  CHECK(std::abs(rows[1][2] - std::exp(-2.0)) <= 1e-10);
  CHECK(r.out.find("is_exponential: true") != std::string::npos);
}

TEST_CASE("density: n = 0 verdict and bad n") {
  const Run ok = cli("density --er 2 --gamma 0.5 --order 4 --n 0 --t-max 10 --steps 20");
  CHECK(ok.code == 0);
  CHECK(ok.out.find("is_exponential: true") != std::string::npos);
  CHECK(cli("density --er 1 --gamma 1 --order 2 --n 3 --t-max 1").code == 2);
}

TEST_CASE("density: csv out file") {
  const Run r = cli("density --er 1 --gamma 1 --order 2 --n 1 --t-max 1 --steps 4 --out density_out.csv");
  REQUIRE(r.code == 0);
  CHECK(csv_rows(slurp("density_out.csv")).size() == 5);
}

TEST_CASE("uniqueness: dimension equals order") {
  for (int order : {1, 2, 5}) {
    CAPTURE(order);
    const Run r = cli("uniqueness --order " + std::to_string(order));
    REQUIRE(r.code == 0);
    const auto j = gamow::io::json::parse(r.out);
    CHECK(j["dimension"].get<int>() == order);
    CHECK(j["basis_matrices"].size() == static_cast<size_t>(order));
    REQUIRE(j["projection_residuals"].size() == static_cast<size_t>(order));
    for (const auto& p : j["projection_residuals"]) CHECK(p["residual"].get<double>() <= 1e-8);
  }
  CHECK(cli("uniqueness --order 0").code == 2);
}

TEST_CASE("lineshape: lorentzian peak") {
  const Run r = cli("lineshape --er 1 --gamma 0.5 --e-min 0 --e-max 2 --points 3");
  REQUIRE(r.code == 0);
  std::string header;
  const auto rows = csv_rows(r.out, &header);
  CHECK(header == "E,value");
  REQUIRE(rows.size() == 3);
  CHECK(rows[1][1] == doctest::Approx(2.0 / (std::numbers::pi * 0.5)).epsilon(1e-15));
}

TEST_CASE("lineshape: malformed weights") {
  CHECK(cli("lineshape --er 1 --gamma 1 --weights 1,x --e-min 0 --e-max 2").code == 2);
  CHECK(cli("lineshape --er 1 --gamma 1 --e-min 2 --e-max 0").code == 2);
}

TEST_CASE("fit: recovers the pole of the bundled order-2 data") {
  const Run r = cli("fit --data " + kData + "/order2_synthetic.csv --init " + kData +
                    "/order2_init.json --out fit_out.json");
  REQUIRE(r.code == 0);
  const auto j = gamow::io::json::parse(slurp("fit_out.json"));
  CHECK(j["converged"].get<bool>());
  const auto z = gamow::io::complex_from_json(j["model"]["poles"][0]["z"]);
  CHECK(std::abs(z - gamow::cplx(2.0, -0.3)) <= 1e-6);
  CHECK(j["residual_rms"].get<double>() <= 1e-9);
}

TEST_CASE("fit: order selection") {
  const Run r = cli("fit --data " + kData + "/order1_synthetic.csv --init " + kData +
                    "/order1_init.json --max-order 3");
  REQUIRE(r.code == 0);
  const auto j = gamow::io::json::parse(r.out);
  CHECK(j["selection"]["selected_order"].get<int>() == 1);
}

TEST_CASE("fit: input errors") {
  CHECK(cli("fit --data missing.csv --init " + kData + "/order2_init.json").code == 2);
  {
    std::ofstream("bad.csv") << "x,y\n1,2\nfoo,bar\n";
  }
  CHECK(cli("fit --data bad.csv --init " + kData + "/order2_init.json").code == 2);
  {
    std::ofstream("bad_init.json") << "{\"poles\": [";
  }
  CHECK(cli("fit --data " + kData + "/order2_synthetic.csv --init bad_init.json").code == 2);
}

TEST_CASE("fit: non-convergence writes diagnostics and exits 4") {
  std::remove("fit_nc.json");
  const Run r = cli("fit --data " + kData + "/order2_synthetic.csv --init " + kData +
                    "/order2_init.json --max-iterations 2 --out fit_nc.json");
  CHECK(r.code == 4);
  const auto j = gamow::io::json::parse(slurp("fit_nc.json"));
  CHECK_FALSE(j["converged"].get<bool>());
  CHECK(j.contains("error"));
}

TEST_CASE("config file supplies defaults and flags override it") {
  {
    std::ofstream("cli_cfg.json") << R"({"er": 1, "gamma": 3.0, "order": 1, "k": 0, "t-max": 1, "steps": 1})";
  }
  const Run from_cfg = cli("evolve --config cli_cfg.json");
  REQUIRE(from_cfg.code == 0);
  auto rows = csv_rows(from_cfg.out);
  REQUIRE(rows.size() == 2);
  CHECK(std::hypot(rows[1][1], rows[1][2]) == doctest::Approx(std::exp(-1.5)).epsilon(1e-14));

  const Run overridden = cli("evolve --config cli_cfg.json --gamma 1");
  REQUIRE(overridden.code == 0);
  rows = csv_rows(overridden.out);
  CHECK(std::hypot(rows[1][1], rows[1][2]) == doctest::Approx(std::exp(-0.5)).epsilon(1e-14));

  CHECK(cli("evolve --config no_such_config.json").code != 0);
}

TEST_CASE("outputs are byte-identical across runs") {
  const std::vector<std::string> commands = {
      "evolve --er 1 --gamma 1 --order 4 --k 3 --t-max 7 --steps 50",
      "density --er 1 --gamma 0.3 --order 3 --n 2 --t-max 7 --steps 50",
      "uniqueness --order 4",
      "lineshape --er 1 --gamma 1 --weights 1,0.3,0.1 --e-min -3 --e-max 5 --points 101",
      "fit --data " + kData + "/order2_noisy.csv --init " + kData + "/order2_init.json",
  };
  for (const auto& c : commands) {
    CAPTURE(c);
    const Run a = cli(c);
    const Run b = cli(c);
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(!a.out.empty());
  }
}

TEST_CASE("unwritable output is an I/O error") {
  CHECK(cli("evolve --er 1 --gamma 1 --t-max 1 --out /nonexistent_dir/x.csv").code == 3);
}

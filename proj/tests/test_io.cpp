#include <doctest.h>

#include <charconv>
#include <cmath>
#include <cstring>
#include <random>
#include <sstream>

#include "gamow/io.hpp"

using namespace gamow;

TEST_CASE("17-digit formatting round-trips every double") {
  std::mt19937_64 rng(42);
  std::uniform_int_distribution<std::uint64_t> bits;
  int checked = 0;
  while (checked < 20000) {
    const std::uint64_t b = bits(rng);
    double v;
    std::memcpy(&v, &b, sizeof v);
    if (!std::isfinite(v)) continue;
    const std::string text = io::format_double(v);
    double parsed = 0.0;
    std::from_chars(text.data(), text.data() + text.size(), parsed);
    CHECK(parsed == v);
    ++checked;
  }
  CHECK(io::format_double(0.1) == "0.10000000000000001");
  CHECK(io::format_double(2.0) == "2");
  CHECK(io::csv_row({1.0, -0.5}) == "1,-0.5\n");
}

TEST_CASE("series CSV round trip") {
  Series s = sample_complex_series([](double x) { return cplx(std::sin(x), x * x / 3.0); },
                                   {0.0, 1.0, 17}, "demo");
  std::stringstream buf;
  io::write_series_csv(buf, s);
  CHECK(buf.str().rfind("x,re,im\n", 0) == 0);
  const Series back = io::read_series_csv(buf);
  CHECK(back.complex_values);
  CHECK(back.x == s.x);
  CHECK(back.y == s.y);

  Series r = sample_series([](double x) { return 1.0 / 3.0 + x; }, {0.0, 2.0, 5});
  std::stringstream rb;
  io::write_series_csv(rb, r, {"E", "intensity"});
  CHECK(rb.str().rfind("E,intensity\n", 0) == 0);
  const Series rback = io::read_series_csv(rb);
  CHECK_FALSE(rback.complex_values);
  CHECK(rback.y == r.y);
  CHECK(rback.label == "E,intensity");
}

TEST_CASE("malformed CSV is rejected") {
  auto code = [](const std::string& text) {
    std::istringstream in(text);
    try {
      io::read_series_csv(in);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::Io;  // sentinel: no error
  };
  CHECK(code("E,I\n") == ErrorCode::Parse);
  CHECK(code("E,I\n1,2\nx,3\n") == ErrorCode::Parse);
  CHECK(code("1,2,3,4\n") == ErrorCode::Parse);
  CHECK(code("1,2\n2,3,4\n") == ErrorCode::Parse);
  CHECK(code("1,2\n1,3\n") == ErrorCode::InvalidArgument);
  CHECK(code("E,I\r\n0,1\r\n1,2\r\n") == ErrorCode::Io);
  CHECK_THROWS_AS(io::read_series_csv_file("/nonexistent/file.csv"), Error);
}

TEST_CASE("pole model JSON") {
  const PoleModel m{{ModelPole{{2.0, -0.3}, 2, {cplx(0.5, 0.1), cplx(1.0, 0.0)}}}};
  const PoleModel back = io::model_from_json(io::model_to_json(m));
  CHECK(back.poles[0].z == m.poles[0].z);
  CHECK(back.poles[0].residues == m.poles[0].residues);

  const auto j = io::json::parse(R"({"poles":[{"z":[2.0,-0.3],"residues":[0.5,[1.0,0.2]]}]})");
  const PoleModel compact = io::model_from_json(j);
  CHECK(compact.poles[0].order == 2);
  CHECK(compact.poles[0].residues[1] == cplx(1.0, 0.2));

  for (const char* bad : {R"({"poles":[{"z":[2.0,0.3],"residues":[1.0]}]})", R"({"poles":[{"residues":[1]}]})",
                          R"({"nope":1})", R"({"poles":[{"z":"x","residues":[1]}]})"}) {
    try {
      io::model_from_json(io::json::parse(bad));
      FAIL("expected Parse for " << bad);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::Parse);
    }
  }
}

TEST_CASE("fit report keys are stable") {
  FitResult fit;
  fit.model = PoleModel{{ModelPole{{2.0, -0.3}, 1, {1.0}}}};
  fit.converged = true;
  fit.iterations = 7;
  fit.objective_history = {1.0, 0.5};
  const io::json j = io::fit_to_json(fit);
  std::vector<std::string> keys;
  for (const auto& [k, v] : j.items()) keys.push_back(k);
  CHECK(keys == std::vector<std::string>{"converged", "iterations", "residual_rms", "gradient_cosine",
                                         "objective", "model"});
  CHECK(j.dump() == io::fit_to_json(fit).dump());
}

TEST_CASE("file helpers report I/O failures") {
  try {
    io::write_text_file("/nonexistent-dir/x.txt", "a");
    FAIL("expected Io");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Io);
  }
}

#include <doctest.h>

#include <cmath>
#include <limits>

#include "gamow/core.hpp"

using namespace gamow;

namespace {
template <typename F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected a gamow::Error");
  return ErrorCode::InvalidArgument;
}
}  // namespace

TEST_CASE("pole position is E_R - i Gamma/2") {
  CHECK(pole_position(ComplexPole(1.0, 0.5)) == cplx(1.0, -0.25));
  CHECK(pole_position(ComplexPole(0.0, 2.0)) == cplx(0.0, -1.0));
  CHECK(pole_position(ComplexPole(2.0, 0.6)) == cplx(2.0, -0.3));
}

TEST_CASE("pole position lies strictly below the real axis") {
  for (double width : {1e-300, 1e-12, 0.3, 1.0, 7.5, 1e200}) {
    CHECK(pole_position(ComplexPole(-3.0, width)).imag() < 0.0);
  }
}

TEST_CASE("pole validation") {
  CHECK(code_of([] { ComplexPole(1.0, 0.0); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { ComplexPole(1.0, -1.0); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { ComplexPole(1.0, 1.0, 0); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { ComplexPole(std::nan(""), 1.0); }) == ErrorCode::InvalidArgument);
  CHECK(ComplexPole(1.0, 1.0).order() == 1);
}

TEST_CASE("binomial small values") {
  CHECK(binomial(0, 0) == 1);
  CHECK(binomial(2, 1) == 2);
  CHECK(binomial(5, 2) == 10);
  CHECK(binomial(5, -1) == 0);
  CHECK(binomial(5, 6) == 0);
  CHECK(binomial(67, 33) == 14226520737620288370ULL);
}

TEST_CASE("binomial obeys Pascal's rule up to n = 30") {
  for (int n = 1; n <= 30; ++n) {
    for (int k = 1; k <= n; ++k) {
      CHECK(binomial(n, k) == binomial(n - 1, k - 1) + binomial(n - 1, k));
    }
  }
}

TEST_CASE("binomial reports overflow and bad n") {
  CHECK(code_of([] { binomial(68, 34); }) == ErrorCode::Overflow);
  CHECK(code_of([] { binomial(-1, 0); }) == ErrorCode::InvalidArgument);
  CHECK(binomial(1000, 1) == 1000);
  CHECK(binomial(1000, 999) == 1000);
}

TEST_CASE("state and operator shapes follow the pole order") {
  const ComplexPole pole(1.0, 0.5, 3);
  CHECK(code_of([&] { GamowState(pole, CVector::Zero(2)); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([&] { GamowOperator(pole, CMatrix::Zero(3, 2)); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([&] { GamowState::basis(pole, 3); }) == ErrorCode::IndexOutOfRange);
  CHECK(GamowState::basis(pole, 2)[2] == cplx(1.0));
  CHECK(GamowOperator::dyad(pole, 1, 2).matrix()(1, 2) == cplx(1.0));
}

TEST_CASE("time grid stays on t >= 0") {
  const TimeGrid g = TimeGrid::span(10.0, 100);
  CHECK(g.size() == 101);
  CHECK(g.at(0) == 0.0);
  CHECK(g.times().back() == doctest::Approx(10.0).epsilon(1e-15));
  for (const double t : g.times()) CHECK(t >= 0.0);
  CHECK(code_of([] { TimeGrid(-0.1, 0.1, 3); }) == ErrorCode::ArrowOfTimeViolation);
  CHECK(code_of([] { TimeGrid::span(-1.0, 3); }) == ErrorCode::ArrowOfTimeViolation);
  CHECK(code_of([] { TimeGrid(0.0, 0.0, 3); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { TimeGrid(0.0, 0.1, 0); }) == ErrorCode::InvalidArgument);
}

#include <doctest.h>

#include <cmath>
#include <locale>
#include <sstream>

#include "washerkorn/error.hpp"
#include "washerkorn/io.hpp"
#include "washerkorn/testfields.hpp"

using namespace wk;

TEST_SUITE_BEGIN("io");

namespace {

struct CommaDecimal : std::numpunct<char> {
  char do_decimal_point() const override { return ','; }
  char do_thousands_sep() const override { return '.'; }
  std::string do_grouping() const override { return "\3"; }
};

/// Sets a comma-decimal global locale for the lifetime of the guard.
struct LocaleGuard {
  std::locale saved;
  LocaleGuard() : saved(std::locale::global(std::locale(std::locale::classic(), new CommaDecimal))) {}
  ~LocaleGuard() { std::locale::global(saved); }
};

SpMat sample_matrix() {
  SpMat m(4, 3);
  m.insert(0, 0) = 1.0;
  m.insert(1, 2) = -2.5e-17;
  m.insert(3, 1) = 1.0 / 3.0;
  m.insert(2, 2) = 6.02e23;
  m.makeCompressed();
  return m;
}

}  // namespace

TEST_CASE("numbers round-trip exactly") {
  for (double v : {0.0, -0.0, 1.0, 0.1, 1.0 / 3.0, 1e-300, -7.25e200, 123456789.0})
    CHECK(parse_number(format_number(v)) == v);
  CHECK(parse_number("  2.5\r") == 2.5);
  CHECK(parse_number("+1e-3") == 1e-3);
  CHECK(format_number(INFINITY) == "inf");
  CHECK(std::isnan(parse_number(format_number(NAN))));
}

TEST_CASE("number parsing is strict") {
  for (const char* bad : {"", " ", "1.5x", "1,5", "0x10", "--1", "1e", "abc"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(parse_number(bad), InvalidArgument);
  }
}

TEST_CASE("number text ignores the global locale") {
  const std::string before = format_number(1234.5);
  LocaleGuard guard;
  CHECK(format_number(1234.5) == before);
  CHECK(parse_number("1234.5") == 1234.5);
  CHECK_THROWS_AS(parse_number("1234,5"), InvalidArgument);
}

TEST_CASE("field file round trip") {
  const WasherGeometry g{0.5, 1.0, 0.1};
  for (auto bc : {BoundaryCondition::V1, BoundaryCondition::V2}) {
    const auto f = random_admissible_field(9, g, bc);
    std::stringstream ss;
    write_field(ss, f, bc, 33, 9);
    const std::string text = ss.str();
    const auto back = read_field(ss);
    CHECK(back.bc == bc);
    CHECK(back.field.geometry().r == g.r);
    CHECK(back.field.geometry().R == g.R);
    CHECK(back.field.geometry().h == g.h);
    REQUIRE(back.field.modes().size() == f.modes().size());
    for (std::size_t k = 0; k < f.modes().size(); ++k) CHECK(back.field.modes()[k].n == f.modes()[k].n);
    // Exact at the sample nodes.
    for (int i = 0; i < 33; i += 4)
      for (int j = 0; j < 9; ++j) {
        const double rho = i == 32 ? g.R : g.r + (g.R - g.r) * i / 32.0;
        const double z = j == 8 ? g.h : g.h * j / 8.0;
        for (double th : {0.0, 0.7, 2.1}) {
          const auto a = f.displacement(rho, th, z), b = back.field.displacement(rho, th, z);
          for (int c = 0; c < 3; ++c) CHECK(b[c] == doctest::Approx(a[c]).epsilon(1e-13).scale(1.0));
        }
      }
    // Resampling the read-back field reproduces the file up to node rounding.
    std::stringstream again;
    write_field(again, back.field, back.bc, 33, 9);
    std::istringstream t1(text), t2(again.str());
    std::string a, b;
    int tokens = 0;
    while (t1 >> a) {
      REQUIRE(static_cast<bool>(t2 >> b));
      ++tokens;
      if (a == b) continue;
      CHECK(parse_number(b) == doctest::Approx(parse_number(a)).epsilon(1e-14).scale(1.0));
    }
    CHECK_FALSE(static_cast<bool>(t2 >> b));
    CHECK(tokens > 33 * 9);
  }
}

TEST_CASE("field file text does not follow the global locale") {
  const auto f = random_admissible_field(2, WasherGeometry{0.5, 1.0, 0.1}, BoundaryCondition::V2);
  std::stringstream plain;
  write_field(plain, f, BoundaryCondition::V2, 9, 5);
  LocaleGuard guard;
  std::stringstream comma;
  write_field(comma, f, BoundaryCondition::V2, 9, 5);
  CHECK(comma.str() == plain.str());
  CHECK_NOTHROW(read_field(comma));
}

TEST_CASE("malformed field files are rejected") {
  auto parse = [](const std::string& s) {
    std::istringstream is(s);
    return read_field(is);
  };
  CHECK_THROWS_AS(parse(""), InvalidArgument);
  CHECK_THROWS_AS(parse("washerkorn-field 2\n"), InvalidArgument);
  CHECK_THROWS_AS(parse("washerkorn-field 1\ngeometry 1 0.5 0.1\nbc V2\nmodes 0\nsamples 3 3\n"), InvalidArgument);
  CHECK_THROWS_AS(parse("washerkorn-field 1\ngeometry 0.5 1 0.1\nbc V7\nmodes 0\nsamples 3 3\n"), InvalidArgument);
  CHECK_THROWS_AS(parse("washerkorn-field 1\ngeometry 0.5 1 0.1\nbc V2\nmodes 0\nsamples 3 3\n"
                        "mode 0 a_rho\n0 0 0\n0 0\n0 0 0\n"),
                  InvalidArgument);
}

TEST_CASE("MatrixMarket round trip") {
  const SpMat m = sample_matrix();
  std::stringstream ss;
  write_matrix_market(ss, m, "test matrix");
  CHECK(ss.str().rfind("%%MatrixMarket matrix coordinate real general", 0) == 0);
  const SpMat back = read_matrix_market(ss);
  REQUIRE(back.rows() == 4);
  REQUIRE(back.cols() == 3);
  CHECK(back.nonZeros() == m.nonZeros());
  CHECK((Eigen::MatrixXd(back) - Eigen::MatrixXd(m)).norm() == 0.0);
}

TEST_CASE("MatrixMarket symmetric input is expanded") {
  std::istringstream is(
      "%%MatrixMarket matrix coordinate real symmetric\n% c\n3 3 3\n1 1 2.0\n2 1 -1.0\n3 3 4.5\n");
  const Eigen::MatrixXd d = read_matrix_market(is);
  CHECK(d(0, 0) == 2.0);
  CHECK(d(1, 0) == -1.0);
  CHECK(d(0, 1) == -1.0);
  CHECK(d(2, 2) == 4.5);
  std::istringstream bad("%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1.0\n");
  CHECK_THROWS_AS(read_matrix_market(bad), InvalidArgument);
}

TEST_CASE("eigen CSV layout") {
  EigenPairs p;
  p.values = {0.5, 2.0};
  p.residuals = {1e-12, 3e-11};
  p.vectors = Eigen::MatrixXd::Identity(3, 2);
  std::ostringstream a, b;
  write_eigenpairs_csv(a, p);
  write_eigenvectors_csv(b, p);
  std::istringstream ia(a.str());
  std::string line;
  std::getline(ia, line);
  CHECK(line == "index,eigenvalue,residual");
  std::getline(ia, line);
  CHECK(line == "0,0.5,1e-12");
  int rows = 0;
  std::istringstream ib(b.str());
  while (std::getline(ib, line))
    if (!line.empty() && line[0] != '#') ++rows;
  CHECK(rows >= 3);
}

TEST_SUITE_END();

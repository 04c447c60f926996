#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <sstream>

#include "fiax/algebra.hpp"
#include "fiax/builtin_specs.hpp"

using namespace fiax;

namespace {

Algebra builtin(const std::string& name) {
  return load_algebra(builtin_specs().at(name));
}

std::vector<Scalar> star_of(const Algebra& a, const Mat& star, int elem) {
  return star.col(elem);
}

bool is_basis_vector(const std::vector<Scalar>& v, int idx) {
  for (int i = 0; i < (int)v.size(); ++i)
    if (i == idx ? !v[i].is_one() : !v[i].is_zero()) return false;
  return true;
}

}  // namespace

TEST_CASE("builtin presentations load and validate") {
  Algebra dual = builtin("dual_numbers");
  CHECK(dual.dim == 2);
  CHECK(dual.n == 1);
  CHECK(dual.field.is_rational());

  Algebra kx3 = builtin("kx3");
  CHECK(kx3.dim == 3);

  Algebra fp = builtin("fp_cp");
  CHECK(fp.dim == 5);
  CHECK(fp.field.p == 5);

  Algebra br = builtin("brauer_line_n2");
  CHECK(br.dim == 6);
  CHECK(br.n == 2);

  Algebra a2 = builtin("a2_path");
  CHECK(a2.dim == 3);
  CHECK(a2.n == 2);
}

TEST_CASE("peirce_dims") {
  CHECK(peirce_dims(builtin("dual_numbers")) == std::vector<std::vector<int>>{{2}});
  CHECK(peirce_dims(builtin("kx3")) == std::vector<std::vector<int>>{{3}});
  CHECK(peirce_dims(builtin("brauer_line_n2")) ==
        std::vector<std::vector<int>>{{2, 1}, {1, 2}});
  // al runs 1 -> 2, i.e. al = e2 al e1.
  CHECK(peirce_dims(builtin("a2_path")) == std::vector<std::vector<int>>{{1, 0}, {1, 1}});
  for (const auto& [name, text] : builtin_specs()) {
    Algebra a = load_algebra(text);
    auto d = peirce_dims(a);
    int total = 0;
    for (const auto& row : d)
      for (int v : row) total += v;
    CHECK(total == a.dim);
  }
}

TEST_CASE("dual basis for the builtins") {
  Algebra dual = builtin("dual_numbers");
  Mat s = dual_basis(dual);
  CHECK(is_basis_vector(star_of(dual, s, dual.label_index("e")), dual.label_index("x")));
  CHECK(is_basis_vector(star_of(dual, s, dual.label_index("x")), dual.label_index("e")));

  Algebra kx3 = builtin("kx3");
  Mat s3 = dual_basis(kx3);
  CHECK(is_basis_vector(star_of(kx3, s3, kx3.label_index("e")), kx3.label_index("x2")));
  CHECK(is_basis_vector(star_of(kx3, s3, kx3.label_index("x")), kx3.label_index("x")));
  CHECK(is_basis_vector(star_of(kx3, s3, kx3.label_index("x2")), kx3.label_index("e")));

  Algebra br = builtin("brauer_line_n2");
  Mat sb = dual_basis(br);
  CHECK(is_basis_vector(star_of(br, sb, br.label_index("a")), br.label_index("b")));
  CHECK(is_basis_vector(star_of(br, sb, br.label_index("e1")), br.label_index("ba")));

  // Defining property, all builtins with nondegenerate form.
  for (const std::string name : {"dual_numbers", "kx3", "fp_cp", "brauer_line_n2"}) {
    Algebra a = builtin(name);
    Mat st = dual_basis(a);
    for (int x = 0; x < a.dim; ++x)
      for (int b = 0; b < a.dim; ++b) {
        AVec xs;
        for (int c = 0; c < a.dim; ++c)
          if (!st.at(c, x).is_zero()) xs.emplace_back(c, st.at(c, x));
        Scalar t = a.trace_of(a.mul({{b, a.one()}}, xs));
        CHECK(t == Scalar(a.field, b == x ? 1 : 0));
      }
  }
}

TEST_CASE("degenerate trace form is rejected for the A2 path algebra") {
  Algebra a2 = builtin("a2_path");
  CHECK_THROWS_AS(dual_basis(a2), DegenerateTraceForm);
  // Every trace vector fails: the Gram matrix has rank <= 2 < 3.
  for (long t0 : {0, 1, 2})
    for (long t1 : {0, 1}) {
      Algebra a = a2;
      a.trace = {Scalar(a.field, t0), Scalar(a.field, t1), Scalar(a.field, 1)};
      CHECK(rank(gram_matrix(a)) <= 2);
    }
}

TEST_CASE("violations are reported") {
  std::string base = builtin_specs().at("dual_numbers");

  auto replace = [](std::string s, const std::string& from, const std::string& to) {
    s.replace(s.find(from), from.size(), to);
    return s;
  };

  CHECK_THROWS_AS(load_algebra(replace(base, "x * e = x", "x * e = e")),
                  IdempotentViolation);
  CHECK_THROWS_AS(load_algebra(replace(base, "e * e = e", "e * e = x")),
                  IdempotentViolation);
  // Valid unital associative algebra (k^3), but the basis vector w = g1 + (second
  // coordinate) straddles two idempotent blocks.
  const char* straddle =
      "[field]\nrational\n[basis]\ng1 g2 w\n[idempotents]\ng1 g2\n[mult]\n"
      "g1 * g1 = g1\ng2 * g2 = g2\ng1 * w = g1\nw * g1 = g1\n"
      "g2 * w = -1*g1 + w\nw * g2 = -1*g1 + w\nw * w = w\n[trace]\ng1 = 1\nw = 1\n";
  CHECK_THROWS_AS(load_algebra(straddle), PeirceViolation);
  CHECK_THROWS_AS(load_algebra(replace(builtin_specs().at("kx3"), "x * x = x2",
                                       "x * x = e")),
                  AssociativityViolation);
  CHECK_THROWS_AS(load_algebra("[field]\nrational\n"), ParseError);
  CHECK_THROWS_AS(load_algebra(replace(base, "[trace]", "[junk]")), ParseError);
  CHECK_THROWS_AS(load_algebra(base + "e * e = e\n"), ParseError);  // duplicate product
}

TEST_CASE("left and right multiplications commute") {
  for (const auto& [name, text] : builtin_specs()) {
    Algebra alg = load_algebra(text);
    for (int a = 0; a < alg.dim; ++a)
      for (int b = 0; b < alg.dim; ++b)
        CHECK(alg.lmul[a] * alg.rmul[b] == alg.rmul[b] * alg.lmul[a]);
  }
}

TEST_CASE("spec files round-trip losslessly") {
  for (const auto& [name, text] : builtin_specs()) {
    Algebra a = load_algebra(text);
    std::string out = write_algebra(a);
    Algebra b = load_algebra(out);
    CHECK(a.labels == b.labels);
    CHECK(a.idem == b.idem);
    CHECK(a.field == b.field);
    CHECK(a.mult == b.mult);
    CHECK(a.trace == b.trace);
    CHECK(write_algebra(b) == out);
  }
}

TEST_CASE("embedded fixtures match the files shipped under specs/") {
  for (const auto& [name, text] : builtin_specs()) {
    std::ifstream in(std::string(FIAX_SOURCE_DIR) + "/specs/" + name + ".toml");
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    CHECK(ss.str() == text);
  }
}

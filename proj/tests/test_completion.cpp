#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <memory>
#include <string>
#include <vector>

#include "fiax/bilax.hpp"
#include "fiax/builtin_specs.hpp"
#include "fiax/completion.hpp"
#include "fiax/linalg.hpp"

using namespace fiax;

namespace {

std::unique_ptr<Ctx> ctx_for(const std::string& name) {
  return make_context(load_algebra(builtin_specs().at(name)));
}

const char* kDualBasisNames[] = {"dual_numbers", "kx3", "fp_cp",
                                 "brauer_line_n2"};

// The regular bimodule of the ground algebra as an opaque 1-morphism.
OneMorphism regular_om(const Ctx& c, int obj) {
  auto o = std::make_shared<Opaque>();
  o->tgt = o->src = obj;
  o->dim = c.alg.dim;
  o->lact = c.alg.lmul;
  o->ract = c.alg.rmul;
  o->tag = "regular";
  return opaque_om(OpaquePtr(o));
}

Mat frozen(const Field& f, int rows, int cols,
           const std::vector<std::vector<long>>& vals) {
  Mat m(f, rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m.at(i, j) = Scalar(f, vals[i][j]);
  return m;
}

}  // namespace

TEST_CASE("completed unit carriers have the balanced quotient dimension") {
  struct Row {
    const char* name;
    std::vector<int> dim_one;  // per object
    int dim_I;
    int end_dim;
  };
  const Row rows[] = {
      {"dual_numbers", {2}, 4, 2},
      {"kx3", {3}, 9, 3},
      {"fp_cp", {5}, 25, 5},
      {"brauer_line_n2", {5, 5}, 9, 2},
  };
  for (const Row& r : rows) {
    CAPTURE(r.name);
    auto c = ctx_for(r.name);
    REQUIRE((int)r.dim_one.size() == c->alg.n);
    for (int i = 0; i < c->alg.n; ++i) {
      CAPTURE(i);
      CompletedUnit cu = build_completed_unit(*c, i);
      CHECK(mcarrier(*c, cu.one).dim == r.dim_one[i]);
      CHECK(mcarrier(*c, cu.one_prime).dim == r.dim_one[i]);
      CHECK(mcarrier(*c, unit_om(i)).dim == r.dim_I);
      CHECK(describe_om(cu.one) == "[1[" + std::to_string(i) + "]]");
      CHECK((int)hom_space(*c, cu.one, cu.one).size() == r.end_dim);
    }
  }
}

TEST_CASE("completed unit invariants re-verify on every builtin") {
  const char* ids[] = {
      "completed-unit-kernel",          "completed-unit-transport",
      "completed-unit-theta-left",      "completed-unit-theta-right",
      "completed-unit-naturality-left", "completed-unit-naturality-right",
      "completed-unit-local-ring",
  };
  for (const char* name : kDualBasisNames) {
    CAPTURE(name);
    auto c = ctx_for(name);
    for (int i = 0; i < c->alg.n; ++i) {
      CAPTURE(i);
      CompletedUnit cu = build_completed_unit(*c, i);
      Report rep = verify_completed_unit(*c, cu);
      REQUIRE(rep.records.size() == 7);
      CHECK(rep.ok());
      for (size_t t = 0; t < rep.records.size(); ++t) {
        CHECK(rep.records[t].id == ids[t]);
        CHECK(rep.records[t].witness.empty());
        CHECK(rep.records[t].wall_ms >= 0.0);
        CHECK(rep.records[t].anchor ==
              (rep.records[t].id == "completed-unit-local-ring"
                   ? "Proposition 3.11"
                   : "§3.2"));
      }
    }
  }
}

// Coordinates frozen for the dual numbers: the unit word carrier is spanned
// by e⊗e, e⊗x, x⊗e, x⊗x and the quotient identifies the two middle vectors
// and kills the last.  The transport sends the two quotient classes to the
// symmetric tensors e⊗x + x⊗e and x⊗x.
TEST_CASE("dual numbers: frozen projection and transport coordinates") {
  auto c = ctx_for("dual_numbers");
  const Field& f = c->alg.field;
  CompletedUnit cu = build_completed_unit(*c, 0);
  CHECK(cu.xi.m == frozen(f, 2, 4, {{1, 0, 0, 0}, {0, 1, 1, 0}}));
  CHECK(cu.rho.m == frozen(f, 4, 2, {{0, 0}, {1, 0}, {1, 0}, {0, 1}}));
  // The transport is not a section: the composite with the projection is the
  // nilpotent multiplication by the Casimir element, not the identity.
  Mat comp = cu.xi.m * cu.rho.m;
  CHECK(comp == frozen(f, 2, 2, {{0, 0}, {2, 0}}));
  CHECK((comp * comp).is_zero());
  CHECK(is_bimodule_map(*c, cu.rho));
  CHECK(is_bimodule_map(*c, cu.xi));
}

TEST_CASE("transport lands in the equalizer but need not be injective") {
  // On the two-object line fixture the transport kills the socle element
  // seated at the other object, so its rank drops below the carrier
  // dimension; the factorization through the equalizer still exists.
  auto c = ctx_for("brauer_line_n2");
  Scalar m1(c->alg.field, -1);
  for (int i = 0; i < 2; ++i) {
    CAPTURE(i);
    CompletedUnit cu = build_completed_unit(*c, i);
    OneMorphism I = unit_om(i);
    TwoMorphism delta_p = add_tm(oplax_left(*c, I, i),
                                 scale_tm(oplax_right(*c, I, i), m1));
    CHECK((delta_p.m * cu.rho.m).is_zero());
    CHECK(dual_transport_mirror(*c, cu).m == cu.rho.m);
    CHECK(rank(cu.rho.m) == 4);
    CHECK(mcarrier(*c, cu.one).dim == 5);
    auto psi = solve_matrix(cu.xi_prime.m, cu.rho.m);
    REQUIRE(psi);
    CHECK(!inverse(*psi));
  }
  // On the one-object fixtures the factorization happens to be invertible.
  auto d = ctx_for("dual_numbers");
  CompletedUnit cu = build_completed_unit(*d, 0);
  auto psi = solve_matrix(cu.xi_prime.m, cu.rho.m);
  REQUIRE(psi);
  CHECK(inverse(*psi));
}

TEST_CASE("unitor coincidence, self-adjunction, and lifted triangles") {
  const char* ids[] = {
      "fiat-unitor-coincidence",
      "fiat-unit-self-adjunction",
      "fiat-lifted-zigzag-left",
      "fiat-lifted-zigzag-right",
  };
  for (const char* name : kDualBasisNames) {
    CAPTURE(name);
    auto c = ctx_for(name);
    for (int i = 0; i < c->alg.n; ++i) {
      CAPTURE(i);
      Report rep = check_fiat_completion(*c, i);
      REQUIRE(rep.records.size() == 4);
      CHECK(rep.ok());
      for (size_t t = 0; t < rep.records.size(); ++t) {
        CHECK(rep.records[t].id == ids[t]);
        CHECK(rep.records[t].anchor == "Proposition 3.11");
        CHECK(rep.records[t].witness.empty());
      }
    }
  }
}

TEST_CASE("corrupting the projection fails every downstream record") {
  auto c = ctx_for("dual_numbers");
  CompletedUnit cu = build_completed_unit(*c, 0);
  Mat bad = cu.xi.m;
  for (int j = 0; j < bad.cols(); ++j)
    bad.at(0, j) = bad.at(0, j) * Scalar(c->alg.field, 3);
  cu.xi = make_tm(*c, cu.xi.src, cu.xi.tgt, bad);
  Report rep = check_fiat_completion(*c, cu);
  REQUIRE(rep.records.size() == 4);
  CHECK(!rep.ok());
  for (const CheckRecord& r : rep.records) {
    CAPTURE(r.id);
    CHECK(r.status == CheckStatus::fail);
    CHECK(!r.witness.empty());
  }
  CHECK(rep.records[0].witness ==
        "unit comparison failure [theta-right at [1[0]]]: the contraction "
        "does not factor through the projection");
  CHECK(rep.records[1].witness == "unitors unavailable");
}

TEST_CASE("completed unit is not the unit word except over semisimple input") {
  struct Row {
    const char* name;
    const char* witness;
  };
  const Row rows[] = {
      {"dual_numbers", "not isomorphic: dim 2 vs 4"},
      {"kx3", "not isomorphic: dim 3 vs 9"},
      {"fp_cp", "not isomorphic: dim 5 vs 25"},
      {"brauer_line_n2", "not isomorphic: dim 5 vs 9"},
  };
  for (const Row& r : rows) {
    CAPTURE(r.name);
    auto c = ctx_for(r.name);
    Report rep = check_Ihat_not_unit(*c, 0);
    REQUIRE(rep.records.size() == 1);
    CHECK(rep.records[0].id == "completed-unit-vs-lax-unit");
    CHECK(rep.records[0].anchor == "§3.2");
    CHECK(rep.records[0].status == CheckStatus::pass);
    CHECK(rep.records[0].witness == r.witness);
  }
  auto ss = make_context(load_algebra(
      "[field]\nrational\n[basis]\ne\n[idempotents]\ne\n[mult]\ne * e = e\n"
      "[trace]\ne = 1\n"));
  Report rep = check_Ihat_not_unit(*ss, 0);
  REQUIRE(rep.records.size() == 1);
  CHECK(rep.records[0].status == CheckStatus::pass);
  CHECK(rep.records[0].witness == "isomorphic via the projection (dim 1)");
  CHECK(mcarrier(*ss, build_completed_unit(*ss, 0).one).dim == 1);
}

TEST_CASE("endomorphisms of the completed unit form a local ring") {
  struct Row {
    const char* name;
    int end_dim;
    int rad_dim;
    const char* note;
  };
  const Row rows[] = {
      {"dual_numbers", 2, 1, "radical of dimension 1, scalar residue field"},
      {"kx3", 3, 2, "radical of dimension 2, scalar residue field"},
      {"brauer_line_n2", 2, 1, "radical of dimension 1, scalar residue field"},
      {"fp_cp", 5, -1,
       "exhaustive over 3125 elements: 2500 units, 624 nonzero nilpotents"},
  };
  for (const Row& r : rows) {
    CAPTURE(r.name);
    auto c = ctx_for(r.name);
    for (int i = 0; i < c->alg.n; ++i) {
      CAPTURE(i);
      CompletedUnit cu = build_completed_unit(*c, i);
      LocalRingCert cert = certify_local_endos(*c, cu.one);
      CHECK(cert.local);
      CHECK(cert.end_dim == r.end_dim);
      CHECK(cert.rad_dim == r.rad_dim);
      CHECK(cert.note == r.note);
    }
  }
}

TEST_CASE("direct sums are recognized as non-local") {
  {
    auto c = ctx_for("dual_numbers");
    CompletedUnit cu = build_completed_unit(*c, 0);
    LocalRingCert cert = certify_local_endos(*c, oplus({cu.one, cu.one}));
    CHECK(!cert.local);
    CHECK(cert.end_dim == 8);
    CHECK(cert.rad_dim == 4);
    CHECK(cert.note == "residue algebra has dimension 4, expected 1");
  }
  {
    // Here the trace-form fallback cannot even certify a residue line; the
    // verdict stays honest (not certified local), with the reason recorded.
    auto c = ctx_for("fp_cp");
    CompletedUnit cu = build_completed_unit(*c, 0);
    LocalRingCert cert = certify_local_endos(*c, oplus({cu.one, cu.one}));
    CHECK(!cert.local);
    CHECK(cert.end_dim == 20);
    CHECK(cert.note == "residue algebra has dimension 0, expected 1");
  }
}

TEST_CASE("enumeration certificate over a small prime field") {
  std::string text = builtin_specs().at("dual_numbers");
  text.replace(text.find("rational"), 8, "prime = 5");
  auto c = make_context(load_algebra(text));
  CompletedUnit cu = build_completed_unit(*c, 0);
  LocalRingCert cert = certify_local_endos(*c, cu.one);
  CHECK(cert.local);
  CHECK(cert.end_dim == 2);
  CHECK(cert.note == "exhaustive over 25 elements: 20 units, 4 nonzero nilpotents");
  LocalRingCert c2 = certify_local_endos(*c, oplus({cu.one, cu.one}));
  CHECK(!c2.local);
  CHECK(c2.note == "element neither a unit nor nilpotent");
}

TEST_CASE("one-object algebras have a single cell in every order") {
  for (const char* name : {"dual_numbers", "kx3", "fp_cp"}) {
    CAPTURE(name);
    auto c = ctx_for(name);
    CellDecomposition cd = compute_cells(c->alg);
    CHECK(cd.n == 1);
    REQUIRE(cd.indecomposables.size() == 1);
    CHECK(cd.left_cells == std::vector<std::vector<int>>{{0}});
    CHECK(cd.right_cells == std::vector<std::vector<int>>{{0}});
    CHECK(cd.two_sided_cells == std::vector<std::vector<int>>{{0}});
    CHECK(cd.leq_l[0][0] == 1);
    CHECK(check_strongly_regular(cd));
    CHECK(check_cell_multiplicities(c->alg));
  }
}

TEST_CASE("two-object line: cells split by source column and target row") {
  auto c = ctx_for("brauer_line_n2");
  CellDecomposition cd = compute_cells(c->alg);
  CHECK(cd.n == 2);
  using VP = std::vector<std::pair<int, int>>;
  CHECK(cd.indecomposables == VP{{0, 0}, {0, 1}, {1, 0}, {1, 1}});
  using VV = std::vector<std::vector<int>>;
  CHECK(cd.left_cells == VV{{0, 2}, {1, 3}});   // same source column
  CHECK(cd.right_cells == VV{{0, 1}, {2, 3}});  // same target row
  CHECK(cd.two_sided_cells == VV{{0, 1, 2, 3}});
  for (int x = 0; x < 4; ++x)
    for (int y = 0; y < 4; ++y) {
      CHECK((cd.leq_l[x][y] != 0) ==
            (cd.indecomposables[x].second == cd.indecomposables[y].second));
      CHECK((cd.leq_r[x][y] != 0) ==
            (cd.indecomposables[x].first == cd.indecomposables[y].first));
      CHECK(cd.leq_j[x][y] != 0);
    }
  CHECK(check_strongly_regular(cd));
  CHECK(check_cell_multiplicities(c->alg));
}

TEST_CASE("strong regularity fails when the two partitions coincide") {
  CellDecomposition cd;
  cd.n = 2;
  cd.indecomposables = {{0, 0}, {0, 1}, {1, 0}, {1, 1}};
  cd.left_cells = {{0, 1}, {2, 3}};
  cd.right_cells = {{0, 1}, {2, 3}};  // same split: intersections double up
  cd.two_sided_cells = {{0, 1, 2, 3}};
  cd.leq_l = cd.leq_r = cd.leq_j =
      std::vector<std::vector<char>>(4, std::vector<char>(4, 1));
  CHECK(!check_strongly_regular(cd));
}

TEST_CASE("postcomposition with the projection is onto for every cell member") {
  for (const char* name : kDualBasisNames) {
    CAPTURE(name);
    auto c = ctx_for(name);
    CellDecomposition cd = compute_cells(c->alg);
    for (int i = 0; i < c->alg.n; ++i) {
      CAPTURE(i);
      Report rep = check_duflo_factoring(*c, i, cd.indecomposables);
      REQUIRE(rep.records.size() == cd.indecomposables.size());
      CHECK(rep.ok());
      for (size_t t = 0; t < rep.records.size(); ++t) {
        const auto& [a, b] = cd.indecomposables[t];
        CHECK(rep.records[t].id == "duflo-factoring[F(" + std::to_string(a) +
                                       "," + std::to_string(b) + ")]");
        CHECK(rep.records[t].anchor == "§3.9");
        CHECK(rep.records[t].witness.empty());
      }
    }
  }
}

TEST_CASE("a zero candidate cannot absorb the factoring property") {
  auto c = ctx_for("dual_numbers");
  CompletedUnit cu = build_completed_unit(*c, 0);
  auto z = std::make_shared<Opaque>();
  z->tgt = z->src = 0;
  z->dim = 0;
  z->lact.assign(c->alg.dim, Mat(c->alg.field, 0, 0));
  z->ract.assign(c->alg.dim, Mat(c->alg.field, 0, 0));
  z->tag = "zero";
  OneMorphism D = opaque_om(OpaquePtr(z));
  TwoMorphism d = zero_tm(*c, D, cu.one);
  Report rep = check_duflo_factoring(*c, cu, {{0, 0}}, D, d);
  REQUIRE(rep.records.size() == 1);
  CHECK(rep.records[0].status == CheckStatus::fail);
  CHECK(rep.records[0].witness ==
        "postcomposition has rank 0 but dim Hom(F(0,0), unit) = 2");
}

TEST_CASE("degenerate trace pairing is rejected before completion") {
  auto c = ctx_for("a2_path");
  try {
    build_completed_unit(*c, 0);
    FAIL("expected the completion to be refused");
  } catch (const NotSplit& e) {
    CHECK(e.which == "insertions unavailable: trace pairing is degenerate");
  }
}

TEST_CASE("dual numbers: the completed unit is the regular bimodule") {
  auto c = ctx_for("dual_numbers");
  CompletedUnit cu = build_completed_unit(*c, 0);
  auto homs = hom_space(*c, regular_om(*c, 0), cu.one);
  REQUIRE(homs.size() == 2);
  CHECK(!is_isomorphism(*c, homs[0]));
  CHECK(is_isomorphism(*c, homs[1]));
}

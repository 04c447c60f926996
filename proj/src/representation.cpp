#include "fiax/representation.hpp"

#include <cassert>
#include <map>

namespace fiax {

namespace {

void require_pure_word(const OneMorphism& f, const char* who) {
  if (f.placeholder())
    throw std::logic_error(std::string(who) +
                           ": identity 1-morphism has no explicit carrier");
  for (const auto& w : f.summands)
    for (const auto& a : w)
      if (!a.pure())
        throw std::logic_error(std::string(who) +
                               ": opaque tensor factor has no leg model");
}

int as_i(long long v) {
  assert(v >= 0 && v <= 1u << 30);
  return (int)v;
}

// Position lookup for a restricted basis.
std::map<long long, int> positions(const std::vector<long long>& basis) {
  std::map<long long, int> p;
  for (int i = 0; i < (int)basis.size(); ++i) p[basis[i]] = i;
  return p;
}

std::string diff_witness(const Mat& a, const Mat& b) {
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      if (!(a.at(i, j) == b.at(i, j)))
        return "; first difference at row " + std::to_string(i) + ", column " +
               std::to_string(j);
  return "";
}

}  // namespace

std::vector<long long> module_basis(Ctx& c, const OneMorphism& F, int k) {
  require_pure_word(F, "module_basis");
  MCarrier mc = mcarrier(c, F);
  std::vector<long long> out;
  std::vector<int> dg;
  for (int p = 0; p < (int)mc.parts.size(); ++p) {
    const CarrierData& cd = *mc.parts[p];
    int g = (int)cd.atoms.size();
    for (long long loc = 0; loc < cd.dim; ++loc) {
      decode_digits(cd, loc, dg);
      if (c.alg.peirce[cd.legs[g][dg[g]]].second == k)
        out.push_back(mc.offs[p] + loc);
    }
  }
  return out;
}

Mat module_map(Ctx& c, const TwoMorphism& t, int k) {
  auto rb = module_basis(c, t.tgt, k), cb = module_basis(c, t.src, k);
  Mat m(c.alg.field, (int)rb.size(), (int)cb.size());
  for (int i = 0; i < (int)rb.size(); ++i)
    for (int j = 0; j < (int)cb.size(); ++j)
      m.at(i, j) = t.m.at(as_i(rb[i]), as_i(cb[j]));
  return m;
}

Mat module_mult_left(Ctx& c, int obj, const OneMorphism& F, int k) {
  require_pure_word(F, "module_mult_left");
  if (F.tgt_obj != obj)
    throw CompositionMismatch("unit carrier does not compose onto this 1-morphism");
  OneMorphism UF = hcomp1(unit_om(obj), F);
  auto rb = module_basis(c, F, k), cb = module_basis(c, UF, k);
  auto rpos = positions(rb);
  MCarrier mF = mcarrier(c, F), mUF = mcarrier(c, UF);
  Mat m(c.alg.field, (int)rb.size(), (int)cb.size());
  std::vector<int> dz, df;
  for (int j = 0; j < (int)cb.size(); ++j) {
    auto [p, loc] = mUF.locate(cb[j]);
    const CarrierData& cz = *mUF.parts[p];
    const CarrierData& cf = *mF.parts[p];
    decode_digits(cz, loc, dz);
    const AVec& pr = c.alg.prod(cz.legs[0][dz[0]], cz.legs[1][dz[1]]);
    df.assign(dz.begin() + 1, dz.end());
    for (const auto& [cid, cf2] : pr) {
      int pos = cf.leg_pos[0][cid];
      assert(pos >= 0);
      df[0] = pos;
      m.at(rpos.at(mF.offs[p] + encode_digits(cf, df)), j) += cf2;
    }
  }
  return m;
}

Mat module_mult_right(Ctx& c, int obj, const OneMorphism& G, int k) {
  require_pure_word(G, "module_mult_right");
  if (G.src_obj != obj)
    throw CompositionMismatch("this 1-morphism does not compose onto the unit carrier");
  OneMorphism GU = hcomp1(G, unit_om(obj));
  auto rb = module_basis(c, G, k), cb = module_basis(c, GU, k);
  auto rpos = positions(rb);
  MCarrier mG = mcarrier(c, G), mGU = mcarrier(c, GU);
  Mat m(c.alg.field, (int)rb.size(), (int)cb.size());
  std::vector<int> dz, dg;
  for (int j = 0; j < (int)cb.size(); ++j) {
    auto [p, loc] = mGU.locate(cb[j]);
    const CarrierData& cz = *mGU.parts[p];
    const CarrierData& cg = *mG.parts[p];
    int gg = (int)cg.atoms.size();
    decode_digits(cz, loc, dz);
    const AVec& pr = c.alg.prod(cz.legs[gg][dz[gg]], cz.legs[gg + 1][dz[gg + 1]]);
    dg.assign(dz.begin(), dz.begin() + gg + 1);
    for (const auto& [cid, cf2] : pr) {
      int pos = cg.leg_pos[gg][cid];
      assert(pos >= 0);
      dg[gg] = pos;
      m.at(rpos.at(mG.offs[p] + encode_digits(cg, dg)), j) += cf2;
    }
  }
  return m;
}

Mat module_insert_left(Ctx& c, int obj, const OneMorphism& F, int k) {
  require_pure_word(F, "module_insert_left");
  if (F.tgt_obj != obj)
    throw CompositionMismatch("unit carrier does not compose onto this 1-morphism");
  if (!c.has_star)
    throw DegenerateTraceForm();
  OneMorphism UF = hcomp1(unit_om(obj), F);
  auto rb = module_basis(c, UF, k), cb = module_basis(c, F, k);
  auto rpos = positions(rb);
  MCarrier mF = mcarrier(c, F), mUF = mcarrier(c, UF);
  Mat m(c.alg.field, (int)rb.size(), (int)cb.size());
  std::vector<int> df, dz;
  for (int j = 0; j < (int)cb.size(); ++j) {
    auto [p, loc] = mF.locate(cb[j]);
    const CarrierData& cf = *mF.parts[p];
    const CarrierData& cz = *mUF.parts[p];
    decode_digits(cf, loc, df);
    int b0 = cf.legs[0][df[0]];
    dz.assign(df.size() + 1, 0);
    for (size_t t = 1; t < df.size(); ++t) dz[t + 1] = df[t];
    // x ↦ Σ_a a ⊗ a★·x over the whole outer leg basis; the star components
    // act on x through the module's left action.
    for (int a : c.alg.right_block[obj]) {
      int apos = cz.leg_pos[0][a];
      assert(apos >= 0);
      dz[0] = apos;
      for (int z = 0; z < c.alg.dim; ++z) {
        const Scalar& sc = c.star.at(z, a);
        if (sc.is_zero()) continue;
        for (const auto& [cid, cf2] : c.alg.prod(z, b0)) {
          int pos = cz.leg_pos[1][cid];
          assert(pos >= 0);
          dz[1] = pos;
          m.at(rpos.at(mUF.offs[p] + encode_digits(cz, dz)), j) += sc * cf2;
        }
      }
    }
  }
  return m;
}

Mat module_insert_right(Ctx& c, int obj, const OneMorphism& G, int k) {
  require_pure_word(G, "module_insert_right");
  if (G.src_obj != obj)
    throw CompositionMismatch("this 1-morphism does not compose onto the unit carrier");
  if (!c.has_star)
    throw DegenerateTraceForm();
  OneMorphism GU = hcomp1(G, unit_om(obj));
  auto rb = module_basis(c, GU, k), cb = module_basis(c, G, k);
  auto rpos = positions(rb);
  MCarrier mG = mcarrier(c, G), mGU = mcarrier(c, GU);
  Mat m(c.alg.field, (int)rb.size(), (int)cb.size());
  std::vector<int> dg, dz;
  for (int j = 0; j < (int)cb.size(); ++j) {
    auto [p, loc] = mG.locate(cb[j]);
    const CarrierData& cg = *mG.parts[p];
    const CarrierData& cz = *mGU.parts[p];
    int gg = (int)cg.atoms.size();
    decode_digits(cg, loc, dg);
    int y = cg.legs[gg][dg[gg]];
    dz.assign(dg.size() + 1, 0);
    for (int t = 0; t < gg; ++t) dz[t] = dg[t];
    for (int a : c.alg.block[obj][obj]) {
      int apos = cz.leg_pos[gg][a];
      assert(apos >= 0);
      dz[gg] = apos;
      for (int z = 0; z < c.alg.dim; ++z) {
        const Scalar& sc = c.star.at(z, a);
        if (sc.is_zero()) continue;
        for (const auto& [cid, cf2] : c.alg.prod(z, y)) {
          int pos = cz.leg_pos[gg + 1][cid];
          assert(pos >= 0);
          dz[gg + 1] = pos;
          m.at(rpos.at(mGU.offs[p] + encode_digits(cz, dz)), j) += sc * cf2;
        }
      }
    }
  }
  return m;
}

Mat module_insert_left_naive(Ctx& c, int obj, const OneMorphism& F, int k) {
  require_pure_word(F, "module_insert_left_naive");
  if (F.tgt_obj != obj)
    throw CompositionMismatch("unit carrier does not compose onto this 1-morphism");
  OneMorphism UF = hcomp1(unit_om(obj), F);
  auto rb = module_basis(c, UF, k), cb = module_basis(c, F, k);
  auto rpos = positions(rb);
  MCarrier mF = mcarrier(c, F), mUF = mcarrier(c, UF);
  Mat m(c.alg.field, (int)rb.size(), (int)cb.size());
  std::vector<int> df, dz;
  for (int j = 0; j < (int)cb.size(); ++j) {
    auto [p, loc] = mF.locate(cb[j]);
    const CarrierData& cf = *mF.parts[p];
    const CarrierData& cz = *mUF.parts[p];
    decode_digits(cf, loc, df);
    int b0 = cf.legs[0][df[0]];
    if (c.alg.peirce[b0].first != obj) continue;  // e·x vanishes off the row
    dz.assign(df.size() + 1, 0);
    dz[0] = cz.leg_pos[0][c.alg.idem[obj]];
    dz[1] = cz.leg_pos[1][b0];
    assert(dz[0] >= 0 && dz[1] >= 0);
    for (size_t t = 1; t < df.size(); ++t) dz[t + 1] = df[t];
    m.at(rpos.at(mUF.offs[p] + encode_digits(cz, dz)), j) = c.one();
  }
  return m;
}

void check_defining_representation(Ctx& c, const UnitContext& ctx,
                                   std::mt19937_64& rng, bool naive_insertion) {
  for (const auto& u : ctx.lax) {
    int obj = u.obj;
    const OplaxUnit& up = find_oplax(ctx, obj);
    auto inc = unit_test_generators(c, obj, true, &rng);
    auto out = unit_test_generators(c, obj, false, &rng);
    for (const auto& F : inc) {
      int k = F.src_obj;
      Mat lhs = module_mult_left(c, obj, F, k);
      Mat rhs = module_map(c, u.l(F), k);
      if (!(lhs == rhs))
        throw AxiomViolation("rep-left-multiplication",
                             "F=" + describe_om(F) + diff_witness(lhs, rhs));
      Mat ilhs = naive_insertion ? module_insert_left_naive(c, obj, F, k)
                                 : module_insert_left(c, obj, F, k);
      Mat irhs = module_map(c, up.lp(F), k);
      if (!(ilhs == irhs))
        throw AxiomViolation("rep-left-insertion",
                             "F=" + describe_om(F) + diff_witness(ilhs, irhs));
    }
    for (const auto& G : out) {
      int k = G.src_obj;
      Mat lhs = module_mult_right(c, obj, G, k);
      Mat rhs = module_map(c, u.r(G), k);
      if (!(lhs == rhs))
        throw AxiomViolation("rep-right-multiplication",
                             "G=" + describe_om(G) + diff_witness(lhs, rhs));
      Mat ilhs = module_insert_right(c, obj, G, k);
      Mat irhs = module_map(c, up.rp(G), k);
      if (!(ilhs == irhs))
        throw AxiomViolation("rep-right-insertion",
                             "G=" + describe_om(G) + diff_witness(ilhs, irhs));
    }
  }
}

}  // namespace fiax

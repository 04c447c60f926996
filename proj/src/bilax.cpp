#include "fiax/bilax.hpp"

#include <cassert>
#include <utility>

namespace fiax {

namespace {

constexpr long long kDenseLimit = 4'000'000;  // max entries of one dense matrix

int as_i(long long v) {
  if (v > kDenseLimit) throw std::logic_error("dense matrix too large");
  return (int)v;
}

void check_entries(long long r, long long c) {
  if (r * c > kDenseLimit) throw std::logic_error("dense matrix too large");
}

void set_block(Mat& m, long long r0, long long c0, const Mat& b) {
  for (int r = 0; r < b.rows(); ++r)
    for (int cc = 0; cc < b.cols(); ++cc) {
      const Scalar& s = b.at(r, cc);
      if (!s.is_zero()) m.at((int)(r0 + r), (int)(c0 + cc)) = s;
    }
}

void require_pure(const OneMorphism& f, const char* who) {
  if (f.placeholder())
    throw std::logic_error(std::string(who) +
                           ": identity 1-morphism has no explicit carrier");
  for (const auto& w : f.summands)
    for (const auto& a : w)
      if (!a.pure())
        throw std::logic_error(std::string(who) +
                               ": opaque tensor factor has no leg model");
}

std::string describe_word(const Word& w) {
  if (w.empty()) return "1";
  std::string s;
  for (const auto& a : w) {
    if (a.pure())
      s += "F(" + std::to_string(a.tgt) + "," + std::to_string(a.src) + ")";
    else
      s += "[" + (a.opq->tag.empty() ? std::string("opaque") : a.opq->tag) + "]";
  }
  return s;
}

// ---------------------------------------------------------------------------
// Per-summand dense blocks of the four unitors.  All act on the contracted
// leg coordinates of pure words: legs (A e_{j0}, e_{j1} A e_{j1}, ...,
// e_{jg} A), mixed-radix with leg 0 major.
// ---------------------------------------------------------------------------

// (b0, m1, rest) -> (b0*m1, rest): merge the first two legs of U∘w.
Mat block_lax_left(Ctx& c, const Word& w, int obj) {
  Word sw;
  sw.reserve(w.size() + 1);
  sw.push_back(Atom{obj, obj, nullptr});
  sw.insert(sw.end(), w.begin(), w.end());
  CarrierPtr cs = carrier(c, sw), ct = carrier(c, w);
  check_entries(ct->dim, cs->dim);
  Mat m(c.alg.field, as_i(ct->dim), as_i(cs->dim));
  std::vector<int> dg, td;
  for (long long idx = 0; idx < cs->dim; ++idx) {
    decode_digits(*cs, idx, dg);
    const AVec& pr = c.alg.prod(cs->legs[0][dg[0]], cs->legs[1][dg[1]]);
    td.assign(dg.begin() + 1, dg.end());
    for (const auto& [k, cf] : pr) {
      int p = ct->leg_pos[0][k];
      assert(p >= 0);
      td[0] = p;
      m.at((int)encode_digits(*ct, td), (int)idx) += cf;
    }
  }
  return m;
}

// (rest, mg, y) -> (rest, mg*y): merge the last two legs of w∘U.
Mat block_lax_right(Ctx& c, const Word& w, int obj) {
  Word sw = w;
  sw.push_back(Atom{obj, obj, nullptr});
  CarrierPtr cs = carrier(c, sw), ct = carrier(c, w);
  check_entries(ct->dim, cs->dim);
  Mat m(c.alg.field, as_i(ct->dim), as_i(cs->dim));
  size_t g = w.size();
  std::vector<int> dg, td;
  for (long long idx = 0; idx < cs->dim; ++idx) {
    decode_digits(*cs, idx, dg);
    const AVec& pr = c.alg.prod(cs->legs[g][dg[g]], cs->legs[g + 1][dg[g + 1]]);
    td.assign(dg.begin(), dg.end() - 1);
    for (const auto& [k, cf] : pr) {
      int p = ct->leg_pos[g][k];
      assert(p >= 0);
      td[g] = p;
      m.at((int)encode_digits(*ct, td), (int)idx) += cf;
    }
  }
  return m;
}

// (b0, rest) -> sum_a (b0*a, a*, rest): dual-basis insertion into leg 0.
Mat block_oplax_left(Ctx& c, const Word& w, int obj) {
  Word tw;
  tw.reserve(w.size() + 1);
  tw.push_back(Atom{obj, obj, nullptr});
  tw.insert(tw.end(), w.begin(), w.end());
  CarrierPtr cs = carrier(c, w), ct = carrier(c, tw);
  check_entries(ct->dim, cs->dim);
  Mat m(c.alg.field, as_i(ct->dim), as_i(cs->dim));
  const std::vector<int>& blk = c.alg.block[obj][obj];
  std::vector<int> dg, td;
  for (long long idx = 0; idx < cs->dim; ++idx) {
    decode_digits(*cs, idx, dg);
    td.resize(dg.size() + 1);
    for (size_t t = 1; t < dg.size(); ++t) td[t + 1] = dg[t];
    int b0 = cs->legs[0][dg[0]];
    for (int a : blk) {
      const AVec& pr = c.alg.prod(b0, a);
      if (pr.empty()) continue;
      for (int k2 : blk) {
        const Scalar& s2 = c.star.at(k2, a);
        if (s2.is_zero()) continue;
        td[1] = ct->leg_pos[1][k2];
        assert(td[1] >= 0);
        for (const auto& [k1, c1] : pr) {
          td[0] = ct->leg_pos[0][k1];
          assert(td[0] >= 0);
          m.at((int)encode_digits(*ct, td), (int)idx) += c1 * s2;
        }
      }
    }
  }
  return m;
}

// (rest, y) -> sum_a (rest, a, a* * y): dual-basis insertion into the last leg.
Mat block_oplax_right(Ctx& c, const Word& w, int obj) {
  Word tw = w;
  tw.push_back(Atom{obj, obj, nullptr});
  CarrierPtr cs = carrier(c, w), ct = carrier(c, tw);
  check_entries(ct->dim, cs->dim);
  Mat m(c.alg.field, as_i(ct->dim), as_i(cs->dim));
  const std::vector<int>& blk = c.alg.block[obj][obj];
  size_t g = w.size();
  std::vector<int> dg, td;
  for (long long idx = 0; idx < cs->dim; ++idx) {
    decode_digits(*cs, idx, dg);
    td.resize(dg.size() + 1);
    for (size_t t = 0; t < g; ++t) td[t] = dg[t];
    int y = cs->legs[g][dg[g]];
    for (int a : blk) {
      td[g] = ct->leg_pos[g][a];
      assert(td[g] >= 0);
      for (int k : blk) {
        const Scalar& s = c.star.at(k, a);
        if (s.is_zero()) continue;
        for (const auto& [k3, c3] : c.alg.prod(k, y)) {
          td[g + 1] = ct->leg_pos[g + 1][k3];
          assert(td[g + 1] >= 0);
          m.at((int)encode_digits(*ct, td), (int)idx) += s * c3;
        }
      }
    }
  }
  return m;
}

TwoMorphism assemble(Ctx& c, const OneMorphism& src, const OneMorphism& tgt,
                     const std::vector<Mat>& blocks) {
  MCarrier ms = mcarrier(c, src), mt = mcarrier(c, tgt);
  check_entries(mt.dim, ms.dim);
  Mat m(c.alg.field, as_i(mt.dim), as_i(ms.dim));
  for (size_t q = 0; q < blocks.size(); ++q)
    set_block(m, mt.offs[q], ms.offs[q], blocks[q]);
  return make_tm(c, src, tgt, std::move(m));
}

bool tm_equal(const TwoMorphism& a, const TwoMorphism& b) {
  return a.src == b.src && a.tgt == b.tgt && a.m == b.m;
}

std::string diff_suffix(const TwoMorphism& a, const TwoMorphism& b) {
  if (a.src != b.src || a.tgt != b.tgt) return "; endpoint mismatch";
  for (int cc = 0; cc < a.m.cols(); ++cc)
    for (int r = 0; r < a.m.rows(); ++r)
      if (!(a.m.at(r, cc) == b.m.at(r, cc)))
        return "; first difference at row " + std::to_string(r) + ", column " +
               std::to_string(cc);
  return "";
}

const char* kNoUnit = "no unit structure at object ";

}  // namespace

std::string describe_om(const OneMorphism& f) {
  std::string s;
  for (size_t q = 0; q < f.summands.size(); ++q) {
    if (q) s += " + ";
    s += describe_word(f.summands[q]);
  }
  return s;
}

const LaxUnit& find_lax(const UnitContext& uc, int obj) {
  for (const auto& u : uc.lax)
    if (u.obj == obj) return u;
  throw std::logic_error(kNoUnit + std::to_string(obj));
}

const OplaxUnit& find_oplax(const UnitContext& uc, int obj) {
  for (const auto& u : uc.oplax)
    if (u.obj == obj) return u;
  throw std::logic_error(kNoUnit + std::to_string(obj));
}

TwoMorphism lax_left(Ctx& c, const OneMorphism& F, int obj) {
  require_pure(F, "left contraction");
  if (F.tgt_obj != obj)
    throw CompositionMismatch("left contraction at object " + std::to_string(obj) +
                              " applied to " + describe_om(F));
  std::vector<Mat> blocks;
  blocks.reserve(F.summands.size());
  for (const auto& w : F.summands) blocks.push_back(block_lax_left(c, w, obj));
  return assemble(c, hcomp1(unit_om(obj), F), F, blocks);
}

TwoMorphism lax_right(Ctx& c, const OneMorphism& G, int obj) {
  require_pure(G, "right contraction");
  if (G.src_obj != obj)
    throw CompositionMismatch("right contraction at object " + std::to_string(obj) +
                              " applied to " + describe_om(G));
  std::vector<Mat> blocks;
  blocks.reserve(G.summands.size());
  for (const auto& w : G.summands) blocks.push_back(block_lax_right(c, w, obj));
  return assemble(c, hcomp1(G, unit_om(obj)), G, blocks);
}

TwoMorphism oplax_left(Ctx& c, const OneMorphism& F, int obj) {
  require_pure(F, "left insertion");
  if (!c.has_star) throw DegenerateTraceForm();
  if (F.tgt_obj != obj)
    throw CompositionMismatch("left insertion at object " + std::to_string(obj) +
                              " applied to " + describe_om(F));
  std::vector<Mat> blocks;
  blocks.reserve(F.summands.size());
  for (const auto& w : F.summands) blocks.push_back(block_oplax_left(c, w, obj));
  return assemble(c, F, hcomp1(unit_om(obj), F), blocks);
}

TwoMorphism oplax_right(Ctx& c, const OneMorphism& G, int obj) {
  require_pure(G, "right insertion");
  if (!c.has_star) throw DegenerateTraceForm();
  if (G.src_obj != obj)
    throw CompositionMismatch("right insertion at object " + std::to_string(obj) +
                              " applied to " + describe_om(G));
  std::vector<Mat> blocks;
  blocks.reserve(G.summands.size());
  for (const auto& w : G.summands) blocks.push_back(block_oplax_right(c, w, obj));
  return assemble(c, G, hcomp1(G, unit_om(obj)), blocks);
}

UnitContext build_DA(Ctx& c, bool allow_degenerate) {
  if (!c.has_star && !allow_degenerate) throw DegenerateTraceForm();
  UnitContext uc;
  uc.kind = UnitKind::bilax;
  Ctx* cp = &c;
  for (int i = 0; i < c.alg.n; ++i) {
    LaxUnit lu;
    lu.obj = i;
    lu.U = unit_om(i);
    lu.l = [cp, i](const OneMorphism& F) { return lax_left(*cp, F, i); };
    lu.r = [cp, i](const OneMorphism& G) { return lax_right(*cp, G, i); };
    uc.lax.push_back(std::move(lu));
    if (c.has_star) {
      OplaxUnit ou;
      ou.obj = i;
      ou.U = unit_om(i);
      ou.lp = [cp, i](const OneMorphism& F) { return oplax_left(*cp, F, i); };
      ou.rp = [cp, i](const OneMorphism& G) { return oplax_right(*cp, G, i); };
      uc.oplax.push_back(std::move(ou));
    }
  }
  // Every unitor evaluation must land in the hom space of the 2-category.
  for (int i = 0; i < c.alg.n; ++i)
    for (int s = 0; s < c.alg.n; ++s) {
      OneMorphism F = gen_om(i, s), G = gen_om(s, i);
      if (!is_bimodule_map(c, uc.lax[i].l(F)))
        throw AxiomViolation("lax-left-bimodule", describe_om(F));
      if (!is_bimodule_map(c, uc.lax[i].r(G)))
        throw AxiomViolation("lax-right-bimodule", describe_om(G));
      if (c.has_star) {
        if (!is_bimodule_map(c, uc.oplax[i].lp(F)))
          throw AxiomViolation("oplax-left-bimodule", describe_om(F));
        if (!is_bimodule_map(c, uc.oplax[i].rp(G)))
          throw AxiomViolation("oplax-right-bimodule", describe_om(G));
      }
    }
  return uc;
}

// ---------------------------------------------------------------------------
// Staged pipelines.
// ---------------------------------------------------------------------------

OneMorphism step_src(Ctx& c, const Step& s) {
  (void)c;
  if (const auto* w = std::get_if<WhiskStep>(&s)) return whisker_src(w->w);
  if (const auto* t = std::get_if<ContractStep>(&s))
    return hcomp1(hcomp1(t->P, unit_om(t->obj)), t->S);
  const auto& t = std::get<InsertStep>(s);
  return hcomp1(t.P, t.S);
}

OneMorphism step_tgt(Ctx& c, const Step& s) {
  (void)c;
  if (const auto* w = std::get_if<WhiskStep>(&s)) return whisker_tgt(w->w);
  if (const auto* t = std::get_if<ContractStep>(&s)) return hcomp1(t->P, t->S);
  const auto& t = std::get<InsertStep>(s);
  return hcomp1(hcomp1(t.P, unit_om(t.obj)), t.S);
}

struct ChainPlan {
  struct Prep {
    int kind = 0;  // 0 whisker, 1 contract, 2 insert
    MCarrier msrc, mtgt;
    std::vector<int> jpos;  // per part: leg index at the junction
    int obj = 0;
    bool left_attached = true;
  };
  std::vector<Prep> preps;
};

namespace {

// Per-part junction leg index: the length of the P-summand in front of it.
std::vector<int> junction_positions(const OneMorphism& P, const OneMorphism& S) {
  size_t np = P.summands.size(), ns = S.summands.size();
  std::vector<int> jp(np * ns);
  for (size_t ip = 0; ip < np; ++ip)
    for (size_t is = 0; is < ns; ++is)
      jp[ip * ns + is] = (int)(P.placeholder() ? 0 : P.summands[ip].size());
  return jp;
}

std::shared_ptr<const ChainPlan> build_plan(Ctx& c, const Chain& ch) {
  auto plan = std::make_shared<ChainPlan>();
  for (const auto& s : ch.steps) {
    ChainPlan::Prep pr;
    if (const auto* t = std::get_if<ContractStep>(&s)) {
      pr.kind = 1;
      pr.msrc = mcarrier(c, step_src(c, s));
      pr.mtgt = mcarrier(c, step_tgt(c, s));
      pr.jpos = junction_positions(t->P, t->S);
      pr.obj = t->obj;
    } else if (const auto* t2 = std::get_if<InsertStep>(&s)) {
      pr.kind = 2;
      pr.msrc = mcarrier(c, step_src(c, s));
      pr.mtgt = mcarrier(c, step_tgt(c, s));
      pr.jpos = junction_positions(t2->P, t2->S);
      pr.obj = t2->obj;
      pr.left_attached = t2->left_attached;
    }
    plan->preps.push_back(std::move(pr));
  }
  return plan;
}

void apply_contract(Ctx& c, const ChainPlan::Prep& pr, const SVec& v, SVec& out) {
  std::vector<int> dg, td;
  for (const auto& [gidx, val] : v) {
    auto [q, loc] = pr.msrc.locate(gidx);
    const CarrierData& cs = *pr.msrc.parts[q];
    const CarrierData& ct = *pr.mtgt.parts[q];
    int j = pr.jpos[q];
    decode_digits(cs, loc, dg);
    const AVec& prd = c.alg.prod(cs.legs[j][dg[j]], cs.legs[j + 1][dg[j + 1]]);
    td.resize(dg.size() - 1);
    for (int t = 0; t < j; ++t) td[t] = dg[t];
    for (size_t t = j + 1; t < td.size(); ++t) td[t] = dg[t + 1];
    for (const auto& [k, cf] : prd) {
      int p = ct.leg_pos[j][k];
      assert(p >= 0);
      td[j] = p;
      sv_add(out, pr.mtgt.offs[q] + encode_digits(ct, td), val * cf);
    }
  }
}

void apply_insert(Ctx& c, const ChainPlan::Prep& pr, const SVec& v, SVec& out) {
  const std::vector<int>& blk = c.alg.block[pr.obj][pr.obj];
  std::vector<int> dg, td;
  for (const auto& [gidx, val] : v) {
    auto [q, loc] = pr.msrc.locate(gidx);
    const CarrierData& cs = *pr.msrc.parts[q];
    const CarrierData& ct = *pr.mtgt.parts[q];
    int j = pr.jpos[q];
    decode_digits(cs, loc, dg);
    td.resize(dg.size() + 1);
    for (int t = 0; t < j; ++t) td[t] = dg[t];
    for (size_t t = j + 1; t < dg.size(); ++t) td[t + 1] = dg[t];
    int mdig = cs.legs[j][dg[j]];
    for (int a : blk) {
      if (pr.left_attached) {
        const AVec& prd = c.alg.prod(mdig, a);
        if (prd.empty()) continue;
        for (int k2 : blk) {
          const Scalar& s2 = c.star.at(k2, a);
          if (s2.is_zero()) continue;
          td[j + 1] = ct.leg_pos[j + 1][k2];
          assert(td[j + 1] >= 0);
          for (const auto& [k1, c1] : prd) {
            td[j] = ct.leg_pos[j][k1];
            assert(td[j] >= 0);
            sv_add(out, pr.mtgt.offs[q] + encode_digits(ct, td), val * c1 * s2);
          }
        }
      } else {
        td[j] = ct.leg_pos[j][a];
        assert(td[j] >= 0);
        for (int k : blk) {
          const Scalar& s = c.star.at(k, a);
          if (s.is_zero()) continue;
          for (const auto& [k3, c3] : c.alg.prod(k, mdig)) {
            td[j + 1] = ct.leg_pos[j + 1][k3];
            assert(td[j + 1] >= 0);
            sv_add(out, pr.mtgt.offs[q] + encode_digits(ct, td), val * s * c3);
          }
        }
      }
    }
  }
}

void validate_step(Ctx& c, const Step& s) {
  if (const auto* t = std::get_if<ContractStep>(&s)) {
    if (t->P.placeholder() && t->S.placeholder())
      throw std::logic_error("contraction would target the missing identity");
    if (!t->P.placeholder()) require_pure(t->P, "pipeline contraction");
    if (!t->S.placeholder()) require_pure(t->S, "pipeline contraction");
  } else if (const auto* t2 = std::get_if<InsertStep>(&s)) {
    if (t2->P.placeholder() && t2->S.placeholder())
      throw std::logic_error("insertion into the missing identity");
    if (!c.has_star) throw DegenerateTraceForm();
    if (t2->left_attached && t2->S.placeholder())
      throw std::logic_error("left-attached insertion needs a right factor");
    if (!t2->left_attached && t2->P.placeholder())
      throw std::logic_error("right-attached insertion needs a left factor");
    if (!t2->P.placeholder()) require_pure(t2->P, "pipeline insertion");
    if (!t2->S.placeholder()) require_pure(t2->S, "pipeline insertion");
  }
}

}  // namespace

Chain make_chain(Ctx& c, std::vector<Step> steps) {
  if (steps.empty()) throw std::logic_error("empty pipeline");
  for (const auto& s : steps) validate_step(c, s);
  for (size_t k = 0; k + 1 < steps.size(); ++k)
    if (step_tgt(c, steps[k]) != step_src(c, steps[k + 1]))
      throw CompositionMismatch("pipeline step " + std::to_string(k + 1) +
                                " does not continue step " + std::to_string(k));
  Chain ch{step_src(c, steps.front()), step_tgt(c, steps.back()),
           std::move(steps), nullptr};
  ch.plan = build_plan(c, ch);
  return ch;
}

SVec apply_chain(Ctx& c, const Chain& ch, const SVec& v) {
  if (!ch.plan) ch.plan = build_plan(c, ch);
  SVec cur = v;
  for (size_t k = 0; k < ch.steps.size(); ++k) {
    const auto& pr = ch.plan->preps[k];
    if (pr.kind == 0) {
      cur = apply_whisker(c, std::get<WhiskStep>(ch.steps[k]).w, cur);
    } else {
      SVec nx;
      if (pr.kind == 1)
        apply_contract(c, pr, cur, nx);
      else
        apply_insert(c, pr, cur, nx);
      cur = std::move(nx);
    }
  }
  return cur;
}

namespace {

std::optional<long long> chains_differ_at(Ctx& c, const Chain& a, const Chain& b) {
  if (a.src != b.src || a.tgt != b.tgt)
    throw CompositionMismatch("pipelines with different endpoints");
  long long d = mcarrier(c, a.src).dim;
  for (long long idx = 0; idx < d; ++idx) {
    SVec v{{idx, c.one()}};
    if (!sv_equal(apply_chain(c, a, v), apply_chain(c, b, v))) return idx;
  }
  return std::nullopt;
}

}  // namespace

bool chains_equal(Ctx& c, const Chain& a, const Chain& b) {
  return !chains_differ_at(c, a, b).has_value();
}

namespace {

// Sparse comparison of whiskered composites; the intermediate words may be
// far too large for dense matrices.
void require_chains_equal(Ctx& c, std::vector<Step> lhs, std::vector<Step> rhs,
                          const char* diagram, const std::string& what) {
  Chain a = make_chain(c, std::move(lhs)), b = make_chain(c, std::move(rhs));
  auto d = chains_differ_at(c, a, b);
  if (d)
    throw AxiomViolation(diagram,
                         what + "; source column " + std::to_string(*d));
}

Step ws(Ctx& c, const OneMorphism& P, const TwoMorphism& f,
        const OneMorphism& S) {
  return WhiskStep{whisker(c, P, f, S)};
}

}  // namespace

TwoMorphism chain_matrix(Ctx& c, const Chain& ch) {
  MCarrier ms = mcarrier(c, ch.src), mt = mcarrier(c, ch.tgt);
  check_entries(mt.dim, ms.dim);
  Mat m(c.alg.field, as_i(mt.dim), as_i(ms.dim));
  for (long long cc = 0; cc < ms.dim; ++cc) {
    SVec v{{cc, c.one()}};
    for (const auto& [r, s] : apply_chain(c, ch, v)) m.at((int)r, (int)cc) = s;
  }
  return make_tm(c, ch.src, ch.tgt, std::move(m));
}

// ---------------------------------------------------------------------------
// Axiom suite.
// ---------------------------------------------------------------------------

std::vector<OneMorphism> unit_test_generators(Ctx& c, int obj, bool incoming,
                                              std::mt19937_64* rng) {
  std::vector<OneMorphism> g;
  for (int s = 0; s < c.alg.n; ++s)
    g.push_back(incoming ? gen_om(obj, s) : gen_om(s, obj));
  if (rng) {
    int s = (int)((*rng)() % (unsigned)c.alg.n);
    OneMorphism f = incoming ? gen_om(obj, s) : gen_om(s, obj);
    g.push_back(oplus({f, f}));
  }
  return g;
}

void check_lax_unit(Ctx& c, const LaxUnit& u, const UnitContext* env,
                    std::mt19937_64& rng) {
  const int n = c.alg.n;
  auto inc = unit_test_generators(c, u.obj, true, &rng);
  auto out = unit_test_generators(c, u.obj, false, &rng);
  TwoMorphism idU = identity_tm(c, u.U);

  for (const auto& F : inc)
    for (int t = 0; t < n; ++t) {
      OneMorphism H = gen_om(F.src_obj, t);
      TwoMorphism lhs = u.l(hcomp1(F, H));
      TwoMorphism rhs = hcomp2(c, u.l(F), identity_tm(c, H));
      if (!tm_equal(lhs, rhs))
        throw AxiomViolation("lax-left-whisker-absorption",
                             "F=" + describe_om(F) + ", H=" + describe_om(H) +
                                 diff_suffix(lhs, rhs));
    }
  for (const auto& G : out)
    for (int t = 0; t < n; ++t) {
      OneMorphism K = gen_om(t, G.tgt_obj);
      TwoMorphism lhs = u.r(hcomp1(K, G));
      TwoMorphism rhs = hcomp2(c, identity_tm(c, K), u.r(G));
      if (!tm_equal(lhs, rhs))
        throw AxiomViolation("lax-right-whisker-absorption",
                             "K=" + describe_om(K) + ", G=" + describe_om(G) +
                                 diff_suffix(lhs, rhs));
    }

  for (const auto& G : out)
    for (const auto& F : inc) {
      TwoMorphism lhs = hcomp2(c, identity_tm(c, G), u.l(F));
      TwoMorphism rhs = hcomp2(c, u.r(G), identity_tm(c, F));
      if (!tm_equal(lhs, rhs))
        throw AxiomViolation("lax-middle-compatibility",
                             "G=" + describe_om(G) + ", F=" + describe_om(F) +
                                 diff_suffix(lhs, rhs));
    }

  for (const auto& F : inc)
    for (const auto& H : inc) {
      if (F.src_obj != H.src_obj) continue;
      auto maps = hom_space(c, F, H);
      for (size_t k = 0; k < maps.size(); ++k) {
        TwoMorphism lhs = vcomp(u.l(H), hcomp2(c, idU, maps[k]));
        TwoMorphism rhs = vcomp(maps[k], u.l(F));
        if (!tm_equal(lhs, rhs))
          throw AxiomViolation("lax-left-naturality",
                               "F=" + describe_om(F) + ", H=" + describe_om(H) +
                                   ", map #" + std::to_string(k) +
                                   diff_suffix(lhs, rhs));
      }
    }
  for (const auto& G : out)
    for (const auto& K : out) {
      if (G.tgt_obj != K.tgt_obj) continue;
      auto maps = hom_space(c, G, K);
      for (size_t k = 0; k < maps.size(); ++k) {
        TwoMorphism lhs = vcomp(u.r(K), hcomp2(c, maps[k], idU));
        TwoMorphism rhs = vcomp(maps[k], u.r(G));
        if (!tm_equal(lhs, rhs))
          throw AxiomViolation("lax-right-naturality",
                               "G=" + describe_om(G) + ", K=" + describe_om(K) +
                                   ", map #" + std::to_string(k) +
                                   diff_suffix(lhs, rhs));
      }
    }

  TwoMorphism lU = u.l(u.U), rU = u.r(u.U);
  OneMorphism eo = empty_om(u.obj);
  for (const auto& F : inc) {
    TwoMorphism lF = u.l(F);
    OneMorphism es = empty_om(F.src_obj);
    require_chains_equal(c, {ws(c, u.U, lF, es), ws(c, eo, lF, es)},
                         {ws(c, eo, lU, F), ws(c, eo, lF, es)},
                         "lax-double-unit-coherence",
                         "F=" + describe_om(F) + ", inner-vs-left");
    require_chains_equal(c, {ws(c, u.U, lF, es), ws(c, eo, lF, es)},
                         {ws(c, eo, rU, F), ws(c, eo, lF, es)},
                         "lax-double-unit-coherence",
                         "F=" + describe_om(F) + ", inner-vs-right");
  }
  for (const auto& G : out) {
    TwoMorphism rG = u.r(G);
    OneMorphism et = empty_om(G.tgt_obj);
    require_chains_equal(c, {ws(c, et, rG, u.U), ws(c, et, rG, eo)},
                         {ws(c, G, rU, eo), ws(c, et, rG, eo)},
                         "lax-double-unit-coherence",
                         "G=" + describe_om(G) + ", inner-vs-right");
    require_chains_equal(c, {ws(c, et, rG, u.U), ws(c, et, rG, eo)},
                         {ws(c, G, lU, eo), ws(c, et, rG, eo)},
                         "lax-double-unit-coherence",
                         "G=" + describe_om(G) + ", inner-vs-left");
  }

  if (env)
    for (const auto& F : inc) {
      const LaxUnit& uj = find_lax(*env, F.src_obj);
      TwoMorphism lF = u.l(F), rF = uj.r(F);
      OneMorphism es = empty_om(F.src_obj);
      require_chains_equal(c, {ws(c, u.U, rF, es), ws(c, eo, lF, es)},
                           {ws(c, eo, lF, uj.U), ws(c, eo, rF, es)},
                           "lax-two-sided-slide", "F=" + describe_om(F));
    }
}

void check_oplax_unit(Ctx& c, const OplaxUnit& u, const UnitContext* env,
                      std::mt19937_64& rng) {
  const int n = c.alg.n;
  auto inc = unit_test_generators(c, u.obj, true, &rng);
  auto out = unit_test_generators(c, u.obj, false, &rng);
  TwoMorphism idU = identity_tm(c, u.U);

  for (const auto& F : inc)
    for (int t = 0; t < n; ++t) {
      OneMorphism H = gen_om(F.src_obj, t);
      TwoMorphism lhs = u.lp(hcomp1(F, H));
      TwoMorphism rhs = hcomp2(c, u.lp(F), identity_tm(c, H));
      if (!tm_equal(lhs, rhs))
        throw AxiomViolation("oplax-left-whisker-absorption",
                             "F=" + describe_om(F) + ", H=" + describe_om(H) +
                                 diff_suffix(lhs, rhs));
    }
  for (const auto& G : out)
    for (int t = 0; t < n; ++t) {
      OneMorphism K = gen_om(t, G.tgt_obj);
      TwoMorphism lhs = u.rp(hcomp1(K, G));
      TwoMorphism rhs = hcomp2(c, identity_tm(c, K), u.rp(G));
      if (!tm_equal(lhs, rhs))
        throw AxiomViolation("oplax-right-whisker-absorption",
                             "K=" + describe_om(K) + ", G=" + describe_om(G) +
                                 diff_suffix(lhs, rhs));
    }

  for (const auto& G : out)
    for (const auto& F : inc) {
      TwoMorphism lhs = hcomp2(c, identity_tm(c, G), u.lp(F));
      TwoMorphism rhs = hcomp2(c, u.rp(G), identity_tm(c, F));
      if (!tm_equal(lhs, rhs))
        throw AxiomViolation("oplax-middle-compatibility",
                             "G=" + describe_om(G) + ", F=" + describe_om(F) +
                                 diff_suffix(lhs, rhs));
    }

  for (const auto& F : inc)
    for (const auto& H : inc) {
      if (F.src_obj != H.src_obj) continue;
      auto maps = hom_space(c, F, H);
      for (size_t k = 0; k < maps.size(); ++k) {
        TwoMorphism lhs = vcomp(hcomp2(c, idU, maps[k]), u.lp(F));
        TwoMorphism rhs = vcomp(u.lp(H), maps[k]);
        if (!tm_equal(lhs, rhs))
          throw AxiomViolation("oplax-left-naturality",
                               "F=" + describe_om(F) + ", H=" + describe_om(H) +
                                   ", map #" + std::to_string(k) +
                                   diff_suffix(lhs, rhs));
      }
    }
  for (const auto& G : out)
    for (const auto& K : out) {
      if (G.tgt_obj != K.tgt_obj) continue;
      auto maps = hom_space(c, G, K);
      for (size_t k = 0; k < maps.size(); ++k) {
        TwoMorphism lhs = vcomp(hcomp2(c, maps[k], idU), u.rp(G));
        TwoMorphism rhs = vcomp(u.rp(K), maps[k]);
        if (!tm_equal(lhs, rhs))
          throw AxiomViolation("oplax-right-naturality",
                               "G=" + describe_om(G) + ", K=" + describe_om(K) +
                                   ", map #" + std::to_string(k) +
                                   diff_suffix(lhs, rhs));
      }
    }

  TwoMorphism lpU = u.lp(u.U), rpU = u.rp(u.U);
  OneMorphism eo = empty_om(u.obj);
  for (const auto& F : inc) {
    TwoMorphism lpF = u.lp(F);
    OneMorphism es = empty_om(F.src_obj);
    require_chains_equal(c, {ws(c, eo, lpF, es), ws(c, u.U, lpF, es)},
                         {ws(c, eo, lpF, es), ws(c, eo, lpU, F)},
                         "oplax-double-unit-coherence",
                         "F=" + describe_om(F) + ", inner-vs-left");
    require_chains_equal(c, {ws(c, eo, lpF, es), ws(c, u.U, lpF, es)},
                         {ws(c, eo, lpF, es), ws(c, eo, rpU, F)},
                         "oplax-double-unit-coherence",
                         "F=" + describe_om(F) + ", inner-vs-right");
  }
  for (const auto& G : out) {
    TwoMorphism rpG = u.rp(G);
    OneMorphism et = empty_om(G.tgt_obj);
    require_chains_equal(c, {ws(c, et, rpG, eo), ws(c, et, rpG, u.U)},
                         {ws(c, et, rpG, eo), ws(c, G, rpU, eo)},
                         "oplax-double-unit-coherence",
                         "G=" + describe_om(G) + ", inner-vs-right");
    require_chains_equal(c, {ws(c, et, rpG, eo), ws(c, et, rpG, u.U)},
                         {ws(c, et, rpG, eo), ws(c, G, lpU, eo)},
                         "oplax-double-unit-coherence",
                         "G=" + describe_om(G) + ", inner-vs-left");
  }

  if (env)
    for (const auto& F : inc) {
      const OplaxUnit& uj = find_oplax(*env, F.src_obj);
      TwoMorphism lpF = u.lp(F), rpF = uj.rp(F);
      OneMorphism es = empty_om(F.src_obj);
      require_chains_equal(c, {ws(c, eo, lpF, es), ws(c, u.U, rpF, es)},
                           {ws(c, eo, rpF, es), ws(c, eo, lpF, uj.U)},
                           "oplax-two-sided-slide", "F=" + describe_om(F));
    }
}

void check_split(Ctx& c, const UnitContext& uc, int obj, std::mt19937_64& rng) {
  const LaxUnit& lu = find_lax(uc, obj);
  auto inc = unit_test_generators(c, obj, true, &rng);
  auto out = unit_test_generators(c, obj, false, &rng);
  // Sections of the contractions.  When the unitor is invertible (a
  // completed context) the unique solution is the inverse itself.
  for (const auto& F : inc) {
    TwoMorphism t = lu.l(F);
    if (!solve_matrix(t.m, Mat::identity(c.alg.field, t.m.rows())))
      throw NotSplit("no section of the left contraction at " + describe_om(F));
  }
  for (const auto& G : out) {
    TwoMorphism t = lu.r(G);
    if (!solve_matrix(t.m, Mat::identity(c.alg.field, t.m.rows())))
      throw NotSplit("no section of the right contraction at " + describe_om(G));
  }
  if (uc.oplax.empty())
    throw NotSplit("insertions unavailable: trace pairing is degenerate");
  const OplaxUnit& ou = find_oplax(uc, obj);
  for (const auto& F : inc) {
    TwoMorphism t = ou.lp(F);
    if (!solve_left(t.m, Mat::identity(c.alg.field, t.m.cols())))
      throw NotSplit("no retraction of the left insertion at " + describe_om(F));
  }
  for (const auto& G : out) {
    TwoMorphism t = ou.rp(G);
    if (!solve_left(t.m, Mat::identity(c.alg.field, t.m.cols())))
      throw NotSplit("no retraction of the right insertion at " + describe_om(G));
  }
}

LaxUnit compose_lax_units(Ctx& c, const UnitContext& uc, int obj) {
  const LaxUnit& lu = find_lax(uc, obj);
  Ctx* cp = &c;
  auto baseL = lu.l;
  auto baseR = lu.r;
  OneMorphism u1 = lu.U;
  LaxUnit r;
  r.obj = obj;
  r.U = hcomp1(u1, u1);
  r.l = [cp, baseL, u1](const OneMorphism& F) {
    TwoMorphism inner = baseL(F);  // U∘F -> F
    return vcomp(inner, hcomp2(*cp, identity_tm(*cp, u1), inner));
  };
  r.r = [cp, baseR, u1](const OneMorphism& G) {
    TwoMorphism inner = baseR(G);  // G∘U -> G
    return vcomp(inner, hcomp2(*cp, inner, identity_tm(*cp, u1)));
  };
  return r;
}

OplaxUnit compose_oplax_units(Ctx& c, const UnitContext& uc, int obj) {
  const OplaxUnit& ou = find_oplax(uc, obj);
  (void)c;
  auto baseLp = ou.lp;
  auto baseRp = ou.rp;
  OneMorphism u1 = ou.U;
  OplaxUnit r;
  r.obj = obj;
  r.U = hcomp1(u1, u1);
  r.lp = [baseLp, u1](const OneMorphism& F) {
    return vcomp(baseLp(hcomp1(u1, F)), baseLp(F));  // F -> U∘F -> U∘U∘F
  };
  r.rp = [baseRp, u1](const OneMorphism& G) {
    return vcomp(baseRp(hcomp1(G, u1)), baseRp(G));  // G -> G∘U -> G∘U∘U
  };
  return r;
}

Q28Result check_compatibility_Q28(Ctx& c, const UnitContext& uc, int obj) {
  const LaxUnit& lu = find_lax(uc, obj);
  if (uc.oplax.empty())
    throw std::logic_error("unit-exchange comparison needs a dual basis");
  const OplaxUnit& ou = find_oplax(uc, obj);
  const OneMorphism& U = lu.U;

  TwoMorphism side1 = vcomp(lu.r(U), ou.lp(U));  // through U'∘U
  TwoMorphism side2 = vcomp(lu.l(U), ou.rp(U));  // through U∘U'
  Q28Result res;
  res.main_equal = (side1.m == side2.m);
  if (!res.main_equal)
    for (int cc = 0; cc < side1.m.cols() && res.first_diff < 0; ++cc)
      for (int r = 0; r < side1.m.rows(); ++r)
        if (!(side1.m.at(r, cc) == side2.m.at(r, cc))) {
          res.first_diff = cc;
          break;
        }

  // The same two composites, reassembled mirror-wise from pipeline steps and
  // evaluated sparsely; doubles as a cross-check of the two evaluators.
  OneMorphism e = empty_om(obj);
  Chain ca = make_chain(
      c, {InsertStep{e, U, obj, true}, ContractStep{U, e, obj}});
  Chain cb = make_chain(
      c, {InsertStep{U, e, obj, false}, ContractStep{e, U, obj}});
  res.mirror_equal = chains_equal(c, ca, cb);
  return res;
}

}  // namespace fiax

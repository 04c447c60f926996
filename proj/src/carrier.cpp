#include "fiax/carrier.hpp"

#include <algorithm>
#include <cassert>

namespace fiax {

namespace {

constexpr long long kDenseDim = 300000;          // max dim for dense carrier work
constexpr long long kDenseEntries = 40'000'000;  // max entries per dense matrix

int as_int(long long v) {
  if (v > kDenseDim)
    throw std::runtime_error("internal guard: dense operation on a carrier of dimension " +
                             std::to_string(v));
  return (int)v;
}

void check_entries(long long r, long long c) {
  if (r * c > kDenseEntries)
    throw std::runtime_error("internal guard: dense matrix of size " + std::to_string(r) +
                             "x" + std::to_string(c));
}

Mat kron(const Mat& a, const Mat& b) {
  check_entries((long long)a.rows() * b.rows(), (long long)a.cols() * b.cols());
  Mat m(a.field(), a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) {
      if (a.at(i, j).is_zero()) continue;
      for (int k = 0; k < b.rows(); ++k)
        for (int l = 0; l < b.cols(); ++l) {
          if (b.at(k, l).is_zero()) continue;
          m.at(i * b.rows() + k, j * b.cols() + l) = a.at(i, j) * b.at(k, l);
        }
    }
  return m;
}

Mat blockof(const Mat& m, int r0, int nr, int c0, int nc) {
  Mat b(m.field(), nr, nc);
  for (int i = 0; i < nr; ++i)
    for (int j = 0; j < nc; ++j) b.at(i, j) = m.at(r0 + i, c0 + j);
  return b;
}

void set_block(Mat& m, int r0, int c0, const Mat& b) {
  for (int i = 0; i < b.rows(); ++i)
    for (int j = 0; j < b.cols(); ++j) m.at(r0 + i, c0 + j) = b.at(i, j);
}

bool word_pure(const Word& w) {
  for (const auto& a : w)
    if (!a.pure()) return false;
  return true;
}

bool om_pure(const OneMorphism& f) {
  for (const auto& w : f.summands)
    if (!word_pure(w)) return false;
  return true;
}

}  // namespace

OneMorphism gen_om(int tgt, int src) {
  return {tgt, src, {Word{Atom{tgt, src, nullptr}}}};
}
OneMorphism unit_om(int obj) { return gen_om(obj, obj); }
OneMorphism empty_om(int obj) { return {obj, obj, {Word{}}}; }
OneMorphism opaque_om(const OpaquePtr& o) {
  return {o->tgt, o->src, {Word{Atom{o->tgt, o->src, o}}}};
}

OneMorphism hcomp1(const OneMorphism& a, const OneMorphism& b) {
  if (a.src_obj != b.tgt_obj)
    throw CompositionMismatch("1-morphisms meet at objects " + std::to_string(a.src_obj) +
                              " vs " + std::to_string(b.tgt_obj));
  if (a.placeholder()) return b;
  if (b.placeholder()) return a;
  OneMorphism r{a.tgt_obj, b.src_obj, {}};
  r.summands.reserve(a.summands.size() * b.summands.size());
  for (const auto& wa : a.summands)
    for (const auto& wb : b.summands) {
      Word w = wa;
      w.insert(w.end(), wb.begin(), wb.end());
      r.summands.push_back(std::move(w));
    }
  return r;
}

OneMorphism oplus(const std::vector<OneMorphism>& parts) {
  assert(!parts.empty());
  OneMorphism r{parts[0].tgt_obj, parts[0].src_obj, {}};
  for (const auto& p : parts) {
    if (p.tgt_obj != r.tgt_obj || p.src_obj != r.src_obj)
      throw CompositionMismatch("direct sum of 1-morphisms with different endpoints");
    assert(!p.placeholder());
    r.summands.insert(r.summands.end(), p.summands.begin(), p.summands.end());
  }
  return r;
}

std::unique_ptr<Ctx> make_context(Algebra a) {
  auto c = std::make_unique<Ctx>();
  c->alg = std::move(a);
  try {
    c->star = dual_basis(c->alg);
    c->has_star = true;
  } catch (const DegenerateTraceForm&) {
    c->has_star = false;
  }
  const Algebra& al = c->alg;
  c->lb_pos.assign(al.n, std::vector<int>(al.dim, -1));
  c->rb_pos.assign(al.n, std::vector<int>(al.dim, -1));
  for (int i = 0; i < al.n; ++i) {
    for (int k = 0; k < (int)al.left_block[i].size(); ++k)
      c->lb_pos[i][al.left_block[i][k]] = k;
    for (int k = 0; k < (int)al.right_block[i].size(); ++k)
      c->rb_pos[i][al.right_block[i][k]] = k;
  }
  return c;
}

long long atom_dim(const Ctx& c, const Atom& a) {
  if (!a.pure()) return a.opq->dim;
  return (long long)c.alg.right_block[a.tgt].size() * c.alg.left_block[a.src].size();
}

long long expansion_dim(const Ctx& c, const CarrierData& cd) {
  long long d = 1;
  for (const auto& a : cd.atoms) d *= atom_dim(c, a);
  return d;
}

long long encode_digits(const CarrierData& cd, const std::vector<int>& digits) {
  long long idx = 0;
  for (size_t t = 0; t < digits.size(); ++t) idx += digits[t] * cd.stride[t];
  return idx;
}

void decode_digits(const CarrierData& cd, long long idx, std::vector<int>& digits) {
  digits.resize(cd.legs.size());
  for (size_t t = 0; t < cd.legs.size(); ++t) {
    digits[t] = (int)(idx / cd.stride[t]);
    idx %= cd.stride[t];
  }
}

namespace {

// Left-nested balanced tensor step: quotient of prefix (x) last by the
// relations (x.a (x) y) - (x (x) a.y) over all basis elements a.
void build_chain(Ctx& c, CarrierData& cd) {
  const Algebra& al = c.alg;
  const CarrierPtr& pre = cd.prefix;
  const CarrierPtr& las = cd.last_c;
  int pd = as_int(pre->dim), ld = as_int(las->dim);
  long long e2 = (long long)pd * ld;
  check_entries(e2, e2);

  std::vector<std::map<int, Scalar>> rows;
  for (int a = 0; a < al.dim; ++a) {
    const Mat& rp = right_action(c, pre, a);
    const Mat& ll = left_action(c, las, a);
    for (int p = 0; p < pd; ++p)
      for (int q = 0; q < ld; ++q) {
        std::map<int, Scalar> row;
        for (int r = 0; r < pd; ++r) {
          const Scalar& s = rp.at(r, p);
          if (!s.is_zero()) {
            auto& slot = row.emplace(r * ld + q, c.zero()).first->second;
            slot += s;
            if (slot.is_zero()) row.erase(r * ld + q);
          }
        }
        for (int r = 0; r < ld; ++r) {
          const Scalar& s = ll.at(r, q);
          if (!s.is_zero()) {
            auto& slot = row.emplace(p * ld + r, c.zero()).first->second;
            slot -= s;
            if (slot.is_zero()) row.erase(p * ld + r);
          }
        }
        if (!row.empty()) rows.push_back(std::move(row));
      }
  }

  Mat rel(al.field, (int)rows.size(), (int)e2);
  for (int i = 0; i < (int)rows.size(); ++i)
    for (const auto& [j, s] : rows[i]) rel.at(i, j) = s;
  RrefResult rr = rref(rel);

  std::vector<int> free_cols;
  {
    size_t k = 0;
    for (int j = 0; j < (int)e2; ++j) {
      if (k < rr.pivots.size() && rr.pivots[k] == j)
        ++k;
      else
        free_cols.push_back(j);
    }
  }
  int q = (int)free_cols.size();
  cd.dim = q;
  cd.pi = Mat(al.field, q, (int)e2);
  cd.sigma = Mat(al.field, (int)e2, q);
  for (int t = 0; t < q; ++t) {
    cd.pi.at(t, free_cols[t]) = c.one();
    for (int k = 0; k < (int)rr.pivots.size(); ++k)
      cd.pi.at(t, rr.pivots[k]) = -rr.r.at(k, free_cols[t]);
    cd.sigma.at(free_cols[t], t) = c.one();
  }

  cd.lact.assign(al.dim, Mat(al.field, q, q));
  cd.ract.assign(al.dim, Mat(al.field, q, q));
  for (int a = 0; a < al.dim; ++a) {
    const Mat& lp = left_action(c, pre, a);
    const Mat& rl = right_action(c, las, a);
    for (int j = 0; j < q; ++j) {
      int p0 = free_cols[j] / ld, q0 = free_cols[j] % ld;
      for (int r = 0; r < pd; ++r) {
        const Scalar& s = lp.at(r, p0);
        if (s.is_zero()) continue;
        for (int t = 0; t < q; ++t) {
          const Scalar& pe = cd.pi.at(t, r * ld + q0);
          if (!pe.is_zero()) cd.lact[a].at(t, j) += s * pe;
        }
      }
      for (int r = 0; r < ld; ++r) {
        const Scalar& s = rl.at(r, q0);
        if (s.is_zero()) continue;
        for (int t = 0; t < q; ++t) {
          const Scalar& pe = cd.pi.at(t, p0 * ld + r);
          if (!pe.is_zero()) cd.ract[a].at(t, j) += s * pe;
        }
      }
    }
  }
}

}  // namespace

CarrierPtr carrier(Ctx& c, const Word& w) {
  if (w.empty()) throw CompositionMismatch("carrier of an empty word");
  auto it = c.carrier_cache.find(w);
  if (it != c.carrier_cache.end()) return it->second;
  for (size_t t = 0; t + 1 < w.size(); ++t)
    if (w[t].src != w[t + 1].tgt)
      throw CompositionMismatch("tensor factors meet at objects " +
                                std::to_string(w[t].src) + " vs " +
                                std::to_string(w[t + 1].tgt));

  auto cd = std::make_shared<CarrierData>();
  cd->atoms = w;
  cd->tgt_e = w.front().tgt;
  cd->src_e = w.back().src;
  const Algebra& al = c.alg;

  if (word_pure(w)) {
    cd->pure = true;
    int g = (int)w.size();
    cd->jseq.resize(g + 1);
    cd->jseq[0] = w[0].tgt;
    for (int t = 0; t < g; ++t) cd->jseq[t + 1] = w[t].src;
    cd->legs.resize(g + 1);
    cd->legs[0] = al.right_block[cd->jseq[0]];
    for (int t = 1; t < g; ++t) cd->legs[t] = al.block[cd->jseq[t]][cd->jseq[t]];
    cd->legs[g] = al.left_block[cd->jseq[g]];
    cd->leg_pos.assign(g + 1, std::vector<int>(al.dim, -1));
    for (int t = 0; t <= g; ++t)
      for (int k = 0; k < (int)cd->legs[t].size(); ++k)
        cd->leg_pos[t][cd->legs[t][k]] = k;
    cd->stride.assign(g + 1, 1);
    for (int t = g - 1; t >= 0; --t)
      cd->stride[t] = cd->stride[t + 1] * (long long)cd->legs[t + 1].size();
    cd->dim = cd->stride[0] * (long long)cd->legs[0].size();
  } else if (w.size() == 1) {
    const Opaque& o = *w[0].opq;
    cd->pure = false;
    cd->dim = o.dim;
    cd->lact = o.lact;
    cd->ract = o.ract;
  } else {
    cd->pure = false;
    cd->prefix = carrier(c, Word(w.begin(), w.end() - 1));
    cd->last_c = carrier(c, Word{w.back()});
    build_chain(c, *cd);
  }
  c.carrier_cache.emplace(w, cd);
  return cd;
}

const Mat& left_action(Ctx& c, const CarrierPtr& cp, int a) {
  if (!cp->pure) return cp->lact[a];
  auto it = cp->lcache.find(a);
  if (it != cp->lcache.end()) return it->second;
  const Algebra& al = c.alg;
  int d = as_int(cp->dim);
  check_entries(d, d);
  Mat m(al.field, d, d);
  std::vector<int> digits;
  for (long long col = 0; col < d; ++col) {
    decode_digits(*cp, col, digits);
    int b0 = cp->legs[0][digits[0]];
    for (const auto& [cid, coeff] : al.prod(a, b0)) {
      int pos = cp->leg_pos[0][cid];
      assert(pos >= 0);
      long long row = col + (long long)(pos - digits[0]) * cp->stride[0];
      m.at((int)row, (int)col) += coeff;
    }
  }
  return cp->lcache.emplace(a, std::move(m)).first->second;
}

const Mat& right_action(Ctx& c, const CarrierPtr& cp, int a) {
  if (!cp->pure) return cp->ract[a];
  auto it = cp->rcache.find(a);
  if (it != cp->rcache.end()) return it->second;
  const Algebra& al = c.alg;
  int d = as_int(cp->dim);
  check_entries(d, d);
  Mat m(al.field, d, d);
  int g = (int)cp->legs.size() - 1;
  std::vector<int> digits;
  for (long long col = 0; col < d; ++col) {
    decode_digits(*cp, col, digits);
    int bg = cp->legs[g][digits[g]];
    for (const auto& [cid, coeff] : al.prod(bg, a)) {
      int pos = cp->leg_pos[g][cid];
      assert(pos >= 0);
      long long row = col + (long long)(pos - digits[g]);
      m.at((int)row, (int)col) += coeff;
    }
  }
  return cp->rcache.emplace(a, std::move(m)).first->second;
}

namespace {

// Per-atom (x, y) pair coordinates inside the full expansion.
struct AtomShape {
  int xdim, ydim;
};

std::vector<AtomShape> atom_shapes(const Ctx& c, const CarrierData& cd) {
  std::vector<AtomShape> sh;
  sh.reserve(cd.atoms.size());
  for (const auto& a : cd.atoms) {
    if (a.pure())
      sh.push_back({(int)c.alg.right_block[a.tgt].size(),
                    (int)c.alg.left_block[a.src].size()});
    else
      sh.push_back({a.opq->dim, 1});
  }
  return sh;
}

}  // namespace

const Mat& pi_full(Ctx& c, const CarrierPtr& cp) {
  auto it = c.pi_full_cache.find(cp.get());
  if (it != c.pi_full_cache.end()) return it->second;
  const Algebra& al = c.alg;
  long long ed = expansion_dim(c, *cp);
  check_entries(cp->dim, ed);
  Mat m(al.field, as_int(cp->dim), as_int(ed));

  if (cp->atoms.size() == 1) {
    m = Mat::identity(al.field, as_int(cp->dim));
  } else if (!cp->pure) {
    long long led = atom_dim(c, cp->atoms.back());
    Mat inner = kron(pi_full(c, cp->prefix), Mat::identity(al.field, as_int(led)));
    m = cp->pi * inner;
  } else {
    int g = (int)cp->atoms.size();
    auto sh = atom_shapes(c, *cp);
    std::vector<int> xp(g), yp(g);
    for (long long e = 0; e < ed; ++e) {
      long long rest = e;
      for (int t = g - 1; t >= 0; --t) {
        long long ad = (long long)sh[t].xdim * sh[t].ydim;
        long long loc = rest % ad;
        rest /= ad;
        xp[t] = (int)(loc / sh[t].ydim);
        yp[t] = (int)(loc % sh[t].ydim);
      }
      // contract junctions left to right
      std::vector<std::pair<std::vector<int>, Scalar>> acc;
      acc.push_back({{xp[0]}, c.one()});
      bool dead = false;
      for (int t = 1; t < g && !dead; ++t) {
        int y = al.left_block[cp->jseq[t]][yp[t - 1]];
        int x = al.right_block[cp->jseq[t]][xp[t]];
        const AVec& pr = al.prod(y, x);
        if (pr.empty()) {
          dead = true;
          break;
        }
        std::vector<std::pair<std::vector<int>, Scalar>> nxt;
        for (const auto& [word, coeff] : acc)
          for (const auto& [cid, pc] : pr) {
            int pos = cp->leg_pos[t][cid];
            assert(pos >= 0);
            auto w2 = word;
            w2.push_back(pos);
            nxt.push_back({std::move(w2), coeff * pc});
          }
        acc = std::move(nxt);
      }
      if (dead) continue;
      int last = cp->leg_pos[g][al.left_block[cp->jseq[g]][yp[g - 1]]];
      assert(last >= 0);
      for (auto& [word, coeff] : acc) {
        word.push_back(last);
        m.at((int)encode_digits(*cp, word), (int)e) += coeff;
      }
    }
  }
  return c.pi_full_cache.emplace(cp.get(), std::move(m)).first->second;
}

const Mat& sigma_full(Ctx& c, const CarrierPtr& cp) {
  auto it = c.sigma_full_cache.find(cp.get());
  if (it != c.sigma_full_cache.end()) return it->second;
  const Algebra& al = c.alg;
  long long ed = expansion_dim(c, *cp);
  check_entries(ed, cp->dim);
  Mat m(al.field, as_int(ed), as_int(cp->dim));

  if (cp->atoms.size() == 1) {
    m = Mat::identity(al.field, as_int(cp->dim));
  } else if (!cp->pure) {
    long long led = atom_dim(c, cp->atoms.back());
    Mat inner = kron(sigma_full(c, cp->prefix), Mat::identity(al.field, as_int(led)));
    m = inner * cp->sigma;
  } else {
    int g = (int)cp->atoms.size();
    auto sh = atom_shapes(c, *cp);
    std::vector<int> digits;
    for (long long col = 0; col < cp->dim; ++col) {
      decode_digits(*cp, col, digits);
      // junction elements ride in the right-hand factor; left factors get e.
      long long e = 0;
      for (int t = 0; t < g; ++t) {
        int xp, yp;
        if (t == 0)
          xp = digits[0];
        else
          xp = c.rb_pos[cp->jseq[t]][cp->legs[t][digits[t]]];
        if (t == g - 1)
          yp = digits[g];
        else
          yp = c.lb_pos[cp->jseq[t + 1]][al.idem[cp->jseq[t + 1]]];
        assert(xp >= 0 && yp >= 0);
        e = e * ((long long)sh[t].xdim * sh[t].ydim) + (long long)xp * sh[t].ydim + yp;
      }
      m.at((int)e, (int)col) = c.one();
    }
  }
  return c.sigma_full_cache.emplace(cp.get(), std::move(m)).first->second;
}

MCarrier mcarrier(Ctx& c, const OneMorphism& f) {
  assert(!f.placeholder());
  MCarrier mc;
  mc.offs.push_back(0);
  for (const auto& w : f.summands) {
    mc.parts.push_back(carrier(c, w));
    mc.offs.push_back(mc.offs.back() + mc.parts.back()->dim);
  }
  mc.dim = mc.offs.back();
  return mc;
}

std::pair<int, long long> MCarrier::locate(long long idx) const {
  int lo = 0, hi = (int)parts.size() - 1;
  while (lo < hi) {
    int mid = (lo + hi + 1) / 2;
    if (offs[mid] <= idx)
      lo = mid;
    else
      hi = mid - 1;
  }
  return {lo, idx - offs[lo]};
}

Mat m_left_action(Ctx& c, const MCarrier& mc, int a) {
  int d = as_int(mc.dim);
  Mat m(c.alg.field, d, d);
  for (size_t k = 0; k < mc.parts.size(); ++k)
    set_block(m, (int)mc.offs[k], (int)mc.offs[k], left_action(c, mc.parts[k], a));
  return m;
}

Mat m_right_action(Ctx& c, const MCarrier& mc, int a) {
  int d = as_int(mc.dim);
  Mat m(c.alg.field, d, d);
  for (size_t k = 0; k < mc.parts.size(); ++k)
    set_block(m, (int)mc.offs[k], (int)mc.offs[k], right_action(c, mc.parts[k], a));
  return m;
}

void sv_add(SVec& v, long long idx, const Scalar& s) {
  if (s.is_zero()) return;
  auto it = v.find(idx);
  if (it == v.end()) {
    v.emplace(idx, s);
    return;
  }
  it->second += s;
  if (it->second.is_zero()) v.erase(it);
}

bool sv_equal(const SVec& a, const SVec& b) { return a == b; }

TwoMorphism make_tm(Ctx& c, OneMorphism src, OneMorphism tgt, Mat m) {
  if (src.tgt_obj != tgt.tgt_obj || src.src_obj != tgt.src_obj)
    throw CompositionMismatch("2-morphism between 1-morphisms with different endpoints");
  assert(m.rows() == mcarrier(c, tgt).dim && m.cols() == mcarrier(c, src).dim);
  return {std::move(src), std::move(tgt), std::move(m)};
}

TwoMorphism identity_tm(Ctx& c, const OneMorphism& f) {
  int d = as_int(mcarrier(c, f).dim);
  return {f, f, Mat::identity(c.alg.field, d)};
}

TwoMorphism zero_tm(Ctx& c, const OneMorphism& src, const OneMorphism& tgt) {
  return make_tm(c, src, tgt,
                 Mat(c.alg.field, as_int(mcarrier(c, tgt).dim),
                     as_int(mcarrier(c, src).dim)));
}

TwoMorphism vcomp(const TwoMorphism& f, const TwoMorphism& g) {
  if (f.src != g.tgt)
    throw CompositionMismatch("vertical composite through mismatched 1-morphisms");
  return {g.src, f.tgt, f.m * g.m};
}

TwoMorphism add_tm(const TwoMorphism& f, const TwoMorphism& g) {
  assert(f.src == g.src && f.tgt == g.tgt);
  return {f.src, f.tgt, f.m + g.m};
}

TwoMorphism scale_tm(const TwoMorphism& f, const Scalar& s) {
  return {f.src, f.tgt, f.m.scaled(s)};
}

namespace {

const Mat& split_map(Ctx& c, const Word& wx, const Word& wy) {
  Word comp = wx;
  comp.insert(comp.end(), wy.begin(), wy.end());
  auto key = std::make_tuple(comp, (int)wx.size(), 0);
  auto it = c.split_cache.find(key);
  if (it != c.split_cache.end()) return it->second;
  CarrierPtr cx = carrier(c, wx), cy = carrier(c, wy), cz = carrier(c, comp);
  Mat m(c.alg.field, 0, 0);
  if (cz->pure) {
    // Sectioning the cut junction puts the idempotent in the left factor and
    // the junction element in the right one; every other leg passes through.
    check_entries(cx->dim * cy->dim, cz->dim);
    m = Mat(c.alg.field, as_int(cx->dim * cy->dim), as_int(cz->dim));
    int g1 = (int)wx.size(), g2 = (int)wy.size();
    int j = cz->jseq[g1];
    int xe = cx->leg_pos[g1][c.alg.idem[j]];
    assert(xe >= 0);
    std::vector<int> dz, du(g1 + 1), dv(g2 + 1);
    for (long long col = 0; col < cz->dim; ++col) {
      decode_digits(*cz, col, dz);
      for (int t = 0; t < g1; ++t) du[t] = dz[t];
      du[g1] = xe;
      dv[0] = cy->leg_pos[0][cz->legs[g1][dz[g1]]];
      assert(dv[0] >= 0);
      for (int s = 1; s <= g2; ++s) dv[s] = dz[g1 + s];
      long long row = encode_digits(*cx, du) * cy->dim + encode_digits(*cy, dv);
      m.at(as_int(row), (int)col) = c.one();
    }
  } else {
    m = kron(pi_full(c, cx), pi_full(c, cy)) * sigma_full(c, cz);
  }
  return c.split_cache.emplace(key, std::move(m)).first->second;
}

const Mat& merge_map(Ctx& c, const Word& wx, const Word& wy) {
  Word comp = wx;
  comp.insert(comp.end(), wy.begin(), wy.end());
  auto key = std::make_tuple(comp, (int)wx.size(), 0);
  auto it = c.merge_cache.find(key);
  if (it != c.merge_cache.end()) return it->second;
  CarrierPtr cx = carrier(c, wx), cy = carrier(c, wy), cz = carrier(c, comp);
  Mat m(c.alg.field, 0, 0);
  if (cz->pure) {
    // Multiply the facing legs at the cut junction; every other leg passes
    // through.
    check_entries(cz->dim, cx->dim * cy->dim);
    m = Mat(c.alg.field, as_int(cz->dim), as_int(cx->dim * cy->dim));
    int g1 = (int)wx.size(), g2 = (int)wy.size();
    std::vector<int> du, dv, dz(g1 + g2 + 1);
    for (long long u = 0; u < cx->dim; ++u) {
      decode_digits(*cx, u, du);
      int b = cx->legs[g1][du[g1]];
      for (int t = 0; t < g1; ++t) dz[t] = du[t];
      for (long long v = 0; v < cy->dim; ++v) {
        decode_digits(*cy, v, dv);
        const AVec& pr = c.alg.prod(b, cy->legs[0][dv[0]]);
        if (pr.empty()) continue;
        for (int s = 1; s <= g2; ++s) dz[g1 + s] = dv[s];
        long long col = u * cy->dim + v;
        for (const auto& [cid, coeff] : pr) {
          int pos = cz->leg_pos[g1][cid];
          assert(pos >= 0);
          dz[g1] = pos;
          m.at(as_int(encode_digits(*cz, dz)), as_int(col)) += coeff;
        }
      }
    }
  } else {
    m = pi_full(c, cz) * kron(sigma_full(c, cx), sigma_full(c, cy));
  }
  return c.merge_cache.emplace(key, std::move(m)).first->second;
}

}  // namespace

TwoMorphism hcomp2(Ctx& c, const TwoMorphism& f, const TwoMorphism& g) {
  assert(!f.src.placeholder() && !g.src.placeholder());
  OneMorphism z = hcomp1(f.src, g.src);
  OneMorphism zp = hcomp1(f.tgt, g.tgt);
  MCarrier mz = mcarrier(c, z), mzp = mcarrier(c, zp);
  MCarrier msrc_f = mcarrier(c, f.src), msrc_g = mcarrier(c, g.src);
  MCarrier mtgt_f = mcarrier(c, f.tgt), mtgt_g = mcarrier(c, g.tgt);
  check_entries(mzp.dim, mz.dim);
  Mat m(c.alg.field, as_int(mzp.dim), as_int(mz.dim));

  int ns = (int)f.src.summands.size(), nt = (int)g.src.summands.size();
  int nu = (int)f.tgt.summands.size(), nv = (int)g.tgt.summands.size();
  for (int s = 0; s < ns; ++s)
    for (int t = 0; t < nt; ++t) {
      const Mat& sp = split_map(c, f.src.summands[s], g.src.summands[t]);
      for (int u = 0; u < nu; ++u) {
        Mat fb = blockof(f.m, (int)mtgt_f.offs[u], (int)(mtgt_f.offs[u + 1] - mtgt_f.offs[u]),
                         (int)msrc_f.offs[s], (int)(msrc_f.offs[s + 1] - msrc_f.offs[s]));
        if (fb.is_zero()) continue;
        for (int v = 0; v < nv; ++v) {
          Mat gb = blockof(g.m, (int)mtgt_g.offs[v], (int)(mtgt_g.offs[v + 1] - mtgt_g.offs[v]),
                           (int)msrc_g.offs[t], (int)(msrc_g.offs[t + 1] - msrc_g.offs[t]));
          if (gb.is_zero()) continue;
          const Mat& mg = merge_map(c, f.tgt.summands[u], g.tgt.summands[v]);
          // blk = mg * (fb (x) gb) * sp, accumulated column-wise through the
          // sparse split/merge maps instead of materializing the Kronecker
          // factor.
          std::vector<std::vector<std::pair<int, Scalar>>> mgcols(mg.cols());
          for (int jc = 0; jc < mg.cols(); ++jc)
            for (int i = 0; i < mg.rows(); ++i)
              if (!mg.at(i, jc).is_zero()) mgcols[jc].push_back({i, mg.at(i, jc)});
          int r0 = (int)mzp.offs[u * nv + v], c0 = (int)mz.offs[s * nt + t];
          for (int j = 0; j < sp.cols(); ++j)
            for (int r = 0; r < sp.rows(); ++r) {
              const Scalar& sval = sp.at(r, j);
              if (sval.is_zero()) continue;
              int p = r / gb.cols(), q = r % gb.cols();
              for (int i1 = 0; i1 < fb.rows(); ++i1) {
                if (fb.at(i1, p).is_zero()) continue;
                for (int i2 = 0; i2 < gb.rows(); ++i2) {
                  if (gb.at(i2, q).is_zero()) continue;
                  Scalar v3 = sval * fb.at(i1, p) * gb.at(i2, q);
                  for (const auto& [i, mv] : mgcols[i1 * gb.rows() + i2])
                    m.at(r0 + i, c0 + j) += v3 * mv;
                }
              }
            }
        }
      }
    }
  return {z, zp, std::move(m)};
}

struct WhiskerPlan {
  bool fast = false;  // all-generator fast path
  // summand tables
  std::vector<CarrierPtr> src_c, tgt_c;   // per (p,t,s) / (p,t',s)
  std::vector<long long> src_off, tgt_off;
  std::vector<CarrierPtr> ftgt_c;
  std::vector<long long> fsrc_off, ftgt_off;
  std::vector<int> gP, gF, gFt, gS;
  int np = 0, nt = 0, ntp = 0, ns = 0;
  int u = 0, v = 0;  // boundary objects of f
  std::vector<std::vector<std::pair<int, Scalar>>> fcols;  // sparse columns of f.m
  std::shared_ptr<Mat> dense;  // fallback: full matrix of id_P * f * id_S
};

namespace {

std::shared_ptr<const WhiskerPlan> whisker_plan(Ctx& c, const Whisker& w) {
  if (w.plan) return w.plan;
  auto pl = std::make_shared<WhiskerPlan>();
  const auto& Pw = w.P.summands;
  const auto& Sw = w.S.summands;
  const auto& Fs = w.f.src.summands;
  const auto& Ft = w.f.tgt.summands;
  pl->np = (int)Pw.size();
  pl->nt = (int)Fs.size();
  pl->ntp = (int)Ft.size();
  pl->ns = (int)Sw.size();
  pl->u = w.f.src.tgt_obj;
  pl->v = w.f.src.src_obj;
  bool pure = om_pure(w.P) && om_pure(w.S) && om_pure(w.f.src) && om_pure(w.f.tgt);
  for (const auto& pw : Pw) pl->gP.push_back((int)pw.size());
  for (const auto& fw : Fs) pl->gF.push_back((int)fw.size());
  for (const auto& fw : Ft) pl->gFt.push_back((int)fw.size());
  for (const auto& sw : Sw) pl->gS.push_back((int)sw.size());

  auto build = [&](const std::vector<Word>& mid, std::vector<CarrierPtr>& cs,
                   std::vector<long long>& offs) {
    offs.push_back(0);
    for (const auto& pw : Pw)
      for (const auto& fw : mid)
        for (const auto& sw : Sw) {
          Word comp = pw;
          comp.insert(comp.end(), fw.begin(), fw.end());
          comp.insert(comp.end(), sw.begin(), sw.end());
          cs.push_back(carrier(c, comp));
          offs.push_back(offs.back() + cs.back()->dim);
        }
  };
  build(Fs, pl->src_c, pl->src_off);
  build(Ft, pl->tgt_c, pl->tgt_off);

  pl->fsrc_off.push_back(0);
  for (const auto& fw : Fs)
    pl->fsrc_off.push_back(pl->fsrc_off.back() + carrier(c, fw)->dim);
  pl->ftgt_off.push_back(0);
  for (const auto& fw : Ft) {
    pl->ftgt_c.push_back(carrier(c, fw));
    pl->ftgt_off.push_back(pl->ftgt_off.back() + pl->ftgt_c.back()->dim);
  }

  if (pure) {
    pl->fast = true;
    pl->fcols.resize(w.f.m.cols());
    for (int j = 0; j < w.f.m.cols(); ++j)
      for (int i = 0; i < w.f.m.rows(); ++i)
        if (!w.f.m.at(i, j).is_zero()) pl->fcols[j].emplace_back(i, w.f.m.at(i, j));
  } else {
    TwoMorphism full = w.f;
    if (!w.S.placeholder()) full = hcomp2(c, full, identity_tm(c, w.S));
    if (!w.P.placeholder()) full = hcomp2(c, identity_tm(c, w.P), full);
    pl->dense = std::make_shared<Mat>(std::move(full.m));
  }
  w.plan = pl;
  return pl;
}

}  // namespace

Whisker whisker(Ctx& c, const OneMorphism& P, const TwoMorphism& f,
                const OneMorphism& S) {
  (void)c;
  if (P.src_obj != f.src.tgt_obj || f.src.src_obj != S.tgt_obj)
    throw CompositionMismatch("whiskering endpoints do not match");
  return {P, S, f, nullptr};
}

OneMorphism whisker_src(const Whisker& w) {
  return hcomp1(w.P, hcomp1(w.f.src, w.S));
}
OneMorphism whisker_tgt(const Whisker& w) {
  return hcomp1(w.P, hcomp1(w.f.tgt, w.S));
}

SVec apply_whisker(Ctx& c, const Whisker& w, const SVec& v) {
  auto pl = whisker_plan(c, w);
  SVec out;
  const Algebra& al = c.alg;

  if (!pl->fast) {
    const Mat& m = *pl->dense;
    for (const auto& [idx, val] : v) {
      for (int r = 0; r < m.rows(); ++r) {
        const Scalar& e = m.at(r, (int)idx);
        if (!e.is_zero()) sv_add(out, r, e * val);
      }
    }
    return out;
  }

  std::vector<int> d, fd, fdp, dp;
  for (const auto& [idx, val] : v) {
    // locate the (p, t, s) summand triple
    int tri = 0;
    {
      int lo = 0, hi = (int)pl->src_c.size() - 1;
      while (lo < hi) {
        int mid = (lo + hi + 1) / 2;
        if (pl->src_off[mid] <= idx)
          lo = mid;
        else
          hi = mid - 1;
      }
      tri = lo;
    }
    int p = tri / (pl->nt * pl->ns), rem = tri % (pl->nt * pl->ns);
    int t = rem / pl->ns, s = rem % pl->ns;
    const CarrierData& sc = *pl->src_c[tri];
    decode_digits(sc, idx - pl->src_off[tri], d);
    int gP = pl->gP[p], gF = pl->gF[t], gS = pl->gS[s];

    // isolated source coordinates of f
    fd.resize(gF + 1);
    if (gP == 0)
      fd[0] = d[0];
    else
      fd[0] = c.rb_pos[pl->u][sc.legs[gP][d[gP]]];
    for (int k = 1; k < gF; ++k) fd[k] = d[gP + k];
    if (gS == 0)
      fd[gF] = d[gP + gF];
    else
      fd[gF] = c.lb_pos[pl->v][al.idem[pl->v]];
    assert(fd[0] >= 0 && fd[gF] >= 0);

    long long fidx = pl->fsrc_off[t];
    {
      const CarrierData& fc = *carrier(c, w.f.src.summands[t]);
      fidx += encode_digits(fc, fd);
    }

    for (const auto& [row, fval] : pl->fcols[(int)fidx]) {
      // locate target summand t'
      int tp = 0;
      {
        int lo = 0, hi = pl->ntp - 1;
        while (lo < hi) {
          int mid = (lo + hi + 1) / 2;
          if (pl->ftgt_off[mid] <= row)
            lo = mid;
          else
            hi = mid - 1;
        }
        tp = lo;
      }
      const CarrierData& fc = *pl->ftgt_c[tp];
      decode_digits(fc, row - pl->ftgt_off[tp], fdp);
      int gFt = pl->gFt[tp];
      int ttri = (p * pl->ntp + tp) * pl->ns + s;
      const CarrierData& tc = *pl->tgt_c[ttri];

      dp.assign(gP + gFt + gS + 1, 0);
      for (int k = 0; k < gP; ++k) dp[k] = d[k];
      Scalar coeff = fval * val;
      if (gP > 0) {
        // left junction keeps e_u; the incoming first element must lie in
        // the e_u block or the term dies.
        int b0 = fc.legs[0][fdp[0]];
        if (al.peirce[b0].first != pl->u) continue;
        dp[gP] = tc.leg_pos[gP][b0];
        assert(dp[gP] >= 0);
      } else {
        dp[0] = fdp[0];
      }
      for (int k = 1; k < gFt; ++k) dp[gP + k] = fdp[k];
      for (int k = 1; k <= gS; ++k) dp[gP + gFt + k] = d[gP + gF + k];

      if (gS == 0) {
        dp[gP + gFt] = fdp[gFt];
        sv_add(out, pl->tgt_off[ttri] + encode_digits(tc, dp), coeff);
      } else {
        // right junction: contract the outgoing last element with the
        // retained junction element.
        int yq = fc.legs[gFt][fdp[gFt]];
        int mr = sc.legs[gP + gF][d[gP + gF]];
        for (const auto& [cid, pc] : al.prod(yq, mr)) {
          int pos = tc.leg_pos[gP + gFt][cid];
          assert(pos >= 0);
          dp[gP + gFt] = pos;
          sv_add(out, pl->tgt_off[ttri] + encode_digits(tc, dp), coeff * pc);
        }
      }
    }
  }
  return out;
}

bool is_bimodule_map(Ctx& c, const TwoMorphism& f) {
  MCarrier ms = mcarrier(c, f.src), mt = mcarrier(c, f.tgt);
  for (int a = 0; a < c.alg.dim; ++a) {
    if (m_left_action(c, mt, a) * f.m != f.m * m_left_action(c, ms, a)) return false;
    if (m_right_action(c, mt, a) * f.m != f.m * m_right_action(c, ms, a)) return false;
  }
  return true;
}

bool is_isomorphism(Ctx& c, const TwoMorphism& f) {
  (void)c;
  return f.m.rows() == f.m.cols() && inverse(f.m).has_value();
}

std::optional<TwoMorphism> invert_tm(Ctx& c, const TwoMorphism& f) {
  (void)c;
  if (f.m.rows() != f.m.cols()) return std::nullopt;
  auto inv = inverse(f.m);
  if (!inv) return std::nullopt;
  return TwoMorphism{f.tgt, f.src, std::move(*inv)};
}

namespace {

// Closed-form basis of bimodule maps between generator words: a map of
// left factors (right multiplication), a map of right factors (left
// multiplication), and matching of the inert middle digits.
std::vector<Mat> hom_words(Ctx& c, const Word& ws, const Word& wt) {
  const Algebra& al = c.alg;
  CarrierPtr cs = carrier(c, ws), ct = carrier(c, wt);
  int gs = (int)ws.size(), gt = (int)wt.size();
  int j0 = cs->jseq[0], jg = cs->jseq[gs];
  int i0 = ct->jseq[0], ih = ct->jseq[gt];
  std::vector<Mat> out;

  long long ms = 1, mt = 1;
  for (int t = 1; t < gs; ++t) ms *= (long long)cs->legs[t].size();
  for (int t = 1; t < gt; ++t) mt *= (long long)ct->legs[t].size();
  check_entries(ct->dim * cs->dim,
                (long long)al.block[j0][i0].size() * al.block[ih][jg].size() * ms * mt);

  std::vector<int> sd, td(gt + 1);
  for (int cc : al.block[j0][i0])
    for (int dd : al.block[ih][jg])
      for (long long mu = 0; mu < ms; ++mu)
        for (long long nu = 0; nu < mt; ++nu) {
          Mat m(al.field, as_int(ct->dim), as_int(cs->dim));
          for (long long col = 0; col < cs->dim; ++col) {
            decode_digits(*cs, col, sd);
            long long mid = 0;
            for (int t = 1; t < gs; ++t)
              mid = mid * (long long)cs->legs[t].size() + sd[t];
            if (mid != mu) continue;
            long long nur = nu;
            for (int t = gt - 1; t >= 1; --t) {
              td[t] = (int)(nur % (long long)ct->legs[t].size());
              nur /= (long long)ct->legs[t].size();
            }
            int b0 = cs->legs[0][sd[0]], bg = cs->legs[gs][sd[gs]];
            for (const auto& [x, xc] : al.prod(b0, cc))
              for (const auto& [y, yc] : al.prod(dd, bg)) {
                td[0] = ct->leg_pos[0][x];
                td[gt] = ct->leg_pos[gt][y];
                assert(td[0] >= 0 && td[gt] >= 0);
                m.at((int)encode_digits(*ct, td), (int)col) += xc * yc;
              }
          }
          out.push_back(std::move(m));
        }
  return out;
}

}  // namespace

std::vector<TwoMorphism> hom_space(Ctx& c, const OneMorphism& src,
                                   const OneMorphism& tgt) {
  assert(!src.placeholder() && !tgt.placeholder());
  MCarrier ms = mcarrier(c, src), mt = mcarrier(c, tgt);
  std::vector<TwoMorphism> out;

  if (om_pure(src) && om_pure(tgt)) {
    for (size_t s = 0; s < src.summands.size(); ++s)
      for (size_t t = 0; t < tgt.summands.size(); ++t)
        for (Mat& b : hom_words(c, src.summands[s], tgt.summands[t])) {
          Mat m(c.alg.field, as_int(mt.dim), as_int(ms.dim));
          set_block(m, (int)mt.offs[t], (int)ms.offs[s], b);
          out.push_back({src, tgt, std::move(m)});
        }
    return out;
  }

  // intertwiner solve on small carriers
  long long unknowns = mt.dim * ms.dim;
  check_entries(2 * c.alg.dim * unknowns, unknowns);
  int dy = as_int(mt.dim), dx = as_int(ms.dim);
  Mat cm(c.alg.field, 2 * c.alg.dim * dy * dx, dy * dx);
  int row = 0;
  for (int a = 0; a < c.alg.dim; ++a) {
    Mat ly = m_left_action(c, mt, a), lx = m_left_action(c, ms, a);
    Mat ry = m_right_action(c, mt, a), rx = m_right_action(c, ms, a);
    for (int i = 0; i < dy; ++i)
      for (int j = 0; j < dx; ++j) {
        for (int k = 0; k < dy; ++k)
          if (!ly.at(i, k).is_zero()) cm.at(row, k * dx + j) += ly.at(i, k);
        for (int k = 0; k < dx; ++k)
          if (!lx.at(k, j).is_zero()) cm.at(row, i * dx + k) -= lx.at(k, j);
        ++row;
        for (int k = 0; k < dy; ++k)
          if (!ry.at(i, k).is_zero()) cm.at(row, k * dx + j) += ry.at(i, k);
        for (int k = 0; k < dx; ++k)
          if (!rx.at(k, j).is_zero()) cm.at(row, i * dx + k) -= rx.at(k, j);
        ++row;
      }
  }
  Mat kb = kernel_basis(cm);
  for (int kcol = 0; kcol < kb.cols(); ++kcol) {
    Mat m(c.alg.field, dy, dx);
    for (int i = 0; i < dy; ++i)
      for (int j = 0; j < dx; ++j) m.at(i, j) = kb.at(i * dx + j, kcol);
    out.push_back({src, tgt, std::move(m)});
  }
  return out;
}

SubQuot kernel_tm(Ctx& c, const TwoMorphism& f, const std::string& tag) {
  MCarrier ms = mcarrier(c, f.src);
  Mat kb = kernel_basis(f.m);
  auto o = std::make_shared<Opaque>();
  o->tgt = f.src.tgt_obj;
  o->src = f.src.src_obj;
  o->dim = kb.cols();
  o->tag = tag;
  o->lact.reserve(c.alg.dim);
  o->ract.reserve(c.alg.dim);
  for (int a = 0; a < c.alg.dim; ++a) {
    auto l = solve_matrix(kb, m_left_action(c, ms, a) * kb);
    auto r = solve_matrix(kb, m_right_action(c, ms, a) * kb);
    if (!l || !r)
      throw std::runtime_error("kernel of a non-bimodule map requested (" + tag + ")");
    o->lact.push_back(std::move(*l));
    o->ract.push_back(std::move(*r));
  }
  OpaquePtr op = o;
  return {op, make_tm(c, opaque_om(op), f.src, std::move(kb))};
}

SubQuot cokernel_tm(Ctx& c, const TwoMorphism& f, const std::string& tag) {
  MCarrier mt = mcarrier(c, f.tgt);
  CokernelResult ck = cokernel(f.m);
  auto o = std::make_shared<Opaque>();
  o->tgt = f.tgt.tgt_obj;
  o->src = f.tgt.src_obj;
  o->dim = ck.dim;
  o->tag = tag;
  for (int a = 0; a < c.alg.dim; ++a) {
    Mat la = m_left_action(c, mt, a), ra = m_right_action(c, mt, a);
    Mat l = ck.projection * la * ck.section;
    Mat r = ck.projection * ra * ck.section;
    if (l * ck.projection != ck.projection * la ||
        r * ck.projection != ck.projection * ra)
      throw std::runtime_error("cokernel of a non-bimodule map requested (" + tag + ")");
    o->lact.push_back(std::move(l));
    o->ract.push_back(std::move(r));
  }
  OpaquePtr op = o;
  return {op, make_tm(c, f.tgt, opaque_om(op), std::move(ck.projection))};
}

TwoMorphism injection_tm(Ctx& c, const std::vector<OneMorphism>& parts, int k) {
  OneMorphism sum = oplus(parts);
  MCarrier msum = mcarrier(c, sum);
  MCarrier mk = mcarrier(c, parts[k]);
  long long off = 0;
  for (int i = 0; i < k; ++i) off += mcarrier(c, parts[i]).dim;
  Mat m(c.alg.field, as_int(msum.dim), as_int(mk.dim));
  for (long long j = 0; j < mk.dim; ++j) m.at((int)(off + j), (int)j) = c.one();
  return make_tm(c, parts[k], sum, std::move(m));
}

TwoMorphism projection_tm(Ctx& c, const std::vector<OneMorphism>& parts, int k) {
  OneMorphism sum = oplus(parts);
  MCarrier msum = mcarrier(c, sum);
  MCarrier mk = mcarrier(c, parts[k]);
  long long off = 0;
  for (int i = 0; i < k; ++i) off += mcarrier(c, parts[i]).dim;
  Mat m(c.alg.field, as_int(mk.dim), as_int(msum.dim));
  for (long long j = 0; j < mk.dim; ++j) m.at((int)j, (int)(off + j)) = c.one();
  return make_tm(c, sum, parts[k], std::move(m));
}

std::map<std::pair<int, int>, long long> profile(Ctx& c, const OneMorphism& f) {
  std::map<std::pair<int, int>, long long> out;
  for (const auto& w : f.summands) {
    if (!word_pure(w))
      throw std::runtime_error("profile of a word with non-generator factors");
    CarrierPtr cp = carrier(c, w);
    int g = (int)w.size();
    long long mult = 1;
    for (int t = 1; t < g; ++t) mult *= (long long)cp->legs[t].size();
    out[{cp->jseq[0], cp->jseq[g]}] += mult;
  }
  return out;
}

}  // namespace fiax

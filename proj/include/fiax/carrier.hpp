#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "fiax/algebra.hpp"

namespace fiax {

struct CompositionMismatch : std::runtime_error {
  explicit CompositionMismatch(const std::string& what)
      : std::runtime_error("composition mismatch: " + what) {}
};

// A bimodule given by explicit action matrices rather than a generator symbol.
// Produced by kernels, cokernels and balanced tensor products; identified by
// object identity (shared_ptr) so that syntactically equal composites share
// carriers.
struct Opaque {
  int tgt = 0, src = 0;  // supported on e_tgt (left) and e_src (right)
  int dim = 0;
  std::vector<Mat> lact, ract;  // one square matrix per algebra basis element
  std::string tag;              // diagnostics only
};
using OpaquePtr = std::shared_ptr<const Opaque>;

// One tensor factor of a 1-morphism word: either the generator taking the
// source object to the target object, or an opaque bimodule.
struct Atom {
  int tgt = 0, src = 0;
  OpaquePtr opq;  // null for generators

  bool pure() const { return opq == nullptr; }
  bool operator==(const Atom& o) const {
    return tgt == o.tgt && src == o.src && opq == o.opq;
  }
  bool operator<(const Atom& o) const {
    if (tgt != o.tgt) return tgt < o.tgt;
    if (src != o.src) return src < o.src;
    return opq < o.opq;
  }
};

using Word = std::vector<Atom>;  // composable left-to-right (outer to inner)

// A 1-morphism: a formal direct sum of tensor words with common endpoints.
// A summand list containing a single empty word stands for the missing strict
// identity and is only legal as a whiskering placeholder.
struct OneMorphism {
  int tgt_obj = 0, src_obj = 0;
  std::vector<Word> summands;

  bool placeholder() const {
    return summands.size() == 1 && summands[0].empty();
  }
  bool operator==(const OneMorphism& o) const {
    return tgt_obj == o.tgt_obj && src_obj == o.src_obj && summands == o.summands;
  }
  bool operator!=(const OneMorphism& o) const { return !(*this == o); }
};

OneMorphism gen_om(int tgt, int src);
OneMorphism unit_om(int obj);   // the designated unit word at obj
OneMorphism empty_om(int obj);  // whiskering placeholder
OneMorphism opaque_om(const OpaquePtr& o);
OneMorphism hcomp1(const OneMorphism& a, const OneMorphism& b);
OneMorphism oplus(const std::vector<OneMorphism>& parts);

// Canonical carrier of one word. Words of generators use the closed product
// basis: legs (A e_{j0}, e_{j1} A e_{j1}, ..., e_{jg} A) indexed mixed-radix.
// Words containing opaque atoms are realized by the left-nested chain of
// balanced tensor quotients, which depends only on the atom list.
struct CarrierData {
  bool pure = true;
  int tgt_e = 0, src_e = 0;
  long long dim = 0;
  Word atoms;

  // pure model
  std::vector<int> jseq;                  // j_0..j_g
  std::vector<std::vector<int>> legs;     // algebra basis ids per leg
  std::vector<std::vector<int>> leg_pos;  // basis id -> digit position or -1
  std::vector<long long> stride;

  // chain model (small words only)
  std::shared_ptr<const CarrierData> prefix;  // atoms[0..g-2]; null for leaves
  std::shared_ptr<const CarrierData> last_c;  // single last atom
  Mat pi;        // prefix (x) last -> this
  Mat sigma;     // this -> prefix (x) last, standard-basis columns
  std::vector<Mat> lact, ract;  // dense actions (chain carriers)

  mutable std::map<int, Mat> lcache, rcache;  // dense actions for pure words
};
using CarrierPtr = std::shared_ptr<const CarrierData>;

// Shared computation context: the algebra, its dual basis (when the trace
// form is nondegenerate) and carrier caches.
struct Ctx {
  Algebra alg;
  Mat star;  // column b = coordinates of b*, when has_star
  bool has_star = false;

  // Position of a basis element inside e_i A (lb_pos[i]) / A e_j (rb_pos[j]).
  std::vector<std::vector<int>> lb_pos, rb_pos;

  std::map<Word, CarrierPtr> carrier_cache;
  std::map<const CarrierData*, Mat> pi_full_cache, sigma_full_cache;
  std::map<std::tuple<Word, int, int>, Mat> split_cache, merge_cache;

  Scalar zero() const { return Scalar(alg.field); }
  Scalar one() const { return Scalar(alg.field, 1); }

  Ctx() = default;
  Ctx(const Ctx&) = delete;
  Ctx& operator=(const Ctx&) = delete;
};
std::unique_ptr<Ctx> make_context(Algebra a);

CarrierPtr carrier(Ctx& c, const Word& w);

// Mixed-radix digit helpers for pure carriers.
long long encode_digits(const CarrierData& cd, const std::vector<int>& digits);
void decode_digits(const CarrierData& cd, long long idx, std::vector<int>& digits);

long long atom_dim(const Ctx& c, const Atom& a);
long long expansion_dim(const Ctx& c, const CarrierData& cd);

// Dense action of a basis element on a (small) carrier.
const Mat& left_action(Ctx& c, const CarrierPtr& cp, int a);
const Mat& right_action(Ctx& c, const CarrierPtr& cp, int a);

// Canonical quotient from the full tensor product of atom carriers, and its
// standard-basis section.
const Mat& pi_full(Ctx& c, const CarrierPtr& cp);
const Mat& sigma_full(Ctx& c, const CarrierPtr& cp);

// Carrier of a direct sum: concatenated summand carriers with offsets.
struct MCarrier {
  std::vector<CarrierPtr> parts;
  std::vector<long long> offs;  // size parts+1; offs.back() = dim
  long long dim = 0;

  std::pair<int, long long> locate(long long idx) const;  // (summand, local)
};
MCarrier mcarrier(Ctx& c, const OneMorphism& f);

Mat m_left_action(Ctx& c, const MCarrier& mc, int a);
Mat m_right_action(Ctx& c, const MCarrier& mc, int a);

// Sparse vector over a carrier's basis; values are never zero.
using SVec = std::map<long long, Scalar>;
void sv_add(SVec& v, long long idx, const Scalar& s);
bool sv_equal(const SVec& a, const SVec& b);

// A 2-morphism with an explicit (dense) matrix between small carriers.
struct TwoMorphism {
  OneMorphism src, tgt;
  Mat m;
};
TwoMorphism make_tm(Ctx& c, OneMorphism src, OneMorphism tgt, Mat m);
TwoMorphism identity_tm(Ctx& c, const OneMorphism& f);
TwoMorphism zero_tm(Ctx& c, const OneMorphism& src, const OneMorphism& tgt);
TwoMorphism vcomp(const TwoMorphism& f, const TwoMorphism& g);  // f after g
TwoMorphism add_tm(const TwoMorphism& f, const TwoMorphism& g);
TwoMorphism scale_tm(const TwoMorphism& f, const Scalar& s);

// Horizontal composite of dense 2-morphisms (small carriers only).
TwoMorphism hcomp2(Ctx& c, const TwoMorphism& f, const TwoMorphism& g);

// One whiskered step id_P * f * id_S. Applied sparsely: composites may be
// huge as long as f itself is small and every non-generator word involved is
// small. Requires f to be a bimodule map (the induced map on balanced tensor
// products is otherwise ill-defined).
struct WhiskerPlan;
struct Whisker {
  OneMorphism P, S;  // possibly placeholders
  TwoMorphism f;
  mutable std::shared_ptr<const WhiskerPlan> plan;
};
Whisker whisker(Ctx& c, const OneMorphism& P, const TwoMorphism& f,
                const OneMorphism& S);
OneMorphism whisker_src(const Whisker& w);
OneMorphism whisker_tgt(const Whisker& w);
SVec apply_whisker(Ctx& c, const Whisker& w, const SVec& v);

bool is_bimodule_map(Ctx& c, const TwoMorphism& f);
bool is_isomorphism(Ctx& c, const TwoMorphism& f);
std::optional<TwoMorphism> invert_tm(Ctx& c, const TwoMorphism& f);

// Basis of the space of bimodule maps src -> tgt.
std::vector<TwoMorphism> hom_space(Ctx& c, const OneMorphism& src,
                                   const OneMorphism& tgt);

// Kernel / cokernel of a bimodule map, as an opaque 1-morphism together with
// the inclusion (resp. projection).
struct SubQuot {
  OpaquePtr obj;
  TwoMorphism map;  // kernel: [obj] -> src(f); cokernel: tgt(f) -> [obj]
};
SubQuot kernel_tm(Ctx& c, const TwoMorphism& f, const std::string& tag);
SubQuot cokernel_tm(Ctx& c, const TwoMorphism& f, const std::string& tag);

// Injections into / projections out of a direct sum.
TwoMorphism injection_tm(Ctx& c, const std::vector<OneMorphism>& parts, int k);
TwoMorphism projection_tm(Ctx& c, const std::vector<OneMorphism>& parts, int k);

// Multiplicity of each generator in a sum of generator words.
std::map<std::pair<int, int>, long long> profile(Ctx& c, const OneMorphism& f);

}  // namespace fiax

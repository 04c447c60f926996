#pragma once

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "fiax/bilax.hpp"
#include "fiax/report.hpp"

namespace fiax {

// A zig-zag triangle fails to collapse to the identity (or cannot even be
// formed because the trace form admits no dual basis).
struct ZigzagViolation : std::runtime_error {
  ZigzagViolation(std::string which_, std::string witness_)
      : std::runtime_error("zig-zag violation [" + which_ + "]: " + witness_),
        which(std::move(which_)),
        witness(std::move(witness_)) {}
  std::string which, witness;
};

// Adjoint pair (F, G): alpha lands in G∘F from the oplax unit word at src(F),
// beta collapses F∘G onto the lax unit word at tgt(F).
struct AdjunctionData {
  OneMorphism F, G;
  TwoMorphism alpha;  // U'_{src F} -> G∘F
  TwoMorphism beta;   // F∘G -> U_{tgt F}
};

// The canonical adjunction (F(i,j), F(j,i)): alpha inserts the idempotent e_i
// at the junction, beta pairs the junction content through the trace.  Both
// zig-zag triangles are verified exactly; a failure (including a degenerate
// trace form, which leaves no oplax units to build the triangles from) throws
// ZigzagViolation.
AdjunctionData build_adjunction(Ctx& c, int i, int j);

// The same structure maps without the verification pass.
AdjunctionData build_adjunction_unchecked(Ctx& c, int i, int j);

// Evaluates both zig-zag composites
//   l_F ∘ (beta·id_F) ∘ (id_F·alpha) ∘ r'_F   against id_F, and
//   r_G ∘ (id_G·beta) ∘ (alpha·id_G) ∘ l'_G   against id_G,
// and reports one record per triangle.  Single-word pairs run through the
// staged sparse evaluator, so composite words never materialize densely.
Report verify_zigzag(Ctx& c, const AdjunctionData& adj);

// (F, G) with (F', G') where src(F) == tgt(F') gives (F∘F', G'∘G): the unit
// threads alpha' through an insertion of the oplax unit between the factors,
// the counit contracts the lax unit left behind by beta'.
AdjunctionData compose_adjunctions(Ctx& c, const AdjunctionData& a1,
                                   const AdjunctionData& a2);

// Biproduct of two adjunctions with equal endpoints: structure maps are the
// diagonal blocks.
AdjunctionData oplus_adjunctions(Ctx& c, const AdjunctionData& a1,
                                 const AdjunctionData& a2);

// Two left adjoints of the same G are isomorphic: returns (phi: F -> F',
// psi: F' -> F) with psi∘phi = id_F and phi∘psi = id_{F'}.
std::pair<TwoMorphism, TwoMorphism> uniqueness_iso(Ctx& c,
                                                   const AdjunctionData& a,
                                                   const AdjunctionData& b);

// Duality data: one canonical adjunction per generator pair.  Words extend by
// composition, direct sums by diagonal biproducts.
struct StarStructure {
  std::map<std::pair<int, int>, AdjunctionData> gens;
};
StarStructure build_star_structure(Ctx& c);

// F(i,j) -> F(j,i) on atoms, words reversed, summand order kept.
OneMorphism star_om(const OneMorphism& f);

// The chosen adjunction (F, F*) for a sum of generator words.
AdjunctionData adjunction_for(Ctx& c, const StarStructure& st,
                              const OneMorphism& f);

// gamma: F -> G gives gamma*: G* -> F*, the composite
//   G* -> U'∘G* -> (F*F)G* -> F*(G G*) -> F*∘U -> F*.
TwoMorphism star_of_2morphism(Ctx& c, const StarStructure& st,
                              const TwoMorphism& gamma);

// Monad structure on H ↦ G∘F∘H induced by the adjunction: mult contracts the
// inner F∘G through beta, unit inserts the oplax unit and applies alpha.
struct MonadData {
  TwoMorphism mult;  // G F G F H -> G F H
  TwoMorphism unit;  // H -> G F H
};
MonadData monad_from_adjunction(Ctx& c, const AdjunctionData& adj,
                                const OneMorphism& H);

// Dual comonad structure on H ↦ F∘G∘H.
struct ComonadData {
  TwoMorphism comult;  // F G H -> F G F G H
  TwoMorphism counit;  // F G H -> H
};
ComonadData comonad_from_adjunction(Ctx& c, const AdjunctionData& adj,
                                    const OneMorphism& H);

// ---------------------------------------------------------------------------
// The adjunction on the defining representation.
// ---------------------------------------------------------------------------

// Finitely generated projective left module ⊕_i (A e_i)^{mult[i]}.
struct ProjMod {
  std::vector<int> mult;  // one entry per idempotent
};

// One side of a representation hom-space: the induced module W⊗X when W is
// present, otherwise the plain projective X.  The basis is ordered by object,
// then copy, then carrier column.
struct RepSide {
  std::optional<OneMorphism> W;
  ProjMod X;
};

long long rep_dim(Ctx& c, const RepSide& s);
Mat rep_left_mul(Ctx& c, const RepSide& s, int a);

// Basis of left-module homomorphisms src -> tgt, as dense matrices.
std::vector<Mat> rep_hom_basis(Ctx& c, const RepSide& src, const RepSide& tgt);

// Hom(F⊗X, Y) -> Hom(X, G⊗Y): insert the dual-basis sum, apply alpha on the
// unit factor, then push f through the G factor.
Mat rep_phi(Ctx& c, const AdjunctionData& adj, const ProjMod& X,
            const ProjMod& Y, const Mat& f);

// Hom(X, G⊗Y) -> Hom(F⊗X, Y): push g through the F factor, apply beta, then
// contract the lax unit by multiplication.
Mat rep_psi(Ctx& c, const AdjunctionData& adj, const ProjMod& X,
            const ProjMod& Y, const Mat& g);

// Both hom-space bases together with the coordinate matrices of the two maps
// in those bases; phi and psi are mutually inverse.
struct RepAdjunction {
  std::vector<Mat> hom_left;   // basis of Hom(F⊗X, Y)
  std::vector<Mat> hom_right;  // basis of Hom(X, G⊗Y)
  Mat phi, psi;
};
RepAdjunction rep_adjunction_maps(Ctx& c, const AdjunctionData& adj,
                                  const ProjMod& X, const ProjMod& Y);

}  // namespace fiax

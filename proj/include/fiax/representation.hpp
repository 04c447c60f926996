#pragma once

#include "bilax.hpp"

namespace fiax {

// Action of 1- and 2-morphisms on the projective left modules Ae_k: the
// module F⊗Ae_k sits inside the carrier of F as the span of the basis
// vectors whose innermost leg lands in column k.

// Global carrier indices spanning F⊗Ae_k.  Pure words only.
std::vector<long long> module_basis(Ctx& c, const OneMorphism& F, int k);

// Matrix of t⊗id between the restricted bases of tgt and src.
Mat module_map(Ctx& c, const TwoMorphism& t, int k);

// The action maps of the unit carriers on these modules, built directly on
// restricted coordinates (independent of the unitor builders).
// Multiply the two outermost legs of U∘F into the outer leg of F.
Mat module_mult_left(Ctx& c, int obj, const OneMorphism& F, int k);
// Multiply the two innermost legs of G∘U into the inner leg of G.
Mat module_mult_right(Ctx& c, int obj, const OneMorphism& G, int k);
// Insert the dual basis at the outer end: x ↦ Σ_a a ⊗ a★·x.
Mat module_insert_left(Ctx& c, int obj, const OneMorphism& F, int k);
// Insert the dual basis at the inner end: mirrored formula.
Mat module_insert_right(Ctx& c, int obj, const OneMorphism& G, int k);
// Plain insertion x ↦ e ⊗ x.  Negative control: not natural in the module,
// so it cannot implement a unit action.
Mat module_insert_left_naive(Ctx& c, int obj, const OneMorphism& F, int k);

// Restricting the four contraction/insertion families to every module Ae_k
// must reproduce the four action maps above; checked exactly on the standard
// generators plus one seeded random direct sum per object.  naive_insertion
// swaps in the plain insertion and is expected to fail.
void check_defining_representation(Ctx& c, const UnitContext& ctx,
                                   std::mt19937_64& rng,
                                   bool naive_insertion = false);

}  // namespace fiax

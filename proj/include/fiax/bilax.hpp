#pragma once

#include <functional>
#include <memory>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "carrier.hpp"

namespace fiax {

// A coherence diagram failed to commute.
struct AxiomViolation : std::runtime_error {
  AxiomViolation(std::string diagram_, std::string witness_)
      : std::runtime_error("axiom violation [" + diagram_ + "]: " + witness_),
        diagram(std::move(diagram_)),
        witness(std::move(witness_)) {}
  std::string diagram, witness;
};

// A unitor evaluation admits no section / retraction.
struct NotSplit : std::runtime_error {
  explicit NotSplit(std::string which_)
      : std::runtime_error("not split: " + which_), which(std::move(which_)) {}
  std::string which;
};

// Unit structure at one object: carrier word U together with the two
// contraction families.  l(F): U∘F -> F for tgt(F) == obj,
// r(G): G∘U -> G for src(G) == obj.
struct LaxUnit {
  int obj = 0;
  OneMorphism U;
  std::function<TwoMorphism(const OneMorphism&)> l, r;
};

// Dual structure: dual-basis insertions.  lp(F): F -> U∘F, rp(G): G -> G∘U.
struct OplaxUnit {
  int obj = 0;
  OneMorphism U;
  std::function<TwoMorphism(const OneMorphism&)> lp, rp;
};

enum class UnitKind { bilax, completed };

// The chosen unit structures, one lax and (when the trace pairing is
// nondegenerate) one oplax per object.  A completed context carries weak
// units with invertible unitors instead; it is produced by the completion
// layer, which plugs its own evaluation functions into the same slots.
struct UnitContext {
  UnitKind kind = UnitKind::bilax;
  std::vector<LaxUnit> lax;
  std::vector<OplaxUnit> oplax;  // empty in a degenerate (lax-only) context
};

// Builds the unit structures on the generator words F(i,i): lax contraction
// by multiplying the unit factors through, oplax insertion of the dual-basis
// sum.  Throws DegenerateTraceForm when no dual basis exists, unless
// allow_degenerate is set (which yields a lax-only context).  Every unitor
// evaluation at a single generator is verified to be a bimodule map.  The
// returned closures hold a pointer to the context, which must outlive them.
UnitContext build_DA(Ctx& c, bool allow_degenerate = false);

const LaxUnit& find_lax(const UnitContext& uc, int obj);
const OplaxUnit& find_oplax(const UnitContext& uc, int obj);

// Dense unitor evaluations at explicit tensor-word carriers.  All four
// require sums of pure words (opaque atoms have no leg model and are
// rejected with std::logic_error).
TwoMorphism lax_left(Ctx& c, const OneMorphism& F, int obj);     // U∘F -> F
TwoMorphism lax_right(Ctx& c, const OneMorphism& G, int obj);    // G∘U -> G
TwoMorphism oplax_left(Ctx& c, const OneMorphism& F, int obj);   // F -> U∘F
TwoMorphism oplax_right(Ctx& c, const OneMorphism& G, int obj);  // G -> G∘U

// ---------------------------------------------------------------------------
// Staged pipelines.
//
// Large naturality laws factor as pipelines of steps whose sources and
// targets are huge tensor words that must never be materialized as dense
// matrices.  A step is either a whiskered small map, a unit contraction
// P∘U∘S -> P∘S, or a dual-basis insertion P∘S -> P∘U∘S.  Insertions carry
// the attachment side: left_attached inserts (m·a)⊗a★ at the junction (the
// left-unitor placement), otherwise a⊗(a★·m) (the right-unitor placement).
// ---------------------------------------------------------------------------

struct WhiskStep {
  Whisker w;
};
struct ContractStep {
  OneMorphism P, S;
  int obj = 0;
};
struct InsertStep {
  OneMorphism P, S;
  int obj = 0;
  bool left_attached = true;
};
using Step = std::variant<WhiskStep, ContractStep, InsertStep>;

OneMorphism step_src(Ctx& c, const Step& s);
OneMorphism step_tgt(Ctx& c, const Step& s);

struct ChainPlan;  // per-step prepared carriers (internal)

struct Chain {
  OneMorphism src, tgt;
  std::vector<Step> steps;  // applied in order, steps.front() first
  mutable std::shared_ptr<const ChainPlan> plan;
};

// Validates that consecutive step endpoints match and records the overall
// endpoints.  Contraction/insertion endpoints must be pure words.
Chain make_chain(Ctx& c, std::vector<Step> steps);
SVec apply_chain(Ctx& c, const Chain& ch, const SVec& v);
// Exact equality, column by column over the source basis.
bool chains_equal(Ctx& c, const Chain& a, const Chain& b);
// Dense materialization; the endpoints must be small.
TwoMorphism chain_matrix(Ctx& c, const Chain& ch);

// ---------------------------------------------------------------------------
// Axiom suite.
// ---------------------------------------------------------------------------

// Default test family for a unit at `obj`: every generator word with the
// matching endpoint plus, when an RNG is supplied, one random two-term
// direct sum.  incoming selects tgt == obj (arguments of l) versus
// src == obj (arguments of r).
std::vector<OneMorphism> unit_test_generators(Ctx& c, int obj, bool incoming,
                                              std::mt19937_64* rng);

// Verifies, exactly and over the default generator family:
//   middle compatibility   id_G · l_F  =  r_G · id_F
//   whisker absorption     l_{F∘H} = l_F · id_H   and   r_{K∘G} = id_K · r_G
//   naturality             l_H ∘ (id_U · α) = α ∘ l_F   (and the r dual)
//   double-unit coherence  l_F ∘ (id_U·l_F) = l_F ∘ (l_U·id_F) = l_F ∘ (r_U·id_F)
//   two-sided slide        l_F ∘ (id_U · r_F) = r_F ∘ (l_F · id_U')  [needs env]
// Throws AxiomViolation naming the diagram, with a witness column.
void check_lax_unit(Ctx& c, const LaxUnit& u, const UnitContext* env,
                    std::mt19937_64& rng);
// The dual checks for an oplax unit (insertions instead of contractions).
void check_oplax_unit(Ctx& c, const OplaxUnit& u, const UnitContext* env,
                      std::mt19937_64& rng);

// For every generator: a section of l_F and of r_G (split epi) and a
// retraction of l'_F and of r'_G (split mono), found by exact solve.
// Throws NotSplit naming the first failure; a lax-only context fails its
// oplax half by construction.
void check_split(Ctx& c, const UnitContext& uc, int obj, std::mt19937_64& rng);

// Unit structure on U∘U with the composite unitors; passes check_lax_unit.
LaxUnit compose_lax_units(Ctx& c, const UnitContext& uc, int obj);
OplaxUnit compose_oplax_units(Ctx& c, const UnitContext& uc, int obj);

// Compares the two unit-exchange composites U -> U'∘U -> U' (insert left,
// contract right) and U -> U∘U' -> U' (insert right, contract left), once
// with dense unitor matrices and once through the staged-pipeline evaluator
// (the mirror-assembled variant).  first_diff is the first source basis
// column where the dense composites disagree, or -1 when they agree.
struct Q28Result {
  bool main_equal = false;
  bool mirror_equal = false;
  long long first_diff = -1;
};
Q28Result check_compatibility_Q28(Ctx& c, const UnitContext& uc, int obj);

// Diagnostic name of a 1-morphism, e.g. "F(0,1)F(1,1) + F(0,1)".
std::string describe_om(const OneMorphism& f);

}  // namespace fiax

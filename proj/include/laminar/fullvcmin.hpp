#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "laminar/bitset.hpp"
#include "laminar/forest.hpp"
#include "laminar/setsystem.hpp"

namespace laminar {

/// Directed family Δ0 of formulas δ(x0; x1, y). Each member is a
/// ParametrizedFormula of object arity 1 whose parameter tuple is (x1, y);
/// x0 and x1 range over the same carrier.
struct PsiFamily {
    std::vector<ParametrizedFormula> delta0;
    std::size_t carrier_size = 0;
};

/// ψ_{δ,δ'}(a1; b, b'): every x0 with δ'(x0; a1, b') satisfies δ(x0; a1, b).
/// Full scan over the carrier.
bool eval_psi(const PsiFamily& family, Element a1, Element b, Element b_prime, std::size_t delta,
              std::size_t delta_prime);

/// Sign vector of one carrier element over (B × B) × Ψ.
/// Bit ((j·|B| + j')·|Δ0| + i)·|Δ0| + i' holds ψ_{δi,δi'}(a1; B[j], B[j']).
struct PsiType {
    BitSet bits;
    std::size_t params = 0;
    std::size_t formulas = 0;

    static std::size_t index(std::size_t j, std::size_t j_prime, std::size_t i, std::size_t i_prime,
                             std::size_t params, std::size_t formulas) {
        return ((j * params + j_prime) * formulas + i) * formulas + i_prime;
    }
    bool at(std::size_t j, std::size_t j_prime, std::size_t i, std::size_t i_prime) const {
        return bits.test(index(j, j_prime, i, i_prime, params, formulas));
    }
    friend bool operator==(const PsiType&, const PsiType&) = default;
};

PsiType psi_type(const PsiFamily& family, Element a1, std::span<const Element> params);

/// The instance parameters a1⌢B: tuples (a1, b) for b in B.
std::vector<Tuple> anchored_params(Element a1, std::span<const Element> params);

/// F(p, B, Δ0): nodes ⟨B[j], δi⟩ at index j·|Δ0| + i, ordered by ⊴_p.
/// Throws ValidationError naming the violated quasi-forest axiom.
QuasiForest forest_from_type(const PsiType& p);

/// V_{Δ0}(p, B): ν_0 followed by one entry ν_{p,b,δ} per quotient class.
VirtualTypeSpace p_virtual_space(const PsiType& p);

/// Realized Δ0-types of x0 over a1⌢B, in the layout of p_virtual_space.
std::vector<BitSet> realized_delta0_types(const PsiFamily& family, Element a1, std::span<const Element> params);

// ---------------------------------------------------------------------------
// Decomposition certificates

/// Boolean combination of Δ1 instances.
struct BoolExpr {
    enum class Kind { Const, Atom, Not, And, Or };
    Kind kind = Kind::Const;
    bool value = false;         // Const
    std::size_t formula = 0;    // Atom: index into delta1
    std::size_t param = 0;      // Atom: index into the certificate's params
    std::vector<BoolExpr> args; // Not, And, Or

    static BoolExpr constant(bool v) { return {Kind::Const, v, 0, 0, {}}; }
    static BoolExpr atom(std::size_t formula, std::size_t param) { return {Kind::Atom, false, formula, param, {}}; }
    static BoolExpr negate(BoolExpr e) { return {Kind::Not, false, 0, 0, {std::move(e)}}; }
    static BoolExpr all_of(std::vector<BoolExpr> es) { return {Kind::And, false, 0, 0, std::move(es)}; }
    static BoolExpr any_of(std::vector<BoolExpr> es) { return {Kind::Or, false, 0, 0, std::move(es)}; }

    /// `atoms` is a sign vector over params × delta1 (param-major).
    bool eval(const BitSet& atoms, std::size_t delta1_count) const;
};

/// Each ψ instance written as a boolean combination over a directed Δ1.
struct DecompositionCertificate {
    std::vector<ParametrizedFormula> delta1;  // δ1(x1; c), object arity 1
    std::vector<Tuple> params;                // instance parameters C
    std::vector<BoolExpr> psi;                // indexed like PsiType bits
};

/// Throws ValidationError with the first instance and carrier point where the
/// certificate disagrees with eval_psi.
void validate_certificate(const PsiFamily& family, std::span<const Element> params,
                          const DecompositionCertificate& certificate);

/// Ψ-type read off a Δ1-type through the certificate.
PsiType psi_from_delta1(const DecompositionCertificate& certificate, const BitSet& delta1_type,
                        std::size_t param_count, std::size_t delta0_count);

/// Dense linear order 0 < ... < n-1 with Δ0 = {x0 < x1, x0 < y} and
/// Δ1 = {x1 ≥ y, x1 > y} over C = B × B.
struct DloInstance {
    PsiFamily family;
    std::vector<Element> params;
    DecompositionCertificate certificate;
};

DloInstance dlo_instance(std::size_t carrier_size, std::vector<Element> params);

// ---------------------------------------------------------------------------
// Counting

struct IncrementalStep {
    std::size_t from = 0;  // type-tree node of p_i
    std::size_t to = 0;    // type-tree node of p_{i+1}
    std::size_t dist = 0;
    std::size_t new_entries = 0;  // |V(p_{i+1}, B) \ V(p_i, B)|
    bool ok() const noexcept { return new_entries <= dist; }
};

struct IncrementalReport {
    std::size_t param_count = 0;
    std::size_t delta0_count = 0;
    std::size_t delta1_count = 0;
    std::size_t delta1_params = 0;

    std::size_t realized_delta1_types = 0;
    std::size_t realized_psi_types = 0;
    std::vector<IncrementalStep> steps;

    std::size_t first_space = 0;        // |V(p_0, B)|
    std::size_t first_space_bound = 0;  // |B||Δ0| + 1
    std::size_t sum_dist = 0;
    std::size_t sum_dist_bound = 0;     // 2|C||Δ1|
    std::size_t union_size = 0;         // |⋃ V(p, B)|
    std::size_t aggregate_bound = 0;    // 2|C||Δ1| + |B||Δ0| + 1
    std::size_t realized_pair_types = 0;
    bool realized_contained = false;    // realized Δ0-types of (x0, x1) ⊆ ⋃ V(p, B)

    bool steps_ok() const;
    bool ok() const;
};

/// Orders the realized Δ1-types by the convex order of the Δ1 forest and
/// checks the per-step and aggregate virtual-type counts. Throws
/// ValidationError if the certificate does not validate.
IncrementalReport incremental_count_check(const PsiFamily& family, std::span<const Element> params,
                                          const DecompositionCertificate& certificate);

struct DeterminationReport {
    std::size_t elements = 0;    // carrier elements a1 examined
    std::size_t psi_types = 0;   // distinct Ψ-types among them
    std::size_t failures = 0;
    std::optional<Element> witness;
    bool ok() const noexcept { return failures == 0; }
};

/// For every a1: build_forest(a1⌢B, Δ0) equals forest_from_type(psi_type(a1)),
/// so elements of equal Ψ-type have identical forests.
DeterminationReport check_forest_determination(const PsiFamily& family, std::span<const Element> params);

/// For every a1: each realized Δ0-type over a1⌢B is an entry of
/// p_virtual_space(psi_type(a1)).
DeterminationReport check_type_determination(const PsiFamily& family, std::span<const Element> params);

} // namespace laminar

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "laminar/bitset.hpp"
#include "laminar/forest.hpp"
#include "laminar/setsystem.hpp"

namespace laminar {

/// Rooted tree given by a parent array (-1 marks the root). The carrier is the
/// set of leaves, numbered by increasing node id; ball(v) is the set of leaves
/// below v.
class UltrametricModel {
  public:
    explicit UltrametricModel(std::vector<std::int64_t> parent);

    const std::vector<std::int64_t>& parent() const noexcept { return parent_; }
    std::size_t node_count() const noexcept { return parent_.size(); }
    std::size_t leaf_count() const noexcept { return leaf_node_.size(); }
    std::size_t root() const noexcept { return root_; }

    std::size_t leaf_node(Element x) const { return leaf_node_[x]; }
    const std::vector<std::size_t>& children(std::size_t v) const { return children_[v]; }
    std::size_t depth(std::size_t v) const { return depth_[v]; }
    const BitSet& ball(std::size_t v) const { return balls_[v]; }
    bool contains(std::size_t v, Element x) const { return balls_[v].test(x); }

    /// Ancestor of leaf x exactly k levels up, clamped at the root.
    std::size_t ancestor(Element x, std::size_t k) const;
    /// Lowest common ancestor of two leaves.
    std::size_t lca(Element a, Element b) const;

    friend bool operator==(const UltrametricModel& a, const UltrametricModel& b) { return a.parent_ == b.parent_; }

  private:
    std::vector<std::int64_t> parent_;
    std::size_t root_ = 0;
    std::vector<std::vector<std::size_t>> children_;
    std::vector<std::size_t> depth_;
    std::vector<std::size_t> leaf_node_;
    std::vector<BitSet> balls_;
};

/// Random tree with exactly leaf_count leaves and every internal node having
/// between 2 and max_branching children. Node ids follow a preorder walk, so
/// balls are intervals of the carrier.
UltrametricModel random_ultrametric(std::size_t leaf_count, std::size_t max_branching, std::uint64_t seed);

/// {ball(v)} indexed by node id.
DirectedFamily ball_family(const UltrametricModel& model);

/// Carrier 0 < 1 < ... < n-1.
struct OrderModel {
    std::size_t size = 0;
    friend bool operator==(const OrderModel&, const OrderModel&) = default;
};

/// Proper nonempty initial segments {x : x < c}, c = 1..n-1, optionally
/// preceded by the empty segment.
DirectedFamily order_family(const OrderModel& model, bool include_empty = false);

// ---------------------------------------------------------------------------
// Formula corpus

/// A formula each of whose instances is a union of at most max_components
/// balls of the model. For mixed formulas `certified` is the positive part
/// the certificate describes; otherwise it is `formula` itself.
struct UBallFormula {
    ParametrizedFormula formula;
    ParametrizedFormula certified;
    std::size_t max_components = 1;
    std::function<std::vector<std::size_t>(std::span<const Element> params)> certificate;
};

/// Corpus kinds: "lca-ball", "twin-ball-k" (levels 0..2), "twin-ball-<k>",
/// "boolean-mix". All are φ(x; y0, y1) over leaf pairs.
std::vector<UBallFormula> builtin_formulas(std::shared_ptr<const UltrametricModel> model, std::string_view kind);

/// φ(x; y) := x ∈ ball_k(y), the ball k levels above leaf y.
ParametrizedFormula level_ball_formula(std::shared_ptr<const UltrametricModel> model, std::size_t k);

/// φ(x; v) := x ∈ ball(v), v ranging over tree nodes.
ParametrizedFormula single_ball_formula(std::shared_ptr<const UltrametricModel> model);

/// φ(x0, x1; y) := x0 = y ∨ x1 = y over a carrier of the given size.
ParametrizedFormula equality_witness_formula(std::size_t carrier_size);

/// Swaps object and parameter roles: φ*(y; x) := φ(x; y). Needs object
/// arity 1 and parameters ranging over a carrier of carrier_size elements.
ParametrizedFormula swap_roles(const ParametrizedFormula& formula, std::size_t carrier_size);

// ---------------------------------------------------------------------------
// Model files

/// Explicit set system; its designated family is the list of sets itself.
struct FamilyModel {
    SetFamily family;
    friend bool operator==(const FamilyModel&, const FamilyModel&) = default;
};

using Model = std::variant<OrderModel, UltrametricModel, FamilyModel>;

struct ModelFile {
    Model model;
    std::uint64_t seed = 0;
    friend bool operator==(const ModelFile&, const ModelFile&) = default;
};

ModelFile parse_model(std::string_view text);
std::string dump_model(const ModelFile& file);
ModelFile load_model(const std::filesystem::path& path);
void save_model(const ModelFile& file, const std::filesystem::path& path);

/// Size of the model's carrier.
std::size_t carrier_size(const Model& model);

/// The family check-directed validates: balls, initial segments, or the
/// explicit sets.
SetFamily designated_family(const Model& model);

} // namespace laminar

#pragma once

// Runtime distinguishability of variants: explicit tags and decision trees
// over the per-variant bit patterns of a layout.

#include <cstdint>
#include <optional>
#include <vector>

#include "adtlayout/layout.hpp"

namespace adtlayout {

/// [variant][scalar] patterns; every variant has the same scalar widths.
using VariantPatterns = std::vector<std::vector<BitPattern>>;

/// True iff the unassigned bits can be fixed so that every pair of variants
/// differs at some bit that is constant in both.
bool check_distinguishable(const VariantPatterns& patterns);

/// Fixes unassigned bits (recording them in `patterns`) and builds a tree
/// that classifies every variant. Returns nullopt iff not distinguishable.
std::optional<DecisionTree> derive_decision_tree(VariantPatterns& patterns);

/// Variant index of an encoded value.
int classify(const DecisionTree& tree, const std::vector<std::uint64_t>& scalars);

/// Lowest slot and offset where ceil(log2 n) bits are unassigned in every
/// variant and fit the slot's kinds, or nullopt.
struct TagSite {
  int scalar = 0;
  int offset = 0;
};
std::optional<TagSite> find_tag_site(const LayoutSolution& sol, const Target& target, int scalar);

/// Writes tag value i of variant i into an interval shared by all variants,
/// or appends a dedicated tag scalar when no slot has room.
LayoutSolution place_explicit_tag(LayoutSolution sol, const Target& target);

/// Appends a dedicated tag scalar of ceil(log2 n) bits holding tag i for variant i.
LayoutSolution append_tag_scalar(LayoutSolution sol, const Target& target);

int tag_width(int num_variants);  // ceil(log2 n), at least 1 for n >= 2

}  // namespace adtlayout

#pragma once

// Layout solutions: how each variant of an unboxed ADT maps onto scalars.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "adtlayout/flatten.hpp"
#include "adtlayout/mono.hpp"
#include "adtlayout/target.hpp"

namespace adtlayout {

/// How a normalized field is stored.
///   Int, Float - plain bits of the value
///   Ref        - a reference; under ref tagging it sits above the free low bits
///   Nested     - one scalar of a nested unboxed ADT, copied verbatim
///   NestedRef  - a nested scalar that may hold a reference; occupies a whole slot
enum class FieldClass : std::uint8_t { Int, Float, Ref, Nested, NestedRef };

std::string_view field_class_name(FieldClass c);

struct NormField {
  std::string name;    // "val", or "inner#1" for the second scalar of a nested ADT
  std::string source;  // declared field name
  int sub = 0;         // scalar index inside a nested ADT
  FieldClass cls = FieldClass::Int;
  ConcreteType type;   // scalar type; the nested ADT type for Nested/NestedRef
  int width = 0;
  KindSet kinds;

  bool holds_ref() const { return cls == FieldClass::Ref || cls == FieldClass::NestedRef; }
};

struct FieldPlacement {
  int scalar = 0;
  Interval interval;
};

struct ScalarSlot {
  ScalarKind kind = ScalarKind::B64;
  int width = 0;              // logical width: the IntRep backing width
  KindSet kinds;              // every kind that could hold this slot
  bool tag_only = false;      // dedicated tag scalar
  std::vector<bool> ref_in;   // per variant: holds a reference in that variant

  bool any_ref() const;
};

struct VariantLayout {
  std::string name;
  std::vector<NormField> fields;
  std::vector<FieldPlacement> placements;  // parallel to fields
  std::vector<BitPattern> patterns;        // one per scalar, width = scalar width

  int field_index(const std::string& name) const;  // -1 if absent
};

enum class TagSchemeKind : std::uint8_t { ExplicitTag, DecisionTree, BareTagOnly, SingleVariant };

std::string_view tag_scheme_name(TagSchemeKind k);

struct TagScheme {
  TagSchemeKind kind = TagSchemeKind::SingleVariant;
  int scalar = -1;    // ExplicitTag and BareTagOnly
  Interval interval;  // ExplicitTag and BareTagOnly
};

/// Classifier over single bits of the packed scalars.
struct DecisionTree {
  struct Node {
    int variant = -1;  // >= 0 for a leaf
    int scalar = 0;
    int bit = 0;
    int zero = -1;
    int one = -1;

    bool leaf() const { return variant >= 0; }
  };
  std::vector<Node> nodes;  // nodes[0] is the root

  int depth() const;
};

struct Score {
  int num_scalars = 0;
  int access_cost = 0;
  int explicit_tag_cost = 0;

  int total_cost() const { return access_cost + explicit_tag_cost; }
  friend bool operator==(const Score&, const Score&) = default;
  friend bool operator<(const Score& a, const Score& b) {
    if (a.num_scalars != b.num_scalars) return a.num_scalars < b.num_scalars;
    return a.total_cost() < b.total_cost();
  }
  friend bool operator<=(const Score& a, const Score& b) { return !(b < a); }
  std::string str() const;
};

struct LayoutSolution {
  std::string adt;
  std::vector<ScalarSlot> scalars;
  std::vector<VariantLayout> variants;
  TagScheme tag;
  std::optional<DecisionTree> tree;  // present whenever there are two or more variants
  Score score;
  int steps = 0;

  /// Per-variant scalar patterns, [variant][scalar].
  std::vector<std::vector<BitPattern>> patterns() const;
};

/// 0 when the interval is the whole scalar, 1 when it starts at bit 0 and
/// needs a mask, 2 when it needs a shift and a mask.
int access_cost(Interval iv, int scalar_width);

/// Lexicographic score: scalars first, then field and tag access costs plus
/// one unit for a dedicated tag scalar. A decision tree costs two units per
/// level of a balanced tree over the variants.
Score score_layout(const LayoutSolution& sol);

}  // namespace adtlayout

#include "adtlayout/layout.hpp"

#include <algorithm>
#include <functional>

#include "adtlayout/distinguish.hpp"

namespace adtlayout {

std::string_view field_class_name(FieldClass c) {
  switch (c) {
    case FieldClass::Int: return "int";
    case FieldClass::Float: return "float";
    case FieldClass::Ref: return "ref";
    case FieldClass::Nested: return "nested";
    case FieldClass::NestedRef: return "nested-ref";
  }
  return "?";
}

std::string_view tag_scheme_name(TagSchemeKind k) {
  switch (k) {
    case TagSchemeKind::ExplicitTag: return "explicit";
    case TagSchemeKind::DecisionTree: return "decision-tree";
    case TagSchemeKind::BareTagOnly: return "bare-tag";
    case TagSchemeKind::SingleVariant: return "single-variant";
  }
  return "?";
}

bool ScalarSlot::any_ref() const { return std::find(ref_in.begin(), ref_in.end(), true) != ref_in.end(); }

int VariantLayout::field_index(const std::string& n) const {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (fields[i].name == n) return static_cast<int>(i);
  }
  return -1;
}

int DecisionTree::depth() const {
  if (nodes.empty()) return 0;
  std::function<int(int)> go = [&](int i) -> int {
    const Node& n = nodes[static_cast<std::size_t>(i)];
    if (n.leaf()) return 0;
    return 1 + std::max(go(n.zero), go(n.one));
  };
  return go(0);
}

std::string Score::str() const {
  return "(" + std::to_string(num_scalars) + ", " + std::to_string(access_cost) + ", " +
         std::to_string(explicit_tag_cost) + ")";
}

std::vector<std::vector<BitPattern>> LayoutSolution::patterns() const {
  std::vector<std::vector<BitPattern>> out;
  for (const auto& v : variants) out.push_back(v.patterns);
  return out;
}

int access_cost(Interval iv, int scalar_width) {
  if (iv.offset != 0) return 2;
  return iv.width == scalar_width ? 0 : 1;
}

Score score_layout(const LayoutSolution& sol) {
  Score s;
  s.num_scalars = static_cast<int>(sol.scalars.size());
  for (const auto& v : sol.variants) {
    for (std::size_t i = 0; i < v.fields.size(); ++i) {
      const FieldPlacement& p = v.placements[i];
      const int w = sol.scalars[static_cast<std::size_t>(p.scalar)].width;
      // a tagged reference is read with a single mask of its low bits
      s.access_cost += v.fields[i].cls == FieldClass::Ref && p.interval.offset > 0
                           ? 1
                           : access_cost(p.interval, w);
    }
  }
  switch (sol.tag.kind) {
    case TagSchemeKind::ExplicitTag: {
      const auto& slot = sol.scalars[static_cast<std::size_t>(sol.tag.scalar)];
      s.access_cost += access_cost(sol.tag.interval, slot.width);
      if (slot.tag_only) s.explicit_tag_cost = 1;
      break;
    }
    case TagSchemeKind::DecisionTree:
      s.access_cost += 2 * tag_width(static_cast<int>(sol.variants.size()));
      break;
    case TagSchemeKind::BareTagOnly:
    case TagSchemeKind::SingleVariant:
      break;
  }
  return s;
}

}  // namespace adtlayout

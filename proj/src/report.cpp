#include "adtlayout/report.hpp"

#include <sstream>

namespace adtlayout {

using nlohmann::ordered_json;

namespace {

ordered_json score_json(const Score& s) {
  return {{"scalars", s.num_scalars}, {"access", s.access_cost}, {"explicit_tag", s.explicit_tag_cost}};
}

ordered_json tree_json(const LayoutSolution& sol, int i) {
  const auto& n = sol.tree->nodes.at(static_cast<std::size_t>(i));
  if (n.leaf()) return {{"variant", sol.variants.at(static_cast<std::size_t>(n.variant)).name}};
  return {{"scalar", n.scalar}, {"bit", n.bit}, {"zero", tree_json(sol, n.zero)}, {"one", tree_json(sol, n.one)}};
}

std::string scalar_label(const ScalarSlot& s) {
  return (s.tag_only ? std::string("tag") : std::string(kind_name(s.kind))) + ":" + std::to_string(s.width);
}

std::string interval_str(int scalar, Interval iv) {
  return "s" + std::to_string(scalar) + "[" + std::to_string(iv.offset) + ", " + std::to_string(iv.end()) + ")";
}

std::string tree_text(const LayoutSolution& sol, int i) {
  const auto& n = sol.tree->nodes.at(static_cast<std::size_t>(i));
  if (n.leaf()) return sol.variants.at(static_cast<std::size_t>(n.variant)).name;
  return "s" + std::to_string(n.scalar) + "." + std::to_string(n.bit) + " ? " + tree_text(sol, n.one) + " : " +
         tree_text(sol, n.zero);
}

}  // namespace

ordered_json adt_report_json(const Compilation& comp, const std::string& adt) {
  const CompiledAdt& c = comp.at(adt);
  ordered_json j;
  j["adt"] = adt;
  j["boxed"] = !c.eligibility.unboxed;
  j["reason"] = std::string(box_reason_name(c.eligibility.reason));
  j["tag_only"] = c.eligibility.tag_only;
  if (!c.layout) {
    j["layout"] = nullptr;
    return j;
  }
  const LayoutSolution& sol = *c.layout;
  ordered_json layout;
  ordered_json scalars = ordered_json::array();
  for (const auto& s : sol.scalars) {
    ordered_json kinds = ordered_json::array();
    for (auto k : s.kinds.kinds()) kinds.push_back(std::string(kind_name(k)));
    scalars.push_back({{"kind", std::string(kind_name(s.kind))}, {"width", s.width}, {"kinds", kinds},
                       {"tag_only", s.tag_only}});
  }
  layout["scalars"] = scalars;
  ordered_json variants = ordered_json::array();
  for (const auto& v : sol.variants) {
    ordered_json patterns = ordered_json::array();
    for (const auto& p : v.patterns) patterns.push_back(p.str());
    ordered_json fields = ordered_json::array();
    for (std::size_t i = 0; i < v.fields.size(); ++i) {
      const auto& pl = v.placements[i];
      fields.push_back({{"name", v.fields[i].name},
                        {"scalar", pl.scalar},
                        {"offset", pl.interval.offset},
                        {"width", pl.interval.width},
                        {"class", std::string(field_class_name(v.fields[i].cls))}});
    }
    variants.push_back({{"name", v.name}, {"patterns", patterns}, {"fields", fields}});
  }
  layout["variants"] = variants;
  ordered_json tag{{"scheme", std::string(tag_scheme_name(sol.tag.kind))}};
  if (sol.tag.kind == TagSchemeKind::ExplicitTag || sol.tag.kind == TagSchemeKind::BareTagOnly) {
    tag["scalar"] = sol.tag.scalar;
    tag["offset"] = sol.tag.interval.offset;
    tag["width"] = sol.tag.interval.width;
  }
  layout["tag"] = tag;
  layout["tree"] = sol.tree ? tree_json(sol, 0) : ordered_json(nullptr);
  layout["score"] = score_json(sol.score);
  layout["trivial_score"] = c.trivial_score ? score_json(*c.trivial_score) : ordered_json(nullptr);
  layout["steps"] = sol.steps;
  j["layout"] = layout;
  return j;
}

ordered_json report_json(const Compilation& comp) {
  ordered_json j;
  j["v"] = 1;
  j["target"] = comp.target.name;
  ordered_json adts = ordered_json::array();
  for (const auto& name : comp.report_order()) adts.push_back(adt_report_json(comp, name));
  j["adts"] = adts;
  return j;
}

std::string report_text(const Compilation& comp) {
  std::ostringstream out;
  out << "target: " << comp.target.name << "\n";
  for (const auto& name : comp.report_order()) {
    const CompiledAdt& c = comp.at(name);
    out << "\n" << name << "\n";
    if (!c.layout) {
      out << "  boxed: " << box_reason_name(c.eligibility.reason) << "\n";
      continue;
    }
    const LayoutSolution& sol = *c.layout;
    out << "  boxed: no\n  scalars: [";
    for (std::size_t s = 0; s < sol.scalars.size(); ++s) out << (s ? ", " : "") << scalar_label(sol.scalars[s]);
    out << "]\n";
    switch (sol.tag.kind) {
      case TagSchemeKind::ExplicitTag:
      case TagSchemeKind::BareTagOnly:
        out << "  tag: " << tag_scheme_name(sol.tag.kind) << " " << interval_str(sol.tag.scalar, sol.tag.interval)
            << "\n";
        break;
      case TagSchemeKind::DecisionTree: out << "  tag: tree " << tree_text(sol, 0) << "\n"; break;
      case TagSchemeKind::SingleVariant: out << "  tag: none\n"; break;
    }
    std::size_t w = 0;
    for (const auto& v : sol.variants) w = std::max(w, v.name.size());
    for (const auto& v : sol.variants) {
      out << "  " << v.name << std::string(w - v.name.size(), ' ');
      for (const auto& p : v.patterns) out << "  " << p.str();
      for (std::size_t i = 0; i < v.fields.size(); ++i) {
        out << (i ? ", " : "  ") << v.fields[i].name << " " << interval_str(v.placements[i].scalar, v.placements[i].interval);
      }
      out << "\n";
    }
    out << "  score: " << sol.score.str();
    if (c.trivial_score) out << "  trivial: " << c.trivial_score->str();
    out << "  steps: " << sol.steps << "\n";
  }
  return out.str();
}

}  // namespace adtlayout

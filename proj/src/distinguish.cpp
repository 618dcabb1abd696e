#include "adtlayout/distinguish.hpp"

#include <algorithm>
#include <map>

namespace adtlayout {

int tag_width(int n) {
  int w = 0;
  while ((1 << w) < n) ++w;
  return std::max(w, 1);
}

namespace {

struct Pos {
  int scalar;
  int bit;
};

bool is_const(PatBit b) { return b == PatBit::Zero || b == PatBit::One; }

/// Column-major view of the patterns: cell(v, p) is variant v at position p.
class Grid {
 public:
  explicit Grid(const VariantPatterns& pats) : nvar_(static_cast<int>(pats.size())) {
    if (pats.empty()) return;
    for (std::size_t s = 0; s < pats[0].size(); ++s) {
      for (int b = 0; b < pats[0][s].width(); ++b) pos_.push_back({static_cast<int>(s), b});
    }
    cells_.resize(pos_.size() * static_cast<std::size_t>(nvar_));
    for (std::size_t p = 0; p < pos_.size(); ++p) {
      for (int v = 0; v < nvar_; ++v) {
        cell(v, static_cast<int>(p)) = pats[static_cast<std::size_t>(v)]
                                           [static_cast<std::size_t>(pos_[p].scalar)][pos_[p].bit];
      }
    }
  }

  int variants() const { return nvar_; }
  int positions() const { return static_cast<int>(pos_.size()); }
  Pos pos(int p) const { return pos_[static_cast<std::size_t>(p)]; }
  PatBit& cell(int v, int p) { return cells_[static_cast<std::size_t>(p * nvar_ + v)]; }
  PatBit cell(int v, int p) const { return cells_[static_cast<std::size_t>(p * nvar_ + v)]; }

  bool separated(int a, int b) const {
    for (int p = 0; p < positions(); ++p) {
      PatBit x = cell(a, p), y = cell(b, p);
      if (is_const(x) && is_const(y) && x != y) return true;
    }
    return false;
  }

  std::vector<PatBit> column(int p) const {
    return {cells_.begin() + p * nvar_, cells_.begin() + (p + 1) * nvar_};
  }

 private:
  int nvar_;
  std::vector<Pos> pos_;
  std::vector<PatBit> cells_;
};

/// Backtracking over unseparated pairs: each step separates one pair by
/// fixing unassigned bits at one position.
bool solve_pairs(Grid& g) {
  int best_a = -1, best_b = -1;
  std::vector<int> best_cands;
  for (int a = 0; a < g.variants(); ++a) {
    for (int b = a + 1; b < g.variants(); ++b) {
      if (g.separated(a, b)) continue;
      std::vector<int> cands;
      std::vector<std::vector<PatBit>> seen;
      for (int p = 0; p < g.positions(); ++p) {
        PatBit x = g.cell(a, p), y = g.cell(b, p);
        if (x == PatBit::Assigned || y == PatBit::Assigned) continue;
        if (is_const(x) && is_const(y)) continue;  // equal constants
        auto col = g.column(p);
        if (std::find(seen.begin(), seen.end(), col) != seen.end()) continue;
        seen.push_back(std::move(col));
        cands.push_back(p);
      }
      if (cands.empty()) return false;
      if (best_a < 0 || cands.size() < best_cands.size()) {
        best_a = a;
        best_b = b;
        best_cands = std::move(cands);
      }
    }
  }
  if (best_a < 0) return true;
  for (int p : best_cands) {
    PatBit x = g.cell(best_a, p), y = g.cell(best_b, p);
    std::vector<std::pair<PatBit, PatBit>> options;
    if (x == PatBit::Unassigned && y == PatBit::Unassigned) {
      options = {{PatBit::Zero, PatBit::One}, {PatBit::One, PatBit::Zero}};
    } else if (x == PatBit::Unassigned) {
      options = {{y == PatBit::Zero ? PatBit::One : PatBit::Zero, y}};
    } else {
      options = {{x, x == PatBit::Zero ? PatBit::One : PatBit::Zero}};
    }
    for (auto [nx, ny] : options) {
      g.cell(best_a, p) = nx;
      g.cell(best_b, p) = ny;
      if (solve_pairs(g)) return true;
      g.cell(best_a, p) = x;
      g.cell(best_b, p) = y;
    }
  }
  return false;
}

int build_tree(const Grid& g, const std::vector<int>& set, std::vector<bool>& used, DecisionTree& tree) {
  int index = static_cast<int>(tree.nodes.size());
  tree.nodes.emplace_back();
  if (set.size() == 1) {
    tree.nodes[static_cast<std::size_t>(index)].variant = set[0];
    return index;
  }
  int best = -1;
  std::pair<std::size_t, std::size_t> best_size;
  std::vector<int> best_zero, best_one;
  for (int p = 0; p < g.positions(); ++p) {
    if (used[static_cast<std::size_t>(p)]) continue;
    std::vector<int> zero, one;
    bool has0 = false, has1 = false;
    for (int v : set) {
      PatBit c = g.cell(v, p);
      if (c != PatBit::One) zero.push_back(v);
      if (c != PatBit::Zero) one.push_back(v);
      has0 |= c == PatBit::Zero;
      has1 |= c == PatBit::One;
    }
    if (!has0 || !has1) continue;
    std::pair<std::size_t, std::size_t> size{std::max(zero.size(), one.size()), zero.size() + one.size()};
    if (best < 0 || size < best_size) {
      best = p;
      best_size = size;
      best_zero = std::move(zero);
      best_one = std::move(one);
    }
  }
  if (best < 0) throw Error(ErrorCode::Internal, "decision tree construction reached an inseparable set");
  used[static_cast<std::size_t>(best)] = true;
  int z = build_tree(g, best_zero, used, tree);
  int o = build_tree(g, best_one, used, tree);
  used[static_cast<std::size_t>(best)] = false;
  auto& node = tree.nodes[static_cast<std::size_t>(index)];
  node.scalar = g.pos(best).scalar;
  node.bit = g.pos(best).bit;
  node.zero = z;
  node.one = o;
  return index;
}

void check_shape(const VariantPatterns& pats) {
  for (const auto& v : pats) {
    if (v.size() != pats[0].size()) throw Error(ErrorCode::Internal, "variant patterns differ in scalar count");
    for (std::size_t s = 0; s < v.size(); ++s) {
      if (v[s].width() != pats[0][s].width()) {
        throw Error(ErrorCode::Internal, "variant patterns differ in scalar width");
      }
    }
  }
}

}  // namespace

bool check_distinguishable(const VariantPatterns& patterns) {
  if (patterns.size() <= 1) return true;
  check_shape(patterns);
  Grid g(patterns);
  return solve_pairs(g);
}

std::optional<DecisionTree> derive_decision_tree(VariantPatterns& patterns) {
  DecisionTree tree;
  if (patterns.empty()) return std::nullopt;
  if (patterns.size() == 1) {
    tree.nodes.push_back({0, 0, 0, -1, -1});
    return tree;
  }
  check_shape(patterns);
  Grid g(patterns);
  if (!solve_pairs(g)) return std::nullopt;
  for (int p = 0; p < g.positions(); ++p) {
    for (int v = 0; v < g.variants(); ++v) {
      patterns[static_cast<std::size_t>(v)][static_cast<std::size_t>(g.pos(p).scalar)][g.pos(p).bit] =
          g.cell(v, p);
    }
  }
  std::vector<int> all(patterns.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
  std::vector<bool> used(static_cast<std::size_t>(g.positions()), false);
  build_tree(g, all, used, tree);
  return tree;
}

int classify(const DecisionTree& tree, const std::vector<std::uint64_t>& scalars) {
  int i = 0;
  while (true) {
    const auto& n = tree.nodes.at(static_cast<std::size_t>(i));
    if (n.leaf()) return n.variant;
    std::uint64_t bit = (scalars.at(static_cast<std::size_t>(n.scalar)) >> n.bit) & 1u;
    i = bit ? n.one : n.zero;
  }
}

std::optional<TagSite> find_tag_site(const LayoutSolution& sol, const Target& target, int scalar) {
  const int t = tag_width(static_cast<int>(sol.variants.size()));
  const ScalarSlot& slot = sol.scalars[static_cast<std::size_t>(scalar)];
  const int cap = target.capacity(slot.kinds);
  for (int off = 0; off + t <= cap; ++off) {
    bool free = true;
    for (const auto& v : sol.variants) {
      const BitPattern& p = v.patterns[static_cast<std::size_t>(scalar)];
      for (int b = off; b < off + t && free; ++b) {
        if (b < p.width() && p[b] != PatBit::Unassigned) free = false;
      }
      if (!free) break;
    }
    if (free && target.choose_kind(slot.kinds, std::max(slot.width, off + t))) return TagSite{scalar, off};
  }
  return std::nullopt;
}

namespace {

void write_tag(LayoutSolution& sol, int scalar, int offset, int t) {
  for (std::size_t i = 0; i < sol.variants.size(); ++i) {
    BitPattern& p = sol.variants[i].patterns[static_cast<std::size_t>(scalar)];
    for (int b = 0; b < t; ++b) p[offset + b] = ((i >> b) & 1u) ? PatBit::One : PatBit::Zero;
  }
  sol.tag = {TagSchemeKind::ExplicitTag, scalar, {offset, t}};
}

void grow(LayoutSolution& sol, const Target& target, int scalar, int width) {
  ScalarSlot& slot = sol.scalars[static_cast<std::size_t>(scalar)];
  if (width <= slot.width) return;
  slot.width = width;
  slot.kind = *target.choose_kind(slot.kinds, width);
  for (auto& v : sol.variants) v.patterns[static_cast<std::size_t>(scalar)].resize(width, PatBit::Unassigned);
}

}  // namespace

LayoutSolution append_tag_scalar(LayoutSolution sol, const Target& target) {
  const int t = tag_width(static_cast<int>(sol.variants.size()));
  ScalarSlot slot;
  slot.kinds = target.kinds_for(TypeClass::Int32);
  slot.width = t;
  slot.kind = *target.choose_kind(slot.kinds, t);
  slot.tag_only = true;
  slot.ref_in.assign(sol.variants.size(), false);
  sol.scalars.push_back(slot);
  for (auto& v : sol.variants) v.patterns.emplace_back(t, PatBit::Unassigned);
  write_tag(sol, static_cast<int>(sol.scalars.size()) - 1, 0, t);
  sol.score = score_layout(sol);
  VariantPatterns pats = sol.patterns();
  sol.tree = derive_decision_tree(pats);
  for (std::size_t v = 0; v < pats.size(); ++v) sol.variants[v].patterns = pats[v];
  return sol;
}

LayoutSolution place_explicit_tag(LayoutSolution sol, const Target& target) {
  const int n = static_cast<int>(sol.variants.size());
  if (n <= 1) {
    sol.tag = {TagSchemeKind::SingleVariant, -1, {}};
    return sol;
  }
  const int t = tag_width(n);
  std::optional<LayoutSolution> best;
  for (int s = 0; s < static_cast<int>(sol.scalars.size()); ++s) {
    auto site = find_tag_site(sol, target, s);
    if (!site) continue;
    LayoutSolution cand = sol;
    grow(cand, target, s, site->offset + t);
    write_tag(cand, s, site->offset, t);
    cand.score = score_layout(cand);
    if (!best || cand.score < best->score) best = std::move(cand);
  }
  if (!best) best = append_tag_scalar(std::move(sol), target);
  VariantPatterns pats = best->patterns();
  best->tree = derive_decision_tree(pats);
  for (std::size_t v = 0; v < pats.size(); ++v) best->variants[v].patterns = pats[v];
  return *best;
}

}  // namespace adtlayout

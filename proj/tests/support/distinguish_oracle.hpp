#pragma once

// Brute-force reference for variant distinguishability: tries every
// assignment of the unassigned cells.

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "adtlayout/distinguish.hpp"
#include "adtlayout/flatten.hpp"

namespace adtlayout::oracle {

/// rows[v] is variant v's bits over all scalars, concatenated.
inline bool brute_distinguishable(const std::vector<std::vector<PatBit>>& rows) {
  std::vector<std::pair<std::size_t, std::size_t>> free;
  for (std::size_t v = 0; v < rows.size(); ++v) {
    for (std::size_t b = 0; b < rows[v].size(); ++b) {
      if (rows[v][b] == PatBit::Unassigned) free.push_back({v, b});
    }
  }
  for (std::uint64_t a = 0; a < (std::uint64_t{1} << free.size()); ++a) {
    auto r = rows;
    for (std::size_t i = 0; i < free.size(); ++i) {
      r[free[i].first][free[i].second] = ((a >> i) & 1) ? PatBit::One : PatBit::Zero;
    }
    bool ok = true;
    for (std::size_t x = 0; x < r.size() && ok; ++x) {
      for (std::size_t y = x + 1; y < r.size() && ok; ++y) {
        bool differ = false;
        for (std::size_t b = 0; b < r[x].size(); ++b) {
          PatBit p = r[x][b], q = r[y][b];
          if (p != PatBit::Assigned && q != PatBit::Assigned && p != q) differ = true;
        }
        ok = differ;
      }
    }
    if (ok) return true;
  }
  return false;
}

inline std::vector<std::vector<PatBit>> rows_of(const VariantPatterns& p) {
  std::vector<std::vector<PatBit>> out;
  for (const auto& v : p) {
    std::vector<PatBit> row;
    for (const auto& s : v) {
      for (int b = 0; b < s.width(); ++b) row.push_back(s[b]);
    }
    out.push_back(row);
  }
  return out;
}

/// Every value the patterns admit for one variant, unassigned bits left 0.
inline std::vector<std::vector<std::uint64_t>> instances_of(const std::vector<BitPattern>& v) {
  std::vector<std::pair<int, int>> assigned;
  std::vector<std::uint64_t> base(v.size(), 0);
  for (std::size_t s = 0; s < v.size(); ++s) {
    for (int b = 0; b < v[s].width(); ++b) {
      if (v[s][b] == PatBit::One) base[s] |= std::uint64_t{1} << b;
      if (v[s][b] == PatBit::Assigned) assigned.push_back({static_cast<int>(s), b});
    }
  }
  std::vector<std::vector<std::uint64_t>> out;
  for (std::uint64_t a = 0; a < (std::uint64_t{1} << assigned.size()); ++a) {
    auto x = base;
    for (std::size_t i = 0; i < assigned.size(); ++i) {
      if ((a >> i) & 1) x[static_cast<std::size_t>(assigned[i].first)] |= std::uint64_t{1} << assigned[i].second;
    }
    out.push_back(x);
  }
  return out;
}

inline bool paths_test_once(const DecisionTree& t, int node, std::set<std::pair<int, int>>& seen) {
  const auto& n = t.nodes[static_cast<std::size_t>(node)];
  if (n.leaf()) return true;
  if (!seen.insert({n.scalar, n.bit}).second) return false;
  bool ok = paths_test_once(t, n.zero, seen) && paths_test_once(t, n.one, seen);
  seen.erase({n.scalar, n.bit});
  return ok;
}

/// Every pattern set of 2 or 3 variants over at most 6 cells, split into one or
/// two scalars. Checks check_distinguishable and derive_decision_tree against
/// brute_distinguishable, and that each derived tree tests a bit at most once
/// per path, keeps assigned and constant bits, and classifies every admitted
/// value. Returns the first disagreement, empty when there is none.
inline std::string sweep_distinguish(long& checked) {
  const PatBit sym[4] = {PatBit::Zero, PatBit::One, PatBit::Assigned, PatBit::Unassigned};
  checked = 0;
  for (int n = 2; n <= 3; ++n) {
    for (int w = 1; n * w <= 6; ++w) {
      std::vector<std::vector<int>> shapes = {{w}};
      for (int a = 1; a < w; ++a) shapes.push_back({a, w - a});
      const int cells = n * w;
      for (const auto& shape : shapes) {
        for (long code = 0; code < (1L << (2 * cells)); ++code) {
          VariantPatterns p(static_cast<std::size_t>(n));
          long c = code;
          for (int v = 0; v < n; ++v) {
            for (int sw : shape) {
              BitPattern bp(sw);
              for (int b = 0; b < sw; ++b, c >>= 2) bp[b] = sym[c & 3];
              p[static_cast<std::size_t>(v)].push_back(bp);
            }
          }
          const std::string where = "n=" + std::to_string(n) + " w=" + std::to_string(w) +
                                    " split=" + std::to_string(shape.size()) + " code=" + std::to_string(code);
          const bool expect = brute_distinguishable(rows_of(p));
          if (check_distinguishable(p) != expect) return "check_distinguishable " + where;
          auto q = p;
          auto tree = derive_decision_tree(q);
          if (tree.has_value() != expect) return "derive_decision_tree " + where;
          ++checked;
          if (!tree) continue;
          std::set<std::pair<int, int>> seen;
          if (!paths_test_once(*tree, 0, seen)) return "repeated test " + where;
          for (int v = 0; v < n; ++v) {
            const auto& orig = p[static_cast<std::size_t>(v)];
            const auto& fixed = q[static_cast<std::size_t>(v)];
            for (std::size_t s = 0; s < orig.size(); ++s) {
              for (int b = 0; b < orig[s].width(); ++b) {
                if (orig[s][b] != PatBit::Unassigned && fixed[s][b] != orig[s][b]) return "changed bit " + where;
              }
            }
            for (const auto& x : instances_of(fixed)) {
              if (classify(*tree, x) != v) return "misclassified " + where;
            }
          }
        }
      }
    }
  }
  return {};
}

}  // namespace adtlayout::oracle

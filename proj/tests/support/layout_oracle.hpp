#pragma once

// Exhaustive reference for the best achievable score of an ADT whose fields
// are all small unsigned integers, on a target where one 64-bit integer
// scalar can hold any of them. Enumerates every layout with at most two data
// scalars: field-to-scalar assignments, scalar widths, field offsets, and tag
// sites (inside a data scalar or as an appended scalar).
//
// Decision trees are not enumerated: a layout that a tree can classify has a
// free bit common to each pair of variants and no variant filling a whole
// scalar, so an explicit tag at the same field placements (n = 2) or two bits
// above the data (n = 3) is never more expensive than the tree's 2 * tag bits.

#include <algorithm>
#include <climits>
#include <cstdint>
#include <map>
#include <string>
#include <tuple>
#include <vector>

namespace adtlayout::oracle {

struct OracleScore {
  int scalars = 0;
  int cost = 0;  // access cost plus explicit tag cost
};

inline int oracle_tag_width(int n) {
  int t = 1;
  while ((1 << t) < n) ++t;
  return t;
}

/// Per-access cost: whole scalar 0, low bits 1, shifted 2.
inline int oracle_access(int offset, int width, int scalar_width) {
  if (offset > 0) return 2;
  return width == scalar_width ? 0 : 1;
}

class IntLayoutOracle {
 public:
  /// Minimal cost of putting `widths` into a scalar of width W, avoiding the
  /// bits in `forbidden`; INT_MAX when impossible.
  int slot_cost(std::vector<int> widths, int W, std::uint64_t forbidden) {
    std::sort(widths.begin(), widths.end());
    auto key = std::make_tuple(widths, W, forbidden);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    int best = INT_MAX;
    enumerate(widths, W, forbidden, 0, 0, best);
    memo_[key] = best;
    return best;
  }

  OracleScore optimum(const std::vector<std::vector<int>>& variants) {
    const int n = static_cast<int>(variants.size());
    bool nullary = std::all_of(variants.begin(), variants.end(), [](const auto& v) { return v.empty(); });
    if (nullary) return {n >= 2 ? 1 : 0, 0};
    const int t = n >= 2 ? oracle_tag_width(n) : 0;
    int max_sum = 0;
    for (const auto& v : variants) {
      int s = 0;
      for (int w : v) s += w;
      max_sum = std::max(max_sum, s);
    }
    const int wmax = std::min(64, max_sum + t + 1);
    OracleScore best{INT_MAX, INT_MAX};
    auto consider = [&](int scalars, int cost) {
      if (cost == INT_MAX) return;
      if (scalars < best.scalars || (scalars == best.scalars && cost < best.cost)) best = {scalars, cost};
    };

    for (int W1 = 1; W1 <= wmax; ++W1) {
      // one data scalar
      if (n == 1) {
        consider(1, variant_sum(variants, {W1}, -1, 0, 0));
      } else {
        for (int o = 0; o + t <= W1; ++o) {
          int c = variant_sum(variants, {W1}, 0, o, t);
          if (c != INT_MAX) consider(1, c + oracle_access(o, t, W1));
        }
        int c = variant_sum(variants, {W1}, -1, 0, 0);
        if (c != INT_MAX) consider(2, c + 1);
      }
      // two data scalars
      for (int W2 = 1; W2 <= wmax; ++W2) {
        if (n == 1) {
          consider(2, variant_sum(variants, {W1, W2}, -1, 0, 0));
          continue;
        }
        for (int s = 0; s < 2; ++s) {
          const int W = s == 0 ? W1 : W2;
          for (int o = 0; o + t <= W; ++o) {
            int c = variant_sum(variants, {W1, W2}, s, o, t);
            if (c != INT_MAX) consider(2, c + oracle_access(o, t, W));
          }
        }
        int c = variant_sum(variants, {W1, W2}, -1, 0, 0);
        if (c != INT_MAX) consider(3, c + 1);
      }
      if (best.scalars == 1 && best.cost == 0) break;
    }
    return best;
  }

 private:
  // Sum over variants of the cheapest placement of that variant's fields
  // into the given scalars, with the tag at [o, o + t) of scalar `tag_slot`.
  int variant_sum(const std::vector<std::vector<int>>& variants, const std::vector<int>& Ws, int tag_slot,
                  int o, int t) {
    long total = 0;
    for (const auto& v : variants) {
      int best = INT_MAX;
      const int k = static_cast<int>(v.size());
      int ways = 1;
      for (int i = 0; i < k; ++i) ways *= static_cast<int>(Ws.size());
      for (int a = 0; a < ways; ++a) {
        std::vector<std::vector<int>> parts(Ws.size());
        int code = a;
        for (int i = 0; i < k; ++i) {
          parts[static_cast<std::size_t>(code % static_cast<int>(Ws.size()))].push_back(v[static_cast<std::size_t>(i)]);
          code /= static_cast<int>(Ws.size());
        }
        long sum = 0;
        for (std::size_t s = 0; s < Ws.size() && sum != INT_MAX; ++s) {
          std::uint64_t forbid = static_cast<int>(s) == tag_slot ? ((std::uint64_t{1} << t) - 1) << o : 0;
          int c = slot_cost(parts[s], Ws[s], forbid);
          sum = c == INT_MAX ? INT_MAX : sum + c;
        }
        if (sum < best) best = static_cast<int>(sum);
      }
      if (best == INT_MAX) return INT_MAX;
      total += best;
    }
    return static_cast<int>(total);
  }

  void enumerate(const std::vector<int>& widths, int W, std::uint64_t used, std::size_t i, int cost, int& best) {
    if (cost >= best) return;
    if (i == widths.size()) {
      best = cost;
      return;
    }
    const int w = widths[i];
    for (int off = 0; off + w <= W; ++off) {
      std::uint64_t m = ((w >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << w) - 1)) << off;
      if (used & m) continue;
      enumerate(widths, W, used | m, i + 1, cost + oracle_access(off, w, W), best);
    }
  }

  std::map<std::tuple<std::vector<int>, int, std::uint64_t>, int> memo_;
};

/// Every ADT with 1 to 3 cases and at most 3 unsigned fields in total of
/// widths 1..8, up to reordering of cases and of fields within a case.
inline std::vector<std::vector<std::vector<int>>> small_int_shapes() {
  std::vector<std::vector<std::vector<int>>> adts;
  std::vector<std::vector<int>> cases = {{}};
  for (int a = 1; a <= 8; ++a) {
    cases.push_back({a});
    for (int b = a; b <= 8; ++b) {
      cases.push_back({a, b});
      for (int c = b; c <= 8; ++c) cases.push_back({a, b, c});
    }
  }
  auto size = [](const std::vector<std::vector<int>>& v) {
    std::size_t n = 0;
    for (const auto& c : v) n += c.size();
    return n;
  };
  for (std::size_t i = 0; i < cases.size(); ++i) {
    adts.push_back({cases[i]});
    for (std::size_t j = i; j < cases.size(); ++j) {
      if (size({cases[i], cases[j]}) <= 3) adts.push_back({cases[i], cases[j]});
      for (std::size_t k = j; k < cases.size(); ++k) {
        if (size({cases[i], cases[j], cases[k]}) <= 3) adts.push_back({cases[i], cases[j], cases[k]});
      }
    }
  }
  return adts;
}

/// `type Z { case V0(f0: uA, ...); ... }` for a shape.
inline std::string shape_source(const std::vector<std::vector<int>>& shape) {
  std::string src = "type Z {";
  for (std::size_t v = 0; v < shape.size(); ++v) {
    src += " case V" + std::to_string(v);
    if (!shape[v].empty()) {
      src += "(";
      for (std::size_t i = 0; i < shape[v].size(); ++i) {
        src += (i ? ", f" : "f") + std::to_string(i) + ": u" + std::to_string(shape[v][i]);
      }
      src += ")";
    }
    src += ";";
  }
  return src + " }";
}

}  // namespace adtlayout::oracle

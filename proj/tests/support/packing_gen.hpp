#pragma once

// Random well-formed packing expressions and an inline-and-scan reference
// flattener used as an oracle for flatten_expr.

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "adtlayout/flatten.hpp"
#include "adtlayout/packing.hpp"
#include "adtlayout/verify.hpp"

namespace adtlayout::oracle {

struct GeneratedCase {
  PackingEnv delta;
  std::map<std::string, int> gamma;
  PackingExpr expr;
  int width = 0;
};

class PackingGen {
 public:
  explicit PackingGen(std::uint64_t seed) : rng_(seed) {}

  GeneratedCase next(int max_depth = 4, int max_width = 64) {
    GeneratedCase c;
    decls_.clear();
    used_params_.clear();
    int ndecls = pick(0, 3);
    for (int i = 0; i < ndecls; ++i) make_decl(i);
    for (const auto& d : decls_) c.delta.emplace(d.name, d);

    std::vector<std::string> fields;
    int nfields = pick(1, 6);
    for (int i = 0; i < nfields; ++i) {
      std::string name(1, static_cast<char>('a' + i));
      name += "f";
      fields.push_back(name);
      c.gamma.emplace(name, pick(1, 8));
    }
    std::vector<std::string> avail = fields;
    auto [e, w] = gen(avail, c.gamma, max_depth, max_width);
    c.expr = e;
    c.width = w;
    return c;
  }

 private:
  int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  std::string take(std::vector<std::string>& avail) {
    int i = pick(0, static_cast<int>(avail.size()) - 1);
    std::string n = avail[static_cast<std::size_t>(i)];
    avail.erase(avail.begin() + i);
    return n;
  }

  PackingExpr literal(int width) {
    BitLayout l;
    for (int i = 0; i < width; ++i) {
      int k = pick(0, 2);
      l.bits.push_back(k == 0 ? BitChar::zero() : k == 1 ? BitChar::one() : BitChar::wild());
    }
    return PackingExpr(std::move(l));
  }

  std::pair<PackingExpr, int> gen(std::vector<std::string>& avail,
                                  const std::map<std::string, int>& gamma, int depth, int budget) {
    int choice = depth <= 0 ? pick(0, 1) : pick(0, 4);
    if (choice == 1 && !avail.empty()) {
      std::string f = take(avail);
      int w = gamma.at(f);
      if (w <= budget) return {PackingExpr(FieldRef{f}), w};
      avail.push_back(f);
    }
    if (choice == 2 && budget >= 2) {
      Concat c;
      int total = 0;
      int parts = pick(2, 3);
      for (int i = 0; i < parts && budget - total > 0; ++i) {
        auto [e, w] = gen(avail, gamma, depth - 1, (budget - total) / (parts - i));
        c.parts.push_back(e);
        total += w;
      }
      return {PackingExpr(std::move(c)), total};
    }
    if (choice == 3 && !decls_.empty()) {
      const PackingDecl& d = decls_[static_cast<std::size_t>(pick(0, static_cast<int>(decls_.size()) - 1))];
      if (d.width <= budget) {
        Apply a{d.name, {}};
        for (const auto& p : d.params) {
          if (used_params_.at(d.name).count(p.name) && pick(0, 2) > 0) {
            a.args.push_back(gen(avail, gamma, depth - 1, p.width).first);
          } else {
            a.args.push_back(literal(pick(0, p.width)));
          }
        }
        return {PackingExpr(std::move(a)), d.width};
      }
    }
    // bit layout mixing constants and whole fields
    BitLayout l;
    int w = 0;
    int target = pick(0, std::min(budget, 16));
    std::set<char> letters;
    while (w < target) {
      if (!avail.empty() && pick(0, 2) == 0) {
        std::string f = take(avail);
        int fw = gamma.at(f);
        if (w + fw > budget || letters.count(f[0])) {
          avail.push_back(f);
          break;
        }
        letters.insert(f[0]);
        for (int i = 0; i < fw; ++i) l.bits.push_back(BitChar::field(f[0]));
        w += fw;
      } else {
        int k = pick(0, 2);
        l.bits.push_back(k == 0 ? BitChar::zero() : k == 1 ? BitChar::one() : BitChar::wild());
        ++w;
      }
    }
    return {PackingExpr(std::move(l)), w};
  }

  void make_decl(int index) {
    PackingDecl d;
    d.name = "P" + std::to_string(index);
    int nparams = pick(0, 3);
    std::map<std::string, int> gamma;
    std::vector<std::string> avail;
    for (int i = 0; i < nparams; ++i) {
      std::string name(1, static_cast<char>('p' + i));
      int w = pick(1, 6);
      d.params.push_back({name, w});
      gamma.emplace(name, w);
      avail.push_back(name);
    }
    auto [body, w] = gen(avail, gamma, 2, 24);
    d.body = body;
    d.width = w + pick(0, 3);
    std::set<std::string> used;
    for (const auto& [n, pw] : gamma) {
      if (std::find(avail.begin(), avail.end(), n) == avail.end()) used.insert(n);
    }
    used_params_[d.name] = used;
    decls_.push_back(std::move(d));
  }

  std::mt19937_64 rng_;
  std::vector<PackingDecl> decls_;
  std::map<std::string, std::set<std::string>> used_params_;
};

/// One bit of an inlined layout: a constant, a wildcard, or bit `index` of a name.
struct Cell {
  char kind = '0';  // '0', '1', '?', 'f'
  std::string name;
  int index = 0;
};

/// LSB-first cells after textually inlining every application.
inline std::vector<Cell> inline_expr(const PackingExpr& e, const std::map<std::string, int>& gamma,
                                     const PackingEnv& delta) {
  std::vector<Cell> out;
  if (const auto* l = e.as<BitLayout>()) {
    std::map<char, std::string> by_letter;
    for (const auto& [n, w] : gamma) by_letter.emplace(n[0], n);
    std::map<char, int> seen;
    std::vector<Cell> msb_first;
    for (const auto& b : l->bits) {
      Cell c;
      if (b.kind == BitChar::Kind::Field) {
        c.kind = 'f';
        c.name = by_letter.at(b.letter);
        c.index = gamma.at(c.name) - 1 - seen[b.letter]++;
      } else {
        c.kind = b.to_char();
      }
      msb_first.push_back(c);
    }
    out.assign(msb_first.rbegin(), msb_first.rend());
  } else if (const auto* f = e.as<FieldRef>()) {
    for (int i = 0; i < gamma.at(f->name); ++i) out.push_back({'f', f->name, i});
  } else if (const auto* c = e.as<Concat>()) {
    for (auto it = c->parts.rbegin(); it != c->parts.rend(); ++it) {
      auto part = inline_expr(*it, gamma, delta);
      out.insert(out.end(), part.begin(), part.end());
    }
  } else if (const auto* a = e.as<Apply>()) {
    const PackingDecl& d = delta.at(a->decl);
    std::map<std::string, int> inner;
    for (const auto& p : d.params) inner.emplace(p.name, p.width);
    auto body = inline_expr(d.body, inner, delta);
    std::map<std::string, std::vector<Cell>> args;
    for (std::size_t i = 0; i < d.params.size(); ++i) {
      auto arg = inline_expr(a->args[i], gamma, delta);
      arg.resize(static_cast<std::size_t>(d.params[i].width), Cell{'0', "", 0});
      args.emplace(d.params[i].name, arg);
    }
    for (auto& cell : body) {
      if (cell.kind == 'f') cell = args.at(cell.name)[static_cast<std::size_t>(cell.index)];
    }
    body.resize(static_cast<std::size_t>(d.width), Cell{'0', "", 0});
    out = body;
  }
  return out;
}

/// Scans inlined cells into a flattened packing.
inline FlattenedPacking reference_flatten(const PackingExpr& e, const std::map<std::string, int>& gamma,
                                          const PackingEnv& delta) {
  auto cells = inline_expr(e, gamma, delta);
  FlattenedPacking fp;
  fp.pattern = BitPattern(static_cast<int>(cells.size()));
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const Cell& c = cells[i];
    int pos = static_cast<int>(i);
    switch (c.kind) {
      case '0': fp.pattern[pos] = PatBit::Zero; break;
      case '1': fp.pattern[pos] = PatBit::One; break;
      case '?': fp.pattern[pos] = PatBit::Unassigned; break;
      default:
        fp.pattern[pos] = PatBit::Assigned;
        if (c.index == 0) fp.assignments[c.name] = Interval{pos, gamma.at(c.name)};
    }
  }
  return fp;
}

}  // namespace adtlayout::oracle

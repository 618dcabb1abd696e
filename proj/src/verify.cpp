#include "adtlayout/verify.hpp"

#include <functional>
#include <set>

namespace adtlayout {

std::map<char, std::string> resolve_layout_fields(const BitLayout& layout,
                                                  const std::vector<std::string>& fields,
                                                  SourcePos pos) {
  std::map<char, std::string> out;
  for (const auto& bit : layout.bits) {
    if (bit.kind != BitChar::Kind::Field || out.count(bit.letter)) continue;
    const std::string* match = nullptr;
    for (const auto& f : fields) {
      if (f.empty() || f[0] != bit.letter) continue;
      if (match) {
        throw Error(ErrorCode::AmbiguousLetter,
                    "fields '" + *match + "' and '" + f + "' share the first character '" +
                        bit.letter + "'",
                    pos);
      }
      match = &f;
    }
    if (!match) {
      throw Error(ErrorCode::UnboundName,
                  std::string("layout letter '") + bit.letter + "' matches no field", pos);
    }
    out.emplace(bit.letter, *match);
  }
  return out;
}

namespace {

std::vector<std::string> gamma_names(const SizeContext& ctx) {
  std::vector<std::string> names;
  names.reserve(ctx.gamma.size());
  for (const auto& [name, width] : ctx.gamma) names.push_back(name);
  return names;
}

// Each field letter must form one contiguous run whose length is the field width.
void check_layout_runs(const BitLayout& layout, const std::map<char, std::string>& letters,
                       const SizeContext& ctx, SourcePos pos) {
  std::map<char, int> runs;
  std::map<char, int> counts;
  char prev = 0;
  for (const auto& bit : layout.bits) {
    char cur = bit.kind == BitChar::Kind::Field ? bit.letter : 0;
    if (cur && cur != prev) ++runs[cur];
    if (cur) ++counts[cur];
    prev = cur;
  }
  for (const auto& [letter, name] : letters) {
    if (runs[letter] != 1) {
      throw Error(ErrorCode::LayoutField, "bits of field '" + name + "' are not contiguous", pos);
    }
    int width = ctx.gamma.at(name);
    if (counts[letter] != width) {
      throw Error(ErrorCode::LayoutField,
                  "field '" + name + "' has width " + std::to_string(width) + " but the layout gives it " +
                      std::to_string(counts[letter]) + " bits",
                  pos);
    }
  }
}

int checked(int n, const SizeContext& ctx, SourcePos pos) {
  if (n > ctx.max_width) {
    throw Error(ErrorCode::Size,
                "packing expression has size " + std::to_string(n) + ", larger than the " +
                    std::to_string(ctx.max_width) + "-bit maximum scalar",
                pos);
  }
  return n;
}

bool contains_solve(const PackingExpr& e) {
  return std::visit(
      [](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Solve>) {
          return true;
        } else if constexpr (std::is_same_v<T, Concat>) {
          for (const auto& p : x.parts) {
            if (contains_solve(p)) return true;
          }
          return false;
        } else if constexpr (std::is_same_v<T, Apply>) {
          for (const auto& p : x.args) {
            if (contains_solve(p)) return true;
          }
          return false;
        } else {
          return false;
        }
      },
      e.node);
}

void collect_applies(const PackingExpr& e, std::set<std::string>& out) {
  if (const auto* a = e.as<Apply>()) {
    out.insert(a->decl);
    for (const auto& x : a->args) collect_applies(x, out);
  } else if (const auto* c = e.as<Concat>()) {
    for (const auto& x : c->parts) collect_applies(x, out);
  } else if (const auto* s = e.as<Solve>()) {
    for (const auto& x : s->parts) collect_applies(x, out);
  }
}

}  // namespace

int size_of(const PackingExpr& expr, const SizeContext& ctx) {
  return std::visit(
      [&](const auto& x) -> int {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, EmptyExpr>) {
          return 0;
        } else if constexpr (std::is_same_v<T, BitLayout>) {
          auto letters = resolve_layout_fields(x, gamma_names(ctx), expr.pos);
          check_layout_runs(x, letters, ctx, expr.pos);
          return checked(static_cast<int>(x.bits.size()), ctx, expr.pos);
        } else if constexpr (std::is_same_v<T, FieldRef>) {
          auto it = ctx.gamma.find(x.name);
          if (it == ctx.gamma.end()) {
            throw Error(ErrorCode::UnboundName, "unbound field '" + x.name + "'", expr.pos);
          }
          return checked(it->second, ctx, expr.pos);
        } else if constexpr (std::is_same_v<T, Apply>) {
          if (!ctx.delta || !ctx.delta->count(x.decl)) {
            throw Error(ErrorCode::UnboundName, "unbound packing '" + x.decl + "'", expr.pos);
          }
          const PackingDecl& decl = ctx.delta->at(x.decl);
          if (decl.params.size() != x.args.size()) {
            throw Error(ErrorCode::Arity,
                        "packing '" + x.decl + "' expects " + std::to_string(decl.params.size()) +
                            " arguments, got " + std::to_string(x.args.size()),
                        expr.pos);
          }
          for (std::size_t i = 0; i < x.args.size(); ++i) {
            int n = size_of(x.args[i], ctx);
            if (n > decl.params[i].width) {
              throw Error(ErrorCode::Size,
                          "argument " + std::to_string(i + 1) + " of '" + x.decl + "' has size " +
                              std::to_string(n) + " but parameter '" + decl.params[i].name +
                              "' has width " + std::to_string(decl.params[i].width),
                          x.args[i].pos);
            }
          }
          return checked(decl.width, ctx, expr.pos);
        } else {
          int total = 0;
          for (const auto& p : x.parts) total += size_of(p, ctx);
          return checked(total, ctx, expr.pos);
        }
      },
      expr.node);
}

Diagnostics check_packing_decl(const PackingDecl& decl, const PackingEnv& delta, int max_width) {
  Diagnostics out;
  SizeContext ctx;
  ctx.delta = &delta;
  ctx.max_width = max_width;
  for (const auto& p : decl.params) {
    if (p.width < 1 || p.width > max_width) {
      out.push_back({ErrorCode::Size,
                     "parameter '" + p.name + "' width must be in 1.." + std::to_string(max_width),
                     decl.pos});
    }
    if (!ctx.gamma.emplace(p.name, p.width).second) {
      out.push_back({ErrorCode::Duplicate, "duplicate parameter '" + p.name + "'", decl.pos});
    }
  }
  if (decl.width > max_width) {
    out.push_back({ErrorCode::Size,
                   "declared width " + std::to_string(decl.width) + " exceeds the " +
                       std::to_string(max_width) + "-bit maximum scalar",
                   decl.pos});
  }
  if (contains_solve(decl.body)) {
    out.push_back({ErrorCode::SolveInDecl,
                   "#solve expressions cannot appear in packing declaration '" + decl.name + "'",
                   decl.pos});
    return out;
  }
  std::set<std::string> applied;
  collect_applies(decl.body, applied);
  if (applied.count(decl.name)) {
    out.push_back({ErrorCode::RecursivePacking,
                   "packing '" + decl.name + "' applies itself", decl.pos});
    return out;
  }
  if (!out.empty()) return out;
  try {
    int n = size_of(decl.body, ctx);
    if (n > decl.width) {
      out.push_back({ErrorCode::Size,
                     "body of '" + decl.name + "' has size " + std::to_string(n) +
                         ", larger than the declared width " + std::to_string(decl.width),
                     decl.pos});
    }
  } catch (const Error& e) {
    out.push_back(e.diagnostic());
  }
  return out;
}

PackingEnv check_packing_decls(const std::vector<Decl>& decls, Diagnostics& out, int max_width) {
  PackingEnv env;
  std::vector<const PackingDecl*> order;
  for (const auto& d : decls) {
    const auto* p = std::get_if<PackingDecl>(&d);
    if (!p) continue;
    if (!env.emplace(p->name, *p).second) {
      out.push_back({ErrorCode::Duplicate, "duplicate packing '" + p->name + "'", p->pos});
      continue;
    }
    order.push_back(p);
  }

  // Cycle detection over the application graph.
  std::map<std::string, int> state;  // 0 new, 1 on stack, 2 done
  std::set<std::string> cyclic;
  std::function<void(const std::string&, std::vector<std::string>&)> visit =
      [&](const std::string& name, std::vector<std::string>& stack) {
        state[name] = 1;
        stack.push_back(name);
        std::set<std::string> succ;
        collect_applies(env.at(name).body, succ);
        for (const auto& s : succ) {
          if (!env.count(s)) continue;
          if (state[s] == 1) {
            auto it = std::find(stack.begin(), stack.end(), s);
            for (; it != stack.end(); ++it) cyclic.insert(*it);
          } else if (state[s] == 0) {
            visit(s, stack);
          }
        }
        stack.pop_back();
        state[name] = 2;
      };
  for (const auto* p : order) {
    std::vector<std::string> stack;
    if (state[p->name] == 0) visit(p->name, stack);
  }

  for (const auto* p : order) {
    if (cyclic.count(p->name)) {
      out.push_back({ErrorCode::RecursivePacking,
                     "packing '" + p->name + "' is part of a recursive application cycle", p->pos});
      continue;
    }
    auto diags = check_packing_decl(*p, env, max_width);
    out.insert(out.end(), diags.begin(), diags.end());
  }
  return env;
}

}  // namespace adtlayout

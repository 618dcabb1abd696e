#include "adtlayout/flatten.hpp"

#include <set>

namespace adtlayout {

char pat_bit_char(PatBit b) {
  switch (b) {
    case PatBit::Zero: return '0';
    case PatBit::One: return '1';
    case PatBit::Assigned: return 'x';
    case PatBit::Unassigned: return 'u';
  }
  return 'u';
}

BitPattern::BitPattern(int width, PatBit fill) : bits_(static_cast<std::size_t>(width), fill) {}

BitPattern BitPattern::parse(std::string_view msb_first) {
  BitPattern p(static_cast<int>(msb_first.size()));
  int pos = p.width() - 1;
  for (char c : msb_first) {
    PatBit b;
    switch (c) {
      case '0': b = PatBit::Zero; break;
      case '1': b = PatBit::One; break;
      case 'x':
      case '*': b = PatBit::Assigned; break;
      case 'u':
      case '?': b = PatBit::Unassigned; break;
      default: throw Error(ErrorCode::Syntax, std::string("bad pattern character '") + c + "'");
    }
    p[pos--] = b;
  }
  return p;
}

void BitPattern::resize(int width, PatBit fill) { bits_.resize(static_cast<std::size_t>(width), fill); }

void BitPattern::splice(int offset, const BitPattern& src) {
  for (int i = 0; i < src.width(); ++i) (*this)[offset + i] = src[i];
}

BitPattern BitPattern::above(const BitPattern& low) const {
  BitPattern out = low;
  out.resize(low.width() + width(), PatBit::Zero);
  out.splice(low.width(), *this);
  return out;
}

bool BitPattern::all(int offset, int width, PatBit b) const {
  if (offset < 0 || offset + width > this->width()) return false;
  for (int i = offset; i < offset + width; ++i) {
    if ((*this)[i] != b) return false;
  }
  return true;
}

std::string BitPattern::str() const {
  std::string s;
  s.reserve(bits_.size());
  for (auto it = bits_.rbegin(); it != bits_.rend(); ++it) s += pat_bit_char(*it);
  return s;
}

int SolveRequest::width() const {
  int w = 0;
  for (const auto& item : items) w += item.block ? item.block->width() : item.width;
  return w;
}

namespace {

void merge_into(FlattenedPacking& out, const FlattenedPacking& part, int shift, SourcePos pos) {
  for (const auto& [name, iv] : part.assignments) {
    if (!out.assignments.emplace(name, Interval{iv.offset + shift, iv.width}).second) {
      throw Error(ErrorCode::Duplicate, "field '" + name + "' is placed twice", pos);
    }
  }
}

FlattenedPacking flatten_layout(const BitLayout& layout, const SizeContext& ctx, SourcePos pos) {
  std::vector<std::string> names;
  for (const auto& [name, w] : ctx.gamma) names.push_back(name);
  auto letters = resolve_layout_fields(layout, names, pos);

  FlattenedPacking out;
  const int width = static_cast<int>(layout.bits.size());
  out.pattern = BitPattern(width);
  std::map<char, std::pair<int, int>> span;  // letter -> (lowest, highest) position
  for (int i = 0; i < width; ++i) {
    const BitChar& c = layout.bits[static_cast<std::size_t>(width - 1 - i)];
    switch (c.kind) {
      case BitChar::Kind::Zero: out.pattern[i] = PatBit::Zero; break;
      case BitChar::Kind::One: out.pattern[i] = PatBit::One; break;
      case BitChar::Kind::Wild: out.pattern[i] = PatBit::Unassigned; break;
      case BitChar::Kind::Field: {
        out.pattern[i] = PatBit::Assigned;
        auto [it, fresh] = span.emplace(c.letter, std::pair{i, i});
        if (!fresh) it->second.second = i;
        break;
      }
    }
  }
  for (const auto& [letter, lohi] : span) {
    const std::string& name = letters.at(letter);
    int w = lohi.second - lohi.first + 1;
    int expected = ctx.gamma.at(name);
    int count = 0;
    for (int i = lohi.first; i <= lohi.second; ++i) {
      const BitChar& c = layout.bits[static_cast<std::size_t>(width - 1 - i)];
      if (c.kind == BitChar::Kind::Field && c.letter == letter) ++count;
    }
    if (count != w) {
      throw Error(ErrorCode::LayoutField, "bits of field '" + name + "' are not contiguous", pos);
    }
    if (w != expected) {
      throw Error(ErrorCode::LayoutField,
                  "field '" + name + "' has width " + std::to_string(expected) +
                      " but the layout gives it " + std::to_string(w) + " bits",
                  pos);
    }
    out.assignments.emplace(name, Interval{lohi.first, w});
  }
  return out;
}

FlattenedPacking flatten_impl(const PackingExpr& expr, const SizeContext& ctx);

FlattenedPacking flatten_apply(const Apply& app, const SizeContext& ctx, SourcePos pos) {
  if (!ctx.delta || !ctx.delta->count(app.decl)) {
    throw Error(ErrorCode::UnboundName, "unbound packing '" + app.decl + "'", pos);
  }
  const PackingDecl& decl = ctx.delta->at(app.decl);
  if (decl.params.size() != app.args.size()) {
    throw Error(ErrorCode::Arity, "packing '" + app.decl + "' expects " +
                                      std::to_string(decl.params.size()) + " arguments",
                pos);
  }
  SizeContext inner;
  inner.delta = ctx.delta;
  inner.max_width = ctx.max_width;
  for (const auto& p : decl.params) inner.gamma.emplace(p.name, p.width);

  FlattenedPacking body = flatten_impl(decl.body, inner);
  if (body.width() > decl.width) {
    throw Error(ErrorCode::Size, "body of '" + decl.name + "' is wider than its declared width", pos);
  }
  FlattenedPacking out;
  out.pattern = body.pattern;
  out.pattern.resize(decl.width, PatBit::Zero);

  for (std::size_t i = 0; i < app.args.size(); ++i) {
    const PackingParam& param = decl.params[i];
    FlattenedPacking arg = flatten_impl(app.args[i], ctx);
    if (arg.width() > param.width) {
      throw Error(ErrorCode::Size,
                  "argument for '" + param.name + "' is " + std::to_string(arg.width()) +
                      " bits but the parameter has width " + std::to_string(param.width),
                  app.args[i].pos);
    }
    auto slot = body.assignments.find(param.name);
    if (slot == body.assignments.end()) {
      if (!arg.assignments.empty()) {
        throw Error(ErrorCode::LayoutField,
                    "parameter '" + param.name + "' of '" + decl.name +
                        "' is unused, so its argument's fields would be dropped",
                    app.args[i].pos);
      }
      continue;
    }
    BitPattern padded = arg.pattern;
    padded.resize(param.width, PatBit::Zero);
    out.pattern.splice(slot->second.offset, padded);
    merge_into(out, arg, slot->second.offset, app.args[i].pos);
  }
  return out;
}

FlattenedPacking flatten_impl(const PackingExpr& expr, const SizeContext& ctx) {
  return std::visit(
      [&](const auto& x) -> FlattenedPacking {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, EmptyExpr>) {
          return {};
        } else if constexpr (std::is_same_v<T, BitLayout>) {
          return flatten_layout(x, ctx, expr.pos);
        } else if constexpr (std::is_same_v<T, FieldRef>) {
          auto it = ctx.gamma.find(x.name);
          if (it == ctx.gamma.end()) {
            throw Error(ErrorCode::UnboundName, "unbound field '" + x.name + "'", expr.pos);
          }
          FlattenedPacking out;
          out.assignments.emplace(x.name, Interval{0, it->second});
          out.pattern = BitPattern(it->second, PatBit::Assigned);
          return out;
        } else if constexpr (std::is_same_v<T, Concat>) {
          // Parts are written most-significant first; each part sits above
          // everything to its right.
          FlattenedPacking out;
          for (auto it = x.parts.rbegin(); it != x.parts.rend(); ++it) {
            FlattenedPacking part = flatten_impl(*it, ctx);
            int shift = out.width();
            merge_into(out, part, shift, it->pos);
            out.pattern = part.pattern.above(out.pattern);
          }
          return out;
        } else if constexpr (std::is_same_v<T, Apply>) {
          return flatten_apply(x, ctx, expr.pos);
        } else {
          throw Error(ErrorCode::SolveInDecl,
                      "#solve may only appear as a top-level entry of a #packing annotation",
                      expr.pos);
        }
      },
      expr.node);
}

}  // namespace

FlattenedPacking flatten_expr(const PackingExpr& expr, const SizeContext& ctx) {
  FlattenedPacking out = flatten_impl(expr, ctx);
  if (out.width() > ctx.max_width) {
    throw Error(ErrorCode::Size,
                "flattened packing is " + std::to_string(out.width()) + " bits, larger than the " +
                    std::to_string(ctx.max_width) + "-bit maximum scalar",
                expr.pos);
  }
  return out;
}

std::vector<AnnotationEntry> flatten_annotation(const std::vector<PackingExpr>& exprs,
                                                const SizeContext& ctx) {
  std::vector<AnnotationEntry> out;
  std::set<std::string> placed;
  auto claim = [&](const std::string& name, SourcePos pos) {
    if (!placed.insert(name).second) {
      throw Error(ErrorCode::Duplicate, "field '" + name + "' is placed twice in the annotation", pos);
    }
  };
  for (const auto& e : exprs) {
    if (const auto* solve = e.as<Solve>()) {
      SolveRequest req;
      for (const auto& part : solve->parts) {
        if (const auto* ref = part.as<FieldRef>()) {
          auto it = ctx.gamma.find(ref->name);
          if (it == ctx.gamma.end()) {
            throw Error(ErrorCode::UnboundName, "unbound field '" + ref->name + "'", part.pos);
          }
          claim(ref->name, part.pos);
          req.items.push_back({ref->name, it->second, std::nullopt});
        } else {
          FlattenedPacking block = flatten_expr(part, ctx);
          for (const auto& [name, iv] : block.assignments) claim(name, part.pos);
          int w = block.width();
          req.items.push_back({"", w, std::move(block)});
        }
      }
      if (req.width() > ctx.max_width) {
        throw Error(ErrorCode::Size, "#solve contents exceed the maximum scalar width", e.pos);
      }
      out.emplace_back(std::move(req));
    } else {
      FlattenedPacking fp = flatten_expr(e, ctx);
      for (const auto& [name, iv] : fp.assignments) claim(name, e.pos);
      out.emplace_back(std::move(fp));
    }
  }
  return out;
}

}  // namespace adtlayout

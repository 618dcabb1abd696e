#include "adtlayout/solver.hpp"

#include <algorithm>
#include <bit>
#include <set>

#include "adtlayout/distinguish.hpp"

namespace adtlayout {

namespace {

constexpr KindSet kAnyKind = KindSet::from_bits(0x7f);

std::uint64_t mask(int w) { return w >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << w) - 1; }
std::uint64_t range(int off, int w) { return w <= 0 ? 0 : mask(w) << off; }

}  // namespace

bool SlotState::any_ref() const {
  return std::any_of(uses.begin(), uses.end(), [](const SlotUse& u) { return u.ref; });
}

int SlotState::extent() const {
  int e = 0;
  for (const auto& u : uses) e = std::max(e, static_cast<int>(std::bit_width(u.used())));
  return e;
}

std::vector<NormField> normalize_fields(const MonoVariant& variant, const Target& target,
                                        const std::map<std::string, LayoutSolution>* nested) {
  std::vector<NormField> out;
  const int ref_width =
      target.ref_tagging ? target.ref_width - target.ref_tagging->free_low_bits : target.ref_width;
  for (const auto& f : variant.fields) {
    NormField n;
    n.name = f.name;
    n.source = f.name;
    n.type = f.type;
    switch (f.type.kind) {
      case ConcreteType::Kind::Int:
        n.cls = FieldClass::Int;
        n.width = f.type.width;
        n.kinds = get_scalar_kinds(f.type, target);
        out.push_back(n);
        break;
      case ConcreteType::Kind::Float:
        n.cls = FieldClass::Float;
        n.width = f.type.width;
        n.kinds = get_scalar_kinds(f.type, target);
        out.push_back(n);
        break;
      case ConcreteType::Kind::Ref:
        n.cls = FieldClass::Ref;
        n.width = ref_width;
        n.kinds = target.kinds_for(TypeClass::Ref);
        out.push_back(n);
        break;
      case ConcreteType::Kind::Adt: {
        auto it = nested ? nested->find(f.type.name) : decltype(nested->end()){};
        if (!nested || it == nested->end()) {
          n.cls = FieldClass::Ref;
          n.width = ref_width;
          n.kinds = target.kinds_for(TypeClass::Ref);
          out.push_back(n);
          break;
        }
        const LayoutSolution& inner = it->second;
        for (std::size_t s = 0; s < inner.scalars.size(); ++s) {
          NormField sub = n;
          sub.sub = static_cast<int>(s);
          if (inner.scalars.size() > 1) sub.name = f.name + "#" + std::to_string(s);
          const ScalarSlot& slot = inner.scalars[s];
          sub.cls = slot.any_ref() ? FieldClass::NestedRef : FieldClass::Nested;
          sub.width = slot.any_ref() ? target.ref_width : slot.width;
          sub.kinds = slot.kinds;
          out.push_back(sub);
        }
        break;
      }
      case ConcreteType::Kind::Tuple:
        throw Error(ErrorCode::Internal, "tuple field '" + f.name + "' was not flattened");
    }
  }
  return out;
}

std::optional<Interval> place_field(SlotState& slot, int variant, const NormField& field,
                                    const Target& target) {
  SlotUse& u = slot.uses[static_cast<std::size_t>(variant)];
  if (u.closed) return std::nullopt;
  KindSet k = slot.kinds & field.kinds;
  if (k.empty()) return std::nullopt;
  const int cap = target.capacity(k);
  if (slot.extent() > cap) return std::nullopt;
  const auto& tagging = target.ref_tagging;

  if (!field.holds_ref()) {
    if (slot.any_ref() && !tagging) return std::nullopt;
    for (int off = 0; off + field.width <= cap; ++off) {
      if ((u.used() & range(off, field.width)) == 0) {
        u.assigned |= range(off, field.width);
        slot.kinds = k;
        return Interval{off, field.width};
      }
    }
    return std::nullopt;
  }

  const int W = target.ref_width;
  if (!target.choose_kind(k, W) || u.ref) return std::nullopt;
  const bool tagged_ref = field.cls == FieldClass::Ref && tagging.has_value();
  const int off = tagged_ref ? tagging->free_low_bits : 0;
  const int pb = tagging ? tagging->pattern_bits : 0;
  const std::uint64_t pmask = range(0, pb);
  if (u.used() & range(off, W - off)) return std::nullopt;
  if (tagged_ref && (u.assigned & pmask)) return std::nullopt;
  if (!tagging && u.used()) return std::nullopt;

  SlotState next = slot;
  for (std::size_t w = 0; w < next.uses.size(); ++w) {
    if (static_cast<int>(w) == variant) continue;
    SlotUse& o = next.uses[w];
    if (o.ref) continue;
    if (!tagging) {
      if (o.used()) return std::nullopt;
      continue;
    }
    const std::uint64_t vp = tagging->value_pattern & pmask;
    if (o.assigned & pmask) return std::nullopt;
    if ((o.one & pmask & ~vp) || (o.zero & pmask & vp)) return std::nullopt;
    o.one |= vp;
    o.zero |= pmask & ~vp;
  }
  SlotUse& me = next.uses[static_cast<std::size_t>(variant)];
  if (tagged_ref) {
    const std::uint64_t rp = tagging->ref_pattern & pmask;
    me.one = (me.one & ~pmask) | rp;
    me.zero = (me.zero & ~pmask) | (pmask & ~rp);
  }
  me.assigned |= range(off, W - off);
  me.ref = true;
  next.kinds = k;
  slot = std::move(next);
  return Interval{off, W - off};
}

bool place_block(SlotState& slot, int variant, const FlattenedPacking& block, KindSet kinds, int offset,
                 const Target& target) {
  SlotUse& u = slot.uses[static_cast<std::size_t>(variant)];
  const int w = block.width();
  if (u.closed || (u.used() & range(offset, w))) return false;
  if (slot.any_ref() && !target.ref_tagging) return false;
  KindSet k = slot.kinds & kinds;
  if (k.empty()) return false;
  const int cap = target.capacity(k);
  if (offset + w > cap || slot.extent() > cap) return false;
  for (int b = 0; b < w; ++b) {
    std::uint64_t bit = std::uint64_t{1} << (offset + b);
    switch (block.pattern[b]) {
      case PatBit::Assigned: u.assigned |= bit; break;
      case PatBit::Zero: u.zero |= bit; break;
      case PatBit::One: u.one |= bit; break;
      case PatBit::Unassigned: break;
    }
  }
  slot.kinds = k;
  return true;
}

std::optional<std::vector<FieldPlacement>> assign_intervals(
    const std::vector<NormField>& fields, const std::vector<int>& slot_of, std::vector<SlotState>& slots,
    const Target& target, const std::vector<std::pair<int, FlattenedPacking>>& constraints, int variant) {
  std::vector<FieldPlacement> out(fields.size(), FieldPlacement{-1, {}});
  for (const auto& [s, block] : constraints) {
    KindSet kinds = kAnyKind;
    for (const auto& [name, iv] : block.assignments) {
      for (std::size_t i = 0; i < fields.size(); ++i) {
        if (fields[i].name == name) {
          kinds = kinds & fields[i].kinds;
          out[i] = {s, iv};
        }
      }
    }
    if (!place_block(slots[static_cast<std::size_t>(s)], variant, block, kinds, 0, target)) return std::nullopt;
  }
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (out[i].scalar < 0) order.push_back(i);
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return fields[a].width > fields[b].width; });
  for (std::size_t i : order) {
    int s = slot_of[i];
    auto iv = place_field(slots[static_cast<std::size_t>(s)], variant, fields[i], target);
    if (!iv) return std::nullopt;
    out[i] = {s, *iv};
  }
  return out;
}

namespace {

struct Item {
  enum class Kind { Field, Block, Solve };
  Kind kind = Kind::Field;
  int variant = 0;
  int field = -1;          // Field
  FlattenedPacking block;  // Block
  SolveRequest request;    // Solve
  KindSet kinds = kAnyKind;
};

struct State {
  std::vector<SlotState> slots;
  std::vector<std::vector<FieldPlacement>> place;  // [variant][field]
};

class Solver {
 public:
  Solver(const MonoAdt& adt, const Target& target, const SolveOptions& options)
      : adt_(adt), target_(target), options_(options) {
    const int n = static_cast<int>(adt.variants.size());
    for (int v = 0; v < n; ++v) {
      const MonoVariant& mv = adt.variants[static_cast<std::size_t>(v)];
      fields_.push_back(normalize_fields(mv, target, options.nested));
      add_items(v, mv);
    }
  }

  LayoutSolution trivial() {
    if (auto s = special()) return *s;
    State st = empty_state();
    for (const auto& item : items_) {
      st.slots.push_back(fresh_slot());
      if (!place(st, item, static_cast<int>(st.slots.size()) - 1)) {
        throw Error(ErrorCode::Infeasible, "annotation on " + adt_.name + " does not fit one scalar",
                    adt_.pos);
      }
    }
    LayoutSolution sol = build(st);
    if (sol.variants.size() > 1) return append_tag_scalar(std::move(sol), target_);
    sol.tag = {TagSchemeKind::SingleVariant, -1, {}};
    sol.tree = DecisionTree{{{0, 0, 0, -1, -1}}};
    sol.score = score_layout(sol);
    return sol;
  }

  LayoutSolution solve() {
    if (auto s = special()) return *s;
    best_ = trivial();
    steps_ = 0;
    State st = empty_state();
    search(0, st);
    best_.steps = steps_;
    return best_;
  }

 private:
  void add_items(int v, const MonoVariant& mv) {
    std::set<std::string> annotated;
    if (mv.packing) {
      SizeContext ctx;
      ctx.delta = options_.packings;
      ctx.max_width = target_.max_scalar_width;
      const auto& fields = fields_[static_cast<std::size_t>(v)];
      for (const auto& f : fields) {
        if (!f.holds_ref()) ctx.gamma.emplace(f.name, f.width);
      }
      for (auto& entry : flatten_annotation(*mv.packing, ctx)) {
        Item item;
        item.variant = v;
        std::vector<std::string> names;
        int width = 0;
        if (auto* fp = std::get_if<FlattenedPacking>(&entry)) {
          item.kind = Item::Kind::Block;
          for (const auto& [name, iv] : fp->assignments) names.push_back(name);
          width = fp->width();
          item.block = std::move(*fp);
        } else {
          item.kind = Item::Kind::Solve;
          item.request = std::get<SolveRequest>(std::move(entry));
          for (const auto& it : item.request.items) {
            if (it.block) {
              for (const auto& [name, iv] : it.block->assignments) names.push_back(name);
            } else {
              names.push_back(it.field);
            }
          }
          width = item.request.width();
        }
        if (width == 0 && names.empty()) continue;
        for (const auto& name : names) {
          annotated.insert(name);
          item.kinds = item.kinds & field_kinds(v, name);
        }
        if (names.empty()) item.kinds = target_.kinds_for(width <= 32 ? TypeClass::Int32 : TypeClass::Int64);
        if (item.kinds.empty() || target_.capacity(item.kinds) < width) {
          std::string list;
          for (const auto& name : names) list += (list.empty() ? "" : ", ") + name;
          throw Error(ErrorCode::Infeasible,
                      "annotation on case " + mv.name + " of " + adt_.name +
                          " cannot be held by any single scalar (fields: " + list + ")",
                      mv.pos);
        }
        items_.push_back(std::move(item));
      }
    }
    const auto& fields = fields_[static_cast<std::size_t>(v)];
    std::vector<int> order;
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (!annotated.count(fields[i].name)) order.push_back(static_cast<int>(i));
    }
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return fields[static_cast<std::size_t>(a)].width > fields[static_cast<std::size_t>(b)].width;
    });
    for (int i : order) {
      Item item;
      item.variant = v;
      item.field = i;
      items_.push_back(std::move(item));
    }
  }

  KindSet field_kinds(int v, const std::string& name) const {
    for (const auto& f : fields_[static_cast<std::size_t>(v)]) {
      if (f.name == name) return f.kinds;
    }
    return kAnyKind;
  }

  int field_index(int v, const std::string& name) const {
    const auto& fs = fields_[static_cast<std::size_t>(v)];
    for (std::size_t i = 0; i < fs.size(); ++i) {
      if (fs[i].name == name) return static_cast<int>(i);
    }
    return -1;
  }

  std::optional<LayoutSolution> special() {
    const int n = static_cast<int>(adt_.variants.size());
    bool nullary = std::all_of(fields_.begin(), fields_.end(), [](const auto& f) { return f.empty(); });
    if (!nullary || !items_.empty()) return std::nullopt;
    LayoutSolution sol;
    sol.adt = adt_.name;
    for (int v = 0; v < n; ++v) sol.variants.push_back({adt_.variants[static_cast<std::size_t>(v)].name, {}, {}, {}});
    if (n <= 1) {
      sol.tag = {TagSchemeKind::SingleVariant, -1, {}};
      sol.tree = DecisionTree{{{0, 0, 0, -1, -1}}};
      return sol;
    }
    sol = append_tag_scalar(std::move(sol), target_);
    sol.scalars[0].tag_only = false;
    sol.tag.kind = TagSchemeKind::BareTagOnly;
    sol.score = score_layout(sol);
    return sol;
  }

  State empty_state() const {
    State st;
    for (const auto& f : fields_) st.place.emplace_back(f.size(), FieldPlacement{-1, {}});
    return st;
  }

  SlotState fresh_slot() const {
    SlotState s;
    s.kinds = kAnyKind;
    s.uses.resize(adt_.variants.size());
    return s;
  }

  bool place(State& st, const Item& item, int s) {
    SlotState& slot = st.slots[static_cast<std::size_t>(s)];
    auto& place = st.place[static_cast<std::size_t>(item.variant)];
    const auto& fields = fields_[static_cast<std::size_t>(item.variant)];
    switch (item.kind) {
      case Item::Kind::Field: {
        auto iv = place_field(slot, item.variant, fields[static_cast<std::size_t>(item.field)], target_);
        if (!iv) return false;
        place[static_cast<std::size_t>(item.field)] = {s, *iv};
        return true;
      }
      case Item::Kind::Block: {
        if (slot.uses[static_cast<std::size_t>(item.variant)].used()) return false;
        if (!place_block(slot, item.variant, item.block, item.kinds, 0, target_)) return false;
        for (const auto& [name, iv] : item.block.assignments) {
          place[static_cast<std::size_t>(field_index(item.variant, name))] = {s, iv};
        }
        slot.uses[static_cast<std::size_t>(item.variant)].closed = true;
        return true;
      }
      case Item::Kind::Solve: {
        if (slot.uses[static_cast<std::size_t>(item.variant)].used()) return false;
        SlotState trial = slot;
        trial.kinds = trial.kinds & item.kinds;
        if (trial.kinds.empty()) return false;
        std::vector<std::pair<int, FieldPlacement>> placed;
        for (const auto& it : item.request.items) {
          if (!it.block) {
            int fi = field_index(item.variant, it.field);
            auto iv = place_field(trial, item.variant, fields[static_cast<std::size_t>(fi)], target_);
            if (!iv) return false;
            placed.push_back({fi, {s, *iv}});
            continue;
          }
          const int cap = target_.capacity(trial.kinds);
          bool ok = false;
          for (int off = 0; off + it.block->width() <= cap && !ok; ++off) {
            ok = place_block(trial, item.variant, *it.block, item.kinds, off, target_);
            if (ok) {
              for (const auto& [name, iv] : it.block->assignments) {
                placed.push_back({field_index(item.variant, name), {s, {iv.offset + off, iv.width}}});
              }
            }
          }
          if (!ok) return false;
        }
        trial.uses[static_cast<std::size_t>(item.variant)].closed = true;
        slot = std::move(trial);
        for (const auto& [fi, p] : placed) place[static_cast<std::size_t>(fi)] = p;
        return true;
      }
    }
    return false;
  }

  void search(std::size_t index, const State& st) {
    if (steps_ >= options_.budget) return;
    if (static_cast<int>(st.slots.size()) > best_.score.num_scalars) return;
    if (index == items_.size()) {
      LayoutSolution sol = finish(build(st));
      if (sol.score < best_.score) best_ = std::move(sol);
      return;
    }
    const Item& item = items_[index];
    for (int s = 0; s <= static_cast<int>(st.slots.size()); ++s) {
      if (steps_ >= options_.budget) return;
      State next = st;
      if (s == static_cast<int>(st.slots.size())) {
        if (static_cast<int>(st.slots.size()) + 1 > best_.score.num_scalars) return;
        next.slots.push_back(fresh_slot());
      }
      if (!place(next, item, s)) continue;
      ++steps_;
      search(index + 1, next);
    }
  }

  LayoutSolution build(const State& st) const {
    LayoutSolution sol;
    sol.adt = adt_.name;
    const std::size_t n = adt_.variants.size();
    for (std::size_t v = 0; v < n; ++v) {
      sol.variants.push_back({adt_.variants[v].name, fields_[v], st.place[v], {}});
    }
    for (const auto& slot : st.slots) {
      ScalarSlot out;
      out.kinds = slot.kinds;
      const bool ref = slot.any_ref();
      out.width = ref ? target_.ref_width : slot.extent();
      auto kind = target_.choose_kind(slot.kinds, out.width);
      if (!kind) throw Error(ErrorCode::Internal, "slot kinds cannot hold the slot width");
      out.kind = *kind;
      for (std::size_t v = 0; v < n; ++v) {
        const SlotUse& u = slot.uses[v];
        out.ref_in.push_back(u.ref);
        BitPattern p(out.width);
        for (int b = 0; b < out.width; ++b) {
          std::uint64_t bit = std::uint64_t{1} << b;
          if (u.assigned & bit) {
            p[b] = PatBit::Assigned;
          } else if (u.one & bit) {
            p[b] = PatBit::One;
          } else if (u.zero & bit) {
            p[b] = PatBit::Zero;
          } else if (ref && !target_.ref_tagging && !u.ref) {
            p[b] = PatBit::Zero;  // null
          }
        }
        sol.variants[v].patterns.push_back(std::move(p));
      }
      sol.scalars.push_back(std::move(out));
    }
    return sol;
  }

  LayoutSolution finish(LayoutSolution sol) const {
    if (sol.variants.size() <= 1) {
      sol.tag = {TagSchemeKind::SingleVariant, -1, {}};
      sol.tree = DecisionTree{{{0, 0, 0, -1, -1}}};
      sol.score = score_layout(sol);
      return sol;
    }
    LayoutSolution tagged = place_explicit_tag(sol, target_);
    VariantPatterns pats = sol.patterns();
    if (auto tree = derive_decision_tree(pats)) {
      for (std::size_t v = 0; v < pats.size(); ++v) sol.variants[v].patterns = pats[v];
      sol.tag = {TagSchemeKind::DecisionTree, -1, {}};
      sol.tree = std::move(tree);
      sol.score = score_layout(sol);
      if (sol.score < tagged.score) return sol;
    }
    return tagged;
  }

  const MonoAdt& adt_;
  const Target& target_;
  const SolveOptions& options_;
  std::vector<std::vector<NormField>> fields_;
  std::vector<Item> items_;
  LayoutSolution best_;
  int steps_ = 0;
};

}  // namespace

LayoutSolution solve_layout(const MonoAdt& adt, const Target& target, const SolveOptions& options) {
  return Solver(adt, target, options).solve();
}

LayoutSolution trivial_layout(const MonoAdt& adt, const Target& target, const SolveOptions& options) {
  return Solver(adt, target, options).trivial();
}

}  // namespace adtlayout

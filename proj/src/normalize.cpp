#include "adtlayout/normalize.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "adtlayout/codec.hpp"

namespace adtlayout::ir {

namespace {

using Rep = std::vector<std::string>;  // one name, or the scalars of an unboxed ADT

bool is_unboxed(const Type& t, const Compilation& comp) {
  return (t.kind == Type::Kind::Adt || t.kind == Type::Kind::Nullable) && comp.unboxed(t.name);
}

Type scalar_type(const ScalarSlot& s) { return Type::intrep(s.width, s.kind); }

std::string sanitize(const std::string& s) {
  std::string out;
  for (char c : s) out += std::isalnum(static_cast<unsigned char>(c)) ? c : '_';
  return out;
}

class Lowering {
 public:
  Lowering(const Compilation& comp, const NormalizeOptions& options) : comp_(comp), options_(options) {}

  std::set<std::string> eq_needed;

  Function function(const Function& f, const Program& pre) {
    auto types = typecheck_function(f, pre, comp_, Stage::Pre);
    types_ = &types;
    reps_.clear();
    Function out;
    out.name = f.name;
    out.ret = normalize_type(f.ret, comp_);
    for (const auto& p : f.params) out.params.push_back({p.name, normalize_type(p.type, comp_)});
    out.blocks.resize(f.blocks.size());
    for (std::size_t b = 0; b < f.blocks.size(); ++b) {
      const Block& src = f.blocks[b];
      Block& dst = out.blocks[b];
      dst.label = src.label;
      out_ = &dst.instrs;
      if (b == 0) {
        for (const auto& p : f.params) reps_[p.name] = unpack(p.name, p.type);
      }
      for (const auto& in : src.instrs) {
        lower(in);
        keep_name(in, types);
      }
      dst.term = src.term;
      if (src.term.kind == Terminator::Kind::Ret) {
        dst.term.value = pack(types.at(src.term.value), rep(src.term.value));
      } else if (!src.term.value.empty()) {
        dst.term.value = rep(src.term.value).at(0);
      }
    }
    types_ = nullptr;
    return out;
  }

  Function equality(const std::string& adt) {
    const bool unboxed = comp_.unboxed(adt);
    const MonoAdt& mono = comp_.at(adt).adt;
    const std::size_t n = mono.variants.size();
    const Type t = Type::adt(adt);
    Function f;
    f.name = equality_fn_name(adt);
    f.params = {{"%a", normalize_type(t, comp_)}, {"%b", normalize_type(t, comp_)}};
    f.ret = Type::boolean();
    f.blocks.resize(n + 3);
    f.blocks[0].label = "entry";
    f.blocks[1].label = "same_case";
    for (std::size_t v = 0; v < n; ++v) f.blocks[v + 2].label = "case_" + std::to_string(v);
    f.blocks[n + 2].label = "differ";

    out_ = &f.blocks[0].instrs;
    Rep ra, rb;
    std::string ta, tb;
    if (unboxed) {
      ra = unpack("%a", t);
      rb = unpack("%b", t);
      ta = tag_of(adt, ra);
      tb = tag_of(adt, rb);
    } else {
      ta = emit(adt_instr(Op::GetTag, adt, -1, {"%a"}));
      tb = emit(adt_instr(Op::GetTag, adt, -1, {"%b"}));
    }
    std::string c = eq_scalar(tag_type(), ta, tb);
    f.blocks[0].term = {Terminator::Kind::Br, c, {"same_case", "differ"}, {}};

    Terminator sw{Terminator::Kind::Switch, ta, {"differ"}, {}};
    for (std::size_t v = 0; v < n; ++v) {
      sw.cases.push_back(v);
      sw.targets.push_back("case_" + std::to_string(v));
    }
    f.blocks[1].term = sw;

    for (std::size_t v = 0; v < n; ++v) {
      out_ = &f.blocks[v + 2].instrs;
      const MonoVariant& mv = mono.variants[v];
      std::vector<Rep> fa, fb;
      if (unboxed) {
        for (std::size_t k = 0; k < mv.fields.size(); ++k) {
          fa.push_back(read_field(adt, static_cast<int>(v), k, ra));
          fb.push_back(read_field(adt, static_cast<int>(v), k, rb));
        }
      } else if (!mv.fields.empty()) {
        fa = boxed_fields(adt, static_cast<int>(v), "%a");
        fb = boxed_fields(adt, static_cast<int>(v), "%b");
      }
      std::string r = konst(Type::boolean(), 1);
      for (std::size_t k = 0; k < mv.fields.size(); ++k) {
        std::string e = eq_rep(from_concrete(mv.fields[k].type), fa[k], fb[k]);
        r = binop(Op::And, r, e);
      }
      f.blocks[v + 2].term = {Terminator::Kind::Ret, r, {}, {}};
    }
    out_ = &f.blocks[n + 2].instrs;
    f.blocks[n + 2].term = {Terminator::Kind::Ret, konst(Type::boolean(), 0), {}, {}};
    return f;
  }

 private:
  // Non-ADT results keep their pre-stage name.
  void keep_name(const Instr& in, const std::map<std::string, Type>& types) {
    if (in.dest.empty() || is_unboxed(types.at(in.dest), comp_)) return;
    Rep& r = reps_.at(in.dest);
    if (r.at(0) == in.dest) return;
    if (out_->empty() || out_->back().dest != r[0]) throw Error(ErrorCode::Internal, "lost the result of " + in.dest);
    out_->back().dest = in.dest;
    r = {in.dest};
  }

  const LayoutSolution& layout(const std::string& adt) const { return *comp_.at(adt).layout; }

  const Rep& rep(const std::string& name) const {
    auto it = reps_.find(name);
    if (it == reps_.end()) throw Error(ErrorCode::Internal, "no normalized form for " + name);
    return it->second;
  }

  std::string fresh() { return "%." + std::to_string(next_++); }

  std::string emit(Instr in) {
    if (in.dest.empty() && in.op != Op::Assert) in.dest = fresh();
    out_->push_back(in);
    return in.dest;
  }

  static Instr adt_instr(Op op, const std::string& adt, int variant, std::vector<std::string> args,
                         const Compilation* comp = nullptr) {
    Instr in;
    in.op = op;
    in.adt = adt;
    in.variant = variant;
    if (comp && variant >= 0) in.case_name = comp->at(adt).adt.variants.at(static_cast<std::size_t>(variant)).name;
    in.args = std::move(args);
    return in;
  }

  std::string konst(const Type& t, std::uint64_t v) {
    Instr in;
    in.op = Op::Const;
    in.type = t;
    in.imm = v & low_mask(t.width);
    return emit(in);
  }

  std::string binop(Op op, const std::string& a, const std::string& b) {
    Instr in;
    in.op = op;
    in.args = {a, b};
    return emit(in);
  }

  std::string typed(Op op, const Type& t, std::vector<std::string> args) {
    Instr in;
    in.op = op;
    in.type = t;
    in.args = std::move(args);
    return emit(in);
  }

  std::string eq_scalar(const Type& t, const std::string& a, const std::string& b) { return typed(Op::Eq, t, {a, b}); }

  std::string call(const std::string& callee, std::vector<std::string> args) {
    Instr in;
    in.op = Op::Call;
    in.callee = callee;
    in.args = std::move(args);
    return emit(in);
  }

  std::string pack(const Type& pre, const Rep& r) {
    if (!is_unboxed(pre, comp_)) return r.at(0);
    Instr in;
    in.op = Op::Tuple;
    in.args = r;
    return emit(in);
  }

  Rep unpack(const std::string& name, const Type& pre) {
    if (!is_unboxed(pre, comp_)) return {name};
    Rep out;
    for (std::size_t s = 0; s < layout(pre.name).scalars.size(); ++s) {
      Instr in;
      in.op = Op::Project;
      in.imm = s;
      in.args = {name};
      out.push_back(emit(in));
    }
    return out;
  }

  // (scalar >> offset) & mask, skipping the steps that are no-ops.
  std::string read_bits(const std::string& s, const ScalarSlot& slot, Interval iv, bool faulty) {
    int off = iv.offset;
    if (faulty && options_.inject_fault && off > 0) ++off;
    Type st = scalar_type(slot);
    std::string v = s;
    if (off > 0) v = binop(Op::Shr, v, konst(st, static_cast<std::uint64_t>(off)));
    if (off + iv.width < slot.width) v = binop(Op::And, v, konst(st, low_mask(iv.width)));
    return v;
  }

  const NormField* find_norm(const VariantLayout& vl, const std::string& source, int sub, FieldPlacement& pl) const {
    for (std::size_t j = 0; j < vl.fields.size(); ++j) {
      if (vl.fields[j].source == source && vl.fields[j].sub == sub) {
        pl = vl.placements[j];
        return &vl.fields[j];
      }
    }
    return nullptr;
  }

  Rep read_field(const std::string& adt, int v, std::size_t k, const Rep& sc) {
    const LayoutSolution& sol = layout(adt);
    const VariantLayout& vl = sol.variants.at(static_cast<std::size_t>(v));
    const MonoField& mf = comp_.at(adt).adt.variants.at(static_cast<std::size_t>(v)).fields.at(k);
    Type pre = from_concrete(mf.type);
    FieldPlacement pl;
    if (is_unboxed(pre, comp_)) {
      const LayoutSolution& inner = layout(pre.name);
      Rep out;
      for (std::size_t s = 0; s < inner.scalars.size(); ++s) {
        if (!find_norm(vl, mf.name, static_cast<int>(s), pl)) throw Error(ErrorCode::Internal, "unplaced field " + mf.name);
        std::string bits = read_bits(sc.at(static_cast<std::size_t>(pl.scalar)), sol.scalars[static_cast<std::size_t>(pl.scalar)],
                                     pl.interval, true);
        out.push_back(typed(Op::FromBits, scalar_type(inner.scalars[s]), {bits}));
      }
      return out;
    }
    if (!find_norm(vl, mf.name, 0, pl)) throw Error(ErrorCode::Internal, "unplaced field " + mf.name);
    std::string bits = read_bits(sc.at(static_cast<std::size_t>(pl.scalar)), sol.scalars[static_cast<std::size_t>(pl.scalar)],
                                 pl.interval, true);
    return {typed(Op::FromBits, normalize_type(pre, comp_), {bits})};
  }

  Rep assemble(const std::string& adt, int v, const std::vector<Rep>& fields) {
    const LayoutSolution& sol = layout(adt);
    const VariantLayout& vl = sol.variants.at(static_cast<std::size_t>(v));
    const MonoVariant& mv = comp_.at(adt).adt.variants.at(static_cast<std::size_t>(v));
    std::vector<std::uint64_t> ones = encode_variant(sol, v, std::vector<std::uint64_t>(vl.fields.size(), 0));
    Rep acc;
    for (std::size_t s = 0; s < sol.scalars.size(); ++s) acc.push_back(konst(scalar_type(sol.scalars[s]), ones[s]));
    for (std::size_t j = 0; j < vl.fields.size(); ++j) {
      const NormField& nf = vl.fields[j];
      std::size_t k = 0;
      while (k < mv.fields.size() && mv.fields[k].name != nf.source) ++k;
      const std::string& x = fields.at(k).at(static_cast<std::size_t>(nf.sub));
      const FieldPlacement& pl = vl.placements[j];
      auto s = static_cast<std::size_t>(pl.scalar);
      Type st = scalar_type(sol.scalars[s]);
      std::string b = typed(Op::Bits, st, {x});
      if (pl.interval.offset > 0) b = binop(Op::Shl, b, konst(st, static_cast<std::uint64_t>(pl.interval.offset)));
      acc[s] = binop(Op::Or, acc[s], b);
    }
    return acc;
  }

  std::string tree_node(const LayoutSolution& sol, const Rep& sc, int i) {
    const DecisionTree::Node& n = sol.tree->nodes.at(static_cast<std::size_t>(i));
    if (n.leaf()) return konst(tag_type(), static_cast<std::uint64_t>(n.variant));
    auto s = static_cast<std::size_t>(n.scalar);
    std::string bit = read_bits(sc.at(s), sol.scalars[s], {n.bit, 1}, false);
    std::string c = typed(Op::FromBits, Type::boolean(), {bit});
    std::string one = tree_node(sol, sc, n.one);
    std::string zero = tree_node(sol, sc, n.zero);
    Instr sel;
    sel.op = Op::Select;
    sel.args = {c, one, zero};
    return emit(sel);
  }

  std::string tag_of(const std::string& adt, const Rep& sc) {
    const LayoutSolution& sol = layout(adt);
    switch (sol.tag.kind) {
      case TagSchemeKind::SingleVariant: return konst(tag_type(), 0);
      case TagSchemeKind::ExplicitTag:
      case TagSchemeKind::BareTagOnly: {
        auto s = static_cast<std::size_t>(sol.tag.scalar);
        return typed(Op::FromBits, tag_type(), {read_bits(sc.at(s), sol.scalars[s], sol.tag.interval, false)});
      }
      case TagSchemeKind::DecisionTree: return tree_node(sol, sc, 0);
    }
    throw Error(ErrorCode::Internal, "unknown tag scheme");
  }

  // Field values of a boxed case read through `contents`.
  std::vector<Rep> boxed_fields(const std::string& adt, int v, const std::string& rec) {
    const MonoVariant& mv = comp_.at(adt).adt.variants.at(static_cast<std::size_t>(v));
    std::string x = emit(adt_instr(Op::Contents, adt, v, {rec}, &comp_));
    std::vector<Rep> out;
    if (mv.fields.size() == 1) {
      out.push_back(unpack(x, from_concrete(mv.fields[0].type)));
      return out;
    }
    for (std::size_t k = 0; k < mv.fields.size(); ++k) {
      Instr p;
      p.op = Op::Project;
      p.imm = k;
      p.args = {x};
      out.push_back(unpack(emit(p), from_concrete(mv.fields[k].type)));
    }
    return out;
  }

  std::string eq_rep(const Type& pre, const Rep& a, const Rep& b) {
    if (pre.kind == Type::Kind::Adt) {
      eq_needed.insert(pre.name);
      return call(equality_fn_name(pre.name), {pack(pre, a), pack(pre, b)});
    }
    if (pre.kind == Type::Kind::Tuple || pre.kind == Type::Kind::Nullable) {
      throw Error(ErrorCode::Type, "no equality on " + pre.str());
    }
    return eq_scalar(normalize_type(pre, comp_), a.at(0), b.at(0));
  }

  Rep default_rep(const Type& pre, std::vector<std::string>& stack) {
    switch (pre.kind) {
      case Type::Kind::Int:
      case Type::Kind::Float:
      case Type::Kind::IntRep: return {konst(pre, 0)};
      case Type::Kind::Class: {
        Instr in;
        in.op = Op::Null;
        in.type = pre;
        return {emit(in)};
      }
      case Type::Kind::Tuple: {
        Instr in;
        in.op = Op::Tuple;
        for (const auto& e : pre.elems) in.args.push_back(pack(e, default_rep(e, stack)));
        return {emit(in)};
      }
      case Type::Kind::Nullable:
      case Type::Kind::Adt: {
        for (const auto& s : stack) {
          if (s == pre.name) throw Error(ErrorCode::Type, "the default value of " + pre.name + " is infinite");
        }
        stack.push_back(pre.name);
        const MonoVariant& mv = comp_.at(pre.name).adt.variants.at(0);
        std::vector<Rep> fields;
        for (const auto& f : mv.fields) fields.push_back(default_rep(from_concrete(f.type), stack));
        stack.pop_back();
        if (comp_.unboxed(pre.name)) return assemble(pre.name, 0, fields);
        Instr in = adt_instr(Op::Alloc, pre.name, 0, {}, &comp_);
        for (std::size_t k = 0; k < fields.size(); ++k) in.args.push_back(pack(from_concrete(mv.fields[k].type), fields[k]));
        return {emit(in)};
      }
    }
    return {};
  }

  Rep default_rep(const Type& pre) {
    std::vector<std::string> stack;
    return default_rep(pre, stack);
  }

  void lower(const Instr& in) {
    const auto& types = *types_;
    auto arg_rep = [&](std::size_t i) -> const Rep& { return rep(in.args[i]); };
    auto arg_type = [&](std::size_t i) -> const Type& { return types.at(in.args[i]); };
    auto copy = [&]() {
      Instr c = in;
      for (auto& a : c.args) a = rep(a).at(0);
      emit(c);
      if (!in.dest.empty()) reps_[in.dest] = {in.dest};
    };
    const Type* dest_type = in.dest.empty() ? nullptr : &types.at(in.dest);
    const bool unboxed_adt = !in.adt.empty() && comp_.unboxed(in.adt);

    switch (in.op) {
      case Op::Null:
        if (in.type.kind == Type::Kind::Adt && unboxed_adt) {
          reps_[in.dest] = default_rep(Type::adt(in.adt));
          return;
        }
        copy();
        return;
      case Op::Alloc: {
        const MonoVariant& mv = comp_.at(in.adt).adt.variants.at(static_cast<std::size_t>(in.variant));
        if (unboxed_adt) {
          std::vector<Rep> fields;
          for (std::size_t k = 0; k < in.args.size(); ++k) fields.push_back(arg_rep(k));
          reps_[in.dest] = assemble(in.adt, in.variant, fields);
          return;
        }
        Instr c = in;
        for (std::size_t k = 0; k < in.args.size(); ++k) c.args[k] = pack(from_concrete(mv.fields[k].type), arg_rep(k));
        emit(c);
        reps_[in.dest] = {in.dest};
        return;
      }
      case Op::Contents: {
        if (!unboxed_adt) {
          copy();
          reps_[in.dest] = unpack(in.dest, *dest_type);
          return;
        }
        const Rep& sc = arg_rep(0);
        std::string tag = tag_of(in.adt, sc);
        std::string ok = eq_scalar(tag_type(), tag, konst(tag_type(), static_cast<std::uint64_t>(in.variant)));
        Instr a;
        a.op = Op::Assert;
        a.args = {ok};
        emit(a);
        const MonoVariant& mv = comp_.at(in.adt).adt.variants.at(static_cast<std::size_t>(in.variant));
        if (mv.fields.size() == 1) {
          reps_[in.dest] = read_field(in.adt, in.variant, 0, sc);
          return;
        }
        Instr t;
        t.op = Op::Tuple;
        t.dest = in.dest;
        for (std::size_t k = 0; k < mv.fields.size(); ++k) {
          t.args.push_back(pack(from_concrete(mv.fields[k].type), read_field(in.adt, in.variant, k, sc)));
        }
        emit(t);
        reps_[in.dest] = {in.dest};
        return;
      }
      case Op::GetTag:
        if (unboxed_adt) {
          reps_[in.dest] = {tag_of(in.adt, arg_rep(0))};
          return;
        }
        copy();
        return;
      case Op::ReplaceNull: {
        if (unboxed_adt) {
          reps_[in.dest] = arg_rep(0);
          return;
        }
        Instr isnull;
        isnull.op = Op::IsNull;
        isnull.args = {arg_rep(0).at(0)};
        std::string c = emit(isnull);
        std::string d = default_rep(Type::adt(in.adt)).at(0);
        Instr sel;
        sel.op = Op::Select;
        sel.dest = in.dest;
        sel.args = {c, d, arg_rep(0).at(0)};
        emit(sel);
        reps_[in.dest] = {in.dest};
        return;
      }
      case Op::Eq:
        if (in.type.kind == Type::Kind::Adt) {
          reps_[in.dest] = {eq_rep(in.type, arg_rep(0), arg_rep(1))};
          return;
        }
        copy();
        return;
      case Op::Tuple: {
        Instr t = in;
        for (std::size_t k = 0; k < in.args.size(); ++k) t.args[k] = pack(arg_type(k), arg_rep(k));
        emit(t);
        reps_[in.dest] = {in.dest};
        return;
      }
      case Op::Project:
      case Op::Call: {
        Instr c = in;
        for (std::size_t k = 0; k < in.args.size(); ++k) c.args[k] = pack(arg_type(k), arg_rep(k));
        emit(c);
        reps_[in.dest] = unpack(in.dest, *dest_type);
        return;
      }
      case Op::Select: {
        if (!is_unboxed(*dest_type, comp_)) {
          copy();
          return;
        }
        const std::string& c = arg_rep(0).at(0);
        const Rep& a = arg_rep(1);
        const Rep& b = arg_rep(2);
        Rep out;
        for (std::size_t s = 0; s < a.size(); ++s) {
          Instr sel;
          sel.op = Op::Select;
          sel.args = {c, a[s], b[s]};
          out.push_back(emit(sel));
        }
        reps_[in.dest] = out;
        return;
      }
      case Op::IsNull:
        if (is_unboxed(arg_type(0), comp_)) throw Error(ErrorCode::Type, "isnull on unboxed " + arg_type(0).str());
        copy();
        return;
      default: copy(); return;
    }
  }

  const Compilation& comp_;
  const NormalizeOptions& options_;
  const std::map<std::string, Type>* types_ = nullptr;
  std::map<std::string, Rep> reps_;
  std::vector<Instr>* out_ = nullptr;
  int next_ = 0;
};

}  // namespace

Type normalize_type(const Type& t, const Compilation& comp) {
  switch (t.kind) {
    case Type::Kind::Tuple: {
      std::vector<Type> e;
      for (const auto& x : t.elems) e.push_back(normalize_type(x, comp));
      return Type::tuple(std::move(e));
    }
    case Type::Kind::Adt:
    case Type::Kind::Nullable: {
      if (!comp.adts.count(t.name)) throw Error(ErrorCode::Type, "no layout for " + t.name);
      if (!comp.unboxed(t.name)) return Type::adt(t.name);
      std::vector<Type> e;
      for (const auto& s : comp.at(t.name).layout->scalars) e.push_back(scalar_type(s));
      return Type::tuple(std::move(e));
    }
    default: return t;
  }
}

std::string equality_fn_name(const std::string& adt) { return "eq." + sanitize(adt); }

Function gen_equality_fn(const std::string& adt, const Compilation& comp, const NormalizeOptions& options) {
  Lowering l(comp, options);
  return l.equality(adt);
}

Program normalize_program(const Program& pre, const Compilation& comp, const NormalizeOptions& options) {
  Lowering l(comp, options);
  Program out;
  for (const auto& f : pre.functions) out.functions.push_back(l.function(f, pre));
  std::set<std::string> done;
  while (true) {
    auto it = std::find_if(l.eq_needed.begin(), l.eq_needed.end(), [&](const std::string& a) { return !done.count(a); });
    if (it == l.eq_needed.end()) break;
    std::string adt = *it;
    done.insert(adt);
    out.functions.push_back(l.equality(adt));
  }
  return out;
}

// ---------------------------------------------------------------- live records

LiveRecordFlattener::LiveRecordFlattener(const Compilation& comp, const Heap& pre, Heap& post)
    : comp_(comp), pre_(pre), post_(post) {}

std::vector<std::uint64_t> LiveRecordFlattener::encode(const Object& o) {
  const LayoutSolution& sol = *comp_.at(o.type).layout;
  const VariantLayout& vl = sol.variants.at(static_cast<std::size_t>(o.variant));
  const MonoVariant& mv = comp_.at(o.type).adt.variants.at(static_cast<std::size_t>(o.variant));
  std::vector<std::uint64_t> bits;
  for (const auto& nf : vl.fields) {
    std::size_t k = 0;
    while (k < mv.fields.size() && mv.fields[k].name != nf.source) ++k;
    Type ft = from_concrete(mv.fields.at(k).type);
    Value v = flatten(o.fields.at(k), ft);
    if (v.kind == Value::Kind::Tuple) {
      bits.push_back(v.elems.at(static_cast<std::size_t>(nf.sub)).bits);
    } else if (v.kind == Value::Kind::Ref) {
      bits.push_back(v.bits);
    } else {
      bits.push_back(truncate_bits(v.bits, nf.width));
    }
  }
  return encode_variant(sol, o.variant, bits);
}

Value LiveRecordFlattener::flatten(const Value& v, const Type& t) {
  switch (t.kind) {
    case Type::Kind::Int:
    case Type::Kind::Float:
    case Type::Kind::IntRep: return v;
    case Type::Kind::Tuple: {
      std::vector<Value> e;
      for (std::size_t i = 0; i < t.elems.size(); ++i) e.push_back(flatten(v.elems.at(i), t.elems[i]));
      return Value::tuple(std::move(e));
    }
    case Type::Kind::Class: {
      if (v.bits == 0) return v;
      auto it = ids_.find(v.bits);
      if (it != ids_.end()) return Value::ref(it->second);
      std::uint64_t id = post_.alloc(pre_.at(v.bits));
      ids_[v.bits] = id;
      return Value::ref(id);
    }
    case Type::Kind::Adt:
    case Type::Kind::Nullable: {
      if (v.bits == 0) {
        if (comp_.unboxed(t.name)) throw Error(ErrorCode::Type, "null " + t.name + " has no flattened form");
        return v;
      }
      const Object& o = pre_.at(v.bits);
      if (comp_.unboxed(t.name)) {
        std::vector<Value> e;
        for (auto s : encode(o)) e.push_back(Value::of_bits(s));
        return Value::tuple(std::move(e));
      }
      auto it = ids_.find(v.bits);
      if (it != ids_.end()) return Value::ref(it->second);
      const MonoVariant& mv = comp_.at(t.name).adt.variants.at(static_cast<std::size_t>(o.variant));
      Object copy{o.type, o.variant, {}};
      for (std::size_t k = 0; k < mv.fields.size(); ++k) copy.fields.push_back(flatten(o.fields[k], from_concrete(mv.fields[k].type)));
      std::uint64_t id = post_.alloc(std::move(copy));
      ids_[v.bits] = id;
      return Value::ref(id);
    }
  }
  return v;
}

}  // namespace adtlayout::ir

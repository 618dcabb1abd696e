#include "adtlayout/progen.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <sstream>

#include "adtlayout/codec.hpp"

namespace adtlayout::ir {

namespace {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : g_(seed) {}
  std::uint64_t bits() { return g_(); }
  int below(int n) { return n <= 1 ? 0 : static_cast<int>(g_() % static_cast<std::uint64_t>(n)); }
  bool chance(int pct) { return below(100) < pct; }
  template <class T>
  const T& pick(const std::vector<T>& v) { return v[static_cast<std::size_t>(below(static_cast<int>(v.size())))]; }

 private:
  std::mt19937_64 g_;
};

bool finite_default(const Compilation& comp, const std::string& adt, std::vector<std::string>& stack) {
  if (std::find(stack.begin(), stack.end(), adt) != stack.end()) return false;
  stack.push_back(adt);
  bool ok = true;
  for (const auto& f : comp.at(adt).adt.variants.at(0).fields) {
    if (f.type.kind == ConcreteType::Kind::Adt && !finite_default(comp, f.type.name, stack)) ok = false;
  }
  stack.pop_back();
  return ok;
}

void closure(const Compilation& comp, const std::string& adt, std::set<std::string>& out) {
  if (!out.insert(adt).second) return;
  for (const auto& v : comp.at(adt).adt.variants) {
    for (const auto& f : v.fields) {
      if (f.type.kind == ConcreteType::Kind::Adt) closure(comp, f.type.name, out);
    }
  }
}

std::uint64_t interesting(Rng& rng, int width) {
  switch (rng.below(5)) {
    case 0: return 0;
    case 1: return 1;
    case 2: return low_mask(width);
    case 3: return std::uint64_t{1} << (width - 1);
    default: return rng.bits() & low_mask(width);
  }
}

struct Entry {
  std::string name;
  Type type;
  int variant = -1;  // known case of an ADT value
};

class Generator {
 public:
  Generator(const Compilation& comp, std::vector<std::string> adts, Rng& rng, const GenOptions& options)
      : comp_(comp), adts_(std::move(adts)), rng_(rng), options_(options) {}

  Program program() {
    Program p;
    Function helper;
    if (rng_.chance(40)) helper = make_helper();
    p.functions.push_back(make_main());
    if (!helper.name.empty()) p.functions.push_back(std::move(helper));
    return p;
  }

  int count() const { return count_; }

 private:
  std::string add(Instr in, const Type& t, int variant = -1) {
    in.dest = "%v" + std::to_string(next_++);
    block_->instrs.push_back(in);
    pool_.push_back({in.dest, t, variant});
    ++count_;
    return in.dest;
  }

  Type random_adt() { return Type::adt(rng_.pick(adts_)); }

  const Entry* find_entry(const Type& t) {
    std::vector<const Entry*> m;
    for (const auto& e : pool_) {
      if (e.type == t) m.push_back(&e);
    }
    return m.empty() ? nullptr : rng_.pick(m);
  }

  const Entry* adt_entry() {
    std::vector<const Entry*> m;
    for (const auto& e : pool_) {
      if (e.type.kind == Type::Kind::Adt) m.push_back(&e);
    }
    return m.empty() ? nullptr : rng_.pick(m);
  }

  std::string produce(const Type& t, int depth) {
    if (const Entry* e = find_entry(t); e && rng_.chance(55)) return e->name;
    return create(t, depth);
  }

  std::string create(const Type& t, int depth) {
    Instr in;
    switch (t.kind) {
      case Type::Kind::Int:
      case Type::Kind::IntRep:
        in.op = Op::Const;
        in.type = t;
        in.imm = interesting(rng_, t.width);
        return add(in, t);
      case Type::Kind::Float: {
        static const std::uint64_t f32[] = {0, 0x3f800000, 0x80000000, 0x7fc00000, 0xc0490fdb};
        static const std::uint64_t f64[] = {0, 0x3ff0000000000000, 0x8000000000000000, 0x7ff8000000000000};
        in.op = Op::Const;
        in.type = t;
        if (rng_.chance(30)) {
          in.imm = rng_.bits() & low_mask(t.width);
        } else {
          in.imm = t.width == 32 ? f32[rng_.below(5)] : f64[rng_.below(4)];
        }
        return add(in, t);
      }
      case Type::Kind::Class:
        in.op = rng_.chance(60) ? Op::New : Op::Null;
        in.type = t;
        return add(in, t);
      case Type::Kind::Nullable:
        in.op = Op::Null;
        in.type = Type::adt(t.name);
        in.adt = t.name;
        return add(in, t);
      case Type::Kind::Adt: {
        const MonoAdt& a = comp_.at(t.name).adt;
        if (depth >= 2 || rng_.chance(20)) {
          std::string n = create(Type::nullable(t.name), depth);
          Instr r;
          r.op = Op::ReplaceNull;
          r.adt = t.name;
          r.args = {n};
          return add(r, t, 0);
        }
        int v = rng_.below(static_cast<int>(a.variants.size()));
        const MonoVariant& mv = a.variants[static_cast<std::size_t>(v)];
        in.op = Op::Alloc;
        in.adt = t.name;
        in.variant = v;
        in.case_name = mv.name;
        for (const auto& f : mv.fields) in.args.push_back(produce(from_concrete(f.type), depth + 1));
        return add(in, t, v);
      }
      case Type::Kind::Tuple: {
        in.op = Op::Tuple;
        for (const auto& e : t.elems) in.args.push_back(produce(e, depth + 1));
        return add(in, t);
      }
    }
    return {};
  }

  void contents_of(const Entry& e, bool wrong_ok) {
    const MonoAdt& a = comp_.at(e.type.name).adt;
    std::vector<int> with_fields;
    for (std::size_t v = 0; v < a.variants.size(); ++v) {
      if (!a.variants[v].fields.empty()) with_fields.push_back(static_cast<int>(v));
    }
    if (with_fields.empty()) return;
    int v = rng_.pick(with_fields);
    if (e.variant >= 0 && a.variants[static_cast<std::size_t>(e.variant)].fields.empty() && rng_.chance(75)) return;
    bool known = e.variant >= 0 && !a.variants[static_cast<std::size_t>(e.variant)].fields.empty();
    if (known && !(wrong_ok && rng_.chance(12))) v = e.variant;
    const MonoVariant& mv = a.variants[static_cast<std::size_t>(v)];
    Instr in;
    in.op = Op::Contents;
    in.adt = e.type.name;
    in.variant = v;
    in.case_name = mv.name;
    in.args = {e.name};
    Type rt = contents_type(mv);
    std::string x = add(in, rt);
    if (rt.kind == Type::Kind::Tuple) {
      Instr p;
      p.op = Op::Project;
      p.imm = static_cast<std::uint64_t>(rng_.below(static_cast<int>(rt.elems.size())));
      p.args = {x};
      add(p, rt.elems[p.imm]);
    }
  }

  void statement() {
    Instr in;
    switch (rng_.below(11)) {
      case 0:
      case 1: create(random_adt(), 0); return;
      case 2: {
        const Entry* e = adt_entry();
        std::string x = e ? e->name : create(random_adt(), 0);
        in.op = Op::GetTag;
        in.adt = e ? e->type.name : pool_.back().type.name;
        in.args = {x};
        add(in, tag_type());
        return;
      }
      case 3:
      case 4: {
        const Entry* e = adt_entry();
        if (!e) {
          create(random_adt(), 0);
          e = &pool_.back();
        }
        Entry copy = *e;
        contents_of(copy, true);
        return;
      }
      case 5: {
        std::vector<Type> types;
        for (const auto& e : pool_) {
          if (e.type.kind != Type::Kind::Nullable && e.type.kind != Type::Kind::Tuple) types.push_back(e.type);
        }
        Type t = types.empty() || rng_.chance(40) ? random_adt() : rng_.pick(types);
        in.op = Op::Eq;
        in.type = t;
        std::string a = produce(t, 1);
        std::string b = produce(t, 1);
        in.args = {a, b};
        add(in, Type::boolean());
        return;
      }
      case 6: {
        Type t = random_adt();
        std::string n = create(Type::nullable(t.name), 0);
        in.op = Op::ReplaceNull;
        in.adt = t.name;
        in.args = {n};
        add(in, t, 0);
        return;
      }
      case 7:
      case 8: {
        std::vector<const Entry*> ints;
        for (const auto& e : pool_) {
          if (e.type.kind == Type::Kind::Int) ints.push_back(&e);
        }
        if (ints.empty()) return;
        Entry a = *rng_.pick(ints);
        static const Op ops[] = {Op::Add, Op::Sub, Op::And, Op::Or, Op::Xor, Op::Shl, Op::Shr, Op::Lt};
        in.op = ops[rng_.below(8)];
        std::string b = produce(a.type, 1);
        in.args = {a.name, b};
        add(in, in.op == Op::Lt ? Type::boolean() : a.type);
        return;
      }
      case 9: {
        std::vector<Type> types;
        for (const auto& e : pool_) {
          if (e.type.kind != Type::Kind::Tuple) types.push_back(e.type);
        }
        if (types.empty()) return;
        Type t = rng_.pick(types);
        std::string c = produce(Type::boolean(), 1);
        std::string a = produce(t, 1);
        std::string b = produce(t, 1);
        in.op = Op::Select;
        in.args = {c, a, b};
        add(in, t);
        return;
      }
      case 10: {
        if (helper_.empty()) {
          Type t = random_adt();
          std::string a = produce(t, 1);
          std::string b = produce(Type::integer(32), 1);
          in.op = Op::Tuple;
          in.args = {a, b};
          std::string x = add(in, Type::tuple({t, Type::integer(32)}));
          Instr p;
          p.op = Op::Project;
          p.imm = 0;
          p.args = {x};
          add(p, t);
          return;
        }
        in.op = Op::Call;
        in.callee = helper_;
        for (const auto& pt : helper_params_) in.args.push_back(produce(pt, 1));
        add(in, helper_ret_);
        return;
      }
    }
  }

  void ret(Block& b, const std::vector<Type>& types) {
    block_ = &b;
    Instr in;
    in.op = Op::Tuple;
    for (const auto& t : types) {
      std::string n;
      for (auto it = pool_.rbegin(); it != pool_.rend(); ++it) {
        if (it->type == t) {
          n = it->name;
          break;
        }
      }
      in.args.push_back(n);
    }
    std::string r = add(in, Type::tuple(types));
    b.term = {Terminator::Kind::Ret, r, {}, {}};
  }

  Function make_helper() {
    Function f;
    f.name = "helper";
    f.blocks.resize(1);
    f.blocks[0].label = "entry";
    block_ = &f.blocks[0];
    pool_.clear();
    int np = 1 + rng_.below(2);
    for (int i = 0; i < np; ++i) {
      Type t = rng_.chance(70) ? random_adt() : Type::integer(32);
      std::string n = "%p" + std::to_string(i);
      f.params.push_back({n, t});
      pool_.push_back({n, t, -1});
    }
    int k = 1 + rng_.below(3);
    for (int i = 0; i < k; ++i) statement();
    f.ret = rng_.chance(50) ? f.params[0].type : random_adt();
    std::string r = produce(f.ret, 1);
    f.blocks[0].term = {Terminator::Kind::Ret, r, {}, {}};
    helper_ = f.name;
    for (const auto& p : f.params) helper_params_.push_back(p.type);
    helper_ret_ = f.ret;
    return f;
  }

  Function make_main() {
    Function f;
    f.name = "main";
    pool_.clear();
    std::vector<Block> blocks(1);
    blocks[0].label = "entry";
    block_ = &blocks[0];
    static const int widths[] = {8, 16, 32, 64};
    int np = 1 + rng_.below(3);
    for (int i = 0; i < np; ++i) {
      Type t = Type::integer(widths[rng_.below(4)], rng_.chance(30));
      std::string n = "%in" + std::to_string(i);
      f.params.push_back({n, t});
      pool_.push_back({n, t, -1});
    }
    const int limit = options_.max_instrs - 8;
    int k = 2 + rng_.below(8);
    for (int i = 0; i < k && count_ < limit; ++i) statement();

    std::vector<Type> candidates;
    for (const auto& e : pool_) {
      if (e.type.kind == Type::Kind::Int || e.type.kind == Type::Kind::Float) candidates.push_back(e.type);
    }
    std::vector<Type> rtypes;
    int nr = 1 + rng_.below(3);
    for (int i = 0; i < nr; ++i) rtypes.push_back(rng_.pick(candidates));
    f.ret = Type::tuple(rtypes);

    const Entry* scrut = adt_entry();
    const int split = rng_.below(10);
    if (scrut && split < 5) {
      Entry e = *scrut;
      const MonoAdt& a = comp_.at(e.type.name).adt;
      Instr g;
      g.op = Op::GetTag;
      g.adt = e.type.name;
      g.args = {e.name};
      std::string t = add(g, tag_type());
      Terminator sw{Terminator::Kind::Switch, t, {"other"}, {}};
      const auto saved = pool_;
      std::vector<Block> arms;
      for (std::size_t v = 0; v < a.variants.size(); ++v) {
        Block b;
        b.label = "case_" + std::to_string(v);
        sw.cases.push_back(v);
        sw.targets.push_back(b.label);
        arms.push_back(std::move(b));
      }
      blocks[0].term = sw;
      for (std::size_t v = 0; v < arms.size(); ++v) {
        pool_ = saved;
        block_ = &arms[v];
        Entry known = e;
        known.variant = static_cast<int>(v);
        contents_of(known, true);
        int m = rng_.below(3);
        for (int i = 0; i < m; ++i) statement();
        ret(arms[v], rtypes);
      }
      for (auto& b : arms) blocks.push_back(std::move(b));
      Block other;
      other.label = "other";
      other.term = {Terminator::Kind::Trap, "", {}, {}};
      blocks.push_back(std::move(other));
    } else if (split < 8) {
      std::string c = produce(Type::boolean(), 1);
      blocks[0].term = {Terminator::Kind::Br, c, {"yes", "no"}, {}};
      const auto saved = pool_;
      Block yes{"yes", {}, {}};
      Block no{"no", {}, {}};
      for (Block* b : {&yes, &no}) {
        pool_ = saved;
        block_ = b;
        int m = 1 + rng_.below(3);
        for (int i = 0; i < m; ++i) statement();
        ret(*b, rtypes);
      }
      blocks.push_back(std::move(yes));
      blocks.push_back(std::move(no));
    } else {
      ret(blocks[0], rtypes);
    }
    f.blocks = std::move(blocks);
    return f;
  }

  const Compilation& comp_;
  std::vector<std::string> adts_;
  Rng& rng_;
  const GenOptions& options_;
  Block* block_ = nullptr;
  std::vector<Entry> pool_;
  std::string helper_;
  std::vector<Type> helper_params_;
  Type helper_ret_;
  int next_ = 0;
  int count_ = 0;
};

}  // namespace

std::vector<std::string> generator_adts(const Compilation& comp) {
  std::vector<std::string> out;
  for (const auto& name : comp.report_order()) {
    std::vector<std::string> stack;
    std::set<std::string> cl;
    closure(comp, name, cl);
    bool ok = true;
    for (const auto& a : cl) {
      if (!finite_default(comp, a, stack)) ok = false;
    }
    if (ok) out.push_back(name);
  }
  return out;
}

GeneratedProgram generate_program(const Compilation& comp, std::uint64_t seed, const GenOptions& options) {
  Rng rng(seed);
  const auto candidates = generator_adts(comp);
  if (candidates.empty()) throw Error(ErrorCode::Type, "no ADT is usable by the program generator");
  while (true) {
    std::set<std::string> chosen;
    int tries = 1 + rng.below(3);
    for (int i = 0; i < tries; ++i) {
      std::set<std::string> cl = chosen;
      closure(comp, rng.pick(candidates), cl);
      if (static_cast<int>(cl.size()) <= options.max_adts) chosen = cl;
    }
    if (chosen.empty()) continue;
    GeneratedProgram g;
    g.adts.assign(chosen.begin(), chosen.end());
    Generator gen(comp, g.adts, rng, options);
    g.program = gen.program();
    if (gen.count() > options.max_instrs) continue;
    const Function& main = g.program.functions[0];
    for (int i = 0; i < options.inputs; ++i) {
      std::vector<Value> args;
      for (const auto& p : main.params) args.push_back(Value::of_bits(interesting(rng, p.type.width)));
      g.inputs.push_back(std::move(args));
    }
    return g;
  }
}

namespace {

std::string inputs_str(const std::vector<Value>& args) {
  std::string s;
  for (std::size_t i = 0; i < args.size(); ++i) s += (i ? ", " : "") + args[i].str();
  return s;
}

}  // namespace

EquivResult check_equivalence(const Compilation& comp, const EquivOptions& options) {
  EquivResult r;
  std::mt19937_64 seeds(options.seed);
  for (int i = 0; i < options.programs; ++i) {
    GeneratedProgram g = generate_program(comp, seeds(), options.gen);
    ++r.programs;
    std::ostringstream why;
    try {
      typecheck(g.program, comp, Stage::Pre);
      Program post = normalize_program(g.program, comp, options.normalize);
      typecheck(post, comp, Stage::Post);
      for (const auto& args : g.inputs) {
        Interpreter pre_run(g.program, comp, Stage::Pre);
        Interpreter post_run(post, comp, Stage::Post);
        Outcome a = pre_run.run("main", args);
        Outcome b = post_run.run("main", args);
        ++r.runs;
        if (a.trapped) ++r.traps;
        if (!a.same_as(b)) {
          why << "inputs (" << inputs_str(args) << "): boxed " << a.str() << ", normalized " << b.str() << "\n";
          break;
        }
      }
    } catch (const Error& e) {
      why << "error: " << e.what() << "\n";
    }
    if (why.str().empty()) continue;
    ++r.failures;
    if (r.counterexample.empty()) {
      r.counterexample = "program " + std::to_string(i) + " (ADTs:";
      for (const auto& a : g.adts) r.counterexample += " " + a;
      r.counterexample += ")\n" + print_program(g.program) + why.str();
    }
  }
  return r;
}

}  // namespace adtlayout::ir

#include "adtlayout/interp.hpp"

#include <sstream>

#include "adtlayout/codec.hpp"

namespace adtlayout::ir {

std::string Value::str() const {
  switch (kind) {
    case Kind::Bits: return std::to_string(bits);
    case Kind::Ref: return bits == 0 ? "null" : "#" + std::to_string(bits);
    case Kind::Tuple: {
      std::string s = "(";
      for (std::size_t i = 0; i < elems.size(); ++i) s += (i ? ", " : "") + elems[i].str();
      return s + ")";
    }
  }
  return "?";
}

std::string Outcome::str() const { return trapped ? "trap (" + reason + ")" : value.str(); }

std::uint64_t Heap::alloc(Object o) {
  objects.push_back(std::move(o));
  return objects.size();
}

const Object& Heap::at(std::uint64_t id) const {
  if (id == 0 || id > objects.size()) throw Error(ErrorCode::Internal, "dangling heap id " + std::to_string(id));
  return objects[id - 1];
}

std::uint64_t truncate_bits(std::uint64_t v, int width) { return v & low_mask(width); }

Interpreter::Interpreter(const Program& program, const Compilation& comp, Stage stage)
    : program_(program), comp_(comp), stage_(stage) {}

const std::map<std::string, Type>& Interpreter::types_of(const Function& f) {
  auto it = types_.find(f.name);
  if (it == types_.end()) it = types_.emplace(f.name, typecheck_function(f, program_, comp_, stage_)).first;
  return it->second;
}

Outcome Interpreter::run(const std::string& function, const std::vector<Value>& args) {
  const Function* f = program_.find(function);
  if (!f) throw Error(ErrorCode::Type, "no function @" + function);
  steps_ = 0;
  Outcome out;
  try {
    out.value = call(*f, args, 0);
  } catch (const Trap& t) {
    out.trapped = true;
    out.reason = t.reason;
  }
  return out;
}

Value Interpreter::default_value(const Type& t) {
  std::vector<std::string> stack;
  return default_value(t, stack);
}

Value Interpreter::default_value(const Type& t, std::vector<std::string>& stack) {
  switch (t.kind) {
    case Type::Kind::Int:
    case Type::Kind::Float:
    case Type::Kind::IntRep: return Value::of_bits(0);
    case Type::Kind::Class:
    case Type::Kind::Nullable: return Value::ref(0);
    case Type::Kind::Tuple: {
      std::vector<Value> e;
      for (const auto& x : t.elems) e.push_back(default_value(x, stack));
      return Value::tuple(std::move(e));
    }
    case Type::Kind::Adt: {
      for (const auto& s : stack) {
        if (s == t.name) throw Error(ErrorCode::Type, "the default value of " + t.name + " is infinite");
      }
      stack.push_back(t.name);
      const MonoAdt& a = comp_.at(t.name).adt;
      Object o{t.name, 0, {}};
      for (const auto& f : a.variants.at(0).fields) o.fields.push_back(default_value(from_concrete(f.type), stack));
      stack.pop_back();
      return Value::ref(heap_.alloc(std::move(o)));
    }
  }
  return {};
}

bool Interpreter::equal(const Type& t, const Value& a, const Value& b) const {
  switch (t.kind) {
    case Type::Kind::Int:
    case Type::Kind::Float:
    case Type::Kind::IntRep: return truncate_bits(a.bits, t.width) == truncate_bits(b.bits, t.width);
    case Type::Kind::Class:
    case Type::Kind::Nullable: return a.bits == b.bits;
    case Type::Kind::Tuple:
      for (std::size_t i = 0; i < t.elems.size(); ++i) {
        if (!equal(t.elems[i], a.elems[i], b.elems[i])) return false;
      }
      return true;
    case Type::Kind::Adt: {
      if (a.bits == b.bits) return true;
      if (a.bits == 0 || b.bits == 0) return false;
      const Object& x = heap_.at(a.bits);
      const Object& y = heap_.at(b.bits);
      if (x.variant != y.variant) return false;
      const auto& fields = comp_.at(t.name).adt.variants.at(static_cast<std::size_t>(x.variant)).fields;
      for (std::size_t i = 0; i < fields.size(); ++i) {
        Type ft = from_concrete(fields[i].type);
        if (stage_ == Stage::Post && ft.kind == Type::Kind::Adt && comp_.unboxed(ft.name)) {
          if (!(x.fields[i] == y.fields[i])) return false;
          continue;
        }
        if (!equal(ft, x.fields[i], y.fields[i])) return false;
      }
      return true;
    }
  }
  return false;
}

Value Interpreter::call(const Function& f, const std::vector<Value>& args, int depth) {
  if (depth > depth_limit) throw Trap{"call depth limit"};
  if (args.size() != f.params.size()) throw Error(ErrorCode::Type, "@" + f.name + ": wrong argument count");
  const auto& types = types_of(f);
  std::map<std::string, Value> env;
  for (std::size_t i = 0; i < args.size(); ++i) env[f.params[i].name] = args[i];
  std::size_t b = 0;
  while (true) {
    const Block& blk = f.blocks[b];
    for (const auto& in : blk.instrs) {
      if (++steps_ > step_limit) throw Trap{"step limit"};
      Value v = exec(in, types, env, depth);
      if (!in.dest.empty()) env[in.dest] = std::move(v);
    }
    const Terminator& t = blk.term;
    std::string next;
    switch (t.kind) {
      case Terminator::Kind::Ret: return env.at(t.value);
      case Terminator::Kind::Trap: throw Trap{"trap in @" + f.name};
      case Terminator::Kind::Jmp: next = t.targets[0]; break;
      case Terminator::Kind::Br: next = env.at(t.value).bits & 1 ? t.targets[0] : t.targets[1]; break;
      case Terminator::Kind::Switch: {
        std::uint64_t v = env.at(t.value).bits;
        next = t.targets[0];
        for (std::size_t k = 0; k < t.cases.size(); ++k) {
          if (t.cases[k] == v) {
            next = t.targets[k + 1];
            break;
          }
        }
        break;
      }
    }
    b = static_cast<std::size_t>(f.block_index(next));
  }
}

Value Interpreter::exec(const Instr& in, const std::map<std::string, Type>& types,
                        std::map<std::string, Value>& env, int depth) {
  auto arg = [&](std::size_t i) -> const Value& { return env.at(in.args[i]); };
  auto arg_type = [&](std::size_t i) -> const Type& { return types.at(in.args[i]); };
  auto record = [&](const Value& v) -> const Object& {
    if (v.kind != Value::Kind::Ref || v.bits == 0) throw Trap{"null access"};
    return heap_.at(v.bits);
  };
  switch (in.op) {
    case Op::Const: return Value::of_bits(truncate_bits(in.imm, in.type.width));
    case Op::Null: return Value::ref(0);
    case Op::New: return Value::ref(heap_.alloc({in.type.name, -1, {}}));
    case Op::Alloc: {
      Object o{in.adt, in.variant, {}};
      for (std::size_t i = 0; i < in.args.size(); ++i) o.fields.push_back(arg(i));
      return Value::ref(heap_.alloc(std::move(o)));
    }
    case Op::Contents: {
      const Object& o = record(arg(0));
      if (o.variant != in.variant) throw Trap{"cast to " + in.adt + "." + in.case_name + " failed"};
      if (o.fields.size() == 1) return o.fields[0];
      return Value::tuple(o.fields);
    }
    case Op::GetTag: return Value::of_bits(static_cast<std::uint64_t>(record(arg(0)).variant));
    case Op::ReplaceNull: {
      if (arg(0).bits != 0) return arg(0);
      return default_value(Type::adt(in.adt));
    }
    case Op::Eq: return Value::of_bits(equal(in.type, arg(0), arg(1)) ? 1 : 0);
    case Op::Tuple: {
      std::vector<Value> e;
      for (std::size_t i = 0; i < in.args.size(); ++i) e.push_back(arg(i));
      return Value::tuple(std::move(e));
    }
    case Op::Project: return arg(0).elems.at(in.imm);
    case Op::Add:
    case Op::Sub:
    case Op::And:
    case Op::Or:
    case Op::Xor:
    case Op::Shl:
    case Op::Shr:
    case Op::Lt: {
      const Type& t = arg_type(0);
      std::uint64_t a = truncate_bits(arg(0).bits, t.width);
      std::uint64_t b = truncate_bits(arg(1).bits, t.width);
      std::uint64_t r = 0;
      switch (in.op) {
        case Op::Add: r = a + b; break;
        case Op::Sub: r = a - b; break;
        case Op::And: r = a & b; break;
        case Op::Or: r = a | b; break;
        case Op::Xor: r = a ^ b; break;
        case Op::Shl: r = b >= 64 ? 0 : a << b; break;
        case Op::Shr: r = b >= 64 ? 0 : a >> b; break;
        case Op::Lt:
          if (t.kind == Type::Kind::Int && t.is_signed) return Value::of_bits(sign_extend(a, t.width) < sign_extend(b, t.width));
          return Value::of_bits(a < b);
        default: break;
      }
      return Value::of_bits(truncate_bits(r, t.width));
    }
    case Op::Select: return arg(0).bits & 1 ? arg(1) : arg(2);
    case Op::Call: {
      const Function* g = program_.find(in.callee);
      std::vector<Value> a;
      for (std::size_t i = 0; i < in.args.size(); ++i) a.push_back(arg(i));
      return call(*g, a, depth + 1);
    }
    case Op::IsNull: return Value::of_bits(arg(0).bits == 0 ? 1 : 0);
    case Op::Assert:
      if ((arg(0).bits & 1) == 0) throw Trap{"assertion failed"};
      return {};
    case Op::Bits: {
      const Value& v = arg(0);
      return Value::of_bits(truncate_bits(v.bits, in.type.width));
    }
    case Op::FromBits: {
      std::uint64_t v = arg(0).bits;
      if (in.type.kind == Type::Kind::Adt || in.type.kind == Type::Kind::Class) return Value::ref(v);
      return Value::of_bits(truncate_bits(v, in.type.width));
    }
  }
  throw Error(ErrorCode::Internal, "unhandled operation");
}

}  // namespace adtlayout::ir

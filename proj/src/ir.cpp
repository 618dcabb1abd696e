#include "adtlayout/ir.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <functional>
#include <set>
#include <sstream>

#include "adtlayout/codec.hpp"

namespace adtlayout::ir {

Type Type::integer(int width, bool is_signed) {
  Type t;
  t.kind = Kind::Int;
  t.width = width;
  t.is_signed = is_signed;
  return t;
}

Type Type::floating(int width) {
  Type t;
  t.kind = Kind::Float;
  t.width = width;
  return t;
}

Type Type::tuple(std::vector<Type> elems) {
  Type t;
  t.kind = Kind::Tuple;
  t.elems = std::move(elems);
  return t;
}

Type Type::adt(std::string name) {
  Type t;
  t.kind = Kind::Adt;
  t.name = std::move(name);
  return t;
}

Type Type::nullable(std::string adt) {
  Type t;
  t.kind = Kind::Nullable;
  t.name = std::move(adt);
  return t;
}

Type Type::cls(std::string name) {
  Type t;
  t.kind = Kind::Class;
  t.name = std::move(name);
  return t;
}

Type Type::intrep(int width, ScalarKind kind) {
  Type t;
  t.kind = Kind::IntRep;
  t.width = width;
  t.rep = kind;
  return t;
}

std::string Type::str() const {
  switch (kind) {
    case Kind::Int: return (is_signed ? "i" : "u") + std::to_string(width);
    case Kind::Float: return width == 32 ? "float" : "double";
    case Kind::Tuple: {
      std::string s = "(";
      for (std::size_t i = 0; i < elems.size(); ++i) s += (i ? ", " : "") + elems[i].str();
      return s + ")";
    }
    case Kind::Adt:
    case Kind::Class: return name;
    case Kind::Nullable: return name + "?";
    case Kind::IntRep: return "intrep<" + std::to_string(width) + "," + std::string(kind_name(rep)) + ">";
  }
  return "?";
}

bool operator==(const Type& a, const Type& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Type::Kind::Int: return a.width == b.width && a.is_signed == b.is_signed;
    case Type::Kind::Float: return a.width == b.width;
    case Type::Kind::Tuple: return a.elems == b.elems;
    case Type::Kind::Adt:
    case Type::Kind::Nullable:
    case Type::Kind::Class: return a.name == b.name;
    case Type::Kind::IntRep: return a.width == b.width && a.rep == b.rep;
  }
  return false;
}

Type from_concrete(const ConcreteType& t) {
  switch (t.kind) {
    case ConcreteType::Kind::Int: return Type::integer(t.width, t.is_signed);
    case ConcreteType::Kind::Float: return Type::floating(t.width);
    case ConcreteType::Kind::Ref: return Type::cls(t.name);
    case ConcreteType::Kind::Adt: return Type::adt(t.name);
    case ConcreteType::Kind::Tuple: {
      std::vector<Type> e;
      for (const auto& x : t.elems) e.push_back(from_concrete(x));
      return Type::tuple(std::move(e));
    }
  }
  return {};
}

Type contents_type(const MonoVariant& v) {
  if (v.fields.size() == 1) return from_concrete(v.fields[0].type);
  std::vector<Type> e;
  for (const auto& f : v.fields) e.push_back(from_concrete(f.type));
  return Type::tuple(std::move(e));
}

std::string_view op_name(Op op) {
  switch (op) {
    case Op::Const: return "const";
    case Op::Null: return "null";
    case Op::New: return "new";
    case Op::Alloc: return "alloc";
    case Op::Contents: return "contents";
    case Op::GetTag: return "gettag";
    case Op::ReplaceNull: return "replacenull";
    case Op::Eq: return "eq";
    case Op::Tuple: return "tuple";
    case Op::Project: return "project";
    case Op::Add: return "add";
    case Op::Sub: return "sub";
    case Op::And: return "and";
    case Op::Or: return "or";
    case Op::Xor: return "xor";
    case Op::Shl: return "shl";
    case Op::Shr: return "shr";
    case Op::Lt: return "lt";
    case Op::Select: return "select";
    case Op::Call: return "call";
    case Op::IsNull: return "isnull";
    case Op::Assert: return "assert";
    case Op::Bits: return "bits";
    case Op::FromBits: return "frombits";
  }
  return "?";
}

int Function::block_index(const std::string& label) const {
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (blocks[i].label == label) return static_cast<int>(i);
  }
  return -1;
}

const Function* Program::find(const std::string& name) const {
  for (const auto& f : functions) {
    if (f.name == name) return &f;
  }
  return nullptr;
}

// ---------------------------------------------------------------- printing

namespace {

std::string args_str(const std::vector<std::string>& args) {
  std::string s = "(";
  for (std::size_t i = 0; i < args.size(); ++i) s += (i ? ", " : "") + args[i];
  return s + ")";
}

}  // namespace

std::string print_instr(const Instr& i) {
  std::string s = i.dest.empty() ? "" : i.dest + " = ";
  s += op_name(i.op);
  switch (i.op) {
    case Op::Const: {
      std::ostringstream v;
      if (i.type.kind == Type::Kind::Float) {
        v << "0x" << std::hex << i.imm;
      } else {
        v << i.imm;
      }
      return s + "<" + i.type.str() + ">(" + v.str() + ")";
    }
    case Op::Null:
    case Op::New:
      return s + "<" + (i.adt.empty() ? i.type.str() : i.adt) + ">()";
    case Op::Alloc:
    case Op::Contents:
      return s + "<" + i.adt + "." + i.case_name + ">" + args_str(i.args);
    case Op::GetTag:
    case Op::ReplaceNull:
      return s + "<" + i.adt + ">" + args_str(i.args);
    case Op::Eq:
    case Op::Bits:
    case Op::FromBits:
      return s + "<" + i.type.str() + ">" + args_str(i.args);
    case Op::Project:
      return s + "<" + std::to_string(i.imm) + ">" + args_str(i.args);
    case Op::Call:
      return s + " @" + i.callee + args_str(i.args);
    default:
      return s + args_str(i.args);
  }
}

std::string print_function(const Function& f) {
  std::string s = "func @" + f.name + "(";
  for (std::size_t i = 0; i < f.params.size(); ++i) {
    s += (i ? ", " : "") + f.params[i].name + ": " + f.params[i].type.str();
  }
  s += ") -> " + f.ret.str() + " {\n";
  for (const auto& b : f.blocks) {
    s += b.label + ":\n";
    for (const auto& i : b.instrs) s += "  " + print_instr(i) + "\n";
    const auto& t = b.term;
    switch (t.kind) {
      case Terminator::Kind::Ret: s += "  ret " + t.value + "\n"; break;
      case Terminator::Kind::Jmp: s += "  jmp " + t.targets[0] + "\n"; break;
      case Terminator::Kind::Br: s += "  br " + t.value + ", " + t.targets[0] + ", " + t.targets[1] + "\n"; break;
      case Terminator::Kind::Switch: {
        s += "  switch " + t.value + ", " + t.targets[0] + " [";
        for (std::size_t k = 0; k < t.cases.size(); ++k) {
          s += (k ? ", " : "") + std::to_string(t.cases[k]) + ": " + t.targets[k + 1];
        }
        s += "]\n";
        break;
      }
      case Terminator::Kind::Trap: s += "  trap\n"; break;
    }
  }
  return s + "}\n";
}

std::string print_program(const Program& p) {
  std::string s;
  for (std::size_t i = 0; i < p.functions.size(); ++i) s += (i ? "\n" : "") + print_function(p.functions[i]);
  return s;
}

// ---------------------------------------------------------------- parsing

namespace {

std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

// Splits at top-level commas (outside <>, ()).
std::vector<std::string> split_top(std::string_view s) {
  std::vector<std::string> out;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (c == '<' || c == '(' || c == '[') ++depth;
    if (c == '>' || c == ')' || c == ']') --depth;
    if (c == ',' && depth == 0) {
      out.push_back(trim(s.substr(start, i - start)));
      start = i + 1;
    }
  }
  std::string last = trim(s.substr(start));
  if (!last.empty() || !out.empty()) out.push_back(last);
  return out;
}

// Index of the bracket closing the one at `open`.
std::size_t match_close(std::string_view s, std::size_t open) {
  char o = s[open];
  char c = o == '<' ? '>' : o == '(' ? ')' : ']';
  int depth = 0;
  for (std::size_t i = open; i < s.size(); ++i) {
    if (s[i] == '<' || s[i] == '(' || s[i] == '[') ++depth;
    if (s[i] == '>' || s[i] == ')' || s[i] == ']') --depth;
    if (depth == 0) {
      if (s[i] != c) break;
      return i;
    }
  }
  return std::string_view::npos;
}

class TextParser {
 public:
  TextParser(std::string_view text, const Compilation& comp) : comp_(comp) {
    std::size_t start = 0;
    for (std::size_t i = 0; i <= text.size(); ++i) {
      if (i == text.size() || text[i] == '\n') {
        std::string line(text.substr(start, i - start));
        if (auto c = line.find("//"); c != std::string::npos) line.erase(c);
        lines_.push_back(trim(line));
        start = i + 1;
      }
    }
  }

  Program program() {
    Program p;
    for (line_ = 0; line_ < lines_.size(); ++line_) {
      if (lines_[line_].empty()) continue;
      p.functions.push_back(function());
    }
    return p;
  }

  Type type(std::string_view text) const {
    std::string s = trim(text);
    if (s.empty()) fail("empty type");
    if (s.back() == '?') {
      Type inner = type(std::string_view(s).substr(0, s.size() - 1));
      if (inner.kind != Type::Kind::Adt) fail("only ADT types are nullable: " + s);
      return Type::nullable(inner.name);
    }
    if (s.front() == '(') {
      if (match_close(s, 0) != s.size() - 1) fail("bad tuple type: " + s);
      std::vector<Type> e;
      for (const auto& part : split_top(std::string_view(s).substr(1, s.size() - 2))) e.push_back(type(part));
      return Type::tuple(std::move(e));
    }
    if (s == "bool") return Type::boolean();
    if (s == "float") return Type::floating(32);
    if (s == "double") return Type::floating(64);
    if (s.rfind("intrep<", 0) == 0 && s.back() == '>') {
      auto parts = split_top(std::string_view(s).substr(7, s.size() - 8));
      if (parts.size() != 2) fail("bad intrep type: " + s);
      auto kind = parse_kind(parts[1]);
      if (!kind) fail("unknown scalar kind: " + parts[1]);
      return Type::intrep(number(parts[0]), *kind);
    }
    if ((s[0] == 'u' || s[0] == 'i') && s.size() > 1 &&
        std::all_of(s.begin() + 1, s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
      int w = number(s.substr(1));
      if (w < 1 || w > 64) fail("integer width out of range: " + s);
      return Type::integer(w, s[0] == 'i');
    }
    if (comp_.adts.count(s)) return Type::adt(s);
    if (comp_.env.classes.count(s) || s == "string" || s.rfind("Array<", 0) == 0) return Type::cls(s);
    throw Error(ErrorCode::Type, "unknown type '" + s + "'", pos());
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw Error(ErrorCode::Syntax, msg, pos()); }
  SourcePos pos() const { return {static_cast<int>(line_) + 1, 1}; }

  int number(const std::string& s) const {
    int v = 0;
    auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size()) fail("expected a number: " + s);
    return v;
  }

  std::uint64_t immediate(const std::string& s, const Type& t) const {
    std::string x = trim(s);
    bool neg = !x.empty() && x[0] == '-';
    if (neg) x.erase(0, 1);
    std::uint64_t v = 0;
    int base = 10;
    if (x.rfind("0x", 0) == 0) {
      x.erase(0, 2);
      base = 16;
    }
    auto r = std::from_chars(x.data(), x.data() + x.size(), v, base);
    if (x.empty() || r.ec != std::errc() || r.ptr != x.data() + x.size()) fail("bad constant: " + s);
    if (neg) v = ~v + 1;
    return v & low_mask(t.width);
  }

  std::string name_token(const std::string& s) const {
    std::string n = trim(s);
    if (n.size() < 2 || n[0] != '%') fail("expected a %name, got '" + n + "'");
    return n;
  }

  Function function() {
    const std::string& head = lines_[line_];
    if (head.rfind("func @", 0) != 0 || head.back() != '{') fail("expected 'func @name(...) -> type {'");
    Function f;
    std::size_t open = head.find('(');
    if (open == std::string::npos) fail("expected '('");
    f.name = trim(std::string_view(head).substr(6, open - 6));
    std::size_t close = match_close(head, open);
    if (close == std::string::npos) fail("unbalanced parameter list");
    for (const auto& p : split_top(std::string_view(head).substr(open + 1, close - open - 1))) {
      auto colon = p.find(':');
      if (colon == std::string::npos) fail("parameter needs a type: " + p);
      f.params.push_back({name_token(p.substr(0, colon)), type(p.substr(colon + 1))});
    }
    std::string rest = trim(std::string_view(head).substr(close + 1));
    if (rest.rfind("->", 0) != 0) fail("expected '->'");
    f.ret = type(std::string_view(rest).substr(2, rest.size() - 3));
    for (++line_; line_ < lines_.size(); ++line_) {
      const std::string& l = lines_[line_];
      if (l.empty()) continue;
      if (l == "}") {
        if (f.blocks.empty()) fail("function without blocks");
        return f;
      }
      if (l.back() == ':' && l.find(' ') == std::string::npos) {
        f.blocks.push_back({l.substr(0, l.size() - 1), {}, {}});
        continue;
      }
      if (f.blocks.empty()) fail("instruction outside a block");
      statement(f.blocks.back(), l);
    }
    fail("missing '}'");
  }

  void statement(Block& b, const std::string& l) {
    auto word_end = l.find(' ');
    std::string w = l.substr(0, word_end);
    std::string rest = word_end == std::string::npos ? "" : trim(std::string_view(l).substr(word_end));
    if (w == "ret") {
      b.term = {Terminator::Kind::Ret, name_token(rest), {}, {}};
      return;
    }
    if (w == "jmp") {
      b.term = {Terminator::Kind::Jmp, "", {rest}, {}};
      return;
    }
    if (w == "trap") {
      b.term = {Terminator::Kind::Trap, "", {}, {}};
      return;
    }
    if (w == "br") {
      auto parts = split_top(rest);
      if (parts.size() != 3) fail("br takes a condition and two labels");
      b.term = {Terminator::Kind::Br, name_token(parts[0]), {parts[1], parts[2]}, {}};
      return;
    }
    if (w == "switch") {
      auto lb = rest.find('[');
      if (lb == std::string::npos || rest.back() != ']') fail("switch needs a case list");
      auto head = split_top(std::string_view(rest).substr(0, lb));
      if (head.size() != 2) fail("switch takes a value and a default label");
      Terminator t{Terminator::Kind::Switch, name_token(head[0]), {head[1]}, {}};
      for (const auto& c : split_top(std::string_view(rest).substr(lb + 1, rest.size() - lb - 2))) {
        auto colon = c.find(':');
        if (colon == std::string::npos) fail("switch case needs 'value: label'");
        t.cases.push_back(immediate(c.substr(0, colon), Type::integer(64)));
        t.targets.push_back(trim(std::string_view(c).substr(colon + 1)));
      }
      b.term = std::move(t);
      return;
    }
    Instr in;
    std::string body = l;
    if (l[0] == '%') {
      auto eq = l.find('=');
      if (eq == std::string::npos) fail("expected '='");
      in.dest = name_token(l.substr(0, eq));
      body = trim(std::string_view(l).substr(eq + 1));
    }
    instr(in, body);
    if (in.dest.empty() != (in.op == Op::Assert)) fail("only assert has no result");
    b.instrs.push_back(std::move(in));
  }

  void instr(Instr& in, const std::string& body) {
    std::size_t i = 0;
    while (i < body.size() && std::isalpha(static_cast<unsigned char>(body[i]))) ++i;
    std::string op = body.substr(0, i);
    static const std::map<std::string, Op> ops = {
        {"const", Op::Const}, {"null", Op::Null}, {"new", Op::New}, {"alloc", Op::Alloc},
        {"contents", Op::Contents}, {"gettag", Op::GetTag}, {"replacenull", Op::ReplaceNull},
        {"eq", Op::Eq}, {"tuple", Op::Tuple}, {"project", Op::Project}, {"add", Op::Add},
        {"sub", Op::Sub}, {"and", Op::And}, {"or", Op::Or}, {"xor", Op::Xor}, {"shl", Op::Shl},
        {"shr", Op::Shr}, {"lt", Op::Lt}, {"select", Op::Select}, {"call", Op::Call},
        {"isnull", Op::IsNull}, {"assert", Op::Assert}, {"bits", Op::Bits}, {"frombits", Op::FromBits}};
    auto it = ops.find(op);
    if (it == ops.end()) fail("unknown operation '" + op + "'");
    in.op = it->second;
    std::string targ;
    if (in.op == Op::Call) {
      std::string rest = trim(std::string_view(body).substr(i));
      if (rest.empty() || rest[0] != '@') fail("call needs @function");
      auto open = rest.find('(');
      if (open == std::string::npos) fail("call needs arguments");
      in.callee = trim(std::string_view(rest).substr(1, open - 1));
      i = body.size() - rest.size() + open;
    } else if (i < body.size() && body[i] == '<') {
      std::size_t close = match_close(body, i);
      if (close == std::string::npos) fail("unbalanced '<'");
      targ = body.substr(i + 1, close - i - 1);
      i = close + 1;
    }
    if (i >= body.size() || body[i] != '(' || body.back() != ')') fail("expected '(' arguments ')'");
    std::string inner = body.substr(i + 1, body.size() - i - 2);
    std::vector<std::string> raw = split_top(inner);

    auto need_targ = [&]() {
      if (targ.empty()) fail(op + " needs a <type> argument");
    };
    auto case_arg = [&]() {
      need_targ();
      int depth = 0;
      std::size_t dot = std::string::npos;
      for (std::size_t k = 0; k < targ.size(); ++k) {
        if (targ[k] == '<' || targ[k] == '(') ++depth;
        if (targ[k] == '>' || targ[k] == ')') --depth;
        if (targ[k] == '.' && depth == 0) dot = k;
      }
      if (dot == std::string::npos) fail(op + " needs <Type.Case>");
      in.adt = trim(std::string_view(targ).substr(0, dot));
      std::string cname = trim(std::string_view(targ).substr(dot + 1));
      if (!comp_.adts.count(in.adt)) throw Error(ErrorCode::Type, "unknown ADT '" + in.adt + "'", pos());
      in.variant = comp_.at(in.adt).adt.variant_index(cname);
      if (in.variant < 0) throw Error(ErrorCode::Type, in.adt + " has no case '" + cname + "'", pos());
      in.case_name = cname;
    };
    auto adt_arg = [&]() {
      need_targ();
      in.adt = trim(targ);
      if (!comp_.adts.count(in.adt)) throw Error(ErrorCode::Type, "unknown ADT '" + in.adt + "'", pos());
    };

    switch (in.op) {
      case Op::Const:
        need_targ();
        in.type = type(targ);
        if (raw.size() != 1) fail("const takes one value");
        in.imm = immediate(raw[0], in.type);
        return;
      case Op::Null:
      case Op::New:
        need_targ();
        if (!raw.empty()) fail(op + " takes no arguments");
        in.type = type(targ);
        if (in.type.kind == Type::Kind::Adt) in.adt = in.type.name;
        return;
      case Op::Alloc:
      case Op::Contents: case_arg(); break;
      case Op::GetTag:
      case Op::ReplaceNull: adt_arg(); break;
      case Op::Eq:
      case Op::Bits:
      case Op::FromBits:
        need_targ();
        in.type = type(targ);
        break;
      case Op::Project:
        need_targ();
        in.imm = static_cast<std::uint64_t>(number(trim(targ)));
        break;
      default:
        if (!targ.empty()) fail(op + " takes no <type> argument");
    }
    for (const auto& a : raw) in.args.push_back(name_token(a));
  }

  const Compilation& comp_;
  std::vector<std::string> lines_;
  std::size_t line_ = 0;
};

}  // namespace

Program parse_program_text(std::string_view text, const Compilation& comp) {
  return TextParser(text, comp).program();
}

Type parse_type_text(std::string_view text, const Compilation& comp) { return TextParser("", comp).type(text); }

// ---------------------------------------------------------------- typing

namespace {

class Checker {
 public:
  Checker(const Function& f, const Program& p, const Compilation& comp, Stage stage)
      : f_(f), p_(p), comp_(comp), stage_(stage) {}

  std::map<std::string, Type> run() {
    if (f_.blocks.empty()) fail("function has no blocks");
    std::set<std::string> labels;
    for (const auto& b : f_.blocks) {
      if (!labels.insert(b.label).second) fail("duplicate label " + b.label);
    }
    check_type(f_.ret);
    for (const auto& prm : f_.params) {
      check_type(prm.type);
      define(prm.name, prm.type, 0);
    }
    compute_dominators();
    for (std::size_t b = 0; b < f_.blocks.size(); ++b) {
      block_ = static_cast<int>(b);
      const Block& blk = f_.blocks[b];
      for (std::size_t k = 0; k < blk.instrs.size(); ++k) {
        instr_ = &blk.instrs[k];
        Type t = check(blk.instrs[k]);
        if (!instr_->dest.empty()) define(instr_->dest, t, static_cast<int>(b));
      }
      instr_ = nullptr;
      terminator(blk.term);
    }
    return types_;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    std::string where = "@" + f_.name;
    if (block_ >= 0) where += ", block " + f_.blocks[static_cast<std::size_t>(block_)].label;
    if (instr_) where += ", '" + print_instr(*instr_) + "'";
    throw Error(ErrorCode::Type, where + ": " + msg);
  }

  void check_type(const Type& t) const {
    switch (t.kind) {
      case Type::Kind::Int:
        if (t.width < 1 || t.width > 64) fail("bad integer width");
        break;
      case Type::Kind::Float:
        if (t.width != 32 && t.width != 64) fail("bad float width");
        break;
      case Type::Kind::Tuple:
        for (const auto& e : t.elems) check_type(e);
        break;
      case Type::Kind::Adt:
        if (!comp_.adts.count(t.name)) fail("unknown ADT " + t.name);
        if (stage_ == Stage::Post && comp_.unboxed(t.name)) fail("unboxed ADT type " + t.name + " after normalization");
        break;
      case Type::Kind::Nullable:
        if (stage_ == Stage::Post) fail("nullable type after normalization");
        if (!comp_.adts.count(t.name)) fail("unknown ADT " + t.name);
        break;
      case Type::Kind::Class:
        break;
      case Type::Kind::IntRep:
        if (stage_ == Stage::Pre) fail("intrep before normalization");
        if (t.width < 1 || t.width > 64) fail("bad intrep width");
        break;
    }
  }

  void define(const std::string& name, const Type& t, int block) {
    if (!types_.emplace(name, t).second) fail("name " + name + " defined twice");
    def_block_[name] = block;
  }

  const Type& use(const std::string& name) const {
    auto it = types_.find(name);
    if (it == types_.end()) fail("use of undefined name " + name);
    int db = def_block_.at(name);
    if (db != block_ && !dominates(db, block_)) fail("use of " + name + " is not dominated by its definition");
    return it->second;
  }

  void compute_dominators() {
    const std::size_t n = f_.blocks.size();
    std::vector<std::vector<int>> preds(n);
    for (std::size_t b = 0; b < n; ++b) {
      for (const auto& t : f_.blocks[b].term.targets) {
        int idx = f_.block_index(t);
        block_ = static_cast<int>(b);
        if (idx < 0) fail("unknown label " + t);
        if (idx <= static_cast<int>(b)) fail("branch to " + t + " does not go forward");
        preds[static_cast<std::size_t>(idx)].push_back(static_cast<int>(b));
      }
    }
    block_ = -1;
    dom_.assign(n, std::vector<bool>(n, true));
    dom_[0].assign(n, false);
    dom_[0][0] = true;
    // blocks are in a topological order, so one forward pass suffices
    for (std::size_t b = 1; b < n; ++b) {
      if (preds[b].empty()) {
        dom_[b].assign(n, false);
        dom_[b][b] = true;
        continue;
      }
      std::vector<bool> d(n, true);
      for (int p : preds[b]) {
        for (std::size_t k = 0; k < n; ++k) d[k] = d[k] && dom_[static_cast<std::size_t>(p)][k];
      }
      d[b] = true;
      dom_[b] = d;
    }
  }

  bool dominates(int a, int b) const { return dom_[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)]; }

  void expect(const Type& got, const Type& want, const std::string& what) const {
    if (!(got == want)) fail(what + " has type " + got.str() + ", expected " + want.str());
  }

  void arity(const Instr& in, std::size_t n) const {
    if (in.args.size() != n) fail("expects " + std::to_string(n) + " operands");
  }

  Type field_type(const ConcreteType& c) const {
    Type t = from_concrete(c);
    return stage_ == Stage::Post ? post_type(t) : t;
  }

  // Normalized form of a pre type, as the post checker expects it.
  Type post_type(const Type& t) const {
    switch (t.kind) {
      case Type::Kind::Tuple: {
        std::vector<Type> e;
        for (const auto& x : t.elems) e.push_back(post_type(x));
        return Type::tuple(std::move(e));
      }
      case Type::Kind::Adt:
      case Type::Kind::Nullable: {
        if (!comp_.unboxed(t.name)) return Type::adt(t.name);
        std::vector<Type> e;
        for (const auto& s : comp_.at(t.name).layout->scalars) e.push_back(Type::intrep(s.width, s.kind));
        return Type::tuple(std::move(e));
      }
      default: return t;
    }
  }

  const MonoAdt& adt_for(const Instr& in) const {
    if (!comp_.adts.count(in.adt)) fail("unknown ADT " + in.adt);
    if (stage_ == Stage::Post && comp_.unboxed(in.adt)) fail("ADT operation on unboxed " + in.adt + " after normalization");
    return comp_.at(in.adt).adt;
  }

  Type check(const Instr& in) {
    switch (in.op) {
      case Op::Const:
        check_type(in.type);
        if (!in.type.is_intlike() && in.type.kind != Type::Kind::Float) fail("const of non-scalar type");
        arity(in, 0);
        return in.type;
      case Op::Null:
        arity(in, 0);
        check_type(in.type);
        if (in.type.kind == Type::Kind::Class) return in.type;
        if (in.type.kind != Type::Kind::Adt) fail("null of non-reference type");
        return stage_ == Stage::Pre ? Type::nullable(in.type.name) : in.type;
      case Op::New:
        arity(in, 0);
        check_type(in.type);
        if (in.type.kind != Type::Kind::Class) fail("new of non-class type");
        return in.type;
      case Op::Alloc: {
        const MonoAdt& a = adt_for(in);
        const auto& v = a.variants.at(static_cast<std::size_t>(in.variant));
        arity(in, v.fields.size());
        for (std::size_t k = 0; k < v.fields.size(); ++k) {
          expect(use(in.args[k]), field_type(v.fields[k].type), "field " + v.fields[k].name);
        }
        return Type::adt(in.adt);
      }
      case Op::Contents: {
        const MonoAdt& a = adt_for(in);
        arity(in, 1);
        expect(use(in.args[0]), Type::adt(in.adt), "operand");
        const auto& v = a.variants.at(static_cast<std::size_t>(in.variant));
        if (v.fields.empty()) fail("contents of a case without fields");
        Type t = contents_type(v);
        return stage_ == Stage::Post ? post_type(t) : t;
      }
      case Op::GetTag:
        adt_for(in);
        arity(in, 1);
        expect(use(in.args[0]), Type::adt(in.adt), "operand");
        return tag_type();
      case Op::ReplaceNull:
        if (stage_ == Stage::Post) fail("replacenull after normalization");
        adt_for(in);
        arity(in, 1);
        expect(use(in.args[0]), Type::nullable(in.adt), "operand");
        return Type::adt(in.adt);
      case Op::Eq: {
        check_type(in.type);
        arity(in, 2);
        auto k = in.type.kind;
        bool ok = in.type.is_intlike() || k == Type::Kind::Float || k == Type::Kind::Class ||
                  (k == Type::Kind::Adt && stage_ == Stage::Pre);
        if (!ok) fail("eq is not defined on " + in.type.str());
        expect(use(in.args[0]), in.type, "left operand");
        expect(use(in.args[1]), in.type, "right operand");
        return Type::boolean();
      }
      case Op::Tuple: {
        std::vector<Type> e;
        for (const auto& a : in.args) e.push_back(use(a));
        return Type::tuple(std::move(e));
      }
      case Op::Project: {
        arity(in, 1);
        const Type& t = use(in.args[0]);
        if (t.kind != Type::Kind::Tuple || in.imm >= t.elems.size()) fail("project out of range");
        return t.elems[in.imm];
      }
      case Op::Add: case Op::Sub: case Op::And: case Op::Or: case Op::Xor: case Op::Shl: case Op::Shr:
      case Op::Lt: {
        arity(in, 2);
        const Type& a = use(in.args[0]);
        if (!a.is_intlike()) fail("integer operation on " + a.str());
        expect(use(in.args[1]), a, "right operand");
        return in.op == Op::Lt ? Type::boolean() : a;
      }
      case Op::Select: {
        arity(in, 3);
        expect(use(in.args[0]), Type::boolean(), "condition");
        const Type& a = use(in.args[1]);
        expect(use(in.args[2]), a, "else operand");
        return a;
      }
      case Op::Call: {
        const Function* g = p_.find(in.callee);
        if (!g) fail("call to unknown function @" + in.callee);
        arity(in, g->params.size());
        for (std::size_t k = 0; k < g->params.size(); ++k) expect(use(in.args[k]), g->params[k].type, "argument");
        return g->ret;
      }
      case Op::IsNull: {
        arity(in, 1);
        const Type& t = use(in.args[0]);
        if (t.kind != Type::Kind::Class && t.kind != Type::Kind::Nullable &&
            !(t.kind == Type::Kind::Adt && stage_ == Stage::Post)) {
          fail("isnull of " + t.str());
        }
        return Type::boolean();
      }
      case Op::Assert:
        arity(in, 1);
        expect(use(in.args[0]), Type::boolean(), "condition");
        return {};
      case Op::Bits: {
        if (stage_ == Stage::Pre) fail("bits before normalization");
        check_type(in.type);
        arity(in, 1);
        if (!in.type.is_intlike()) fail("bits produces an integer");
        const Type& t = use(in.args[0]);
        if (t.kind == Type::Kind::Tuple) fail("bits of a tuple");
        return in.type;
      }
      case Op::FromBits: {
        if (stage_ == Stage::Pre) fail("frombits before normalization");
        check_type(in.type);
        arity(in, 1);
        if (in.type.kind == Type::Kind::Tuple) fail("frombits to a tuple");
        if (!use(in.args[0]).is_intlike()) fail("frombits of a non-integer");
        return in.type;
      }
    }
    fail("unknown operation");
  }

  void terminator(const Terminator& t) {
    switch (t.kind) {
      case Terminator::Kind::Ret: expect(use(t.value), f_.ret, "return value"); break;
      case Terminator::Kind::Jmp:
        if (t.targets.size() != 1) fail("jmp takes one label");
        break;
      case Terminator::Kind::Br:
        expect(use(t.value), Type::boolean(), "branch condition");
        if (t.targets.size() != 2) fail("br takes two labels");
        break;
      case Terminator::Kind::Switch:
        if (!use(t.value).is_intlike()) fail("switch on a non-integer");
        if (t.targets.size() != t.cases.size() + 1) fail("malformed switch");
        break;
      case Terminator::Kind::Trap: break;
    }
  }

  const Function& f_;
  const Program& p_;
  const Compilation& comp_;
  Stage stage_;
  std::map<std::string, Type> types_;
  std::map<std::string, int> def_block_;
  std::vector<std::vector<bool>> dom_;
  int block_ = -1;
  const Instr* instr_ = nullptr;
};

}  // namespace

std::map<std::string, Type> typecheck_function(const Function& f, const Program& p, const Compilation& comp,
                                               Stage stage) {
  return Checker(f, p, comp, stage).run();
}

void typecheck(const Program& p, const Compilation& comp, Stage stage) {
  std::set<std::string> names;
  for (const auto& f : p.functions) {
    if (!names.insert(f.name).second) throw Error(ErrorCode::Type, "function @" + f.name + " defined twice");
  }
  for (const auto& f : p.functions) typecheck_function(f, p, comp, stage);
}

}  // namespace adtlayout::ir

#pragma once

// A small typed SSA used to check that normalization preserves meaning.
//
// Text form, one instruction per line:
//
//   func @main(%a: u32, %b: u8) -> u8 {
//   entry:
//     %x = alloc<Option<u32>.Some>(%a)
//     %t = gettag<Option<u32>>(%x)
//     ret %t
//   }
//
// Pre-normalization programs use ADT types and the ADT operations; the
// normalized form replaces unboxed ADTs with tuples of intrep<width,kind>
// scalars and bit operations.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "adtlayout/pipeline.hpp"

namespace adtlayout::ir {

struct Type {
  enum class Kind : std::uint8_t { Int, Float, Tuple, Adt, Nullable, Class, IntRep };

  Kind kind = Kind::Int;
  int width = 0;
  bool is_signed = false;
  std::string name;  // Adt, Nullable (the ADT), Class
  ScalarKind rep = ScalarKind::B64;
  std::vector<Type> elems;

  static Type integer(int width, bool is_signed = false);
  static Type boolean() { return integer(1); }
  static Type u8() { return integer(8); }
  static Type floating(int width);
  static Type tuple(std::vector<Type> elems);
  static Type adt(std::string name);
  static Type nullable(std::string adt);
  static Type cls(std::string name);
  static Type intrep(int width, ScalarKind kind);

  bool is_intlike() const { return kind == Kind::Int || kind == Kind::IntRep; }
  bool is_ref() const { return kind == Kind::Adt || kind == Kind::Class || kind == Kind::Nullable; }
  std::string str() const;
  friend bool operator==(const Type& a, const Type& b);
};

/// IR type of a monomorphized field type.
Type from_concrete(const ConcreteType& t);

enum class Op : std::uint8_t {
  Const, Null, New, Alloc, Contents, GetTag, ReplaceNull, Eq, Tuple, Project,
  Add, Sub, And, Or, Xor, Shl, Shr, Lt, Select, Call,
  IsNull, Assert, Bits, FromBits,
};

std::string_view op_name(Op op);

struct Instr {
  std::string dest;  // empty for assert
  Op op = Op::Const;
  Type type;         // const, null, new, eq, bits, frombits: the written type
  std::string adt;   // alloc, contents, gettag, replacenull, null of an ADT
  int variant = -1;  // alloc, contents
  std::string case_name;
  std::vector<std::string> args;
  std::uint64_t imm = 0;  // const value bits; project index
  std::string callee;     // call
};

struct Terminator {
  enum class Kind : std::uint8_t { Ret, Jmp, Br, Switch, Trap };
  Kind kind = Kind::Trap;
  std::string value;                 // ret value, br condition, switch scrutinee
  std::vector<std::string> targets;  // jmp: 1; br: then, else; switch: default first
  std::vector<std::uint64_t> cases;  // switch: values for targets[1..]
};

struct Block {
  std::string label;
  std::vector<Instr> instrs;
  Terminator term;
};

struct Param {
  std::string name;
  Type type;
};

struct Function {
  std::string name;
  std::vector<Param> params;
  Type ret;
  std::vector<Block> blocks;  // blocks[0] is the entry

  int block_index(const std::string& label) const;  // -1 if absent
};

struct Program {
  std::vector<Function> functions;

  const Function* find(const std::string& name) const;
};

enum class Stage : std::uint8_t { Pre, Post };

/// Parses a program; ADT and class names resolve against `comp`.
/// Throws Error(Syntax | Type).
Program parse_program_text(std::string_view text, const Compilation& comp);
Type parse_type_text(std::string_view text, const Compilation& comp);

std::string print_program(const Program& p);
std::string print_function(const Function& f);
std::string print_instr(const Instr& i);

/// Types every name; throws Error(Type) naming the function and instruction.
/// Also checks that every use is dominated by its definition.
std::map<std::string, Type> typecheck_function(const Function& f, const Program& p, const Compilation& comp,
                                               Stage stage);
void typecheck(const Program& p, const Compilation& comp, Stage stage);

/// Result type of a `contents` read of variant `v` of `adt`, before normalization:
/// the single field type, or a tuple of all field types.
Type contents_type(const MonoVariant& v);

/// Tag values are u8.
inline Type tag_type() { return Type::u8(); }

}  // namespace adtlayout::ir

#pragma once

// Reference interpreter for both stages of the IR. ADT values of the pre
// stage are heap records compared structurally; the post stage keeps
// records only for boxed ADTs.

#include <cstdint>
#include <string>
#include <vector>

#include "adtlayout/ir.hpp"

namespace adtlayout::ir {

struct Value {
  enum class Kind : std::uint8_t { Bits, Tuple, Ref };

  Kind kind = Kind::Bits;
  std::uint64_t bits = 0;  // Bits: raw value; Ref: heap id, 0 for null
  std::vector<Value> elems;

  static Value of_bits(std::uint64_t b) { return {Kind::Bits, b, {}}; }
  static Value ref(std::uint64_t id) { return {Kind::Ref, id, {}}; }
  static Value tuple(std::vector<Value> e) { return {Kind::Tuple, 0, std::move(e)}; }

  std::string str() const;
  friend bool operator==(const Value&, const Value&) = default;
};

struct Object {
  std::string type;  // ADT instance or class name
  int variant = -1;  // -1 for class instances
  std::vector<Value> fields;
};

struct Heap {
  std::vector<Object> objects;  // id = index + 1

  std::uint64_t alloc(Object o);
  const Object& at(std::uint64_t id) const;
};

struct Outcome {
  bool trapped = false;
  std::string reason;
  Value value;

  /// Same observable behaviour: both trap, or neither does and the values agree.
  bool same_as(const Outcome& o) const { return trapped == o.trapped && (trapped || value == o.value); }
  std::string str() const;
};

class Interpreter {
 public:
  Interpreter(const Program& program, const Compilation& comp, Stage stage);

  Outcome run(const std::string& function, const std::vector<Value>& args);

  Heap& heap() { return heap_; }

  /// The default value of a pre-stage type: zero bits, null class
  /// references, and for ADTs the first case with default fields.
  /// Throws Error(Type) when an ADT's default would be infinite.
  Value default_value(const Type& t);

  /// Structural equality of pre-stage values of type `t`.
  bool equal(const Type& t, const Value& a, const Value& b) const;

  int step_limit = 1000000;
  int depth_limit = 2000;

 private:
  struct Trap {
    std::string reason;
  };

  Value call(const Function& f, const std::vector<Value>& args, int depth);
  Value exec(const Instr& in, const std::map<std::string, Type>& types, std::map<std::string, Value>& env,
             int depth);
  const std::map<std::string, Type>& types_of(const Function& f);
  Value default_value(const Type& t, std::vector<std::string>& stack);

  const Program& program_;
  const Compilation& comp_;
  Stage stage_;
  Heap heap_;
  std::map<std::string, std::map<std::string, Type>> types_;
  long steps_ = 0;
};

/// Bits of `v` reinterpreted at `width`: masked integers and IEEE bits.
std::uint64_t truncate_bits(std::uint64_t v, int width);

}  // namespace adtlayout::ir

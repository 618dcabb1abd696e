#include <gtest/gtest.h>

#include "adtlayout/interp.hpp"
#include "adtlayout/progen.hpp"
#include "support/corpus.hpp"

using namespace adtlayout;
using namespace adtlayout::ir;

namespace {

const Compilation& corpus() {
  static const Compilation c = oracle::compile_corpus();
  return c;
}

Program parse(const std::string& text) { return parse_program_text(text, corpus()); }

Outcome run_pre(const std::string& text, std::vector<Value> args = {}) {
  Program p = parse(text);
  typecheck(p, corpus(), Stage::Pre);
  Interpreter in(p, corpus(), Stage::Pre);
  return in.run("main", args);
}

ErrorCode check_error(const std::string& text, Stage stage = Stage::Pre) {
  try {
    typecheck(parse(text), corpus(), stage);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Internal;
}

}  // namespace

TEST(IrTypes, Printing) {
  EXPECT_EQ(Type::integer(32).str(), "u32");
  EXPECT_EQ(Type::integer(12, true).str(), "i12");
  EXPECT_EQ(Type::floating(32).str(), "float");
  EXPECT_EQ(Type::tuple({Type::u8(), Type::floating(64)}).str(), "(u8, double)");
  EXPECT_EQ(Type::nullable("List").str(), "List?");
  EXPECT_EQ(Type::intrep(33, ScalarKind::B64).str(), "intrep<33,B64>");
  EXPECT_EQ(parse_type_text("(u8, Option<u32>?)", corpus()),
            Type::tuple({Type::u8(), Type::nullable("Option<u32>")}));
  EXPECT_EQ(parse_type_text("Node", corpus()), Type::cls("Node"));
}

TEST(IrText, RoundTrip) {
  const std::string text =
      "func @main(%a: u32, %b: u8) -> (u8, u32) {\n"
      "entry:\n"
      "  %x = alloc<Option<u32>.Some>(%a)\n"
      "  %t = gettag<Option<u32>>(%x)\n"
      "  %k = const<u8>(255)\n"
      "  %c = lt(%t, %k)\n"
      "  br %c, yes, no\n"
      "yes:\n"
      "  %v = contents<Option<u32>.Some>(%x)\n"
      "  %r = tuple(%t, %v)\n"
      "  ret %r\n"
      "no:\n"
      "  switch %b, dead [0: dead]\n"
      "dead:\n"
      "  trap\n"
      "}\n";
  Program p = parse(text);
  EXPECT_EQ(print_program(p), text);
  EXPECT_EQ(print_program(parse(print_program(p))), text);
}

TEST(IrText, NegativeAndHexConstants) {
  Program p = parse("func @main() -> i8 {\nentry:\n  %a = const<i8>(-1)\n  ret %a\n}\n");
  EXPECT_EQ(p.functions[0].blocks[0].instrs[0].imm, 0xffu);
  p = parse("func @main() -> u16 {\nentry:\n  %a = const<u16>(0x1234)\n  ret %a\n}\n");
  EXPECT_EQ(p.functions[0].blocks[0].instrs[0].imm, 0x1234u);
}

TEST(IrText, SyntaxErrors) {
  EXPECT_THROW(parse("func @main() -> u8 {\nentry:\n  %a = frob<u8>(1)\n  ret %a\n}\n"), Error);
  EXPECT_THROW(parse("func @main() -> u8 {\nentry:\n  %a = const<u8>(1)\n  ret %a\n"), Error);
  EXPECT_THROW(parse("func @main() -> u8 {\nentry:\n  %a = alloc<Option<u32>.Maybe>()\n  ret %a\n}\n"), Error);
}

TEST(IrCheck, RejectsIllTypedPrograms) {
  // field type
  EXPECT_EQ(check_error("func @main(%a: u8) -> Option<u32> {\nentry:\n  %x = alloc<Option<u32>.Some>(%a)\n"
                        "  ret %x\n}\n"),
            ErrorCode::Type);
  // undefined name
  EXPECT_EQ(check_error("func @main() -> u8 {\nentry:\n  ret %nope\n}\n"), ErrorCode::Type);
  // use not dominated by its definition
  EXPECT_EQ(check_error("func @main(%c: bool) -> u8 {\nentry:\n  br %c, a, b\na:\n  %x = const<u8>(1)\n"
                        "  jmp b\nb:\n  ret %x\n}\n"),
            ErrorCode::Type);
  // backward branch
  EXPECT_EQ(check_error("func @main() -> u8 {\nentry:\n  jmp b\nb:\n  jmp entry\n}\n"), ErrorCode::Type);
  // eq on a nullable value
  EXPECT_EQ(check_error("func @main() -> bool {\nentry:\n  %n = null<List>()\n  %e = eq<List>(%n, %n)\n"
                        "  ret %e\n}\n"),
            ErrorCode::Type);
  // post stage forbids operations on unboxed ADTs
  EXPECT_EQ(check_error("func @main(%a: u32) -> u8 {\nentry:\n  %x = alloc<Option<u32>.Some>(%a)\n"
                        "  %t = gettag<Option<u32>>(%x)\n  ret %t\n}\n",
                        Stage::Post),
            ErrorCode::Type);
  // and intrep before normalization
  EXPECT_EQ(check_error("func @main() -> intrep<8,B32> {\nentry:\n  %x = const<intrep<8,B32>>(1)\n  ret %x\n}\n"),
            ErrorCode::Type);
}

TEST(IrCheck, JoinAfterBranchSeesDominatingNames) {
  EXPECT_EQ(check_error("func @main(%c: bool) -> u8 {\nentry:\n  %x = const<u8>(1)\n  br %c, a, b\na:\n"
                        "  jmp b\nb:\n  ret %x\n}\n"),
            ErrorCode::Internal);
}

TEST(Interp, ContentsOfSome) {
  Outcome o = run_pre(
      "func @main() -> u32 {\nentry:\n  %v = const<u32>(3)\n  %x = alloc<Option<u32>.Some>(%v)\n"
      "  %c = contents<Option<u32>.Some>(%x)\n  ret %c\n}\n");
  ASSERT_FALSE(o.trapped);
  EXPECT_EQ(o.value, Value::of_bits(3));
}

TEST(Interp, WrongCaseTraps) {
  Outcome o = run_pre(
      "func @main() -> u32 {\nentry:\n  %x = alloc<Option<u32>.None>()\n"
      "  %c = contents<Option<u32>.Some>(%x)\n  ret %c\n}\n");
  EXPECT_TRUE(o.trapped);
}

TEST(Interp, DefaultIsFirstCase) {
  Outcome o = run_pre(
      "func @main() -> bool {\nentry:\n  %n = null<Option<u32>>()\n  %d = replacenull<Option<u32>>(%n)\n"
      "  %none = alloc<Option<u32>.None>()\n  %e = eq<Option<u32>>(%d, %none)\n  ret %e\n}\n");
  EXPECT_EQ(o.value, Value::of_bits(1));

  // T { A(x: int); B(y: float) }: the default is A(0)
  o = run_pre(
      "func @main() -> (u8, i32) {\nentry:\n  %n = null<T>()\n  %d = replacenull<T>(%n)\n"
      "  %t = gettag<T>(%d)\n  %x = contents<T.A>(%d)\n  %r = tuple(%t, %x)\n  ret %r\n}\n");
  EXPECT_EQ(o.value, Value::tuple({Value::of_bits(0), Value::of_bits(0)}));
}

TEST(Interp, ReplaceNullPassesValuesThrough) {
  Outcome o = run_pre(
      "func @main() -> u32 {\nentry:\n  %v = const<u32>(5)\n  %x = alloc<Option<u32>.Some>(%v)\n"
      "  %n = null<Option<u32>>()\n  %t = const<bool>(1)\n  %m = select(%t, %n, %n)\n"
      "  %y = replacenull<Option<u32>>(%m)\n  %e = eq<Option<u32>>(%x, %y)\n"
      "  %c = contents<Option<u32>.Some>(%x)\n  ret %c\n}\n");
  EXPECT_EQ(o.value, Value::of_bits(5));
}

TEST(Interp, StructuralEquality) {
  auto eq = [](const std::string& a, const std::string& b) {
    return run_pre("func @main() -> bool {\nentry:\n  %k3 = const<u32>(3)\n  %k4 = const<u32>(4)\n" + a + b +
                   "  %e = eq<Option<u32>>(%a, %b)\n  ret %e\n}\n")
        .value.bits;
  };
  EXPECT_EQ(eq("  %a = alloc<Option<u32>.None>()\n", "  %b = alloc<Option<u32>.None>()\n"), 1u);
  EXPECT_EQ(eq("  %a = alloc<Option<u32>.Some>(%k3)\n", "  %b = alloc<Option<u32>.Some>(%k4)\n"), 0u);
  EXPECT_EQ(eq("  %a = alloc<Option<u32>.Some>(%k3)\n", "  %b = alloc<Option<u32>.Some>(%k3)\n"), 1u);
  EXPECT_EQ(eq("  %a = alloc<Option<u32>.Some>(%k3)\n", "  %b = alloc<Option<u32>.None>()\n"), 0u);
}

TEST(Interp, MutuallyRecursiveEqualityTerminates) {
  Compilation c = compile("type Ev { case Z; case S(o: Od); }\ntype Od { case S(e: Ev); }\n");
  ASSERT_TRUE(c.ok());
  EXPECT_FALSE(c.unboxed("Ev"));
  const std::string text =
      "func @main() -> bool {\nentry:\n  %z = alloc<Ev.Z>()\n  %o = alloc<Od.S>(%z)\n  %e = alloc<Ev.S>(%o)\n"
      "  %z2 = alloc<Ev.Z>()\n  %o2 = alloc<Od.S>(%z2)\n  %e2 = alloc<Ev.S>(%o2)\n"
      "  %r = eq<Ev>(%e, %e2)\n  ret %r\n}\n";
  Program p = parse_program_text(text, c);
  Interpreter in(p, c, Stage::Pre);
  Outcome o = in.run("main", {});
  ASSERT_FALSE(o.trapped);
  EXPECT_EQ(o.value, Value::of_bits(1));
}

TEST(Interp, InfiniteDefaultIsAnError) {
  Compilation c = compile("type Inf { case C(x: Inf); case D; }\n");
  ASSERT_TRUE(c.ok());
  Program p;
  Interpreter in(p, c, Stage::Pre);
  try {
    in.default_value(Type::adt("Inf"));
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Type);
  }
}

TEST(Interp, ArithmeticWrapsAtTheTypeWidth) {
  Outcome o = run_pre(
      "func @main() -> (u8, bool, bool) {\nentry:\n  %a = const<u8>(250)\n  %b = const<u8>(10)\n"
      "  %s = add(%a, %b)\n  %m = const<i8>(-1)\n  %z = const<i8>(0)\n  %l = lt(%m, %z)\n"
      "  %u = lt(%a, %b)\n  %r = tuple(%s, %l, %u)\n  ret %r\n}\n");
  EXPECT_EQ(o.value, Value::tuple({Value::of_bits(4), Value::of_bits(1), Value::of_bits(0)}));
}

TEST(Interp, CallsAndSelect) {
  Outcome o = run_pre(
      "func @main(%c: bool) -> u32 {\nentry:\n  %a = const<u32>(7)\n  %x = alloc<Option<u32>.Some>(%a)\n"
      "  %y = alloc<Option<u32>.None>()\n  %s = select(%c, %x, %y)\n  %r = call @unwrap(%s)\n  ret %r\n}\n"
      "func @unwrap(%o: Option<u32>) -> u32 {\nentry:\n  %t = gettag<Option<u32>>(%o)\n"
      "  switch %t, none [1: some]\nsome:\n  %v = contents<Option<u32>.Some>(%o)\n  ret %v\nnone:\n"
      "  %z = const<u32>(0)\n  ret %z\n}\n",
      {Value::of_bits(1)});
  EXPECT_EQ(o.value, Value::of_bits(7));
}

TEST(Generator, ProgramsAreWellTypedAndBounded) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    GeneratedProgram g = generate_program(corpus(), seed);
    EXPECT_LE(g.adts.size(), 3u);
    int n = 0;
    for (const auto& f : g.program.functions) {
      for (const auto& b : f.blocks) n += static_cast<int>(b.instrs.size());
    }
    EXPECT_LE(n, 30) << seed;
    EXPECT_NO_THROW(typecheck(g.program, corpus(), Stage::Pre)) << print_program(g.program);
    // the text form parses back to the same program
    EXPECT_EQ(print_program(parse(print_program(g.program))), print_program(g.program));
  }
}

TEST(Generator, Deterministic) {
  EXPECT_EQ(print_program(generate_program(corpus(), 9).program), print_program(generate_program(corpus(), 9).program));
}

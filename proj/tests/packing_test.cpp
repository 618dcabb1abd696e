#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "adtlayout/packing.hpp"
#include "support/packing_gen.hpp"

using namespace adtlayout;

namespace {

std::string read_corpus(const std::string& name) {
  std::ifstream in(std::string(ADTLAYOUT_CORPUS_DIR) + "/" + name);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string bits_of(const PackingExpr& e) {
  std::string s;
  for (const auto& b : e.as<BitLayout>()->bits) s += b.to_char();
  return s;
}

}  // namespace

TEST(PackingParse, Float16Declaration) {
  auto decls = parse_program("packing Float16(sign:1, exp:5, frac:10): 16 = 0b_seeeeeff_ffffffff;");
  ASSERT_EQ(decls.size(), 1u);
  const auto& d = std::get<PackingDecl>(decls[0]);
  EXPECT_EQ(d.name, "Float16");
  ASSERT_EQ(d.params.size(), 3u);
  EXPECT_EQ(d.params[1].name, "exp");
  EXPECT_EQ(d.params[1].width, 5);
  EXPECT_EQ(d.width, 16);
  ASSERT_NE(d.body.as<BitLayout>(), nullptr);
  EXPECT_EQ(bits_of(d.body), "seeeeeffffffffff");
}

TEST(PackingParse, AdtDeclaration) {
  auto decls = parse_program("type T { case A(x: int); case B(y: float); }");
  ASSERT_EQ(decls.size(), 1u);
  const auto& t = std::get<AdtDecl>(decls[0]);
  ASSERT_EQ(t.variants.size(), 2u);
  EXPECT_EQ(t.variants[0].name, "A");
  EXPECT_EQ(t.variants[1].fields[0].type.str(), "float");
  EXPECT_FALSE(t.unboxed);
}

TEST(PackingParse, EmptySource) {
  EXPECT_TRUE(parse_program("").empty());
  EXPECT_TRUE(parse_program("  // only a comment\n").empty());
}

TEST(PackingParse, LiteralWithSeparators) {
  auto e = parse_packing_expr("0b_00aa_bb11");
  EXPECT_EQ(bits_of(e), "00aabb11");
}

TEST(PackingParse, ConcatOfApplications) {
  auto e = parse_packing_expr("#concat(Float16(s1,e1,f1), Float16(s2,e2,f2))");
  const auto* c = e.as<Concat>();
  ASSERT_NE(c, nullptr);
  ASSERT_EQ(c->parts.size(), 2u);
  const auto* a = c->parts[1].as<Apply>();
  ASSERT_NE(a, nullptr);
  EXPECT_EQ(a->decl, "Float16");
  EXPECT_EQ(a->args[2].as<FieldRef>()->name, "f2");
}

TEST(PackingParse, EmptyLayoutEqualsEmpty) {
  auto e = parse_packing_expr("0b");
  EXPECT_TRUE(e.is_empty());
  EXPECT_EQ(e, PackingExpr(EmptyExpr{}));
  EXPECT_EQ(parse_packing_expr(""), PackingExpr(EmptyExpr{}));
}

TEST(PackingParse, MalformedLiteral) {
  try {
    parse_packing_expr("0b_01201");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Syntax);
  }
  EXPECT_THROW(parse_packing_expr("0b0-1"), Error);
}

TEST(PackingParse, UnbalancedParens) {
  EXPECT_THROW(parse_packing_expr("#concat(a, b"), Error);
  EXPECT_THROW(parse_packing_expr("P(a))"), Error);
}

TEST(PackingParse, ErrorsCarryPositions) {
  try {
    parse_program("type T {\n  case A(x: u8) #bogus;\n}");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownAnnotation);
    EXPECT_EQ(e.diagnostic().pos.line, 2);
    EXPECT_GT(e.diagnostic().pos.column, 1);
  }
}

TEST(PackingParse, PackedIsAliasOfPacking) {
  auto a = parse_program("type S { case C(a: u8) #packed 0b_aaaaaaaa; }");
  auto b = parse_program("type S { case C(a: u8) #packing(0b_aaaaaaaa); }");
  EXPECT_EQ(print_program(a), print_program(b));
  EXPECT_NE(print_program(a).find("#packing"), std::string::npos);
}

TEST(PackingParse, TypeLevelPackingNeedsOneCase) {
  auto d = parse_program("type S #unboxed #packing(0b_aaaa) { case C(a: u4); }");
  const auto& s = std::get<AdtDecl>(d[0]);
  EXPECT_TRUE(s.unboxed);
  ASSERT_TRUE(s.variants[0].packing.has_value());
  EXPECT_THROW(parse_program("type S #packing(0b_aaaa) { case C(a: u4); case D; }"), Error);
  EXPECT_THROW(parse_program("type S { case C(a: u4) #packing(a) #packing(a); }"), Error);
}

TEST(PackingParse, CorpusFloatFile) {
  auto decls = parse_program(read_corpus("float.adt"));
  ASSERT_EQ(decls.size(), 3u);
  EXPECT_EQ(std::get<PackingDecl>(decls[2]).params.size(), 6u);
}

TEST(PackingParse, GenericsClassesAndTuples) {
  auto decls = parse_program(
      "class Node;\n"
      "type Pair<A, B> { case P(a: A, b: (B, Array<byte>)); }\n");
  ASSERT_EQ(decls.size(), 2u);
  EXPECT_EQ(std::get<ClassDecl>(decls[0]).name, "Node");
  const auto& p = std::get<AdtDecl>(decls[1]);
  EXPECT_EQ(p.type_params.size(), 2u);
  EXPECT_EQ(p.variants[0].fields[1].type.str(), "(B, Array<byte>)");
}

// Property: pretty-printing and re-parsing is the identity on ASTs.
TEST(PackingProperty, PrintParseRoundTrip) {
  oracle::PackingGen gen(7);
  for (int i = 0; i < 500; ++i) {
    auto c = gen.next();
    auto again = parse_packing_expr(print_expr(c.expr));
    ASSERT_EQ(again, c.expr) << print_expr(c.expr);
    for (const auto& [name, d] : c.delta) {
      auto decls = parse_program(print_decl(d));
      ASSERT_EQ(decls.size(), 1u);
      ASSERT_EQ(std::get<PackingDecl>(decls[0]), d) << print_decl(d);
    }
  }
}

TEST(PackingProperty, AdtPrintParseRoundTrip) {
  const char* src =
      "type Shape #unboxed {\n"
      "  case Circle(r: u16) #packing(#solve(r));\n"
      "  case Rect(w: u8, h: u8) #packing(0b_wwwwwwww_hhhhhhhh, 0b);\n"
      "  case None;\n"
      "}\n";
  auto once = print_program(parse_program(src));
  EXPECT_EQ(print_program(parse_program(once)), once);
}

// Property: underscores never change the parsed bit sequence.
TEST(PackingProperty, UnderscoresAreIgnored) {
  std::mt19937 rng(3);
  const std::string alphabet = "01?abc";
  for (int i = 0; i < 300; ++i) {
    std::string bits;
    int n = static_cast<int>(rng() % 40);
    for (int k = 0; k < n; ++k) bits += alphabet[rng() % alphabet.size()];
    std::string sep;
    for (char c : bits) {
      sep += c;
      if (rng() % 3 == 0) sep += '_';
    }
    if (rng() % 2) sep = "_" + sep;
    EXPECT_EQ(parse_packing_expr("0b" + bits), parse_packing_expr("0b" + sep)) << sep;
  }
}

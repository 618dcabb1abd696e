#include <gtest/gtest.h>

#include "adtlayout/verify.hpp"
#include "support/packing_gen.hpp"

using namespace adtlayout;

namespace {

PackingEnv env_of(const std::string& src) {
  Diagnostics diags;
  auto env = check_packing_decls(parse_program(src), diags);
  EXPECT_TRUE(diags.empty()) << (diags.empty() ? "" : diags[0].str());
  return env;
}

const char* kFloats =
    "packing Float16(sign: 1, exp: 5, frac: 10): 16 = 0b_seeeeeff_ffffffff;\n"
    "packing Float32(sign: 1, exp: 8, frac: 23): 32 = 0b_seeeeeee_efffffff_ffffffff_ffffffff;\n"
    "packing TwoFloat16s(s1: 1, e1: 5, f1: 10, s2: 1, e2: 5, f2: 10): 32\n"
    "    = #concat(Float16(s1, e1, f1), Float16(s2, e2, f2));\n";

ErrorCode first_code(const Diagnostics& d) { return d.empty() ? ErrorCode::Internal : d[0].code; }

}  // namespace

TEST(SizeOf, Float16Body) {
  auto env = env_of(kFloats);
  SizeContext ctx{{{"sign", 1}, {"exp", 5}, {"frac", 10}}, &env};
  EXPECT_EQ(size_of(env.at("Float16").body, ctx), 16);
}

TEST(SizeOf, ConcatOfTwoHalves) {
  auto env = env_of(kFloats);
  SizeContext ctx{{{"a", 1}, {"b", 5}, {"c", 10}, {"d", 1}, {"e", 5}, {"f", 10}}, &env};
  EXPECT_EQ(size_of(parse_packing_expr("#concat(Float16(a,b,c), Float16(d,e,f))"), ctx), 32);
}

TEST(SizeOf, Empty) {
  SizeContext ctx;
  EXPECT_EQ(size_of(PackingExpr(EmptyExpr{}), ctx), 0);
  EXPECT_EQ(size_of(parse_packing_expr("0b"), ctx), 0);
}

TEST(SizeOf, Errors) {
  auto env = env_of(kFloats);
  SizeContext ctx{{{"x", 4}}, &env};
  auto code = [&](const std::string& src) {
    try {
      size_of(parse_packing_expr(src), ctx);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::Internal;
  };
  EXPECT_EQ(code("y"), ErrorCode::UnboundName);
  EXPECT_EQ(code("Nope(x)"), ErrorCode::UnboundName);
  EXPECT_EQ(code("Float16(x, x)"), ErrorCode::Arity);
  EXPECT_EQ(code("Float16(0b11, 0b0, 0b0)"), ErrorCode::Size);
  EXPECT_EQ(code("#concat(Float32(0b0,0b0,0b0), Float32(0b0,0b0,0b0), 0b1)"), ErrorCode::Size);
  EXPECT_EQ(code("0b_xxxx_0_xxxx"), ErrorCode::LayoutField);
}

TEST(CheckDecl, FloatSuiteVerifies) {
  Diagnostics diags;
  auto env = check_packing_decls(parse_program(kFloats), diags);
  EXPECT_TRUE(diags.empty());
  EXPECT_EQ(env.size(), 3u);
}

TEST(CheckDecl, OversizedBody) {
  Diagnostics diags;
  check_packing_decls(parse_program("packing P(a:4): 2 = 0b_aaaa;"), diags);
  EXPECT_EQ(first_code(diags), ErrorCode::Size);
}

TEST(CheckDecl, SolveInDeclaration) {
  Diagnostics diags;
  check_packing_decls(parse_program("packing P(a:4): 8 = #solve(a);"), diags);
  EXPECT_EQ(first_code(diags), ErrorCode::SolveInDecl);
  diags.clear();
  check_packing_decls(parse_program("packing P(a:4): 8 = #concat(0b1, #solve(a));"), diags);
  EXPECT_EQ(first_code(diags), ErrorCode::SolveInDecl);
}

TEST(CheckDecl, RecursiveApplication) {
  Diagnostics diags;
  check_packing_decls(parse_program("packing P(a:4): 8 = P(a);"), diags);
  EXPECT_EQ(first_code(diags), ErrorCode::RecursivePacking);
  diags.clear();
  check_packing_decls(parse_program("packing P(a:4): 8 = Q(a);\npacking Q(b:4): 8 = P(b);"), diags);
  EXPECT_EQ(first_code(diags), ErrorCode::RecursivePacking);
}

TEST(CheckDecl, ParameterChecks) {
  Diagnostics diags;
  check_packing_decls(parse_program("packing P(a:4, a:2): 8 = a;"), diags);
  EXPECT_EQ(first_code(diags), ErrorCode::Duplicate);
  diags.clear();
  check_packing_decls(parse_program("packing P(a:0): 8 = a;"), diags);
  EXPECT_FALSE(diags.empty());
  diags.clear();
  check_packing_decls(parse_program("packing P(a:8): 65 = a;"), diags);
  EXPECT_EQ(first_code(diags), ErrorCode::Size);
  diags.clear();
  check_packing_decls(parse_program("packing P(a:8): 8 = a;\npacking P(b:8): 8 = b;"), diags);
  EXPECT_EQ(first_code(diags), ErrorCode::Duplicate);
}

TEST(ResolveLetters, UniqueFirstCharacters) {
  auto layout = *parse_packing_expr("0b_seeeeeff_ffffffff").as<BitLayout>();
  auto m = resolve_layout_fields(layout, {"sign", "exp", "frac"});
  EXPECT_EQ(m, (std::map<char, std::string>{{'s', "sign"}, {'e', "exp"}, {'f', "frac"}}));
}

TEST(ResolveLetters, AmbiguousLetter) {
  auto layout = *parse_packing_expr("0b_ssss").as<BitLayout>();
  try {
    resolve_layout_fields(layout, {"sign", "size"});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::AmbiguousLetter);
  }
  // sharing a first character is fine while the letter is unused
  auto other = *parse_packing_expr("0b_xx").as<BitLayout>();
  EXPECT_EQ(resolve_layout_fields(other, {"sign", "size", "xy"}).size(), 1u);
}

TEST(ResolveLetters, ConstantOnlyLayout) {
  auto layout = *parse_packing_expr("0b_01?0").as<BitLayout>();
  EXPECT_TRUE(resolve_layout_fields(layout, {"a", "b"}).empty());
  auto unknown = *parse_packing_expr("0b_zz").as<BitLayout>();
  EXPECT_THROW(resolve_layout_fields(unknown, {"a"}), Error);
}

// Property: checking against any width between the minimal size and 64 succeeds.
TEST(VerifyProperty, Subsumption) {
  oracle::PackingGen gen(11);
  for (int i = 0; i < 200; ++i) {
    auto c = gen.next(3, 40);
    SizeContext ctx{c.gamma, &c.delta};
    int n = size_of(c.expr, ctx);
    ASSERT_EQ(n, c.width);
    for (int w : {n, (n + 64) / 2, 64}) {
      PackingDecl d;
      d.name = "Wrap";
      for (const auto& [name, fw] : c.gamma) d.params.push_back({name, fw});
      d.width = w;
      d.body = c.expr;
      auto diags = check_packing_decl(d, c.delta);
      EXPECT_TRUE(diags.empty()) << print_decl(d) << " " << (diags.empty() ? "" : diags[0].str());
    }
  }
}

TEST(VerifyProperty, ConcatSizeIsSumOfParts) {
  oracle::PackingGen gen(12);
  for (int i = 0; i < 200; ++i) {
    auto c = gen.next(4, 64);
    const auto* cat = c.expr.as<Concat>();
    if (!cat) continue;
    SizeContext ctx{c.gamma, &c.delta};
    int sum = 0;
    for (const auto& p : cat->parts) sum += size_of(p, ctx);
    EXPECT_EQ(size_of(c.expr, ctx), sum);
  }
}

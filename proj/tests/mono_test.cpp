#include <gtest/gtest.h>

#include "adtlayout/mono.hpp"

using namespace adtlayout;

namespace {

struct Fixture {
  explicit Fixture(const std::string& src) : env(AdtEnv::from_decls(parse_program(src))), mono(env) {}

  const MonoAdt& get(const std::string& request) {
    std::string name = instantiate_request(mono, request);
    return mono.instances().at(name);
  }

  AdtEnv env;
  Monomorphizer mono;
};

const char* kSource =
    "class Node;\n"
    "type Option<T> { case None; case Some(val: T); }\n"
    "type List<T> { case Nil; case Cons(head: T, tail: List<T>); }\n"
    "type Even { case EZ; case ES(o: Odd); }\n"
    "type Odd { case OS(e: Even); }\n"
    "type Pairy { case A(p: (u8, u8)); }\n"
    "type Color { case Red; case Green; case Blue; }\n"
    "type Clo #captured { case K(x: u8); }\n"
    "type Wide { case W(a: u8, b: u8, c: u8); }\n"
    "type Box #unboxed { case B1(a: u8, r: Node); case B2; }\n"
    "type Two { case T1(x: int); case T2(y: float); }\n"
    "type Grow<T> { case G(next: Grow<(T, T)>); case Stop; }\n";

}  // namespace

TEST(Monomorphize, OptionOfU32) {
  Fixture f(kSource);
  const auto& o = f.get("Option<u32>");
  EXPECT_EQ(o.name, "Option<u32>");
  ASSERT_EQ(o.variants.size(), 2u);
  EXPECT_TRUE(o.variants[0].fields.empty());
  ASSERT_EQ(o.variants[1].fields.size(), 1u);
  EXPECT_EQ(o.variants[1].fields[0].name, "val");
  EXPECT_EQ(o.variants[1].fields[0].type, ConcreteType::integer(32, false));
  EXPECT_FALSE(o.recursive);
}

TEST(Monomorphize, RecursiveList) {
  Fixture f(kSource);
  const auto& l = f.get("List<u32>");
  EXPECT_TRUE(l.recursive);
  EXPECT_EQ(l.variants[1].fields[1].type.str(), "List<u32>");
}

TEST(Monomorphize, MutualRecursion) {
  Fixture f(kSource);
  f.get("Even");
  EXPECT_TRUE(f.mono.instances().at("Even").recursive);
  EXPECT_TRUE(f.mono.instances().at("Odd").recursive);
}

TEST(Monomorphize, TupleFieldsFlatten) {
  Fixture f(kSource);
  const auto& p = f.get("Pairy");
  ASSERT_EQ(p.variants[0].fields.size(), 2u);
  EXPECT_EQ(p.variants[0].fields[0].name, "p.0");
  EXPECT_EQ(p.variants[0].fields[1].name, "p.1");
}

TEST(Monomorphize, NestedInstancesComeFirst) {
  Fixture f("type Option<T> { case None; case Some(val: T); }\n"
            "type Outer { case O(a: Option<u8>, b: Option<i16>); }\n");
  f.get("Outer");
  auto order = f.mono.dependency_order();
  ASSERT_EQ(order.size(), 3u);
  EXPECT_EQ(order.back(), "Outer");
}

TEST(Monomorphize, Errors) {
  Fixture f(kSource);
  auto code = [&](const std::string& req) {
    try {
      f.get(req);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::Internal;
  };
  EXPECT_EQ(code("Option"), ErrorCode::Type);
  EXPECT_EQ(code("Nope"), ErrorCode::UnboundName);
  EXPECT_EQ(code("Grow<u8>"), ErrorCode::InfiniteType);
  Fixture g("type U<T> { case A(x: Q); }");
  EXPECT_THROW(g.get("U<u8>"), Error);
}

TEST(Monomorphize, IdempotentOnConcreteTypes) {
  Fixture f(kSource);
  const auto& w = f.get("Wide");
  auto again = monomorphize_adt(f.env.adts.at("Wide"), {}, f.env);
  ASSERT_EQ(again.variants.size(), w.variants.size());
  for (std::size_t i = 0; i < w.variants.size(); ++i) {
    ASSERT_EQ(again.variants[i].fields.size(), w.variants[i].fields.size());
    for (std::size_t j = 0; j < w.variants[i].fields.size(); ++j) {
      EXPECT_EQ(again.variants[i].fields[j].name, w.variants[i].fields[j].name);
      EXPECT_EQ(again.variants[i].fields[j].type, w.variants[i].fields[j].type);
    }
  }
}

TEST(Eligibility, Rules) {
  Fixture f(kSource + std::string("type UL #unboxed { case N; case C(t: UL); }\n"));
  EXPECT_EQ(unboxing_eligibility(f.get("List<u32>")), (Eligibility{false, BoxReason::Recursive, false}));
  EXPECT_EQ(unboxing_eligibility(f.get("UL")).reason, BoxReason::Recursive);
  EXPECT_EQ(unboxing_eligibility(f.get("Clo")), (Eligibility{false, BoxReason::Captured, false}));
  EXPECT_EQ(unboxing_eligibility(f.get("Color")), (Eligibility{true, BoxReason::None, true}));
  EXPECT_TRUE(unboxing_eligibility(f.get("Box")).unboxed);
  EXPECT_TRUE(unboxing_eligibility(f.get("Pairy")).unboxed);
  EXPECT_EQ(unboxing_eligibility(f.get("Wide")).reason, BoxReason::Default);
  EXPECT_TRUE(unboxing_eligibility(f.get("Wide"), {3}).unboxed);
  EXPECT_EQ(unboxing_eligibility(f.get("Two")).reason, BoxReason::Default);
}

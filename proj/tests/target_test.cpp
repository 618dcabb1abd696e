#include <gtest/gtest.h>

#include "adtlayout/mono.hpp"
#include "adtlayout/target.hpp"

using namespace adtlayout;

TEST(TargetKinds, SmallIntOnX64) {
  auto t = Target::x64();
  EXPECT_EQ(get_scalar_kinds(ConcreteType::integer(2, false), t),
            (KindSet{ScalarKind::B64, ScalarKind::F64, ScalarKind::R64}));
}

TEST(TargetKinds, ByteArrayOnJvm) {
  auto t = Target::jvm();
  EXPECT_EQ(get_scalar_kinds(ConcreteType::reference("Array<u8>"), t), KindSet{ScalarKind::Ref});
}

TEST(TargetKinds, IntersectionOfIntAndFloat) {
  auto t = Target::from_json(R"({"name": "demo", "word_width": 32,
      "kinds": {"int32": ["B32"], "int64": ["B64"], "f32": ["B32", "F32"],
                "f64": ["B64", "F64"], "ref": ["Ref"]}})");
  KindSet i = get_scalar_kinds(ConcreteType::integer(32, true), t);
  KindSet f = get_scalar_kinds(ConcreteType::floating(32), t);
  EXPECT_EQ(i, KindSet{ScalarKind::B32});
  EXPECT_EQ(f, (KindSet{ScalarKind::B32, ScalarKind::F32}));
  EXPECT_EQ(i & f, KindSet{ScalarKind::B32});
  EXPECT_FALSE(t.ref_tagging.has_value());
}

TEST(TargetKinds, KindWidths) {
  auto t = Target::jvm();
  EXPECT_EQ(t.kind_width(ScalarKind::B32), 32);
  EXPECT_EQ(t.kind_width(ScalarKind::F64), 64);
  EXPECT_EQ(t.kind_width(ScalarKind::Ref), 32);
  EXPECT_EQ(Target::x64().kind_width(ScalarKind::Ref), 64);
  EXPECT_TRUE(is_reference_kind(ScalarKind::R32));
  EXPECT_FALSE(is_reference_kind(ScalarKind::F32));
}

TEST(TargetKinds, ChooseKind) {
  auto t = Target::x86_32();
  KindSet s{ScalarKind::B32, ScalarKind::R32, ScalarKind::B64, ScalarKind::F64};
  EXPECT_EQ(t.choose_kind(s, 8), ScalarKind::B32);
  EXPECT_EQ(t.choose_kind(s, 33), ScalarKind::B64);
  EXPECT_EQ(t.choose_kind(KindSet{ScalarKind::R32}, 33), std::nullopt);
  EXPECT_EQ(t.capacity(s), 64);
  EXPECT_EQ(t.capacity(KindSet{}), 0);
}

TEST(TargetKinds, ParseAndPrintKinds) {
  EXPECT_EQ(parse_kind("R64"), ScalarKind::R64);
  EXPECT_EQ(parse_kind("X9"), std::nullopt);
  EXPECT_EQ((KindSet{ScalarKind::F64, ScalarKind::B64}).str(), "{B64, F64}");
}

TEST(TargetKinds, BadTargetFiles) {
  EXPECT_THROW(Target::from_json("{"), Error);
  EXPECT_THROW(Target::from_json(R"({"name": "x"})"), Error);
  EXPECT_THROW(Target::from_json(R"({"name": "x", "kinds": {"int32": [], "int64": ["B64"],
      "f32": ["F32"], "f64": ["F64"], "ref": ["Ref"]}})"),
               Error);
}

// Property: every type the declaration subset can produce maps to a non-empty
// kind set on every built-in target, and references only to reference kinds.
TEST(TargetProperty, KindTableTotality) {
  std::vector<ConcreteType> types = {ConcreteType::boolean(), ConcreteType::floating(32),
                                     ConcreteType::floating(64), ConcreteType::reference("C")};
  for (int w = 1; w <= 64; ++w) {
    types.push_back(ConcreteType::integer(w, false));
    types.push_back(ConcreteType::integer(w, true));
  }
  for (const auto& name : builtin_target_names()) {
    auto t = *Target::builtin(name);
    for (const auto& ty : types) {
      KindSet k = get_scalar_kinds(ty, t);
      EXPECT_FALSE(k.empty()) << name << " " << ty.str();
      if (ty.kind == ConcreteType::Kind::Ref) {
        for (auto kind : k.kinds()) EXPECT_TRUE(is_reference_kind(kind));
      }
      int needed = ty.kind == ConcreteType::Kind::Ref ? t.ref_width : ty.width;
      EXPECT_GE(t.capacity(k), needed) << name << " " << ty.str();
    }
  }
}

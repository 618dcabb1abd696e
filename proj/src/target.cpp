#include "adtlayout/target.hpp"

#include <json.hpp>

#include "adtlayout/diagnostics.hpp"

namespace adtlayout {

std::string_view kind_name(ScalarKind k) {
  switch (k) {
    case ScalarKind::B32: return "B32";
    case ScalarKind::B64: return "B64";
    case ScalarKind::R32: return "R32";
    case ScalarKind::R64: return "R64";
    case ScalarKind::Ref: return "Ref";
    case ScalarKind::F32: return "F32";
    case ScalarKind::F64: return "F64";
  }
  return "?";
}

std::optional<ScalarKind> parse_kind(std::string_view name) {
  for (auto k : kAllKinds) {
    if (kind_name(k) == name) return k;
  }
  return std::nullopt;
}

bool is_reference_kind(ScalarKind k) {
  return k == ScalarKind::R32 || k == ScalarKind::R64 || k == ScalarKind::Ref;
}

std::vector<ScalarKind> KindSet::kinds() const {
  std::vector<ScalarKind> out;
  for (auto k : kAllKinds) {
    if (contains(k)) out.push_back(k);
  }
  return out;
}

int KindSet::size() const { return static_cast<int>(kinds().size()); }

std::string KindSet::str() const {
  std::string out = "{";
  bool first = true;
  for (auto k : kinds()) {
    if (!first) out += ", ";
    first = false;
    out += kind_name(k);
  }
  return out + "}";
}

std::string_view type_class_name(TypeClass c) {
  switch (c) {
    case TypeClass::Int32: return "int32";
    case TypeClass::Int64: return "int64";
    case TypeClass::F32: return "f32";
    case TypeClass::F64: return "f64";
    case TypeClass::Ref: return "ref";
  }
  return "?";
}

int Target::kind_width(ScalarKind k) const {
  switch (k) {
    case ScalarKind::B32:
    case ScalarKind::R32:
    case ScalarKind::F32: return 32;
    case ScalarKind::B64:
    case ScalarKind::R64:
    case ScalarKind::F64: return 64;
    case ScalarKind::Ref: return ref_width;
  }
  return 0;
}

KindSet Target::kinds_for(TypeClass c) const {
  auto it = kind_table.find(c);
  if (it == kind_table.end() || it->second.empty()) {
    throw Error(ErrorCode::Type, "target '" + name + "' has no scalar kinds for " +
                                     std::string(type_class_name(c)));
  }
  return it->second;
}

namespace {

int kind_rank(ScalarKind k) {
  switch (k) {
    case ScalarKind::B32:
    case ScalarKind::B64: return 0;
    case ScalarKind::F32:
    case ScalarKind::F64: return 1;
    default: return 2;
  }
}

}  // namespace

std::optional<ScalarKind> Target::choose_kind(KindSet kinds, int width) const {
  std::optional<ScalarKind> best;
  for (auto k : kinds.kinds()) {
    if (kind_width(k) < width) continue;
    if (!best || kind_width(k) < kind_width(*best) ||
        (kind_width(k) == kind_width(*best) && kind_rank(k) < kind_rank(*best))) {
      best = k;
    }
  }
  return best;
}

int Target::capacity(KindSet kinds) const {
  int w = 0;
  for (auto k : kinds.kinds()) w = std::max(w, kind_width(k));
  return w;
}

Target Target::x64() {
  Target t;
  t.name = "x64";
  t.word_width = 64;
  t.ref_width = 64;
  KindSet ints{ScalarKind::B64, ScalarKind::F64, ScalarKind::R64};
  t.kind_table = {{TypeClass::Int32, ints},
                  {TypeClass::Int64, ints},
                  {TypeClass::F32, {ScalarKind::B64, ScalarKind::F32}},
                  {TypeClass::F64, {ScalarKind::B64, ScalarKind::F64}},
                  {TypeClass::Ref, {ScalarKind::R64}}};
  t.ref_tagging = RefTagging{2, 1, 0, 1};
  return t;
}

Target Target::jvm() {
  Target t;
  t.name = "jvm";
  t.word_width = 32;
  t.ref_width = 32;
  t.kind_table = {{TypeClass::Int32, {ScalarKind::B32}},
                  {TypeClass::Int64, {ScalarKind::B64}},
                  {TypeClass::F32, {ScalarKind::F32}},
                  {TypeClass::F64, {ScalarKind::F64}},
                  {TypeClass::Ref, {ScalarKind::Ref}}};
  return t;
}

Target Target::x86_32() {
  Target t;
  t.name = "x86-32";
  t.word_width = 32;
  t.ref_width = 32;
  t.kind_table = {{TypeClass::Int32, {ScalarKind::B32, ScalarKind::R32}},
                  {TypeClass::Int64, {ScalarKind::B64}},
                  {TypeClass::F32, {ScalarKind::B32, ScalarKind::F32}},
                  {TypeClass::F64, {ScalarKind::B64, ScalarKind::F64}},
                  {TypeClass::Ref, {ScalarKind::R32}}};
  t.ref_tagging = RefTagging{2, 1, 0, 1};
  return t;
}

std::optional<Target> Target::builtin(std::string_view name) {
  if (name == "x64") return x64();
  if (name == "jvm") return jvm();
  if (name == "x86-32") return x86_32();
  return std::nullopt;
}

std::vector<std::string> builtin_target_names() { return {"x64", "jvm", "x86-32"}; }

Target Target::from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::Syntax, std::string("target file: ") + e.what());
  }
  try {
    Target t;
    t.name = j.at("name").get<std::string>();
    t.word_width = j.value("word_width", 64);
    t.ref_width = j.value("ref_width", t.word_width);
    t.max_scalar_width = j.value("max_scalar_width", 64);
    for (TypeClass c : {TypeClass::Int32, TypeClass::Int64, TypeClass::F32, TypeClass::F64,
                        TypeClass::Ref}) {
      KindSet set;
      for (const auto& k : j.at("kinds").at(std::string(type_class_name(c)))) {
        auto kind = parse_kind(k.get<std::string>());
        if (!kind) throw Error(ErrorCode::Syntax, "target file: unknown scalar kind " + k.dump());
        set = set | KindSet{*kind};
      }
      if (set.empty()) {
        throw Error(ErrorCode::Type, "target file: empty kind set for " +
                                         std::string(type_class_name(c)));
      }
      t.kind_table[c] = set;
    }
    if (j.contains("ref_tagging") && !j["ref_tagging"].is_null()) {
      const auto& r = j["ref_tagging"];
      RefTagging tag;
      tag.free_low_bits = r.value("free_low_bits", 2);
      tag.pattern_bits = r.value("pattern_bits", 1);
      tag.ref_pattern = r.value("ref_pattern", std::uint64_t{0});
      tag.value_pattern = r.value("value_pattern", std::uint64_t{1});
      if (tag.pattern_bits < 1 || tag.pattern_bits > tag.free_low_bits ||
          tag.ref_pattern == tag.value_pattern) {
        throw Error(ErrorCode::Type, "target file: inconsistent ref_tagging");
      }
      t.ref_tagging = tag;
    }
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Syntax, std::string("target file: ") + e.what());
  }
}

}  // namespace adtlayout

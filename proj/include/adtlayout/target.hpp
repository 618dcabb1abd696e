#pragma once

// Machine model: scalar kinds and the per-target map from types to the kinds
// of scalar that can hold them.

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace adtlayout {

enum class ScalarKind : std::uint8_t { B32, B64, R32, R64, Ref, F32, F64 };

inline constexpr std::array<ScalarKind, 7> kAllKinds = {
    ScalarKind::B32, ScalarKind::B64, ScalarKind::R32, ScalarKind::R64,
    ScalarKind::Ref, ScalarKind::F32, ScalarKind::F64};

std::string_view kind_name(ScalarKind k);
std::optional<ScalarKind> parse_kind(std::string_view name);

/// True for kinds that may hold a reference (R32, R64, Ref).
bool is_reference_kind(ScalarKind k);

/// Small set of scalar kinds.
class KindSet {
 public:
  constexpr KindSet() = default;
  constexpr KindSet(std::initializer_list<ScalarKind> kinds) {
    for (auto k : kinds) bits_ |= bit(k);
  }

  static constexpr KindSet from_bits(std::uint8_t bits) {
    KindSet s;
    s.bits_ = bits;
    return s;
  }
  static KindSet references() { return {ScalarKind::R32, ScalarKind::R64, ScalarKind::Ref}; }

  constexpr bool contains(ScalarKind k) const { return (bits_ & bit(k)) != 0; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr std::uint8_t bits() const { return bits_; }
  std::vector<ScalarKind> kinds() const;
  int size() const;

  friend constexpr KindSet operator&(KindSet a, KindSet b) { return from_bits(a.bits_ & b.bits_); }
  friend constexpr KindSet operator|(KindSet a, KindSet b) { return from_bits(a.bits_ | b.bits_); }
  friend constexpr bool operator==(KindSet, KindSet) = default;

  std::string str() const;  // "{B64, F64, R64}"

 private:
  static constexpr std::uint8_t bit(ScalarKind k) {
    return static_cast<std::uint8_t>(1u << static_cast<unsigned>(k));
  }
  std::uint8_t bits_ = 0;
};

/// Classes of normalized scalar types that a target maps to kind sets.
enum class TypeClass : std::uint8_t { Int32, Int64, F32, F64, Ref };

std::string_view type_class_name(TypeClass c);

/// Low-bit tagging of references. A reference-bearing scalar keeps
/// `pattern_bits` low bits as a pattern: `ref_pattern` when it holds a
/// reference, `value_pattern` when it holds packed non-reference bits. The
/// bits in [pattern_bits, free_low_bits) are free while a reference is held.
struct RefTagging {
  int free_low_bits = 2;
  int pattern_bits = 1;
  std::uint64_t ref_pattern = 0;
  std::uint64_t value_pattern = 1;
};

struct Target {
  std::string name;
  int word_width = 64;
  int ref_width = 64;
  int max_scalar_width = 64;
  std::map<TypeClass, KindSet> kind_table;
  std::optional<RefTagging> ref_tagging;

  int kind_width(ScalarKind k) const;

  /// Kinds for a given type class; throws if the table is incomplete.
  KindSet kinds_for(TypeClass c) const;

  /// Preferred concrete kind among `kinds` that can hold `width` bits:
  /// the narrowest one, with integer kinds before float kinds before
  /// reference kinds on ties. Returns nullopt if none is wide enough.
  std::optional<ScalarKind> choose_kind(KindSet kinds, int width) const;

  /// Widest kind in the set, or 0 when empty.
  int capacity(KindSet kinds) const;

  static Target x64();
  static Target jvm();
  static Target x86_32();

  /// Looks up a built-in target by name ("x64", "jvm", "x86-32").
  static std::optional<Target> builtin(std::string_view name);

  /// Loads a target description from JSON text:
  /// {"name": ..., "word_width": 64, "ref_width": 64,
  ///  "kinds": {"int32": ["B64", ...], "int64": [...], "f32": [...], "f64": [...], "ref": [...]},
  ///  "ref_tagging": {"free_low_bits": 2, "pattern_bits": 1, "ref_pattern": 0, "value_pattern": 1}}
  static Target from_json(std::string_view text);
};

std::vector<std::string> builtin_target_names();

}  // namespace adtlayout

#pragma once

// Flattening of packing expressions into (field -> offset, bit pattern) pairs.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "adtlayout/packing.hpp"
#include "adtlayout/verify.hpp"

namespace adtlayout {

/// A pattern bit: constant, occupied by a field, or free for the compiler.
enum class PatBit : std::uint8_t { Zero, One, Assigned, Unassigned };

char pat_bit_char(PatBit b);  // '0', '1', 'x', 'u'

/// Fixed-width bit pattern indexed from the least-significant bit.
class BitPattern {
 public:
  BitPattern() = default;
  explicit BitPattern(int width, PatBit fill = PatBit::Unassigned);

  /// Parses an MSB-first string over "01xu" (also accepts '?' for u and '*' for x).
  static BitPattern parse(std::string_view msb_first);

  int width() const { return static_cast<int>(bits_.size()); }
  PatBit operator[](int pos) const { return bits_[static_cast<std::size_t>(pos)]; }
  PatBit& operator[](int pos) { return bits_[static_cast<std::size_t>(pos)]; }

  /// Grows or shrinks at the most-significant end.
  void resize(int width, PatBit fill);

  /// Overwrites [offset, offset + src.width()) with src.
  void splice(int offset, const BitPattern& src);

  /// Returns `this` placed above `low` (MSB-first concatenation).
  BitPattern above(const BitPattern& low) const;

  bool all(int offset, int width, PatBit b) const;

  /// MSB-first rendering over "01xu".
  std::string str() const;

  friend bool operator==(const BitPattern&, const BitPattern&) = default;

 private:
  std::vector<PatBit> bits_;
};

struct Interval {
  int offset = 0;
  int width = 0;

  int end() const { return offset + width; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

struct FlattenedPacking {
  std::map<std::string, Interval> assignments;  // field -> bits counted from the LSB
  BitPattern pattern;

  int width() const { return pattern.width(); }
};

/// Fields and rigid sub-patterns the solver may position freely inside one scalar.
struct SolveRequest {
  struct Item {
    std::string field;                     // set for a lone field
    int width = 0;
    std::optional<FlattenedPacking> block; // set for a fixed sub-pattern
  };
  std::vector<Item> items;

  int width() const;
};

using AnnotationEntry = std::variant<FlattenedPacking, SolveRequest>;

/// Flattens a fully specified expression. Throws Error on unbound names,
/// duplicate placements or a nested #solve.
FlattenedPacking flatten_expr(const PackingExpr& expr, const SizeContext& ctx);

/// Flattens the entries of a `#packing` annotation, one per scalar.
std::vector<AnnotationEntry> flatten_annotation(const std::vector<PackingExpr>& exprs,
                                                const SizeContext& ctx);

}  // namespace adtlayout

#pragma once

// Backtracking assignment of ADT fields to scalars and bit intervals.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "adtlayout/layout.hpp"
#include "adtlayout/verify.hpp"

namespace adtlayout {

struct SolveOptions {
  int budget = 10000;
  const PackingEnv* packings = nullptr;
  /// Layouts of unboxed ADTs that may appear as field types. Field types
  /// naming any other ADT are treated as references to boxed records.
  const std::map<std::string, LayoutSolution>* nested = nullptr;
};

/// Scalar-level fields of one variant: tuples are already flattened by
/// monomorphization; nested unboxed ADTs expand to one field per scalar.
std::vector<NormField> normalize_fields(const MonoVariant& variant, const Target& target,
                                        const std::map<std::string, LayoutSolution>* nested);

/// Occupancy of one slot by one variant, as bit masks.
struct SlotUse {
  std::uint64_t assigned = 0;
  std::uint64_t zero = 0;
  std::uint64_t one = 0;
  bool closed = false;  // owned by one annotation entry of this variant
  bool ref = false;     // holds a reference in this variant

  std::uint64_t used() const { return assigned | zero | one; }
};

struct SlotState {
  KindSet kinds;
  std::vector<SlotUse> uses;  // per variant

  bool any_ref() const;
  int extent() const;  // highest used bit + 1 over all variants
};

/// Places `field` of `variant` into `slot` first-fit from the LSB (references
/// at their fixed position). Returns the interval, or nullopt when it does
/// not fit; `slot` is unchanged on failure.
std::optional<Interval> place_field(SlotState& slot, int variant, const NormField& field,
                                    const Target& target);

/// Pins a flattened packing at `offset` of `slot` for `variant`.
bool place_block(SlotState& slot, int variant, const FlattenedPacking& block, KindSet kinds,
                 int offset, const Target& target);

/// Interval assignment for the fields of one variant: field i goes to
/// slots[slot_of[i]]; `constraints` pin flattened packings at offset 0 of
/// their slot. Returns one placement per field, or nullopt when something
/// does not fit.
std::optional<std::vector<FieldPlacement>> assign_intervals(
    const std::vector<NormField>& fields, const std::vector<int>& slot_of, std::vector<SlotState>& slots,
    const Target& target, const std::vector<std::pair<int, FlattenedPacking>>& constraints = {},
    int variant = 0);

/// Best layout found within the step budget; never worse than the trivial
/// layout. Throws Error(Infeasible) when an annotation cannot be honoured.
LayoutSolution solve_layout(const MonoAdt& adt, const Target& target, const SolveOptions& options = {});

/// One scalar per field (per annotation entry) and a dedicated tag scalar.
LayoutSolution trivial_layout(const MonoAdt& adt, const Target& target, const SolveOptions& options = {});

}  // namespace adtlayout

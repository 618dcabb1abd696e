#include "adtlayout/codec.hpp"

namespace adtlayout {

std::uint64_t low_mask(int width) {
  if (width <= 0) return 0;
  return width >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << width) - 1;
}

std::int64_t sign_extend(std::uint64_t bits, int width) {
  if (width <= 0 || width >= 64) return static_cast<std::int64_t>(bits);
  std::uint64_t m = std::uint64_t{1} << (width - 1);
  bits &= low_mask(width);
  return static_cast<std::int64_t>((bits ^ m) - m);
}

std::vector<std::uint64_t> encode_variant(const LayoutSolution& sol, int variant,
                                          const std::vector<std::uint64_t>& field_bits) {
  const VariantLayout& v = sol.variants.at(static_cast<std::size_t>(variant));
  if (field_bits.size() != v.fields.size()) {
    throw Error(ErrorCode::Type, "case " + v.name + " expects " + std::to_string(v.fields.size()) +
                                     " field values, got " + std::to_string(field_bits.size()));
  }
  std::vector<std::uint64_t> out(sol.scalars.size(), 0);
  for (std::size_t s = 0; s < sol.scalars.size(); ++s) {
    const BitPattern& p = v.patterns[s];
    for (int b = 0; b < p.width(); ++b) {
      if (p[b] == PatBit::One) out[s] |= std::uint64_t{1} << b;
    }
  }
  for (std::size_t i = 0; i < v.fields.size(); ++i) {
    const FieldPlacement& pl = v.placements[i];
    std::uint64_t value = field_bits[i];
    if (value & ~low_mask(pl.interval.width)) {
      throw Error(ErrorCode::Type, "value for field '" + v.fields[i].name + "' does not fit in " +
                                       std::to_string(pl.interval.width) + " bits");
    }
    out[static_cast<std::size_t>(pl.scalar)] |= value << pl.interval.offset;
  }
  return out;
}

std::uint64_t decode_field(const LayoutSolution& sol, int variant, const std::string& field,
                           const std::vector<std::uint64_t>& scalars) {
  const VariantLayout& v = sol.variants.at(static_cast<std::size_t>(variant));
  int i = v.field_index(field);
  if (i < 0) throw Error(ErrorCode::UnboundName, "case " + v.name + " has no field '" + field + "'");
  const FieldPlacement& pl = v.placements[static_cast<std::size_t>(i)];
  return (scalars.at(static_cast<std::size_t>(pl.scalar)) >> pl.interval.offset) & low_mask(pl.interval.width);
}

}  // namespace adtlayout

#pragma once

// Packing and unpacking of variant values into the scalars of a layout.

#include <cstdint>
#include <string>
#include <vector>

#include "adtlayout/layout.hpp"

namespace adtlayout {

/// Assembles the scalars of `variant` from raw field bits given in the order
/// of the variant's normalized fields: integers as their low `width` bits,
/// floats as IEEE bits, references as heap ids, nested scalars verbatim.
/// Constants and chosen bits of the pattern are emitted as recorded.
/// Throws Error(Type) when a value does not fit its field.
std::vector<std::uint64_t> encode_variant(const LayoutSolution& sol, int variant,
                                          const std::vector<std::uint64_t>& field_bits);

/// (scalar >> offset) & mask(width) for the named field.
std::uint64_t decode_field(const LayoutSolution& sol, int variant, const std::string& field,
                           const std::vector<std::uint64_t>& scalars);

std::uint64_t low_mask(int width);
std::int64_t sign_extend(std::uint64_t bits, int width);

}  // namespace adtlayout

#pragma once

// AST and parser for the packing language: bit-layout declarations, packing
// expressions, and the small ADT / class declaration subset they annotate.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "adtlayout/diagnostics.hpp"

namespace adtlayout {

/// One character of an extended binary literal.
struct BitChar {
  enum class Kind : std::uint8_t { Zero, One, Wild, Field };

  Kind kind = Kind::Zero;
  char letter = 0;  // only meaningful for Field

  static BitChar zero() { return {Kind::Zero, 0}; }
  static BitChar one() { return {Kind::One, 0}; }
  static BitChar wild() { return {Kind::Wild, 0}; }
  static BitChar field(char c) { return {Kind::Field, c}; }

  char to_char() const;

  friend bool operator==(const BitChar& a, const BitChar& b) {
    return a.kind == b.kind && (a.kind != Kind::Field || a.letter == b.letter);
  }
};

struct PackingExpr;

/// Bits are stored most-significant first, as written.
struct BitLayout {
  std::vector<BitChar> bits;
};
struct FieldRef {
  std::string name;
};
struct Apply {
  std::string decl;
  std::vector<PackingExpr> args;
};
struct Concat {
  std::vector<PackingExpr> parts;
};
struct Solve {
  std::vector<PackingExpr> parts;
};
struct EmptyExpr {};

struct PackingExpr {
  using Node = std::variant<EmptyExpr, BitLayout, FieldRef, Apply, Concat, Solve>;

  Node node;
  SourcePos pos;

  PackingExpr() = default;
  PackingExpr(Node n, SourcePos p = {}) : node(std::move(n)), pos(p) {}

  template <typename T>
  const T* as() const { return std::get_if<T>(&node); }

  /// True for Empty and for a zero-width bit layout.
  bool is_empty() const;

  /// Structural equality; ignores source positions and treats `0b` as Empty.
  friend bool operator==(const PackingExpr& a, const PackingExpr& b);
};

struct PackingParam {
  std::string name;
  int width = 0;
};

struct PackingDecl {
  std::string name;
  std::vector<PackingParam> params;
  int width = 0;
  PackingExpr body;
  SourcePos pos;

  friend bool operator==(const PackingDecl& a, const PackingDecl& b) {
    return a.name == b.name && a.width == b.width && a.body == b.body &&
           a.params.size() == b.params.size() &&
           std::equal(a.params.begin(), a.params.end(), b.params.begin(),
                      [](const PackingParam& x, const PackingParam& y) {
                        return x.name == y.name && x.width == y.width;
                      });
  }
};

/// Type syntax as written in field declarations: `u32`, `Option<T>`, `(u8, u8)`.
struct TypeExpr {
  std::string name;               // empty for tuples
  std::vector<TypeExpr> args;     // generic arguments or tuple elements
  bool is_tuple = false;
  SourcePos pos;

  std::string str() const;
  friend bool operator==(const TypeExpr& a, const TypeExpr& b) {
    return a.name == b.name && a.is_tuple == b.is_tuple && a.args == b.args;
  }
};

struct AdtField {
  std::string name;
  TypeExpr type;
};

struct AdtVariant {
  std::string name;
  std::vector<AdtField> fields;
  /// `#packing` entries for this case; one expression per scalar.
  std::optional<std::vector<PackingExpr>> packing;
  SourcePos pos;
};

struct AdtDecl {
  std::string name;
  std::vector<std::string> type_params;
  std::vector<AdtVariant> variants;
  bool unboxed = false;
  bool captured = false;
  SourcePos pos;

  bool has_packing() const;
};

/// Opaque reference type, declared as `class Name;`.
struct ClassDecl {
  std::string name;
  SourcePos pos;
};

using Decl = std::variant<PackingDecl, AdtDecl, ClassDecl>;

/// Parses a whole source file. Throws Error(Syntax | UnknownAnnotation).
std::vector<Decl> parse_program(std::string_view source);

/// Parses a single packing expression; the empty string yields Empty.
PackingExpr parse_packing_expr(std::string_view source);

/// Parses a type expression such as `Option<u32>` or `(u8, bool)`.
TypeExpr parse_type_expr(std::string_view source);

std::string print_expr(const PackingExpr& expr);
std::string print_decl(const PackingDecl& decl);
std::string print_decl(const AdtDecl& decl);
std::string print_program(const std::vector<Decl>& decls);

}  // namespace adtlayout

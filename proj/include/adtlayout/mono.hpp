#pragma once

// Concrete types, monomorphization of ADT declarations, and the rules that
// decide whether an ADT instantiation may be unboxed.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "adtlayout/packing.hpp"
#include "adtlayout/target.hpp"

namespace adtlayout {

struct ConcreteType {
  enum class Kind { Int, Float, Ref, Adt, Tuple };

  Kind kind = Kind::Int;
  int width = 0;           // Int and Float
  bool is_signed = false;  // Int
  bool is_bool = false;    // Int of width 1 spelled `bool`
  std::string name;        // Ref and Adt: canonical name, e.g. "Option<u32>"
  std::vector<ConcreteType> elems;  // Tuple

  static ConcreteType integer(int width, bool is_signed);
  static ConcreteType boolean();
  static ConcreteType floating(int width);
  static ConcreteType reference(std::string name);
  static ConcreteType adt(std::string name);
  static ConcreteType tuple(std::vector<ConcreteType> elems);

  std::string str() const;
  friend bool operator==(const ConcreteType& a, const ConcreteType& b) { return a.str() == b.str(); }
};

/// Kinds of scalar that can physically hold a value of `type`.
/// Throws Error(Type) for ADT and tuple types, which are normalized first.
KindSet get_scalar_kinds(const ConcreteType& type, const Target& target);

/// Declared names visible to type resolution.
struct AdtEnv {
  std::map<std::string, AdtDecl> adts;
  std::set<std::string> classes;

  static AdtEnv from_decls(const std::vector<Decl>& decls);
};

struct MonoField {
  std::string name;
  ConcreteType type;
};

struct MonoVariant {
  std::string name;
  std::vector<MonoField> fields;
  std::optional<std::vector<PackingExpr>> packing;
  SourcePos pos;
};

struct MonoAdt {
  std::string name;       // canonical instance name
  std::string decl_name;
  std::vector<MonoVariant> variants;
  bool recursive = false;
  bool captured = false;
  bool unboxed_annotation = false;
  SourcePos pos;

  bool all_nullary() const;
  bool has_packing() const;
  int field_count() const;
  int variant_index(const std::string& name) const;  // -1 if absent
};

/// Instantiates ADT declarations on demand and tracks the reference graph
/// between instantiations so recursion can be detected.
class Monomorphizer {
 public:
  explicit Monomorphizer(const AdtEnv& env) : env_(&env) {}

  /// Instantiates `decl_name<args>` and everything it references; returns the
  /// canonical instance name.
  std::string instantiate(const std::string& decl_name, const std::vector<ConcreteType>& args,
                          SourcePos pos = {});

  /// Resolves a written type; ADT references are instantiated as a side effect.
  ConcreteType resolve(const TypeExpr& type, const std::map<std::string, ConcreteType>& subst);

  /// All instances so far, with recursion flags computed over the reference graph.
  const std::map<std::string, MonoAdt>& instances();

  /// Instance names in an order where referenced instances come first
  /// (members of one recursive group are adjacent).
  std::vector<std::string> dependency_order();

 private:
  void compute_recursion();

  const AdtEnv* env_;
  std::map<std::string, MonoAdt> instances_;
  std::map<std::string, std::set<std::string>> edges_;
  std::vector<std::string> creation_order_;
  bool dirty_ = false;
};

/// Monomorphizes one declaration. Throws Error(Type | InfiniteType).
MonoAdt monomorphize_adt(const AdtDecl& decl, const std::vector<ConcreteType>& type_args,
                         const AdtEnv& env);

/// Parses and instantiates a request such as `Option<u32>`.
std::string instantiate_request(Monomorphizer& mono, const std::string& request);

enum class BoxReason { None, Recursive, Captured, Default };

std::string_view box_reason_name(BoxReason r);

struct Eligibility {
  bool unboxed = false;
  BoxReason reason = BoxReason::None;
  bool tag_only = false;  // every variant is nullary: a bare tag integer

  friend bool operator==(const Eligibility&, const Eligibility&) = default;
};

struct UnboxOptions {
  int auto_unbox_limit = 2;
};

Eligibility unboxing_eligibility(const MonoAdt& adt, const UnboxOptions& options = {});

}  // namespace adtlayout

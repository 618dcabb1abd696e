#include "adtlayout/mono.hpp"

#include <algorithm>
#include <charconv>
#include <functional>

namespace adtlayout {

ConcreteType ConcreteType::integer(int width, bool is_signed) {
  ConcreteType t;
  t.kind = Kind::Int;
  t.width = width;
  t.is_signed = is_signed;
  return t;
}

ConcreteType ConcreteType::boolean() {
  ConcreteType t = integer(1, false);
  t.is_bool = true;
  return t;
}

ConcreteType ConcreteType::floating(int width) {
  ConcreteType t;
  t.kind = Kind::Float;
  t.width = width;
  return t;
}

ConcreteType ConcreteType::reference(std::string name) {
  ConcreteType t;
  t.kind = Kind::Ref;
  t.name = std::move(name);
  return t;
}

ConcreteType ConcreteType::adt(std::string name) {
  ConcreteType t;
  t.kind = Kind::Adt;
  t.name = std::move(name);
  return t;
}

ConcreteType ConcreteType::tuple(std::vector<ConcreteType> elems) {
  ConcreteType t;
  t.kind = Kind::Tuple;
  t.elems = std::move(elems);
  return t;
}

std::string ConcreteType::str() const {
  switch (kind) {
    case Kind::Int:
      if (is_bool) return "bool";
      return (is_signed ? "i" : "u") + std::to_string(width);
    case Kind::Float: return width == 32 ? "float" : "double";
    case Kind::Ref:
    case Kind::Adt: return name;
    case Kind::Tuple: {
      std::string out = "(";
      for (std::size_t i = 0; i < elems.size(); ++i) {
        if (i) out += ", ";
        out += elems[i].str();
      }
      return out + ")";
    }
  }
  return "?";
}

KindSet get_scalar_kinds(const ConcreteType& type, const Target& target) {
  switch (type.kind) {
    case ConcreteType::Kind::Int:
      if (type.width < 1 || type.width > 64) {
        throw Error(ErrorCode::Type, "integer width out of range in " + type.str());
      }
      return target.kinds_for(type.width <= 32 ? TypeClass::Int32 : TypeClass::Int64);
    case ConcreteType::Kind::Float:
      return target.kinds_for(type.width == 32 ? TypeClass::F32 : TypeClass::F64);
    case ConcreteType::Kind::Ref:
      return target.kinds_for(TypeClass::Ref);
    case ConcreteType::Kind::Adt:
    case ConcreteType::Kind::Tuple:
      break;
  }
  throw Error(ErrorCode::Type, "type '" + type.str() + "' must be normalized before kind lookup");
}

AdtEnv AdtEnv::from_decls(const std::vector<Decl>& decls) {
  AdtEnv env;
  for (const auto& d : decls) {
    if (const auto* a = std::get_if<AdtDecl>(&d)) {
      if (!env.adts.emplace(a->name, *a).second) {
        throw Error(ErrorCode::Duplicate, "duplicate type '" + a->name + "'", a->pos);
      }
    } else if (const auto* c = std::get_if<ClassDecl>(&d)) {
      env.classes.insert(c->name);
    }
  }
  return env;
}

bool MonoAdt::all_nullary() const {
  return std::all_of(variants.begin(), variants.end(),
                     [](const MonoVariant& v) { return v.fields.empty(); });
}

bool MonoAdt::has_packing() const {
  return std::any_of(variants.begin(), variants.end(),
                     [](const MonoVariant& v) { return v.packing.has_value(); });
}

int MonoAdt::field_count() const {
  int n = 0;
  for (const auto& v : variants) n += static_cast<int>(v.fields.size());
  return n;
}

int MonoAdt::variant_index(const std::string& n) const {
  for (std::size_t i = 0; i < variants.size(); ++i) {
    if (variants[i].name == n) return static_cast<int>(i);
  }
  return -1;
}

namespace {

constexpr std::size_t kMaxInstances = 1000;
constexpr std::size_t kMaxInstanceName = 400;

std::optional<int> sized_int(const std::string& name, char prefix) {
  if (name.size() < 2 || name[0] != prefix) return std::nullopt;
  int n = 0;
  auto [p, ec] = std::from_chars(name.data() + 1, name.data() + name.size(), n);
  if (ec != std::errc() || p != name.data() + name.size() || n < 1 || n > 64) return std::nullopt;
  return n;
}

void flatten_field(const std::string& name, const ConcreteType& type, std::vector<MonoField>& out) {
  if (type.kind == ConcreteType::Kind::Tuple) {
    for (std::size_t i = 0; i < type.elems.size(); ++i) {
      flatten_field(name + "." + std::to_string(i), type.elems[i], out);
    }
    return;
  }
  out.push_back({name, type});
}

}  // namespace

ConcreteType Monomorphizer::resolve(const TypeExpr& type,
                                    const std::map<std::string, ConcreteType>& subst) {
  if (type.is_tuple) {
    std::vector<ConcreteType> elems;
    for (const auto& e : type.args) elems.push_back(resolve(e, subst));
    return ConcreteType::tuple(std::move(elems));
  }
  const std::string& n = type.name;
  auto no_args = [&] {
    if (!type.args.empty()) {
      throw Error(ErrorCode::Type, "type '" + n + "' takes no type arguments", type.pos);
    }
  };
  if (auto it = subst.find(n); it != subst.end()) {
    no_args();
    return it->second;
  }
  if (n == "bool") return no_args(), ConcreteType::boolean();
  if (n == "byte") return no_args(), ConcreteType::integer(8, false);
  if (n == "int") return no_args(), ConcreteType::integer(32, true);
  if (n == "long") return no_args(), ConcreteType::integer(64, true);
  if (n == "float") return no_args(), ConcreteType::floating(32);
  if (n == "double") return no_args(), ConcreteType::floating(64);
  if (n == "string") return no_args(), ConcreteType::reference("string");
  if (auto w = sized_int(n, 'u')) return no_args(), ConcreteType::integer(*w, false);
  if (auto w = sized_int(n, 'i')) return no_args(), ConcreteType::integer(*w, true);
  if (n == "Array") {
    if (type.args.size() != 1) throw Error(ErrorCode::Type, "Array takes one type argument", type.pos);
    return ConcreteType::reference("Array<" + resolve(type.args[0], subst).str() + ">");
  }
  if (env_->classes.count(n)) return no_args(), ConcreteType::reference(n);
  if (env_->adts.count(n)) {
    std::vector<ConcreteType> args;
    for (const auto& a : type.args) args.push_back(resolve(a, subst));
    return ConcreteType::adt(instantiate(n, args, type.pos));
  }
  throw Error(ErrorCode::UnboundName, "unknown type '" + n + "'", type.pos);
}

std::string Monomorphizer::instantiate(const std::string& decl_name,
                                       const std::vector<ConcreteType>& args, SourcePos pos) {
  auto dit = env_->adts.find(decl_name);
  if (dit == env_->adts.end()) {
    throw Error(ErrorCode::UnboundName, "unknown type '" + decl_name + "'", pos);
  }
  const AdtDecl& decl = dit->second;
  if (args.size() != decl.type_params.size()) {
    throw Error(ErrorCode::Type,
                "type '" + decl_name + "' expects " + std::to_string(decl.type_params.size()) +
                    " type arguments, got " + std::to_string(args.size()),
                pos);
  }
  std::string name = decl_name;
  if (!args.empty()) {
    name += "<";
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (i) name += ", ";
      name += args[i].str();
    }
    name += ">";
  }
  if (instances_.count(name)) return name;
  if (name.size() > kMaxInstanceName || instances_.size() >= kMaxInstances) {
    throw Error(ErrorCode::InfiniteType,
                "instantiating '" + decl_name + "' does not terminate (polymorphic recursion)", pos);
  }

  dirty_ = true;
  creation_order_.push_back(name);
  MonoAdt& placeholder = instances_[name];
  placeholder.name = name;
  placeholder.decl_name = decl_name;
  edges_[name];

  std::map<std::string, ConcreteType> subst;
  for (std::size_t i = 0; i < args.size(); ++i) subst.emplace(decl.type_params[i], args[i]);

  MonoAdt adt;
  adt.name = name;
  adt.decl_name = decl_name;
  adt.captured = decl.captured;
  adt.unboxed_annotation = decl.unboxed;
  adt.pos = decl.pos;
  std::set<std::string> refs;
  for (const auto& v : decl.variants) {
    MonoVariant mv;
    mv.name = v.name;
    mv.packing = v.packing;
    mv.pos = v.pos;
    std::set<std::string> seen;
    for (const auto& f : v.fields) {
      if (!seen.insert(f.name).second) {
        throw Error(ErrorCode::Duplicate, "duplicate field '" + f.name + "' in case " + v.name, v.pos);
      }
      flatten_field(f.name, resolve(f.type, subst), mv.fields);
    }
    for (const auto& f : mv.fields) {
      if (f.type.kind == ConcreteType::Kind::Adt) refs.insert(f.type.name);
    }
    adt.variants.push_back(std::move(mv));
  }
  {
    std::set<std::string> names;
    for (const auto& v : adt.variants) {
      if (!names.insert(v.name).second) {
        throw Error(ErrorCode::Duplicate, "duplicate case '" + v.name + "' in " + decl_name, decl.pos);
      }
    }
  }
  edges_[name] = std::move(refs);
  instances_[name] = std::move(adt);
  return name;
}

void Monomorphizer::compute_recursion() {
  if (!dirty_) return;
  dirty_ = false;
  std::map<std::string, int> index, low;
  std::map<std::string, bool> on_stack;
  std::vector<std::string> stack;
  std::vector<std::vector<std::string>> sccs;
  int counter = 0;
  std::function<void(const std::string&)> strong = [&](const std::string& v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack[v] = true;
    for (const auto& w : edges_[v]) {
      if (!index.count(w)) {
        strong(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack[w]) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] == index[v]) {
      std::vector<std::string> scc;
      std::string w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        scc.push_back(w);
      } while (w != v);
      sccs.push_back(std::move(scc));
    }
  };
  for (const auto& n : creation_order_) {
    if (!index.count(n)) strong(n);
  }
  for (const auto& scc : sccs) {
    bool rec = scc.size() > 1 || edges_[scc[0]].count(scc[0]) > 0;
    for (const auto& n : scc) instances_[n].recursive = rec;
  }
}

const std::map<std::string, MonoAdt>& Monomorphizer::instances() {
  compute_recursion();
  return instances_;
}

std::vector<std::string> Monomorphizer::dependency_order() {
  compute_recursion();
  std::vector<std::string> order;
  std::set<std::string> done;
  std::function<void(const std::string&, std::set<std::string>&)> visit =
      [&](const std::string& n, std::set<std::string>& active) {
        if (done.count(n) || active.count(n)) return;
        active.insert(n);
        for (const auto& m : edges_[n]) visit(m, active);
        active.erase(n);
        if (done.insert(n).second) order.push_back(n);
      };
  for (const auto& n : creation_order_) {
    std::set<std::string> active;
    visit(n, active);
  }
  return order;
}

MonoAdt monomorphize_adt(const AdtDecl& decl, const std::vector<ConcreteType>& type_args,
                         const AdtEnv& env) {
  AdtEnv local = env;
  local.adts.insert_or_assign(decl.name, decl);
  Monomorphizer m(local);
  std::string name = m.instantiate(decl.name, type_args, decl.pos);
  return m.instances().at(name);
}

std::string instantiate_request(Monomorphizer& mono, const std::string& request) {
  TypeExpr t = parse_type_expr(request);
  if (t.is_tuple) throw Error(ErrorCode::Type, "cannot instantiate a tuple type: " + request);
  ConcreteType c = mono.resolve(t, {});
  if (c.kind != ConcreteType::Kind::Adt) {
    throw Error(ErrorCode::Type, "'" + request + "' does not name an ADT");
  }
  return c.name;
}

std::string_view box_reason_name(BoxReason r) {
  switch (r) {
    case BoxReason::None: return "none";
    case BoxReason::Recursive: return "recursive";
    case BoxReason::Captured: return "captured";
    case BoxReason::Default: return "default";
  }
  return "?";
}

Eligibility unboxing_eligibility(const MonoAdt& adt, const UnboxOptions& options) {
  if (adt.recursive) return {false, BoxReason::Recursive, false};
  if (adt.captured) return {false, BoxReason::Captured, false};
  bool tag_only = adt.all_nullary();
  if (adt.unboxed_annotation || adt.has_packing()) return {true, BoxReason::None, tag_only};
  if (tag_only) return {true, BoxReason::None, true};
  if (adt.variants.size() == 1 && adt.field_count() <= options.auto_unbox_limit) {
    return {true, BoxReason::None, false};
  }
  return {false, BoxReason::Default, false};
}

}  // namespace adtlayout

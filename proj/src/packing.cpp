#include "adtlayout/packing.hpp"

#include <cctype>
#include <charconv>
#include <sstream>

namespace adtlayout {

char BitChar::to_char() const {
  switch (kind) {
    case Kind::Zero: return '0';
    case Kind::One: return '1';
    case Kind::Wild: return '?';
    case Kind::Field: return letter;
  }
  return '0';
}

bool PackingExpr::is_empty() const {
  if (std::holds_alternative<EmptyExpr>(node)) return true;
  if (const auto* layout = as<BitLayout>()) return layout->bits.empty();
  return false;
}

namespace {

bool lists_equal(const std::vector<PackingExpr>& a, const std::vector<PackingExpr>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!(a[i] == b[i])) return false;
  }
  return true;
}

}  // namespace

bool operator==(const PackingExpr& a, const PackingExpr& b) {
  if (a.is_empty() || b.is_empty()) return a.is_empty() && b.is_empty();
  if (a.node.index() != b.node.index()) return false;
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        const auto& y = std::get<T>(b.node);
        if constexpr (std::is_same_v<T, EmptyExpr>) {
          return true;
        } else if constexpr (std::is_same_v<T, BitLayout>) {
          return x.bits == y.bits;
        } else if constexpr (std::is_same_v<T, FieldRef>) {
          return x.name == y.name;
        } else if constexpr (std::is_same_v<T, Apply>) {
          return x.decl == y.decl && lists_equal(x.args, y.args);
        } else {
          return lists_equal(x.parts, y.parts);
        }
      },
      a.node);
}

bool AdtDecl::has_packing() const {
  for (const auto& v : variants) {
    if (v.packing) return true;
  }
  return false;
}

std::string TypeExpr::str() const {
  std::string out;
  if (is_tuple) {
    out = "(";
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (i) out += ", ";
      out += args[i].str();
    }
    return out + ")";
  }
  out = name;
  if (!args.empty()) {
    out += "<";
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (i) out += ", ";
      out += args[i].str();
    }
    out += ">";
  }
  return out;
}

namespace {

enum class Tok { End, Ident, Int, Bits, Hash, Punct };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  SourcePos pos;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      Token t;
      t.pos = {line_, col_};
      if (i_ >= src_.size()) {
        t.kind = Tok::End;
        out.push_back(t);
        return out;
      }
      char c = src_[i_];
      if (c == '0' && i_ + 1 < src_.size() && src_[i_ + 1] == 'b') {
        advance(2);
        t.kind = Tok::Bits;
        while (i_ < src_.size() && is_bit_char(src_[i_])) {
          char b = src_[i_];
          if (std::isdigit(static_cast<unsigned char>(b)) && b != '0' && b != '1') {
            throw Error(ErrorCode::Syntax,
                        std::string("malformed binary literal: unexpected '") + b + "'",
                        {line_, col_});
          }
          t.text += b;
          advance(1);
        }
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        t.kind = Tok::Int;
        while (i_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i_]))) {
          t.text += src_[i_];
          advance(1);
        }
      } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        t.kind = Tok::Ident;
        while (i_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[i_])) ||
                                    src_[i_] == '_')) {
          t.text += src_[i_];
          advance(1);
        }
      } else if (c == '#') {
        advance(1);
        t.kind = Tok::Hash;
        while (i_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[i_])) ||
                                    src_[i_] == '_')) {
          t.text += src_[i_];
          advance(1);
        }
        if (t.text.empty()) throw Error(ErrorCode::Syntax, "expected annotation name after '#'", t.pos);
      } else if (std::string_view("(){}<>,:;=.?").find(c) != std::string_view::npos) {
        t.kind = Tok::Punct;
        t.text = std::string(1, c);
        advance(1);
      } else {
        throw Error(ErrorCode::Syntax, std::string("unexpected character '") + c + "'", t.pos);
      }
      out.push_back(std::move(t));
    }
  }

 private:
  static bool is_bit_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '?';
  }

  void advance(std::size_t n) {
    for (std::size_t k = 0; k < n && i_ < src_.size(); ++k) {
      if (src_[i_] == '\n') {
        ++line_;
        col_ = 1;
      } else {
        ++col_;
      }
      ++i_;
    }
  }

  void skip_space() {
    for (;;) {
      while (i_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[i_]))) advance(1);
      if (i_ + 1 < src_.size() && src_[i_] == '/' && src_[i_ + 1] == '/') {
        while (i_ < src_.size() && src_[i_] != '\n') advance(1);
        continue;
      }
      return;
    }
  }

  std::string_view src_;
  std::size_t i_ = 0;
  int line_ = 1;
  int col_ = 1;
};

class Parser {
 public:
  explicit Parser(std::string_view src) : toks_(Lexer(src).run()) {}

  std::vector<Decl> program() {
    std::vector<Decl> out;
    while (!at_end()) {
      const Token& t = peek();
      if (t.kind == Tok::Ident && t.text == "packing") {
        out.emplace_back(packing_decl());
      } else if (t.kind == Tok::Ident && t.text == "type") {
        out.emplace_back(adt_decl());
      } else if (t.kind == Tok::Ident && t.text == "class") {
        SourcePos pos = next().pos;
        ClassDecl c{expect_ident(), pos};
        expect(";");
        out.emplace_back(std::move(c));
      } else {
        fail("expected 'packing', 'type' or 'class' declaration");
      }
    }
    return out;
  }

  PackingExpr standalone_expr() {
    if (at_end()) return PackingExpr(EmptyExpr{}, peek().pos);
    PackingExpr e = expr();
    if (!at_end()) fail("unexpected trailing input");
    return e;
  }

  TypeExpr standalone_type() {
    TypeExpr t = type();
    if (!at_end()) fail("unexpected trailing input");
    return t;
  }

 private:
  const Token& peek(std::size_t k = 0) const {
    return toks_[std::min(pos_ + k, toks_.size() - 1)];
  }
  bool at_end() const { return peek().kind == Tok::End; }
  const Token& next() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }
  bool is_punct(std::string_view p) const {
    return peek().kind == Tok::Punct && peek().text == p;
  }
  bool accept(std::string_view p) {
    if (is_punct(p)) {
      next();
      return true;
    }
    return false;
  }
  [[noreturn]] void fail(const std::string& msg) const {
    const Token& t = peek();
    std::string found = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
    throw Error(ErrorCode::Syntax, msg + ", found " + found, t.pos);
  }
  void expect(std::string_view p) {
    if (!accept(p)) fail("expected '" + std::string(p) + "'");
  }
  std::string expect_ident() {
    if (peek().kind != Tok::Ident) fail("expected identifier");
    return next().text;
  }
  int expect_int() {
    if (peek().kind != Tok::Int) fail("expected integer");
    const Token& t = next();
    int v = 0;
    auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (ec != std::errc()) throw Error(ErrorCode::Syntax, "integer out of range", t.pos);
    return v;
  }

  PackingDecl packing_decl() {
    PackingDecl d;
    d.pos = next().pos;
    d.name = expect_ident();
    expect("(");
    if (!is_punct(")")) {
      do {
        PackingParam p;
        p.name = expect_ident();
        expect(":");
        p.width = expect_int();
        d.params.push_back(std::move(p));
      } while (accept(","));
    }
    expect(")");
    expect(":");
    d.width = expect_int();
    expect("=");
    if (is_punct(";")) {
      d.body = PackingExpr(EmptyExpr{}, peek().pos);
    } else {
      d.body = expr();
    }
    expect(";");
    return d;
  }

  AdtDecl adt_decl() {
    AdtDecl d;
    d.pos = next().pos;
    d.name = expect_ident();
    if (accept("<")) {
      do {
        d.type_params.push_back(expect_ident());
      } while (accept(","));
      expect(">");
    }
    std::optional<std::vector<PackingExpr>> type_packing;
    SourcePos type_packing_pos;
    while (peek().kind == Tok::Hash) {
      type_packing_pos = peek().pos;
      annotation(d, type_packing);
    }
    expect("{");
    while (!accept("}")) {
      if (at_end()) fail("expected '}'");
      if (peek().kind != Tok::Ident || peek().text != "case") fail("expected 'case'");
      AdtVariant v;
      v.pos = next().pos;
      v.name = expect_ident();
      if (accept("(")) {
        if (!is_punct(")")) {
          do {
            AdtField f;
            f.name = expect_ident();
            expect(":");
            f.type = type();
            v.fields.push_back(std::move(f));
          } while (accept(","));
        }
        expect(")");
      }
      while (peek().kind == Tok::Hash) {
        annotation(d, v.packing);
      }
      expect(";");
      d.variants.push_back(std::move(v));
    }
    if (type_packing) {
      if (d.variants.size() != 1) {
        throw Error(ErrorCode::Syntax,
                    "a type-level #packing requires exactly one case; attach it to a case instead",
                    type_packing_pos);
      }
      if (d.variants[0].packing) {
        throw Error(ErrorCode::Duplicate, "more than one #packing annotation", type_packing_pos);
      }
      d.variants[0].packing = std::move(type_packing);
    }
    return d;
  }

  void annotation(AdtDecl& d, std::optional<std::vector<PackingExpr>>& packing) {
    const Token& t = next();
    if (t.text == "unboxed") {
      d.unboxed = true;
    } else if (t.text == "captured") {
      d.captured = true;
    } else if (t.text == "packing" || t.text == "packed") {
      if (packing) throw Error(ErrorCode::Duplicate, "more than one #packing annotation", t.pos);
      std::vector<PackingExpr> exprs;
      if (accept("(")) {
        exprs = expr_list();
        expect(")");
      } else {
        exprs.push_back(expr());
      }
      packing = std::move(exprs);
    } else {
      throw Error(ErrorCode::UnknownAnnotation, "unknown annotation '#" + t.text + "'", t.pos);
    }
  }

  std::vector<PackingExpr> expr_list() {
    std::vector<PackingExpr> out;
    if (is_punct(")")) return out;
    do {
      out.push_back(expr());
    } while (accept(","));
    return out;
  }

  PackingExpr expr() {
    const Token& t = peek();
    SourcePos pos = t.pos;
    if (t.kind == Tok::Bits) {
      BitLayout layout;
      for (char c : next().text) {
        if (c == '_') continue;
        if (c == '0') {
          layout.bits.push_back(BitChar::zero());
        } else if (c == '1') {
          layout.bits.push_back(BitChar::one());
        } else if (c == '?') {
          layout.bits.push_back(BitChar::wild());
        } else if (std::isalpha(static_cast<unsigned char>(c))) {
          layout.bits.push_back(BitChar::field(c));
        } else {
          throw Error(ErrorCode::Syntax, std::string("malformed binary literal: '") + c + "'", pos);
        }
      }
      return PackingExpr(std::move(layout), pos);
    }
    if (t.kind == Tok::Hash) {
      std::string kw = next().text;
      if (kw != "concat" && kw != "solve") {
        throw Error(ErrorCode::Syntax, "expected #concat or #solve, found '#" + kw + "'", pos);
      }
      expect("(");
      auto parts = expr_list();
      expect(")");
      if (kw == "concat") return PackingExpr(Concat{std::move(parts)}, pos);
      return PackingExpr(Solve{std::move(parts)}, pos);
    }
    if (t.kind == Tok::Ident) {
      std::string name = next().text;
      if (accept("(")) {
        auto args = expr_list();
        expect(")");
        return PackingExpr(Apply{std::move(name), std::move(args)}, pos);
      }
      return PackingExpr(FieldRef{std::move(name)}, pos);
    }
    fail("expected packing expression");
  }

  TypeExpr type() {
    TypeExpr t;
    t.pos = peek().pos;
    if (accept("(")) {
      t.is_tuple = true;
      if (!is_punct(")")) {
        do {
          t.args.push_back(type());
        } while (accept(","));
      }
      expect(")");
      return t;
    }
    t.name = expect_ident();
    if (accept("<")) {
      do {
        t.args.push_back(type());
      } while (accept(","));
      expect(">");
    }
    return t;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

void print_list(std::ostringstream& os, const std::vector<PackingExpr>& xs) {
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) os << ", ";
    os << print_expr(xs[i]);
  }
}

void print_annotations(std::ostringstream& os, const std::vector<PackingExpr>& exprs) {
  os << " #packing(";
  print_list(os, exprs);
  os << ")";
}

}  // namespace

std::vector<Decl> parse_program(std::string_view source) { return Parser(source).program(); }

PackingExpr parse_packing_expr(std::string_view source) { return Parser(source).standalone_expr(); }

TypeExpr parse_type_expr(std::string_view source) { return Parser(source).standalone_type(); }

std::string print_expr(const PackingExpr& expr) {
  if (expr.is_empty()) return "0b";
  std::ostringstream os;
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, BitLayout>) {
          os << "0b";
          for (const auto& b : x.bits) os << b.to_char();
        } else if constexpr (std::is_same_v<T, FieldRef>) {
          os << x.name;
        } else if constexpr (std::is_same_v<T, Apply>) {
          os << x.decl << "(";
          print_list(os, x.args);
          os << ")";
        } else if constexpr (std::is_same_v<T, Concat>) {
          os << "#concat(";
          print_list(os, x.parts);
          os << ")";
        } else if constexpr (std::is_same_v<T, Solve>) {
          os << "#solve(";
          print_list(os, x.parts);
          os << ")";
        }
      },
      expr.node);
  return os.str();
}

std::string print_decl(const PackingDecl& decl) {
  std::ostringstream os;
  os << "packing " << decl.name << "(";
  for (std::size_t i = 0; i < decl.params.size(); ++i) {
    if (i) os << ", ";
    os << decl.params[i].name << ": " << decl.params[i].width;
  }
  os << "): " << decl.width << " = " << print_expr(decl.body) << ";";
  return os.str();
}

std::string print_decl(const AdtDecl& decl) {
  std::ostringstream os;
  os << "type " << decl.name;
  if (!decl.type_params.empty()) {
    os << "<";
    for (std::size_t i = 0; i < decl.type_params.size(); ++i) {
      if (i) os << ", ";
      os << decl.type_params[i];
    }
    os << ">";
  }
  if (decl.unboxed) os << " #unboxed";
  if (decl.captured) os << " #captured";
  os << " {\n";
  for (const auto& v : decl.variants) {
    os << "  case " << v.name;
    if (!v.fields.empty()) {
      os << "(";
      for (std::size_t i = 0; i < v.fields.size(); ++i) {
        if (i) os << ", ";
        os << v.fields[i].name << ": " << v.fields[i].type.str();
      }
      os << ")";
    }
    if (v.packing) print_annotations(os, *v.packing);
    os << ";\n";
  }
  os << "}";
  return os.str();
}

std::string print_program(const std::vector<Decl>& decls) {
  std::string out;
  for (const auto& d : decls) {
    std::visit(
        [&](const auto& x) {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, ClassDecl>) {
            out += "class " + x.name + ";";
          } else {
            out += print_decl(x);
          }
        },
        d);
    out += "\n";
  }
  return out;
}

}  // namespace adtlayout

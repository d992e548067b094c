#include "tenet/parser.hpp"

#include <cctype>
#include <cstring>

namespace tenet {

namespace {

class Parser {
 public:
  Parser(const std::string& text, const IndexSpaceRegistry& reg) : s_(text), reg_(reg) {}

  ExprHandle parse() {
    skip_ws();
    if (at_end()) fail("empty expression", pos_, pos_);
    ExprHandle e = parse_sum();
    skip_ws();
    if (!at_end()) fail("unexpected input", pos_, pos_ + 1);
    return e;
  }

 private:
  const std::string& s_;
  const IndexSpaceRegistry& reg_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& msg, std::size_t b, std::size_t e) const {
    if (e > s_.size()) e = s_.size();
    if (b > e) b = e;
    throw ParseError(msg + " at offset " + std::to_string(b), SourceSpan{b, e});
  }

  bool at_end() const { return pos_ >= s_.size(); }
  unsigned char cur() const { return at_end() ? 0 : static_cast<unsigned char>(s_[pos_]); }

  void skip_ws() {
    while (!at_end() && (cur() == ' ' || cur() == '\t' || cur() == '\n' || cur() == '\r')) ++pos_;
  }

  bool starts_with(const char* lit) const { return s_.compare(pos_, std::strlen(lit), lit) == 0; }

  // 0 = none, +1, -1
  int take_sign() {
    skip_ws();
    if (cur() == '+') {
      ++pos_;
      return 1;
    }
    if (cur() == '-') {
      ++pos_;
      return -1;
    }
    if (starts_with("−")) {
      pos_ += std::strlen("−");
      return -1;
    }
    return 0;
  }

  ExprHandle parse_sum() {
    std::vector<ExprHandle> terms;
    std::size_t start = pos_;
    int sign = take_sign();
    terms.push_back(parse_term(sign == 0 ? 1 : sign, start));
    while (true) {
      skip_ws();
      std::size_t at = pos_;
      int sg = take_sign();
      if (sg == 0) break;
      terms.push_back(parse_term(sg, at));
    }
    return sum(std::move(terms));
  }

  static bool ident_char(unsigned char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c >= 0x80;
  }
  static bool ident_start(unsigned char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c >= 0x80;
  }

  bool at_factor_start() {
    skip_ws();
    if (at_end()) return false;
    unsigned char c = cur();
    if (starts_with("−")) return false;
    return ident_start(c) || c == '(';
  }

  bool at_number() {
    skip_ws();
    return cur() >= '0' && cur() <= '9';
  }

  Rational parse_uint() {
    skip_ws();
    std::size_t b = pos_;
    while (cur() >= '0' && cur() <= '9') ++pos_;
    if (b == pos_) fail("expected an integer", b, b + 1);
    return Rational(boost::multiprecision::cpp_int(s_.substr(b, pos_ - b)));
  }

  Rational parse_rational() {
    Rational r = parse_uint();
    skip_ws();
    if (cur() == '/') {
      std::size_t at = pos_;
      ++pos_;
      Rational d = parse_uint();
      if (d == 0) fail("zero denominator", at, pos_);
      r /= d;
    }
    return r;
  }

  Rational parse_signed_rational() {
    int sg = take_sign();
    Rational r = parse_rational();
    return sg < 0 ? Rational(-r) : r;
  }

  // "(re,im)" complex literal; restores position when the parenthesis opens a subexpression
  bool try_complex(Scalar& out) {
    std::size_t save = pos_;
    ++pos_;  // '('
    skip_ws();
    int sg = take_sign();
    if (!at_number()) {
      pos_ = save;
      return false;
    }
    Rational re = parse_rational();
    if (sg < 0) re = -re;
    skip_ws();
    if (cur() != ',') {
      pos_ = save;
      return false;
    }
    ++pos_;
    Rational im = parse_signed_rational();
    skip_ws();
    if (cur() != ')') fail("expected ')' closing complex literal", pos_, pos_ + 1);
    ++pos_;
    out = Scalar(re, im);
    return true;
  }

  ExprHandle parse_term(int sign, std::size_t start) {
    Scalar coef(sign);
    bool any = false;
    skip_ws();
    if (at_number()) {
      coef *= Scalar(parse_rational());
      any = true;
    }
    std::vector<ExprHandle> factors;
    while (true) {
      skip_ws();
      if (cur() == '(') {
        Scalar z;
        if (try_complex(z)) {
          coef *= z;
          any = true;
          continue;
        }
        std::size_t open = pos_;
        ++pos_;
        ExprHandle inner = parse_sum();
        skip_ws();
        if (cur() != ')') fail("expected ')'", open, pos_ + 1);
        ++pos_;
        factors.push_back(inner);
        any = true;
        continue;
      }
      if (!at_factor_start()) break;
      factors.push_back(parse_factor());
      any = true;
    }
    if (!any) fail("expected a term", start, pos_ + 1);
    return product(coef, std::move(factors));
  }

  std::string parse_ident() {
    std::size_t b = pos_;
    while (!at_end() && ident_char(cur()) && !starts_with("−")) ++pos_;
    return s_.substr(b, pos_ - b);
  }

  ExprHandle parse_factor() {
    skip_ws();
    std::size_t b = pos_;
    std::string label = parse_ident();
    skip_ws();
    bool conj = false;
    if (cur() == '*') {
      conj = true;
      ++pos_;
      skip_ws();
      if (cur() != '{') fail("expected '{' after conjugation marker", pos_, pos_ + 1);
    }
    if (cur() != '{') return variable(label);
    ++pos_;
    std::vector<std::vector<Index>> groups(1);
    std::vector<std::size_t> group_at{pos_};
    while (true) {
      skip_ws();
      if (cur() == '}') {
        ++pos_;
        break;
      }
      if (cur() == ';') {
        ++pos_;
        groups.emplace_back();
        group_at.push_back(pos_);
        if (groups.size() > 3) fail("at most three slot groups (bra;ket;aux)", b, pos_);
        continue;
      }
      if (!groups.back().empty()) {
        if (cur() != ',') fail("expected ',' or ';' between indices", pos_, pos_ + 1);
        ++pos_;
        skip_ws();
      }
      if (cur() == '_') {
        ++pos_;
        groups.back().push_back(Index());
        continue;
      }
      groups.back().push_back(parse_index());
    }
    std::size_t end_slots = pos_;
    if (groups.size() < 2) fail("expected ';' separating bra and ket", b, end_slots);
    std::optional<SymmetrySpec> sym;
    skip_ws();
    if (cur() == ':') {
      ++pos_;
      skip_ws();
      std::size_t tb = pos_;
      while (!at_end() && (std::isalpha(cur()) || cur() == '-') && !starts_with("−")) ++pos_;
      try {
        sym = parse_symtag(s_.substr(tb, pos_ - tb));
      } catch (const std::invalid_argument& ex) {
        fail(ex.what(), tb, pos_ + 1);
      }
    }
    if (label == kFermiOpLabel || label == kGenuineOpLabel) {
      if (groups.size() > 2 || sym || conj) fail("normal operators take only annihilators;creators", b, pos_);
      NormalOperator op;
      op.vacuum = label == kFermiOpLabel ? Vacuum::fermi : Vacuum::genuine;
      op.annihilators = groups[0];
      op.creators = groups[1];
      for (const auto& i : op.annihilators)
        if (i.is_null()) fail("empty slot in normal operator", b, end_slots);
      for (const auto& i : op.creators)
        if (i.is_null()) fail("empty slot in normal operator", b, end_slots);
      return make_operator(std::move(op));
    }
    if (groups.size() == 3)
      for (const auto& i : groups[2])
        if (i.is_null()) fail("empty aux slot", group_at[2], end_slots);
    SymmetrySpec spec = default_symmetry(label);
    if (auto d = reg_.symmetry_default(label)) spec = parse_symtag(*d);
    if (sym) spec = *sym;
    Tensor t;
    t.label = label;
    t.bra = groups[0];
    t.ket = groups[1];
    if (groups.size() == 3) t.aux = groups[2];
    t.symmetry = spec.symmetry;
    t.braket_symmetry = spec.braket;
    t.column_symmetry = spec.column;
    t.conjugated = conj;
    try {
      return make_tensor(std::move(t));
    } catch (const std::invalid_argument& ex) {
      fail(ex.what(), b, pos_);
    }
  }

  Index parse_index() {
    skip_ws();
    std::size_t b = pos_;
    std::string base = parse_ident();
    if (base.empty()) fail("expected an index", b, b + 1);
    if (cur() != '_') fail("expected '_' in index label", pos_, pos_ + 1);
    ++pos_;
    std::size_t ob = pos_;
    while (cur() >= '0' && cur() <= '9') ++pos_;
    if (ob == pos_) fail("expected index ordinal", ob, ob + 1);
    unsigned long ord = std::stoul(s_.substr(ob, pos_ - ob));
    if (ord == 0) fail("index ordinal must be positive", ob, pos_);
    std::vector<Index> proto;
    std::size_t pe = pos_;
    skip_ws();
    if (cur() == '<') {
      ++pos_;
      while (true) {
        skip_ws();
        if (cur() == '>') {
          ++pos_;
          break;
        }
        if (!proto.empty()) {
          if (cur() != ',') fail("malformed protoindex list", pos_, pos_ + 1);
          ++pos_;
        }
        skip_ws();
        if (at_end()) fail("unterminated protoindex list", pe, pos_);
        proto.push_back(parse_index());
      }
      if (proto.empty()) fail("empty protoindex list", pe, pos_);
    } else {
      pos_ = pe;
    }
    if (!reg_.contains(base)) fail("unknown index space '" + base + "'", b, b + base.size());
    try {
      return Index(reg_.find(base), static_cast<std::uint32_t>(ord), std::move(proto));
    } catch (const std::invalid_argument& ex) {
      fail(ex.what(), b, pos_);
    }
  }
};

}  // namespace

ExprHandle parse_expr(const std::string& text, const IndexSpaceRegistry& reg) {
  if (!reg.frozen()) throw std::logic_error("parse_expr needs a frozen index space registry");
  return Parser(text, reg).parse();
}

}  // namespace tenet

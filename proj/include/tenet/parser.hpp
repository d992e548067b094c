#pragma once

#include "tenet/expr.hpp"

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tenet {

struct SourceSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, SourceSpan span) : std::runtime_error(what), span_(span) {}
  const SourceSpan& span() const { return span_; }

 private:
  SourceSpan span_;
};

/// Parse the text form, e.g. "- h{;;p_3} ã{p_1<i_1>,p_3;p_2<i_2>,p_3}".
ExprHandle parse_expr(const std::string& text, const IndexSpaceRegistry& reg = default_registry());

/// Deterministic text form accepted by parse_expr.
std::string serialize(const ExprHandle& e, const IndexSpaceRegistry& reg = default_registry());
std::string serialize(const Index& i);

}  // namespace tenet

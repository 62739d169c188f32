//===- lexer.hpp - Tokenizer for the .cp mini-language ---------*- C++ -*-===//

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace ecdiff::detail {

struct Token {
  enum class Kind { Ident, Int, Punct, End };
  Kind kind = Kind::End;
  std::string text;
  std::int64_t value = 0;
  int line = 1;
  int column = 1;
};

/// Splits the source into tokens. Throws FrontendError on stray characters
/// or integer literals that do not fit in 64 bits.
std::vector<Token> tokenize(std::string_view Source);

} // namespace ecdiff::detail

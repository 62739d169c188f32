#include "lexer.hpp"

#include "ecdiff/frontend.hpp"

#include <cctype>
#include <charconv>

namespace ecdiff::detail {

namespace {

bool isIdentStart(char C) {
  return std::isalpha(static_cast<unsigned char>(C)) || C == '_';
}
bool isIdentChar(char C) {
  return std::isalnum(static_cast<unsigned char>(C)) || C == '_';
}

} // namespace

std::vector<Token> tokenize(std::string_view Src) {
  std::vector<Token> Out;
  int Line = 1, Col = 1;
  std::size_t I = 0;
  auto advance = [&](std::size_t N) {
    for (std::size_t K = 0; K < N && I < Src.size(); ++K, ++I) {
      if (Src[I] == '\n') {
        ++Line;
        Col = 1;
      } else {
        ++Col;
      }
    }
  };

  while (I < Src.size()) {
    char C = Src[I];
    if (std::isspace(static_cast<unsigned char>(C))) {
      advance(1);
      continue;
    }
    if (C == '/' && I + 1 < Src.size() && Src[I + 1] == '/') {
      while (I < Src.size() && Src[I] != '\n')
        advance(1);
      continue;
    }
    Token T;
    T.line = Line;
    T.column = Col;
    if (isIdentStart(C)) {
      std::size_t J = I;
      while (J < Src.size() && isIdentChar(Src[J]))
        ++J;
      T.kind = Token::Kind::Ident;
      T.text = std::string(Src.substr(I, J - I));
      advance(J - I);
    } else if (std::isdigit(static_cast<unsigned char>(C))) {
      std::size_t J = I;
      while (J < Src.size() && std::isdigit(static_cast<unsigned char>(Src[J])))
        ++J;
      T.kind = Token::Kind::Int;
      T.text = std::string(Src.substr(I, J - I));
      auto [Ptr, Ec] = std::from_chars(T.text.data(), T.text.data() + T.text.size(), T.value);
      if (Ec != std::errc())
        throw FrontendError("integer literal out of range: " + T.text, Line, Col);
      advance(J - I);
    } else {
      static constexpr std::string_view TwoChar[] = {"==", "!=", "<=", ">=", "->"};
      T.kind = Token::Kind::Punct;
      bool Matched = false;
      for (std::string_view Op : TwoChar) {
        if (Src.substr(I, 2) == Op) {
          T.text = std::string(Op);
          Matched = true;
          break;
        }
      }
      if (!Matched) {
        static constexpr std::string_view Single = "{}();,:=!-+*<>";
        if (Single.find(C) == std::string_view::npos)
          throw FrontendError(std::string("unexpected character '") + C + "'", Line, Col);
        T.text = std::string(1, C);
      }
      advance(T.text.size());
    }
    Out.push_back(std::move(T));
  }
  Token End;
  End.kind = Token::Kind::End;
  End.line = Line;
  End.column = Col;
  Out.push_back(End);
  return Out;
}

} // namespace ecdiff::detail

#pragma once

#include <cmc/types.hpp>

#include <string>
#include <string_view>
#include <vector>

namespace cmc {

enum class Tok {
    Ident,
    Int,
    Punct,
    End,
};

struct Token {
    Tok kind;
    std::string text;
    Value value = 0;
    int line = 1;
    int column = 1;
};

// Shared tokenizer for the mini-language, the CFA format and formula text.
// `//` and `#` start comments. `&&`/`&` and `||`/`|` are the same operator.
std::vector<Token> tokenize(std::string_view text);

class TokenStream {
  public:
    explicit TokenStream(std::vector<Token> tokens) : m_tokens(std::move(tokens)) {}

    const Token& peek(std::size_t ahead = 0) const;
    Token next();
    bool at_end() const { return peek().kind == Tok::End; }

    bool is(std::string_view punct_or_keyword, std::size_t ahead = 0) const;
    bool accept(std::string_view punct_or_keyword);
    Token expect(std::string_view punct_or_keyword);
    Token expect_ident();
    Value expect_int();

    [[noreturn]] void fail(const std::string& what) const;

    std::size_t position() const { return m_pos; }
    void rewind(std::size_t pos) { m_pos = pos; }

  private:
    std::vector<Token> m_tokens;
    std::size_t m_pos = 0;
};

} // namespace cmc

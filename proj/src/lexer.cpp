#include <cmc/lexer.hpp>

#include <cctype>

namespace cmc {

std::vector<Token> tokenize(std::string_view text) {
    static const char* const two_char[] = {":=", "->", "<=", ">=", "==", "!=", "&&", "||"};
    std::vector<Token> out;
    int line = 1;
    int col = 1;
    std::size_t i = 0;
    auto advance = [&](std::size_t n) {
        for(std::size_t k = 0; k < n; ++k) {
            if(text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
            ++i;
        }
    };
    while(i < text.size()) {
        char c = text[i];
        if(std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        if(c == '#' || (c == '/' && i + 1 < text.size() && text[i + 1] == '/')) {
            while(i < text.size() && text[i] != '\n')
                advance(1);
            continue;
        }
        Token t{Tok::Punct, {}, 0, line, col};
        if(std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while(j < text.size() && (std::isalnum(static_cast<unsigned char>(text[j])) ||
                                      text[j] == '_' || text[j] == '@'))
                ++j;
            t.kind = Tok::Ident;
            t.text = std::string(text.substr(i, j - i));
            advance(j - i);
            out.push_back(std::move(t));
            continue;
        }
        if(std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            while(j < text.size() && std::isdigit(static_cast<unsigned char>(text[j])))
                ++j;
            t.kind = Tok::Int;
            t.text = std::string(text.substr(i, j - i));
            try {
                t.value = std::stoll(t.text);
            } catch(const std::out_of_range&) {
                throw SyntaxError("integer literal out of range", line, col);
            }
            advance(j - i);
            out.push_back(std::move(t));
            continue;
        }
        bool matched = false;
        for(const char* op : two_char) {
            if(text.substr(i, 2) == op) {
                t.text = op;
                advance(2);
                matched = true;
                break;
            }
        }
        if(!matched) {
            if(std::string_view("+-*()<>=!&|{};:,[]").find(c) == std::string_view::npos)
                throw SyntaxError(std::string("unexpected character '") + c + "'", line, col);
            t.text = std::string(1, c);
            advance(1);
        }
        if(t.text == "&&")
            t.text = "&";
        else if(t.text == "||")
            t.text = "|";
        out.push_back(std::move(t));
    }
    out.push_back(Token{Tok::End, "<end of input>", 0, line, col});
    return out;
}

const Token& TokenStream::peek(std::size_t ahead) const {
    std::size_t p = m_pos + ahead;
    if(p >= m_tokens.size())
        return m_tokens.back();
    return m_tokens[p];
}

Token TokenStream::next() {
    Token t = peek();
    if(m_pos < m_tokens.size() - 1)
        ++m_pos;
    return t;
}

bool TokenStream::is(std::string_view s, std::size_t ahead) const {
    const Token& t = peek(ahead);
    return t.kind != Tok::End && t.kind != Tok::Int && t.text == s;
}

bool TokenStream::accept(std::string_view s) {
    if(!is(s))
        return false;
    next();
    return true;
}

Token TokenStream::expect(std::string_view s) {
    if(!is(s))
        fail("expected '" + std::string(s) + "' but found '" + peek().text + "'");
    return next();
}

Token TokenStream::expect_ident() {
    if(peek().kind != Tok::Ident)
        fail("expected identifier but found '" + peek().text + "'");
    return next();
}

Value TokenStream::expect_int() {
    if(peek().kind != Tok::Int)
        fail("expected integer but found '" + peek().text + "'");
    return next().value;
}

void TokenStream::fail(const std::string& what) const {
    throw SyntaxError(what, peek().line, peek().column);
}

} // namespace cmc

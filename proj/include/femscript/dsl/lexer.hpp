#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace femscript::dsl
{

struct SourcePos
{
    int line = 1;
    int column = 1;
};

enum class TokenKind
{
    Keyword,
    Identifier,
    Int,
    Real,
    Imaginary, ///< lexeme holds the numeric part of `3i`
    String,    ///< lexeme holds the unescaped contents
    Operator,
    Punct,
    MacroDef,  ///< `macro name(params) body //`; `macro` indexes the table
    End,
};

struct Token
{
    TokenKind kind = TokenKind::End;
    std::string lexeme;
    SourcePos pos;
    int macro = -1;

    bool is(TokenKind k, std::string_view text) const { return kind == k && lexeme == text; }
    bool is_op(std::string_view text) const
    {
        return (kind == TokenKind::Operator || kind == TokenKind::Punct) && lexeme == text;
    }
};

/// Raw macro: the body is kept as tokens, lexed from the text between the
/// parameter list and the terminating `//`.
struct Macro
{
    std::string name;
    std::vector<std::string> params;
    bool has_params = false;
    std::vector<Token> body;
    std::string text;
    SourcePos pos;
};

struct LexResult
{
    std::vector<Token> tokens; ///< terminated by an End token
    std::vector<Macro> macros;
};

bool is_keyword(std::string_view word);

/// Splits source text into tokens. Comments are dropped; macro definitions
/// become MacroDef tokens. Throws ParseError on unterminated strings or
/// block comments and on stray characters.
LexResult tokenize(std::string_view source);

/// Substitutes `args` for the parameters of `m` and applies `#` pasting.
/// Throws ParseError on an arity mismatch.
std::vector<Token> expand_macro(const Macro& m, const std::vector<std::vector<Token>>& args,
                                SourcePos site = {});

/// Expands macro invocations in order of definition. MacroDef tokens stay in
/// the stream so that the parser can record them.
std::vector<Token> preprocess(const LexResult& lexed);

/// Convenience: tokenize then preprocess.
std::vector<Token> expand_source(std::string_view source, std::vector<Macro>* macros = nullptr);

std::string token_text(const Token& t);

} // namespace femscript::dsl

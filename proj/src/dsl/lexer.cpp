#include "femscript/dsl/lexer.hpp"

#include "femscript/error.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <unordered_map>

namespace femscript::dsl
{
namespace
{

constexpr std::array kKeywords = {
    "int",   "real",    "complex", "string",  "bool",     "mesh",     "mesh3",  "fespace", "func",
    "macro", "border",  "varf",    "problem", "solve",    "matrix",   "if",     "else",    "for",
    "while", "break",   "continue", "return", "ofstream", "ifstream", "load",
};

// Longest first so that greedy matching works.
constexpr std::array kOperators = {
    "+=", "-=", "*=", "/=", "==", "!=", "<=", ">=", "&&", "||", "++", "--", "<<", ">>", ".*", "./",
    "+",  "-",  "*",  "/",  "^",  "<",  ">",  "=",  "!",  "&",  "|",  "%",  "?",  ":",  "'",  "#",
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

class Lexer
{
public:
    Lexer(std::string_view src, SourcePos start, std::vector<Macro>* macros)
        : src_(src), line_(start.line), col_(start.column), macros_(macros)
    {}

    std::vector<Token> run()
    {
        std::vector<Token> out;
        for(;;)
        {
            skip_space_and_comments();
            if(at_end())
                break;
            out.push_back(next());
        }
        out.push_back({TokenKind::End, "", here(), -1});
        return out;
    }

private:
    bool at_end() const { return i_ >= src_.size(); }
    char peek(std::size_t k = 0) const { return i_ + k < src_.size() ? src_[i_ + k] : '\0'; }
    SourcePos here() const { return {line_, col_}; }

    char advance()
    {
        const char c = src_[i_++];
        if(c == '\n')
        {
            ++line_;
            col_ = 1;
        }
        else
            ++col_;
        return c;
    }

    void skip_space_and_comments()
    {
        while(!at_end())
        {
            const char c = peek();
            if(std::isspace(static_cast<unsigned char>(c)))
                advance();
            else if(c == '/' && peek(1) == '/')
            {
                while(!at_end() && peek() != '\n')
                    advance();
            }
            else if(c == '/' && peek(1) == '*')
            {
                const SourcePos start = here();
                advance();
                advance();
                while(!(peek() == '*' && peek(1) == '/'))
                {
                    if(at_end())
                        throw ParseError("unterminated block comment starting at column " +
                                             std::to_string(start.column),
                                         start.line);
                    advance();
                }
                advance();
                advance();
            }
            else
                break;
        }
    }

    Token next()
    {
        const SourcePos pos = here();
        const char c = peek();
        if(digit(c) || (c == '.' && digit(peek(1))))
            return number(pos);
        if(ident_start(c))
        {
            std::string word;
            while(!at_end() && ident_char(peek()))
                word += advance();
            if(word == "macro" && macros_)
                return macro_definition(pos);
            return {is_keyword(word) ? TokenKind::Keyword : TokenKind::Identifier, word, pos, -1};
        }
        if(c == '"')
            return string_literal(pos);
        for(std::string_view op : kOperators)
        {
            if(src_.substr(i_, op.size()) == op)
            {
                for(std::size_t k = 0; k < op.size(); ++k)
                    advance();
                return {TokenKind::Operator, std::string(op), pos, -1};
            }
        }
        if(std::string_view("()[]{},;.").find(c) != std::string_view::npos)
        {
            advance();
            return {TokenKind::Punct, std::string(1, c), pos, -1};
        }
        throw ParseError("unexpected character '" + std::string(1, c) + "' at column " +
                             std::to_string(pos.column),
                         pos.line);
    }

    Token number(SourcePos pos)
    {
        std::string text;
        bool real = false;
        while(digit(peek()))
            text += advance();
        if(peek() == '.')
        {
            real = true;
            text += advance();
            while(digit(peek()))
                text += advance();
        }
        if((peek() == 'e' || peek() == 'E') &&
           (digit(peek(1)) || ((peek(1) == '+' || peek(1) == '-') && digit(peek(2)))))
        {
            real = true;
            text += advance();
            if(peek() == '+' || peek() == '-')
                text += advance();
            while(digit(peek()))
                text += advance();
        }
        if(peek() == 'i' && !ident_char(peek(1)))
        {
            advance();
            return {TokenKind::Imaginary, text, pos, -1};
        }
        return {real ? TokenKind::Real : TokenKind::Int, text, pos, -1};
    }

    Token string_literal(SourcePos pos)
    {
        advance();
        std::string text;
        for(;;)
        {
            if(at_end())
                throw ParseError("unterminated string starting at column " + std::to_string(pos.column),
                                 pos.line);
            const char c = advance();
            if(c == '"')
                break;
            if(c != '\\')
            {
                text += c;
                continue;
            }
            if(at_end())
                continue;
            const char e = advance();
            switch(e)
            {
            case 'n':
                // "\nabla" is how typeset listings render "\n"
                if(src_.substr(i_, 4) == "abla")
                    for(int k = 0; k < 4; ++k)
                        advance();
                text += '\n';
                break;
            case 't': text += '\t'; break;
            case '\n': break; // line continuation
            default: text += e; break;
            }
        }
        return {TokenKind::String, text, pos, -1};
    }

    Token macro_definition(SourcePos pos)
    {
        while(peek() == ' ' || peek() == '\t')
            advance();
        if(!ident_start(peek()))
            throw ParseError("macro name expected", line_);
        Macro m;
        m.pos = pos;
        while(!at_end() && ident_char(peek()))
            m.name += advance();
        while(peek() == ' ' || peek() == '\t')
            advance();
        if(peek() == '(')
        {
            m.has_params = true;
            advance();
            std::string param;
            for(;;)
            {
                if(at_end() || peek() == '\n')
                    throw ParseError("unterminated parameter list of macro " + m.name, pos.line);
                const char c = advance();
                if(c == ',' || c == ')')
                {
                    if(!param.empty())
                        m.params.push_back(param);
                    else if(c == ',' || !m.params.empty())
                        throw ParseError("empty parameter in macro " + m.name, pos.line);
                    param.clear();
                    if(c == ')')
                        break;
                }
                else if(ident_char(c))
                    param += c;
                else if(!std::isspace(static_cast<unsigned char>(c)))
                    throw ParseError("bad parameter list of macro " + m.name, pos.line);
            }
        }
        const SourcePos body_pos = here();
        const std::size_t start = i_;
        bool in_string = false;
        while(!at_end())
        {
            if(peek() == '"' && (i_ == 0 || src_[i_ - 1] != '\\'))
                in_string = !in_string;
            if(!in_string && peek() == '/' && peek(1) == '/')
                break;
            advance();
        }
        if(at_end())
            throw ParseError("macro " + m.name + " is not terminated by //", pos.line);
        m.text = std::string(src_.substr(start, i_ - start));
        while(!at_end() && peek() != '\n')
            advance();
        m.body = Lexer(m.text, body_pos, nullptr).run();
        m.body.pop_back();
        macros_->push_back(std::move(m));
        return {TokenKind::MacroDef, macros_->back().name, pos, static_cast<int>(macros_->size()) - 1};
    }

    std::string_view src_;
    std::size_t i_ = 0;
    int line_;
    int col_;
    std::vector<Macro>* macros_;
};

// Joins `a # b` into one token.
std::vector<Token> paste(std::vector<Token> in)
{
    std::vector<Token> out;
    for(std::size_t k = 0; k < in.size(); ++k)
    {
        if(in[k].is_op("#") && !out.empty() && k + 1 < in.size())
        {
            Token& left = out.back();
            const Token& right = in[++k];
            left.lexeme += right.lexeme;
            if(left.kind == TokenKind::Int && right.kind == TokenKind::Identifier)
                left.kind = TokenKind::Identifier;
            if(left.kind == TokenKind::Identifier && is_keyword(left.lexeme))
                left.kind = TokenKind::Keyword;
            continue;
        }
        out.push_back(in[k]);
    }
    return out;
}

class Expander
{
public:
    explicit Expander(const std::vector<Macro>& table) : table_(table) {}

    void run(const std::vector<Token>& in, std::vector<Token>& out, int depth)
    {
        if(depth > 64)
            throw ParseError("macro expansion too deep", in.empty() ? 0 : in.front().pos.line);
        for(std::size_t k = 0; k < in.size(); ++k)
        {
            const Token& t = in[k];
            if(t.kind == TokenKind::MacroDef)
            {
                active_[t.lexeme] = t.macro;
                out.push_back(t);
                continue;
            }
            const auto it = t.kind == TokenKind::Identifier ? active_.find(t.lexeme) : active_.end();
            if(it == active_.end())
            {
                out.push_back(t);
                continue;
            }
            const Macro& m = table_[it->second];
            std::vector<std::vector<Token>> args;
            if(m.has_params)
            {
                if(k + 1 >= in.size() || !in[k + 1].is_op("("))
                {
                    out.push_back(t);
                    continue;
                }
                k = collect_args(in, k + 2, args, t);
            }
            run(expand_macro(m, args, t.pos), out, depth + 1);
        }
    }

private:
    // Returns the index of the closing parenthesis.
    static std::size_t collect_args(const std::vector<Token>& in, std::size_t k,
                                    std::vector<std::vector<Token>>& args, const Token& site)
    {
        int depth = 0;
        args.emplace_back();
        for(; k < in.size(); ++k)
        {
            const Token& t = in[k];
            if(t.kind == TokenKind::End)
                break;
            if(t.is_op("(") || t.is_op("[") || t.is_op("{"))
                ++depth;
            else if(t.is_op(")") || t.is_op("]") || t.is_op("}"))
            {
                if(depth == 0 && t.is_op(")"))
                {
                    if(args.size() == 1 && args.front().empty())
                        args.clear();
                    return k;
                }
                --depth;
            }
            else if(depth == 0 && t.is_op(","))
            {
                args.emplace_back();
                continue;
            }
            args.back().push_back(t);
        }
        throw ParseError("unterminated arguments of macro " + site.lexeme, site.pos.line);
    }

    const std::vector<Macro>& table_;
    std::unordered_map<std::string, int> active_;
};

} // namespace

bool is_keyword(std::string_view word)
{
    return std::find(kKeywords.begin(), kKeywords.end(), word) != kKeywords.end();
}

LexResult tokenize(std::string_view source)
{
    LexResult res;
    res.tokens = Lexer(source, {}, &res.macros).run();
    return res;
}

std::vector<Token> expand_macro(const Macro& m, const std::vector<std::vector<Token>>& args, SourcePos site)
{
    if(args.size() != m.params.size())
        throw ParseError("macro " + m.name + " expects " + std::to_string(m.params.size()) +
                             " argument(s), got " + std::to_string(args.size()),
                         site.line);
    std::vector<Token> out;
    for(const Token& t : m.body)
    {
        const auto p = t.kind == TokenKind::Identifier
                           ? std::find(m.params.begin(), m.params.end(), t.lexeme)
                           : m.params.end();
        if(p == m.params.end())
        {
            Token copy = t;
            copy.pos = site;
            out.push_back(std::move(copy));
            continue;
        }
        for(Token a : args[p - m.params.begin()])
        {
            a.pos = site;
            out.push_back(std::move(a));
        }
    }
    return paste(std::move(out));
}

std::vector<Token> preprocess(const LexResult& lexed)
{
    std::vector<Token> out;
    Expander(lexed.macros).run(lexed.tokens, out, 0);
    return out;
}

std::vector<Token> expand_source(std::string_view source, std::vector<Macro>* macros)
{
    LexResult lexed = tokenize(source);
    auto out = preprocess(lexed);
    if(macros)
        *macros = std::move(lexed.macros);
    return out;
}

std::string token_text(const Token& t)
{
    switch(t.kind)
    {
    case TokenKind::String: return "\"" + t.lexeme + "\"";
    case TokenKind::Imaginary: return t.lexeme + "i";
    case TokenKind::End: return "end of input";
    default: return t.lexeme;
    }
}

} // namespace femscript::dsl

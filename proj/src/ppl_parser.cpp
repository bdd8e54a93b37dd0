#include "fggpp/ppl_parser.hpp"

#include <cctype>
#include <set>
#include <vector>

namespace fgg::ppl {

namespace {

enum class Tok { Ident, Keyword, Symbol, End };

struct Token {
    Tok kind;
    std::string text;
    SourcePos pos;
};

const std::set<std::string> kKeywords = {"fun",  "let",  "in",  "sample", "observe", "if",   "then",
                                         "else", "case", "of",  "inl",    "inr",     "fail", "and",
                                         "or",   "true", "false", "unit", "nil"};

std::vector<Token> lex(std::string_view src) {
    std::vector<Token> out;
    int line = 1, col = 1;
    std::size_t i = 0;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k) {
            if (src[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
            ++i;
        }
    };
    while (i < src.size()) {
        char c = src[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        if (c == '#') {
            while (i < src.size() && src[i] != '\n')
                advance(1);
            continue;
        }
        SourcePos pos{line, col};
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < src.size() &&
                   (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_' || src[j] == '\''))
                ++j;
            std::string word(src.substr(i, j - i));
            out.push_back({kKeywords.count(word) ? Tok::Keyword : Tok::Ident, word, pos});
            advance(j - i);
            continue;
        }
        static const char* two[] = {"!=", "<-", "=>"};
        bool matched = false;
        for (const char* s : two) {
            if (src.substr(i, 2) == s) {
                out.push_back({Tok::Symbol, s, pos});
                advance(2);
                matched = true;
                break;
            }
        }
        if (matched)
            continue;
        if (std::string_view("()[],;=|").find(c) != std::string_view::npos) {
            out.push_back({Tok::Symbol, std::string(1, c), pos});
            advance(1);
            continue;
        }
        throw SyntaxError(pos, std::string("unexpected character '") + c + "'");
    }
    out.push_back({Tok::End, "", {line, col}});
    return out;
}

const std::set<std::string> kCallBuiltins = {"fst", "snd", "car", "cdr", "cons"};

class Parser {
  public:
    explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

    Program program() {
        Program p;
        while (is_keyword("fun")) {
            FunDef f;
            f.pos = next().pos;
            f.name = expect_ident("function name");
            expect_symbol("(");
            if (!is_symbol(")")) {
                f.params.push_back(expect_ident("parameter name"));
                while (accept_symbol(","))
                    f.params.push_back(expect_ident("parameter name"));
            }
            expect_symbol(")");
            expect_symbol("=");
            f.body = expr();
            expect_symbol(";");
            p.functions.push_back(std::move(f));
        }
        p.main = expr();
        if (peek().kind != Tok::End)
            fail("expected end of program");
        return p;
    }

  private:
    const Token& peek() const { return toks_[pos_]; }
    const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

    bool is_keyword(const char* k) const { return peek().kind == Tok::Keyword && peek().text == k; }
    bool is_symbol(const char* s) const { return peek().kind == Tok::Symbol && peek().text == s; }

    bool accept_symbol(const char* s) {
        if (!is_symbol(s))
            return false;
        next();
        return true;
    }

    [[noreturn]] void fail(const std::string& what) const {
        const Token& t = peek();
        std::string found = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
        throw SyntaxError(t.pos, what + ", found " + found);
    }

    void expect_symbol(const char* s) {
        if (!accept_symbol(s))
            fail(std::string("expected '") + s + "'");
    }

    void expect_keyword(const char* k) {
        if (!is_keyword(k))
            fail(std::string("expected '") + k + "'");
        next();
    }

    std::string expect_ident(const char* what) {
        if (peek().kind != Tok::Ident)
            fail(std::string("expected ") + what);
        return next().text;
    }

    ExprPtr expr() {
        SourcePos pos = peek().pos;
        if (is_keyword("let")) {
            next();
            std::string name = expect_ident("variable name");
            expect_symbol("=");
            ExprPtr bound = expr();
            expect_keyword("in");
            ExprPtr body = expr();
            return make_expr(Let{name, bound, body}, pos);
        }
        if (is_keyword("if")) {
            next();
            ExprPtr c = expr();
            expect_keyword("then");
            ExprPtr t = expr();
            expect_keyword("else");
            ExprPtr f = expr();
            return make_expr(If{c, t, f}, pos);
        }
        if (is_keyword("case")) {
            next();
            ExprPtr s = expr();
            expect_keyword("of");
            expect_keyword("inl");
            std::string l = expect_ident("variable name");
            expect_symbol("=>");
            ExprPtr le = expr();
            expect_symbol("|");
            expect_keyword("inr");
            std::string r = expect_ident("variable name");
            expect_symbol("=>");
            ExprPtr re = expr();
            return make_expr(Case{s, l, le, r, re}, pos);
        }
        if (is_keyword("sample")) {
            next();
            return make_expr(Sample{expr()}, pos);
        }
        if (is_keyword("observe")) {
            next();
            ExprPtr v = or_expr();
            expect_symbol("<-");
            ExprPtr d = expr();
            return make_expr(Observe{v, d}, pos);
        }
        return or_expr();
    }

    ExprPtr or_expr() {
        ExprPtr lhs = and_expr();
        while (is_keyword("or")) {
            SourcePos pos = next().pos;
            lhs = make_expr(Or{lhs, and_expr()}, pos);
        }
        return lhs;
    }

    ExprPtr and_expr() {
        ExprPtr lhs = comparison();
        while (is_keyword("and")) {
            SourcePos pos = next().pos;
            lhs = make_expr(And{lhs, comparison()}, pos);
        }
        return lhs;
    }

    ExprPtr comparison() {
        ExprPtr lhs = unary();
        if (is_symbol("=") || is_symbol("!=")) {
            const Token& t = next();
            BuiltinOp op = t.text == "=" ? BuiltinOp::Eq : BuiltinOp::Neq;
            ExprPtr rhs = unary();
            return make_expr(Builtin{op, {lhs, rhs}, {}, {}}, t.pos);
        }
        return lhs;
    }

    ExprPtr unary() {
        if (is_keyword("inl") || is_keyword("inr")) {
            const Token& t = next();
            BuiltinOp op = t.text == "inl" ? BuiltinOp::Inl : BuiltinOp::Inr;
            ExprPtr arg = unary();
            return make_expr(Builtin{op, {arg}, {}, {}}, t.pos);
        }
        return primary();
    }

    std::vector<ExprPtr> arguments() {
        std::vector<ExprPtr> args;
        expect_symbol("(");
        if (!is_symbol(")")) {
            args.push_back(expr());
            while (accept_symbol(","))
                args.push_back(expr());
        }
        expect_symbol(")");
        return args;
    }

    ExprPtr primary() {
        const Token& t = peek();
        SourcePos pos = t.pos;
        if (t.kind == Tok::Keyword) {
            auto constant = [&](BuiltinOp op) {
                next();
                return make_expr(Builtin{op, {}, {}, {}}, pos);
            };
            if (t.text == "true")
                return constant(BuiltinOp::True);
            if (t.text == "false")
                return constant(BuiltinOp::False);
            if (t.text == "unit")
                return constant(BuiltinOp::Unit);
            if (t.text == "nil")
                return constant(BuiltinOp::Nil);
            if (t.text == "fail") {
                next();
                return make_expr(Fail{}, pos);
            }
            fail("expected expression");
        }
        if (t.kind == Tok::Ident) {
            std::string name = next().text;
            if (is_symbol("(")) {
                auto args = arguments();
                if (kCallBuiltins.count(name)) {
                    BuiltinOp op = name == "fst"   ? BuiltinOp::Fst
                                   : name == "snd" ? BuiltinOp::Snd
                                   : name == "car" ? BuiltinOp::Car
                                   : name == "cdr" ? BuiltinOp::Cdr
                                                   : BuiltinOp::Cons;
                    std::size_t want = op == BuiltinOp::Cons ? 2 : 1;
                    if (args.size() != want)
                        throw SyntaxError(pos, name + " takes " + std::to_string(want) + " argument(s)");
                    return make_expr(Builtin{op, std::move(args), {}, {}}, pos);
                }
                return make_expr(Call{name, std::move(args)}, pos);
            }
            if (accept_symbol("[")) {
                ExprPtr key = expr();
                expect_symbol("]");
                return make_expr(Builtin{BuiltinOp::Lookup, {key}, name, {}}, pos);
            }
            return make_expr(Var{name}, pos);
        }
        if (accept_symbol("(")) {
            if (accept_symbol(")"))
                return make_expr(Builtin{BuiltinOp::Unit, {}, {}, {}}, pos);
            ExprPtr first = expr();
            if (accept_symbol(",")) {
                ExprPtr second = expr();
                expect_symbol(")");
                return make_expr(Builtin{BuiltinOp::Pair, {first, second}, {}, {}}, pos);
            }
            expect_symbol(")");
            return first;
        }
        fail("expected expression");
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

}  // namespace

Program parse(std::string_view source) {
    return Parser(lex(source)).program();
}

}  // namespace fgg::ppl

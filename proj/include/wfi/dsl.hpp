#pragma once

// Generic syntax shared by the tree and set expression languages:
//   expr  := name | name '(' expr, ... ')' | name '{' expr, ... '}' | number | "bits" | '(' expr, ... ')'
// Names may contain letters, digits, '_', '^', '*', '+' and '-' so that ordinals (`w^2*3+1`) and
// sequence specs (`01(1)`) are read as single atoms where the grammar expects them.

#include <cctype>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace wfi::dsl {

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t position)
        : std::runtime_error(what + " at position " + std::to_string(position)), position_(position) {}
    std::size_t position() const { return position_; }

private:
    std::size_t position_;
};

struct Expr {
    enum class Kind { Name, Call, Braces, Number, Quoted, Tuple };
    Kind kind = Kind::Name;
    std::string text;  // name, digits, or quoted contents
    std::vector<Expr> args;
    std::size_t position = 0;

    bool is(Kind k, std::string_view name) const { return kind == k && text == name; }

    std::uint64_t number() const {
        if (kind != Kind::Number) {
            throw ParseError("expected a number", position);
        }
        try {
            return std::stoull(text);
        } catch (const std::exception&) {
            throw ParseError("number out of range", position);
        }
    }

    /// Bits of a quoted string, a bare digit run, or a bare name made of 0/1.
    std::string bits() const {
        if (kind != Kind::Quoted && kind != Kind::Number && kind != Kind::Name) {
            throw ParseError("expected a bit string", position);
        }
        for (char c : text) {
            if (c != '0' && c != '1') {
                throw ParseError("expected a bit string, got '" + text + "'", position);
            }
        }
        return text;
    }

    void expect_args(std::size_t n) const {
        if (args.size() != n) {
            throw ParseError(text + " expects " + std::to_string(n) + " argument(s), got " + std::to_string(args.size()), position);
        }
    }
};

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    Expr parse_all() {
        Expr e = parse_expr();
        skip_space();
        if (pos_ != text_.size()) {
            throw ParseError("unexpected trailing input", pos_);
        }
        return e;
    }

private:
    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
            ++pos_;
        }
    }

    static bool name_char(char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '^' || c == '*' || c == '+' || c == '-' ||
               c == '.';
    }

    std::vector<Expr> parse_list(char close) {
        std::vector<Expr> out;
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == close) {
            ++pos_;
            return out;
        }
        while (true) {
            out.push_back(parse_expr());
            skip_space();
            if (pos_ >= text_.size()) {
                throw ParseError(std::string("expected '") + close + "'", pos_);
            }
            if (text_[pos_] == ',') {
                ++pos_;
                continue;
            }
            if (text_[pos_] == close) {
                ++pos_;
                return out;
            }
            throw ParseError(std::string("expected ',' or '") + close + "'", pos_);
        }
    }

    Expr parse_expr() {
        skip_space();
        Expr e;
        e.position = pos_;
        if (pos_ >= text_.size()) {
            throw ParseError("unexpected end of input", pos_);
        }
        char c = text_[pos_];
        if (c == '"') {
            auto end = text_.find('"', pos_ + 1);
            if (end == std::string_view::npos) {
                throw ParseError("unterminated string", pos_);
            }
            e.kind = Expr::Kind::Quoted;
            e.text = std::string(text_.substr(pos_ + 1, end - pos_ - 1));
            pos_ = end + 1;
            return e;
        }
        if (c == '(') {
            ++pos_;
            e.kind = Expr::Kind::Tuple;
            e.args = parse_list(')');
            return e;
        }
        if (!name_char(c)) {
            throw ParseError(std::string("unexpected character '") + c + "'", pos_);
        }
        auto start = pos_;
        while (pos_ < text_.size() && name_char(text_[pos_])) {
            ++pos_;
        }
        e.text = std::string(text_.substr(start, pos_ - start));
        bool digits = true;
        for (char d : e.text) {
            digits = digits && std::isdigit(static_cast<unsigned char>(d));
        }
        e.kind = digits ? Expr::Kind::Number : Expr::Kind::Name;
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == '(' && !digits) {
            ++pos_;
            e.kind = Expr::Kind::Call;
            e.args = parse_list(')');
        } else if (pos_ < text_.size() && text_[pos_] == '(' && digits) {
            // a sequence spec such as 01(1): keep it as one name
            auto close = text_.find(')', pos_);
            if (close == std::string_view::npos) {
                throw ParseError("unterminated sequence spec", pos_);
            }
            e.kind = Expr::Kind::Name;
            e.text = std::string(text_.substr(start, close + 1 - start));
            pos_ = close + 1;
        } else if (pos_ < text_.size() && text_[pos_] == '{') {
            ++pos_;
            e.kind = Expr::Kind::Braces;
            e.args = parse_list('}');
        }
        return e;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

inline Expr parse(std::string_view text) { return Parser(text).parse_all(); }

/// Text of an infinite-sequence argument: `1(01)`, `(0)` or a quoted spec.
inline std::string sequence_spec(const Expr& e) {
    if (e.kind == Expr::Kind::Name || e.kind == Expr::Kind::Quoted) {
        return e.text;
    }
    if (e.kind == Expr::Kind::Tuple && e.args.size() == 1 && e.args[0].kind == Expr::Kind::Number) {
        return "(" + e.args[0].text + ")";
    }
    throw ParseError("expected a sequence spec PREFIX(CYCLE)", e.position);
}

/// Renders a parsed expression back to text.
inline std::string render(const Expr& e) {
    std::string out;
    switch (e.kind) {
        case Expr::Kind::Quoted:
            return "\"" + e.text + "\"";
        case Expr::Kind::Name:
        case Expr::Kind::Number:
            return e.text;
        case Expr::Kind::Call:
        case Expr::Kind::Braces:
        case Expr::Kind::Tuple: {
            const char* open = e.kind == Expr::Kind::Braces ? "{" : "(";
            const char* close = e.kind == Expr::Kind::Braces ? "}" : ")";
            out = (e.kind == Expr::Kind::Tuple ? "" : e.text) + open;
            for (std::size_t i = 0; i < e.args.size(); ++i) {
                out += (i ? "," : "") + render(e.args[i]);
            }
            return out + close;
        }
    }
    return out;
}

}  // namespace wfi::dsl

#include "fggpp/value.hpp"

#include <cctype>

namespace fgg {

Value Value::atom(std::string name) {
    Value v;
    v.kind_ = Kind::Atom;
    v.text_ = std::move(name);
    return v;
}

Value Value::boolean(bool b) {
    Value v;
    v.kind_ = Kind::Bool;
    v.flag_ = b;
    return v;
}

Value Value::pair(Value first, Value second) {
    Value v;
    v.kind_ = Kind::Pair;
    v.children_ = std::make_shared<const std::pair<Value, Value>>(std::move(first), std::move(second));
    return v;
}

Value Value::inl(Value payload) {
    Value v;
    v.kind_ = Kind::Inl;
    v.children_ = std::make_shared<const std::pair<Value, Value>>(std::move(payload), Value());
    return v;
}

Value Value::inr(Value payload) {
    Value v;
    v.kind_ = Kind::Inr;
    v.children_ = std::make_shared<const std::pair<Value, Value>>(std::move(payload), Value());
    return v;
}

Value Value::dist(std::string name) {
    Value v;
    v.kind_ = Kind::Dist;
    v.text_ = std::move(name);
    return v;
}

std::strong_ordering operator<=>(const Value& a, const Value& b) {
    if (a.kind_ != b.kind_)
        return static_cast<int>(a.kind_) <=> static_cast<int>(b.kind_);
    switch (a.kind_) {
    case Value::Kind::Atom:
    case Value::Kind::Dist:
        return a.text_.compare(b.text_) <=> 0;
    case Value::Kind::Bool:
        return a.flag_ <=> b.flag_;
    case Value::Kind::Unit:
        return std::strong_ordering::equal;
    case Value::Kind::Pair:
        if (auto c = a.first() <=> b.first(); c != 0)
            return c;
        return a.second() <=> b.second();
    case Value::Kind::Inl:
    case Value::Kind::Inr:
        return a.payload() <=> b.payload();
    }
    return std::strong_ordering::equal;
}

std::string Value::to_string() const {
    switch (kind_) {
    case Kind::Atom:
        return text_;
    case Kind::Bool:
        return flag_ ? "true" : "false";
    case Kind::Unit:
        return "unit";
    case Kind::Pair:
        return "(" + first().to_string() + ", " + second().to_string() + ")";
    case Kind::Inl:
        return "inl " + payload().to_string();
    case Kind::Inr:
        return "inr " + payload().to_string();
    case Kind::Dist:
        return "<" + text_ + ">";
    }
    return "?";
}

namespace {

class ValueReader {
  public:
    explicit ValueReader(std::string_view text) : text_(text) {}

    std::optional<Value> read_all() {
        auto v = read();
        skip_space();
        if (!v || pos_ != text_.size())
            return std::nullopt;
        return v;
    }

  private:
    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }

    static bool ident_char(char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
    }

    std::string read_word() {
        std::size_t start = pos_;
        while (pos_ < text_.size() && ident_char(text_[pos_]))
            ++pos_;
        return std::string(text_.substr(start, pos_ - start));
    }

    std::optional<Value> read() {
        skip_space();
        if (pos_ >= text_.size())
            return std::nullopt;
        char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            skip_space();
            if (pos_ < text_.size() && text_[pos_] == ')') {
                ++pos_;
                return Value::unit();
            }
            auto first = read();
            skip_space();
            if (!first || pos_ >= text_.size())
                return std::nullopt;
            if (text_[pos_] == ')') {
                ++pos_;
                return first;
            }
            if (text_[pos_] != ',')
                return std::nullopt;
            ++pos_;
            auto second = read();
            skip_space();
            if (!second || pos_ >= text_.size() || text_[pos_] != ')')
                return std::nullopt;
            ++pos_;
            return Value::pair(*first, *second);
        }
        if (c == '<') {
            auto close = text_.find('>', pos_);
            if (close == std::string_view::npos)
                return std::nullopt;
            std::string name(text_.substr(pos_ + 1, close - pos_ - 1));
            pos_ = close + 1;
            return Value::dist(name);
        }
        if (!ident_char(c))
            return std::nullopt;
        std::string word = read_word();
        if (word == "true")
            return Value::boolean(true);
        if (word == "false")
            return Value::boolean(false);
        if (word == "unit")
            return Value::unit();
        if (word == "inl" || word == "inr") {
            auto payload = read();
            if (!payload)
                return std::nullopt;
            return word == "inl" ? Value::inl(*payload) : Value::inr(*payload);
        }
        return Value::atom(word);
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

}  // namespace

std::optional<Value> parse_value(std::string_view text) {
    return ValueReader(text).read_all();
}

}  // namespace fgg

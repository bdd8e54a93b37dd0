#pragma once

#include <compare>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

namespace fgg {

// A node value. Values are immutable; compound values share their children.
//
// Lists are not a separate kind: nil is the atom "nil" and cons(h, t) is the
// pair (h, t), so car/cdr coincide with fst/snd on non-empty lists.
class Value {
  public:
    enum class Kind { Atom, Bool, Unit, Pair, Inl, Inr, Dist };

    Value() = default;  // unit

    static Value atom(std::string name);
    static Value boolean(bool b);
    static Value unit() { return Value(); }
    static Value pair(Value first, Value second);
    static Value inl(Value payload);
    static Value inr(Value payload);
    static Value dist(std::string name);
    static Value nil() { return atom("nil"); }

    Kind kind() const { return kind_; }
    bool is(Kind k) const { return kind_ == k; }

    // Atom or distribution name.
    const std::string& name() const { return text_; }
    bool as_bool() const { return flag_; }
    const Value& first() const { return children_->first; }
    const Value& second() const { return children_->second; }
    // Payload of inl/inr.
    const Value& payload() const { return children_->first; }

    bool is_nil() const { return kind_ == Kind::Atom && text_ == "nil"; }

    std::string to_string() const;

    friend std::strong_ordering operator<=>(const Value& a, const Value& b);
    friend bool operator==(const Value& a, const Value& b) { return (a <=> b) == 0; }

  private:
    Kind kind_ = Kind::Unit;
    bool flag_ = false;
    std::string text_;
    std::shared_ptr<const std::pair<Value, Value>> children_;
};

// Parses the textual value syntax used in parameter files and diagnostics:
//   a  true  false  unit  ()  nil  (v, w)  inl v  inr v  <name>
// Returns nullopt on malformed input.
std::optional<Value> parse_value(std::string_view text);

}  // namespace fgg

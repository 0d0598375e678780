#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>

#include <nlohmann/json.hpp>

#include "twinpath/decimal.hpp"

namespace twinpath {

using json = nlohmann::json;

enum class ValueKind : uint8_t { boolean, integer, decimal, string };

inline const char* to_string(ValueKind k) {
    switch (k) {
        case ValueKind::boolean: return "boolean";
        case ValueKind::integer: return "integer";
        case ValueKind::decimal: return "decimal";
        case ValueKind::string: return "string";
    }
    return "?";
}

class ValueError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Tagged typed value carried by facts and expression constants. The kind is
// fixed at construction; conversions happen only through the explicit
// promotion rules in the expression evaluator.
class FactValue {
public:
    FactValue() : v_(false) {}

    static FactValue boolean(bool b) { return FactValue(Var(b)); }
    static FactValue integer(int64_t i) { return FactValue(Var(i)); }
    static FactValue decimal(Decimal d) { return FactValue(Var(std::move(d))); }
    static FactValue string(std::string s) { return FactValue(Var(std::move(s))); }

    static FactValue default_of(ValueKind k) {
        switch (k) {
            case ValueKind::boolean: return boolean(false);
            case ValueKind::integer: return integer(0);
            case ValueKind::decimal: return decimal(Decimal());
            case ValueKind::string: return string("");
        }
        throw ValueError("bad value kind");
    }

    ValueKind kind() const { return ValueKind(v_.index()); }

    bool as_bool() const { return expect<bool>(ValueKind::boolean); }
    int64_t as_int() const { return expect<int64_t>(ValueKind::integer); }
    const Decimal& as_decimal() const { return expect<Decimal>(ValueKind::decimal); }
    const std::string& as_string() const { return expect<std::string>(ValueKind::string); }

    // Numeric access with integer -> decimal promotion.
    Decimal as_numeric() const {
        if (kind() == ValueKind::integer) return Decimal::from_int(as_int());
        return as_decimal();
    }

    bool is_numeric() const {
        return kind() == ValueKind::integer || kind() == ValueKind::decimal;
    }

    // Same-kind structural equality (no cross-kind promotion).
    bool operator==(const FactValue& o) const {
        if (kind() != o.kind()) return false;
        switch (kind()) {
            case ValueKind::boolean: return as_bool() == o.as_bool();
            case ValueKind::integer: return as_int() == o.as_int();
            case ValueKind::decimal: return as_decimal() == o.as_decimal();
            case ValueKind::string: return as_string() == o.as_string();
        }
        return false;
    }
    bool operator!=(const FactValue& o) const { return !(*this == o); }

    // Tagged JSON object: {"boolean":true} {"integer":50} {"decimal":"11.2"}
    // {"string":"Cat6"}. Decimal payloads are strings so values round-trip
    // exactly and never pass through binary floats.
    json to_json() const {
        switch (kind()) {
            case ValueKind::boolean: return json{{"boolean", as_bool()}};
            case ValueKind::integer: return json{{"integer", as_int()}};
            case ValueKind::decimal: return json{{"decimal", as_decimal().str()}};
            case ValueKind::string: return json{{"string", as_string()}};
        }
        throw ValueError("bad value kind");
    }

    static FactValue from_json(const json& j) {
        if (!j.is_object() || j.size() != 1)
            throw ValueError("value must be a single-key tagged object");
        const auto& [key, payload] = *j.items().begin();
        if (key == "boolean") {
            if (!payload.is_boolean()) throw ValueError("boolean payload must be true/false");
            return boolean(payload.get<bool>());
        }
        if (key == "integer") {
            if (!payload.is_number_integer())
                throw ValueError("integer payload must be a JSON integer");
            return integer(payload.get<int64_t>());
        }
        if (key == "decimal") {
            if (!payload.is_string())
                throw ValueError("decimal payload must be a string (exactness)");
            return decimal(Decimal::parse(payload.get<std::string>()));
        }
        if (key == "string") {
            if (!payload.is_string()) throw ValueError("string payload must be a string");
            return string(payload.get<std::string>());
        }
        throw ValueError("unknown value tag: '" + key + "'");
    }

    std::string display() const {
        switch (kind()) {
            case ValueKind::boolean: return as_bool() ? "true" : "false";
            case ValueKind::integer: return std::to_string(as_int());
            case ValueKind::decimal: return as_decimal().str();
            case ValueKind::string: return as_string();
        }
        return "?";
    }

private:
    using Var = std::variant<bool, int64_t, Decimal, std::string>;
    explicit FactValue(Var v) : v_(std::move(v)) {}

    template <class T>
    const T& expect(ValueKind k) const {
        if (kind() != k)
            throw ValueError(std::string("value is ") + to_string(kind()) + ", wanted " +
                             to_string(k));
        return std::get<T>(v_);
    }

    Var v_;
};

inline ValueKind value_kind_from_string(const std::string& s) {
    if (s == "boolean") return ValueKind::boolean;
    if (s == "integer") return ValueKind::integer;
    if (s == "decimal") return ValueKind::decimal;
    if (s == "string") return ValueKind::string;
    throw ValueError("unknown value kind: '" + s + "'");
}

}  // namespace twinpath

#pragma once

#include <algorithm>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "twinpath/value.hpp"

namespace twinpath {

enum class ArithOp : uint8_t { add, sub, mul, div };
enum class CmpOp : uint8_t { eq, ne, lt, gt, le, ge };

inline const char* to_string(ArithOp op) {
    switch (op) {
        case ArithOp::add: return "+";
        case ArithOp::sub: return "-";
        case ArithOp::mul: return "*";
        case ArithOp::div: return "/";
    }
    return "?";
}

inline const char* to_string(CmpOp op) {
    switch (op) {
        case CmpOp::eq: return "==";
        case CmpOp::ne: return "!=";
        case CmpOp::lt: return "<";
        case CmpOp::gt: return ">";
        case CmpOp::le: return "<=";
        case CmpOp::ge: return ">=";
    }
    return "?";
}

class TypeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ArityError : public TypeError {
public:
    using TypeError::TypeError;
};

class EvalError : public std::runtime_error {
public:
    enum class Code { divide_by_zero, overflow };
    EvalError(Code code, const std::string& what) : std::runtime_error(what), code_(code) {}
    Code code() const { return code_; }

private:
    Code code_;
};

// Expression AST for rule pre/postconditions. Preconditions have a Compare
// root (boolean result); postconditions have a value-producing root.
struct Expr;
using ExprPtr = std::unique_ptr<Expr>;

struct Expr {
    struct Const {
        FactValue value;
    };
    struct Input {
        uint32_t index;
    };
    struct Arith {
        ArithOp op;
        ExprPtr left;
        ExprPtr right;
    };
    struct Compare {
        CmpOp op;
        ExprPtr left;
        ExprPtr right;
    };

    std::variant<Const, Input, Arith, Compare> node;

    bool is_compare_root() const { return std::holds_alternative<Compare>(node); }
};

inline ExprPtr make_const(FactValue v) {
    return std::make_unique<Expr>(Expr{Expr::Const{std::move(v)}});
}
inline ExprPtr make_input(uint32_t index) {
    return std::make_unique<Expr>(Expr{Expr::Input{index}});
}
inline ExprPtr make_arith(ArithOp op, ExprPtr l, ExprPtr r) {
    return std::make_unique<Expr>(Expr{Expr::Arith{op, std::move(l), std::move(r)}});
}
inline ExprPtr make_compare(CmpOp op, ExprPtr l, ExprPtr r) {
    return std::make_unique<Expr>(Expr{Expr::Compare{op, std::move(l), std::move(r)}});
}

// Number of input slots the expression requires (max Input index + 1).
inline uint32_t count_inputs(const Expr& e) {
    if (std::holds_alternative<Expr::Const>(e.node)) return 0;
    if (auto* i = std::get_if<Expr::Input>(&e.node)) return i->index + 1;
    if (auto* a = std::get_if<Expr::Arith>(&e.node))
        return std::max(count_inputs(*a->left), count_inputs(*a->right));
    const auto& c = std::get<Expr::Compare>(e.node);
    return std::max(count_inputs(*c.left), count_inputs(*c.right));
}

inline ExprPtr clone_expr(const Expr& e) {
    if (auto* c = std::get_if<Expr::Const>(&e.node)) return make_const(c->value);
    if (auto* i = std::get_if<Expr::Input>(&e.node)) return make_input(i->index);
    if (auto* a = std::get_if<Expr::Arith>(&e.node))
        return make_arith(a->op, clone_expr(*a->left), clone_expr(*a->right));
    const auto& c = std::get<Expr::Compare>(e.node);
    return make_compare(c.op, clone_expr(*c.left), clone_expr(*c.right));
}

namespace detail_logic {

inline bool is_numeric(ValueKind k) {
    return k == ValueKind::integer || k == ValueKind::decimal;
}

inline bool is_equality(CmpOp op) { return op == CmpOp::eq || op == CmpOp::ne; }

}  // namespace detail_logic

// Static typing pass. Comparisons yield boolean; arithmetic over two integers
// yields integer, any decimal operand yields decimal. Booleans and strings
// admit only == and !=; mixed string/numeric comparisons are rejected.
inline ValueKind typecheck_expression(const Expr& e, std::span<const ValueKind> slot_kinds) {
    using namespace detail_logic;
    if (auto* c = std::get_if<Expr::Const>(&e.node)) return c->value.kind();
    if (auto* in = std::get_if<Expr::Input>(&e.node)) {
        if (in->index >= slot_kinds.size())
            throw ArityError("input slot " + std::to_string(in->index) + " out of range (" +
                             std::to_string(slot_kinds.size()) + " slots)");
        return slot_kinds[in->index];
    }
    if (auto* a = std::get_if<Expr::Arith>(&e.node)) {
        ValueKind l = typecheck_expression(*a->left, slot_kinds);
        ValueKind r = typecheck_expression(*a->right, slot_kinds);
        if (!is_numeric(l) || !is_numeric(r))
            throw TypeError(std::string("arithmetic '") + to_string(a->op) +
                            "' requires numeric operands, got " + to_string(l) + " and " +
                            to_string(r));
        if (l == ValueKind::integer && r == ValueKind::integer) return ValueKind::integer;
        return ValueKind::decimal;
    }
    const auto& c = std::get<Expr::Compare>(e.node);
    ValueKind l = typecheck_expression(*c.left, slot_kinds);
    ValueKind r = typecheck_expression(*c.right, slot_kinds);
    if (is_numeric(l) && is_numeric(r)) return ValueKind::boolean;
    if (l != r)
        throw TypeError(std::string("cannot compare ") + to_string(l) + " with " + to_string(r));
    if (!is_equality(c.op))
        throw TypeError(std::string(to_string(l)) + " values admit only == and !=, not '" +
                        to_string(c.op) + "'");
    return ValueKind::boolean;
}

namespace detail_logic {

inline int64_t checked_int(ArithOp op, int64_t a, int64_t b) {
    int64_t out = 0;
    bool ovf = false;
    switch (op) {
        case ArithOp::add: ovf = __builtin_add_overflow(a, b, &out); break;
        case ArithOp::sub: ovf = __builtin_sub_overflow(a, b, &out); break;
        case ArithOp::mul: ovf = __builtin_mul_overflow(a, b, &out); break;
        case ArithOp::div: throw std::logic_error("checked_int does not divide");
    }
    if (ovf)
        throw EvalError(EvalError::Code::overflow, std::string("integer overflow in ") +
                                                       std::to_string(a) + to_string(op) +
                                                       std::to_string(b));
    return out;
}

}  // namespace detail_logic

// Pure evaluation. Requires a successful typecheck against the slots' kinds;
// the only runtime failures are division by zero and integer overflow.
// Integer division is exact when divisible and otherwise promotes the result
// to decimal rather than truncating.
inline FactValue eval_expression(const Expr& e, std::span<const FactValue> slots) {
    using namespace detail_logic;
    if (auto* c = std::get_if<Expr::Const>(&e.node)) return c->value;
    if (auto* in = std::get_if<Expr::Input>(&e.node)) {
        if (in->index >= slots.size())
            throw ArityError("input slot " + std::to_string(in->index) + " out of range");
        return slots[in->index];
    }
    if (auto* a = std::get_if<Expr::Arith>(&e.node)) {
        FactValue l = eval_expression(*a->left, slots);
        FactValue r = eval_expression(*a->right, slots);
        if (l.kind() == ValueKind::integer && r.kind() == ValueKind::integer) {
            int64_t li = l.as_int(), ri = r.as_int();
            if (a->op == ArithOp::div) {
                if (ri == 0)
                    throw EvalError(EvalError::Code::divide_by_zero, "integer division by zero");
                // INT64_MIN / -1 is the one overflowing quotient.
                if (li % ri == 0 && !(li == INT64_MIN && ri == -1))
                    return FactValue::integer(li / ri);
                return FactValue::decimal(Decimal::from_int(li).div(Decimal::from_int(ri)));
            }
            return FactValue::integer(checked_int(a->op, li, ri));
        }
        Decimal ld = l.as_numeric(), rd = r.as_numeric();
        switch (a->op) {
            case ArithOp::add: return FactValue::decimal(ld.add(rd));
            case ArithOp::sub: return FactValue::decimal(ld.sub(rd));
            case ArithOp::mul: return FactValue::decimal(ld.mul(rd));
            case ArithOp::div:
                try {
                    return FactValue::decimal(ld.div(rd));
                } catch (const DecimalDivideByZero&) {
                    throw EvalError(EvalError::Code::divide_by_zero, "decimal division by zero");
                }
        }
        throw std::logic_error("bad arith op");
    }
    const auto& c = std::get<Expr::Compare>(e.node);
    FactValue l = eval_expression(*c.left, slots);
    FactValue r = eval_expression(*c.right, slots);
    int ord;
    if (l.is_numeric() && r.is_numeric()) {
        ord = l.as_numeric().cmp(r.as_numeric());
    } else if (l.kind() == ValueKind::string && r.kind() == ValueKind::string) {
        ord = l.as_string() == r.as_string() ? 0 : 1;
    } else if (l.kind() == ValueKind::boolean && r.kind() == ValueKind::boolean) {
        ord = l.as_bool() == r.as_bool() ? 0 : 1;
    } else {
        throw TypeError(std::string("cannot compare ") + to_string(l.kind()) + " with " +
                        to_string(r.kind()));
    }
    switch (c.op) {
        case CmpOp::eq: return FactValue::boolean(ord == 0);
        case CmpOp::ne: return FactValue::boolean(ord != 0);
        case CmpOp::lt: return FactValue::boolean(ord < 0);
        case CmpOp::gt: return FactValue::boolean(ord > 0);
        case CmpOp::le: return FactValue::boolean(ord <= 0);
        case CmpOp::ge: return FactValue::boolean(ord >= 0);
    }
    throw std::logic_error("bad compare op");
}

// JSON encoding:
//   {"const":{"decimal":"11.2"}}  {"input":0}
//   {"arith":{"op":"+","left":...,"right":...}}
//   {"compare":{"op":"<=","left":...,"right":...}}
inline json expr_to_json(const Expr& e) {
    if (auto* c = std::get_if<Expr::Const>(&e.node)) return json{{"const", c->value.to_json()}};
    if (auto* i = std::get_if<Expr::Input>(&e.node)) return json{{"input", i->index}};
    if (auto* a = std::get_if<Expr::Arith>(&e.node))
        return json{{"arith",
                     {{"op", to_string(a->op)},
                      {"left", expr_to_json(*a->left)},
                      {"right", expr_to_json(*a->right)}}}};
    const auto& c = std::get<Expr::Compare>(e.node);
    return json{{"compare",
                 {{"op", to_string(c.op)},
                  {"left", expr_to_json(*c.left)},
                  {"right", expr_to_json(*c.right)}}}};
}

inline ArithOp arith_op_from_string(const std::string& s) {
    if (s == "+") return ArithOp::add;
    if (s == "-") return ArithOp::sub;
    if (s == "*") return ArithOp::mul;
    if (s == "/") return ArithOp::div;
    throw ValueError("unknown arithmetic operator: '" + s + "'");
}

inline CmpOp cmp_op_from_string(const std::string& s) {
    if (s == "==") return CmpOp::eq;
    if (s == "!=") return CmpOp::ne;
    if (s == "<") return CmpOp::lt;
    if (s == ">") return CmpOp::gt;
    if (s == "<=") return CmpOp::le;
    if (s == ">=") return CmpOp::ge;
    throw ValueError("unknown comparison operator: '" + s + "'");
}

inline ExprPtr expr_from_json(const json& j) {
    if (!j.is_object() || j.size() != 1)
        throw ValueError("expression must be a single-key object");
    const auto& [key, body] = *j.items().begin();
    if (key == "const") return make_const(FactValue::from_json(body));
    if (key == "input") {
        if (!body.is_number_unsigned() && !(body.is_number_integer() && body.get<int64_t>() >= 0))
            throw ValueError("input index must be a non-negative integer");
        return make_input(body.get<uint32_t>());
    }
    if (key == "arith")
        return make_arith(arith_op_from_string(body.at("op").get<std::string>()),
                          expr_from_json(body.at("left")), expr_from_json(body.at("right")));
    if (key == "compare")
        return make_compare(cmp_op_from_string(body.at("op").get<std::string>()),
                            expr_from_json(body.at("left")), expr_from_json(body.at("right")));
    throw ValueError("unknown expression node: '" + key + "'");
}

}  // namespace twinpath

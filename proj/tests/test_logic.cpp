#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "twinpath/logic.hpp"

using namespace twinpath;

namespace {

FactValue sample_value(ValueKind k) {
    switch (k) {
        case ValueKind::boolean: return FactValue::boolean(true);
        case ValueKind::integer: return FactValue::integer(50);
        case ValueKind::decimal: return FactValue::decimal(Decimal::parse("11.2"));
        case ValueKind::string: return FactValue::string("Cat6");
    }
    throw std::logic_error("kind");
}

bool typechecks(CmpOp op, ValueKind l, ValueKind r) {
    auto e = make_compare(op, make_const(sample_value(l)), make_const(sample_value(r)));
    try {
        typecheck_expression(*e, {});
        return true;
    } catch (const TypeError&) {
        return false;
    }
}

// Random well-typed expression of the requested kind, for the no-kind-error
// property. Depth-bounded.
ExprPtr random_typed_expr(std::mt19937_64& rng, ValueKind want,
                          std::span<const ValueKind> slots, int depth) {
    auto pick_leaf = [&]() -> ExprPtr {
        std::vector<uint32_t> matching;
        for (uint32_t i = 0; i < slots.size(); ++i)
            if (slots[i] == want) matching.push_back(i);
        if (!matching.empty() && (rng() & 1))
            return make_input(matching[rng() % matching.size()]);
        switch (want) {
            case ValueKind::boolean: return make_const(FactValue::boolean(rng() & 1));
            case ValueKind::integer:
                return make_const(FactValue::integer(int64_t(rng() % 2001) - 1000));
            case ValueKind::decimal: {
                int64_t m = int64_t(rng() % 200001) - 100000;
                Decimal d = Decimal::from_int(m).div(Decimal::from_int(100));
                return make_const(FactValue::decimal(d));
            }
            case ValueKind::string: {
                const char* pool[] = {"a", "b", "FileSharez", "Cat6"};
                return make_const(FactValue::string(pool[rng() % 4]));
            }
        }
        throw std::logic_error("kind");
    };
    if (depth <= 0) return pick_leaf();
    switch (want) {
        case ValueKind::boolean: {
            if (rng() % 3 == 0) return pick_leaf();
            // Comparison producing a boolean.
            bool numeric = rng() & 1;
            if (numeric) {
                CmpOp ops[] = {CmpOp::eq, CmpOp::ne, CmpOp::lt, CmpOp::gt, CmpOp::le, CmpOp::ge};
                ValueKind lk = (rng() & 1) ? ValueKind::integer : ValueKind::decimal;
                ValueKind rk = (rng() & 1) ? ValueKind::integer : ValueKind::decimal;
                return make_compare(ops[rng() % 6], random_typed_expr(rng, lk, slots, depth - 1),
                                    random_typed_expr(rng, rk, slots, depth - 1));
            }
            ValueKind k = (rng() & 1) ? ValueKind::boolean : ValueKind::string;
            CmpOp op = (rng() & 1) ? CmpOp::eq : CmpOp::ne;
            return make_compare(op, random_typed_expr(rng, k, slots, depth - 1),
                                random_typed_expr(rng, k, slots, depth - 1));
        }
        case ValueKind::integer: {
            if (rng() % 3 == 0) return pick_leaf();
            ArithOp ops[] = {ArithOp::add, ArithOp::sub, ArithOp::mul, ArithOp::div};
            return make_arith(ops[rng() % 4],
                              random_typed_expr(rng, ValueKind::integer, slots, depth - 1),
                              random_typed_expr(rng, ValueKind::integer, slots, depth - 1));
        }
        case ValueKind::decimal: {
            if (rng() % 3 == 0) return pick_leaf();
            ArithOp ops[] = {ArithOp::add, ArithOp::sub, ArithOp::mul, ArithOp::div};
            ValueKind lk = (rng() & 1) ? ValueKind::integer : ValueKind::decimal;
            ValueKind rk = lk == ValueKind::integer ? ValueKind::decimal
                                                    : ((rng() & 1) ? ValueKind::integer
                                                                   : ValueKind::decimal);
            return make_arith(ops[rng() % 4], random_typed_expr(rng, lk, slots, depth - 1),
                              random_typed_expr(rng, rk, slots, depth - 1));
        }
        case ValueKind::string: return pick_leaf();
    }
    throw std::logic_error("kind");
}

}  // namespace

TEST_CASE("operator/kind admission matrix") {
    const CmpOp all_ops[] = {CmpOp::eq, CmpOp::ne, CmpOp::lt, CmpOp::gt, CmpOp::le, CmpOp::ge};
    const ValueKind kinds[] = {ValueKind::boolean, ValueKind::integer, ValueKind::decimal,
                               ValueKind::string};
    for (CmpOp op : all_ops) {
        for (ValueKind l : kinds) {
            for (ValueKind r : kinds) {
                bool numeric_pair = (l == ValueKind::integer || l == ValueKind::decimal) &&
                                    (r == ValueKind::integer || r == ValueKind::decimal);
                bool want;
                if (numeric_pair)
                    want = true;  // all six operators
                else if (l == r)
                    want = op == CmpOp::eq || op == CmpOp::ne;  // equality only
                else
                    want = false;  // mixed kinds never compare
                INFO(to_string(l) << " " << to_string(op) << " " << to_string(r));
                CHECK(typechecks(op, l, r) == want);
            }
        }
    }
}

TEST_CASE("typecheck results and failures") {
    ValueKind slots[] = {ValueKind::decimal};
    auto pre = make_compare(CmpOp::le, make_input(0),
                            make_const(FactValue::decimal(Decimal::parse("11.2"))));
    CHECK(typecheck_expression(*pre, slots) == ValueKind::boolean);

    auto promo = make_arith(ArithOp::add, make_const(FactValue::integer(1)),
                            make_const(FactValue::decimal(Decimal::parse("0.5"))));
    CHECK(typecheck_expression(*promo, {}) == ValueKind::decimal);

    auto ints = make_arith(ArithOp::mul, make_const(FactValue::integer(2)),
                           make_const(FactValue::integer(3)));
    CHECK(typecheck_expression(*ints, {}) == ValueKind::integer);

    auto bad = make_compare(CmpOp::lt, make_const(FactValue::string("a")),
                            make_const(FactValue::string("b")));
    CHECK_THROWS_AS(typecheck_expression(*bad, {}), TypeError);

    auto bool_arith = make_arith(ArithOp::add, make_const(FactValue::boolean(true)),
                                 make_const(FactValue::integer(1)));
    CHECK_THROWS_AS(typecheck_expression(*bool_arith, {}), TypeError);

    auto out_of_range = make_input(2);
    ValueKind two[] = {ValueKind::integer, ValueKind::integer};
    CHECK_THROWS_AS(typecheck_expression(*out_of_range, two), ArityError);
}

TEST_CASE("evaluation examples") {
    FactValue slots[] = {FactValue::string("FileSharez")};
    auto eq = make_compare(CmpOp::eq, make_input(0),
                           make_const(FactValue::string("FileSharez")));
    CHECK(eval_expression(*eq, slots).as_bool());

    auto lt = make_compare(CmpOp::lt, make_const(FactValue::decimal(Decimal::parse("10240.20525"))),
                           make_const(FactValue::decimal(Decimal::parse("10240.20526"))));
    CHECK(eval_expression(*lt, {}).as_bool());

    auto div0 = make_arith(ArithOp::div, make_const(FactValue::integer(1)),
                           make_const(FactValue::integer(0)));
    CHECK_THROWS_MATCHES(eval_expression(*div0, {}), EvalError,
                         Catch::Matchers::Predicate<EvalError>([](const EvalError& e) {
                             return e.code() == EvalError::Code::divide_by_zero;
                         }));

    auto ovf = make_arith(ArithOp::add, make_const(FactValue::integer(INT64_MAX)),
                          make_const(FactValue::integer(1)));
    CHECK_THROWS_MATCHES(eval_expression(*ovf, {}), EvalError,
                         Catch::Matchers::Predicate<EvalError>([](const EvalError& e) {
                             return e.code() == EvalError::Code::overflow;
                         }));

    SECTION("integer division: exact quotient stays integer, otherwise decimal") {
        auto exact = make_arith(ArithOp::div, make_const(FactValue::integer(6)),
                                make_const(FactValue::integer(3)));
        FactValue v = eval_expression(*exact, {});
        CHECK(v.kind() == ValueKind::integer);
        CHECK(v.as_int() == 2);

        auto promoted = make_arith(ArithOp::div, make_const(FactValue::integer(1)),
                                   make_const(FactValue::integer(2)));
        FactValue w = eval_expression(*promoted, {});
        CHECK(w.kind() == ValueKind::decimal);
        CHECK(w.as_decimal().str() == "0.5");
    }

    SECTION("mixed arithmetic promotes to decimal") {
        auto e = make_arith(ArithOp::add, make_const(FactValue::integer(1)),
                            make_const(FactValue::decimal(Decimal::parse("0.5"))));
        FactValue v = eval_expression(*e, {});
        CHECK(v.kind() == ValueKind::decimal);
        CHECK(v.as_decimal().str() == "1.5");
    }
}

TEST_CASE("comparison negation pairs on numeric values") {
    std::mt19937_64 rng(2024);
    const std::pair<CmpOp, CmpOp> pairs[] = {
        {CmpOp::eq, CmpOp::ne}, {CmpOp::lt, CmpOp::ge}, {CmpOp::gt, CmpOp::le}};
    for (int i = 0; i < 2000; ++i) {
        int64_t a = int64_t(rng() % 2001) - 1000;
        int64_t b = int64_t(rng() % 2001) - 1000;
        FactValue va = (rng() & 1)
                           ? FactValue::integer(a)
                           : FactValue::decimal(Decimal::from_int(a).div(Decimal::from_int(10)));
        FactValue vb = (rng() & 1)
                           ? FactValue::integer(b)
                           : FactValue::decimal(Decimal::from_int(b).div(Decimal::from_int(10)));
        for (auto [op, neg] : pairs) {
            auto e1 = make_compare(op, make_const(va), make_const(vb));
            auto e2 = make_compare(neg, make_const(va), make_const(vb));
            CHECK(eval_expression(*e1, {}).as_bool() != eval_expression(*e2, {}).as_bool());
        }
    }
}

TEST_CASE("well-typed expressions never fail with kind errors") {
    std::mt19937_64 rng(31337);
    for (int i = 0; i < 3000; ++i) {
        std::vector<ValueKind> slot_kinds;
        int n = int(rng() % 4);
        const ValueKind kinds[] = {ValueKind::boolean, ValueKind::integer, ValueKind::decimal,
                                   ValueKind::string};
        for (int s = 0; s < n; ++s) slot_kinds.push_back(kinds[rng() % 4]);
        ValueKind want = kinds[rng() % 4];
        auto e = random_typed_expr(rng, want, slot_kinds, 4);
        ValueKind got = typecheck_expression(*e, slot_kinds);
        if (want != ValueKind::boolean) {
            // Arith int/int may be integer; any decimal operand gives decimal.
            CHECK((got == want || (want == ValueKind::decimal && got == ValueKind::integer) ||
                   (want == ValueKind::integer && got == ValueKind::integer)));
        }
        std::vector<FactValue> slots;
        for (ValueKind k : slot_kinds) slots.push_back(sample_value(k));
        try {
            eval_expression(*e, slots);
        } catch (const EvalError&) {
            // divide-by-zero / overflow are the only permitted failures
        }
        // TypeError / ValueError escaping here fails the test via Catch2.
    }
}

TEST_CASE("expression JSON round-trip") {
    auto e = make_compare(
        CmpOp::le,
        make_arith(ArithOp::mul, make_input(0), make_const(FactValue::decimal(Decimal::parse("2.5")))),
        make_const(FactValue::integer(100)));
    json j = expr_to_json(*e);
    auto parsed = expr_from_json(j);
    CHECK(expr_to_json(*parsed) == j);

    json spec_shape = json::parse(
        R"({"compare":{"op":"<=","left":{"input":0},"right":{"const":{"decimal":"11.2"}}}})");
    auto from_spec = expr_from_json(spec_shape);
    CHECK(expr_to_json(*from_spec) == spec_shape);

    CHECK_THROWS_AS(expr_from_json(json::parse(R"({"nope":1})")), ValueError);
    CHECK_THROWS_AS(expr_from_json(json::parse(R"({"const":{"decimal":11.2}})")), ValueError);
}

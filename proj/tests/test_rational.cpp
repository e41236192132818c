#include <catch2/catch_amalgamated.hpp>

#include "parqkd/rational.hpp"
#include "parqkd/rng.hpp"

using parqkd::parse_rational;
using parqkd::rational;

TEST_CASE("rationals normalize on construction") {
    CHECK(rational(2, 4) == rational(1, 2));
    CHECK(rational(-2, -4) == rational(1, 2));
    CHECK(rational(2, -4) == rational(-1, 2));
    CHECK(rational(0, 7) == rational(0));
    CHECK(rational(8, 9).num() == 8);
    CHECK(rational(8, 9).den() == 9);
    CHECK_THROWS_AS(rational(1, 0), parqkd::domain_error);
}

TEST_CASE("rational arithmetic is exact") {
    CHECK(rational(1, 3) + rational(1, 6) == rational(1, 2));
    CHECK(rational(8, 9) - rational(1, 9) == rational(7, 9));
    CHECK(rational(2, 3) * rational(3, 4) == rational(1, 2));
    CHECK(rational(1, 2) / rational(1, 8) == rational(4));
    CHECK(rational(1) - rational(8, 9) == rational(1, 9));
    CHECK_THROWS_AS(rational(1) / rational(0), parqkd::domain_error);
}

TEST_CASE("rational ordering crosses denominators") {
    CHECK(rational(1, 3) < rational(1, 2));
    CHECK(rational(-1, 2) < rational(1, 3));
    CHECK(rational(7, 9) <= rational(7, 9));
    CHECK(rational(8, 9) > rational(7, 8));
}

TEST_CASE("addition round trip over random values") {
    parqkd::stream_rng rng = parqkd::derive_rng(11, 0, "rat");
    for (int i = 0; i < 500; ++i) {
        const rational a(static_cast<std::int64_t>(parqkd::uniform_below(rng, 2001)) - 1000,
                         1 + static_cast<std::int64_t>(parqkd::uniform_below(rng, 40)));
        const rational b(static_cast<std::int64_t>(parqkd::uniform_below(rng, 2001)) - 1000,
                         1 + static_cast<std::int64_t>(parqkd::uniform_below(rng, 40)));
        CHECK((a + b) - b == a);
        CHECK(a * b == b * a);
    }
}

TEST_CASE("parsing accepts p/q, integers and terminating decimals") {
    CHECK(parse_rational("1/8") == rational(1, 8));
    CHECK(parse_rational("-3/6") == rational(-1, 2));
    CHECK(parse_rational("7") == rational(7));
    CHECK(parse_rational("0.125") == rational(1, 8));
    CHECK(parse_rational("0.95") == rational(19, 20));
    CHECK(parse_rational("-0.5") == rational(-1, 2));
    CHECK_THROWS_AS(parse_rational(""), parqkd::domain_error);
    CHECK_THROWS_AS(parse_rational("a/b"), parqkd::domain_error);
    CHECK_THROWS_AS(parse_rational("1/0"), parqkd::domain_error);
    CHECK_THROWS_AS(parse_rational("1.2.3"), parqkd::domain_error);
}

TEST_CASE("string form is reduced") {
    CHECK(rational(8, 9).str() == "8/9");
    CHECK(rational(4, 2).str() == "2");
    CHECK(rational(-1, 8).str() == "-1/8");
}

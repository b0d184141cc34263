#include <catch2/catch_amalgamated.hpp>

#include "bnr/diagram.hpp"
#include "bnr/field.hpp"

using namespace bnr;

TEST_CASE("Fp arithmetic", "[field]") {
    Fp f(7);
    CHECK(f.from_int(-3) == 4);
    CHECK(f.add(5, 4) == 2);
    CHECK(f.sub(2, 5) == 4);
    CHECK(f.neg(0) == 0);
    CHECK(f.neg(3) == 4);
    for (Fp::Elem a = 1; a < 7; ++a) CHECK(f.mul(a, f.inv(a)) == 1);
    CHECK_THROWS(f.inv(0));
}

TEST_CASE("Fp large primes", "[field]") {
    Fp f(99991);
    for (Fp::Elem a : {2, 31337, 99990}) CHECK(f.mul(a, f.inv(a)) == 1);
}

TEST_CASE("QQ arithmetic", "[field]") {
    QQ f;
    QQ::Elem a = f.div(f.one(), f.from_int(3));
    CHECK(f.mul(a, f.from_int(3)) == 1);
    CHECK(f.is_zero(f.sub(a, a)));
    CHECK(f.str(f.div(f.from_int(2), f.from_int(-4))) == "-1/2");
    CHECK_THROWS(f.inv(f.zero()));
}

TEST_CASE("FieldSpec validation", "[field]") {
    CHECK(FieldSpec::parse(0).characteristic == 0);
    CHECK(FieldSpec::parse(2).characteristic == 2);
    CHECK(FieldSpec::parse(99991).characteristic == 99991);
    CHECK_THROWS(FieldSpec::parse(1));
    CHECK_THROWS(FieldSpec::parse(4));
    CHECK_THROWS(FieldSpec::parse(-2));
}

TEST_CASE("Slope arithmetic", "[field]") {
    CHECK(Slope(4, -6) == Slope(-2, 3));
    CHECK(Slope(0, 5) == Slope(0, 1));
    CHECK(Slope::infinity().is_infinity());
    CHECK(Slope(3, 0).is_infinity());
    CHECK((-Slope(1, 2)) == Slope(-1, 2));
    CHECK(Slope(1, 2).plus_int(2) == Slope(5, 2));
    CHECK(Slope::parse("-7/2") == Slope(-7, 2));
    CHECK(Slope::parse("inf").is_infinity());
    CHECK(Slope(5, 2).str() == "5/2");
    CHECK(Slope(-4, 1).str() == "-4");
}

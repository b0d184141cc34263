#include <catch2/catch_amalgamated.hpp>

#include "bnr/diagram.hpp"

using namespace bnr;

namespace {

TangleDiagram braid_closure(int strands, std::vector<int> const& word) {
    // trace closure: k nested cups, braid on the left k columns, k nested caps
    TangleDiagram d;
    d.ends = 0;
    d.top_arity = 0;
    for (int i = 0; i < strands; ++i) d.events.push_back({Ev::U, i});
    for (int s : word) d.events.push_back({s > 0 ? Ev::X : Ev::Y, std::abs(s) - 1});
    for (int i = strands - 1; i >= 0; --i) d.events.push_back({Ev::N, i});
    return d;
}

TangleDiagram trefoil() { return braid_closure(2, {1, 1, 1}); }

}  // namespace

TEST_CASE("word validation", "[diagram]") {
    TangleDiagram ok = q_infinity();
    CHECK(ok.validate());
    CHECK(ok.final_width() == 2);

    TangleDiagram bad = q_infinity();
    bad.events = {{Ev::N, 1}};  // cap out of range on two strands? cols 1,2 missing
    CHECK_FALSE(bad.validate());

    TangleDiagram open_mismatch = q_infinity();
    open_mismatch.events = {{Ev::U, 0}};
    CHECK_FALSE(open_mismatch.validate());  // 6 open ends but ends=4
}

TEST_CASE("trace counts crossings on the trefoil", "[diagram]") {
    auto t = trace(trefoil());
    CHECK(t.components == 1);
    CHECK(t.closed_components == 1);
    CHECK(t.n_plus == 3);
    CHECK(t.n_minus == 0);
    CHECK(t.writhe == 3);

    auto m = trace(mirror(trefoil()));
    CHECK(m.writhe == -3);
}

TEST_CASE("figure-eight braid closure is amphichiral in writhe", "[diagram]") {
    auto t = trace(braid_closure(3, {1, -2, 1, -2}));
    CHECK(t.components == 1);
    CHECK(t.n_plus == 2);
    CHECK(t.n_minus == 2);
}

TEST_CASE("basic tangle connectivities", "[diagram]") {
    CHECK(classify(q_zero()).first == Conn::H);
    CHECK(classify(q_infinity()).first == Conn::V);
    CHECK(classify(q_one(1)).first == Conn::X);
    CHECK(classify(q_one(-1)).first == Conn::X);
}

TEST_CASE("rational tangle connectivity matches slope parity", "[diagram]") {
    for (long long p = -9; p <= 9; ++p) {
        for (long long q = 1; q <= 9; ++q) {
            if (std::gcd(p < 0 ? -p : p, q) != 1) continue;
            Slope s(p, q);
            auto [conn, lk2] = classify(rational_tangle(s));
            Conn want = (p % 2 == 0) ? Conn::H : (q % 2 == 0 ? Conn::V : Conn::X);
            INFO("slope " << s.str());
            CHECK(conn == want);
            (void)lk2;
        }
    }
    CHECK(classify(rational_tangle(Slope::infinity())).first == Conn::V);
}

TEST_CASE("sum and union word surgery", "[diagram]") {
    CHECK(classify(tangle_sum(q_zero(), q_zero())).first == Conn::H);
    CHECK(classify(tangle_sum(q_one(1), q_one(1))).first == Conn::H);
    // summing two vertical tangles traps a circle between them
    CHECK(trace(tangle_sum(q_infinity(), q_infinity())).closed_components == 1);

    CHECK(trace(tangle_union(q_zero(), q_zero())).components == 2);
    CHECK(trace(tangle_union(q_zero(), q_infinity())).components == 1);
    // closure of Q_1 + Q_-1 = Q_0 is a two-component unlink
    CHECK(trace(tangle_union(q_one(1), q_one(-1))).components == 2);
}

TEST_CASE("rotate_y and mirror preserve connectivity", "[diagram]") {
    for (Slope s : {Slope(1, 2), Slope(5, 2), Slope(-3, 1), Slope(3, 5)}) {
        auto t = rational_tangle(s);
        auto c = classify(t).first;
        CHECK(classify(rotate_y(t)).first == c);
        CHECK(classify(mirror(t)).first == c);
    }
}

TEST_CASE("double tangle of small knots", "[diagram]") {
    for (auto const& k : {braid_closure(1, {}), trefoil(), braid_closure(3, {1, -2, 1, -2})}) {
        auto d = double_tangle(k);
        auto [conn, lk2] = classify(d);
        CHECK(conn == Conn::H);
        CHECK(lk2 == 0);
    }
}

TEST_CASE("satellite-type constructions give knots", "[diagram]") {
    auto k = trefoil();
    CHECK(trace(whitehead(k, 0, +1)).components == 1);
    CHECK(trace(whitehead(k, -1, -1)).components == 1);
    CHECK(trace(cable2(k, 1)).components == 1);
    CHECK(trace(satellite(q_one(1), k, 0)).components == 1);
    CHECK_THROWS(satellite(q_zero(), k, 0));  // H-pattern gives a link
}

TEST_CASE("connected sum word surgery", "[diagram]") {
    auto s = connected_sum(trefoil(), mirror(trefoil()));
    auto t = trace(s);
    CHECK(t.components == 1);
    CHECK(t.writhe == 0);
    CHECK(t.n_plus == 3);
}

TEST_CASE("text format round trip", "[diagram]") {
    for (auto const& d : {rational_tangle(Slope(5, 2)), trefoil(), double_tangle(trefoil())}) {
        auto d2 = parse_word(write_word(d));
        CHECK(d2.ends == d.ends);
        CHECK(d2.top_arity == d.top_arity);
        CHECK(d2.events == d.events);
        CHECK(d2.slot_end == d.slot_end);
    }
    CHECK_THROWS(parse_word("x0\n"));           // missing header
    CHECK_THROWS(parse_word("ends=4\nn0\n"));   // cap with no strands
    CHECK_THROWS(parse_word("ends=4\nz0\n"));   // unknown token
}

TEST_CASE("PD ingestion of the trefoil and figure eight", "[diagram]") {
    auto t = from_pd_string("PD[X(1,4,2,5),X(3,6,4,1),X(5,2,6,3)]");
    auto tt = trace(t);
    CHECK(tt.components == 1);
    CHECK(tt.n_plus + tt.n_minus == 3);
    CHECK(std::abs(tt.writhe) == 3);

    auto f8 = from_pd_string("PD[X(4,2,5,1),X(8,6,1,5),X(6,3,7,4),X(2,7,3,8)]");
    auto tf = trace(f8);
    CHECK(tf.components == 1);
    CHECK(tf.n_plus + tf.n_minus == 4);
    CHECK(tf.writhe == 0);
}

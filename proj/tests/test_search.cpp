#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "gardner/board.hpp"
#include "gardner/notation.hpp"
#include "gardner/search.hpp"

using namespace gardner;

namespace {

Position play(std::initializer_list<const char*> sans) {
    Position p = Position::initial();
    for (const char* s : sans) p = p.apply(parseSAN(p, s));
    return p;
}

// 1.b4 c4 2.d4 Nxb4 3.dxe5+ Qxe5 4.Nxb4 — the hub of several short mates
Position afterNxb4() {
    return play({"b4", "c4", "d4", "Nxb4", "dxe5+", "Qxe5", "Nxb4"});
}

void checkProvenPV(const MateQuery& q, const MateResult& r) {
    REQUIRE(r.status == MateResult::Status::Proven);
    CHECK(r.movesUsed <= q.maxAttackerMoves);
    int bound = q.position.sideToMove() == q.attacker ? 2 * r.movesUsed - 1 : 2 * r.movesUsed;
    CHECK(static_cast<int>(r.pv.size()) <= bound);
    Position p = q.position;
    for (const Move& m : r.pv) p = p.apply(m);
    GameStatus st = p.basicStatus();
    CHECK(st.kind == GameStatusKind::Checkmate);
    CHECK(st.loser == opposite(q.attacker));
}

std::vector<Position> randomPositions(int count, int maxPlies, uint32_t seed) {
    std::mt19937 rng(seed);
    std::vector<Position> out;
    while (static_cast<int>(out.size()) < count) {
        Position p = Position::initial();
        std::uniform_int_distribution<int> plies(0, maxPlies);
        int n = plies(rng);
        for (int i = 0; i < n; ++i) {
            MoveList moves = p.legalMoves();
            if (moves.empty()) break;
            std::uniform_int_distribution<size_t> pick(0, moves.size() - 1);
            p = p.apply(moves[pick(rng)]);
        }
        out.push_back(p);
    }
    return out;
}

}  // namespace

TEST_CASE("mate in 3 after 4...Qd4 5.exd4") {
    Position p = afterNxb4();
    p = p.apply(parseSAN(p, "Qd4"));
    p = p.apply(parseSAN(p, "exd4"));
    MateQuery q{p, Color::White, 3};
    MateResult r = proveMate(q);
    checkProvenPV(q, r);
}

TEST_CASE("mate in 4 after 4...Qf4 5.exf4") {
    Position p = afterNxb4();
    p = p.apply(parseSAN(p, "Qf4"));
    p = p.apply(parseSAN(p, "exf4"));
    MateQuery q{p, Color::White, 4};
    checkProvenPV(q, proveMate(q));
}

TEST_CASE("mate in 5 after 4...Qxc3 5.Bxc3+") {
    Position p = afterNxb4();
    p = p.apply(parseSAN(p, "Qxc3"));
    p = p.apply(parseSAN(p, "Bxc3+"));
    MateQuery q{p, Color::White, 5};
    checkProvenPV(q, proveMate(q));
}

TEST_CASE("mate in 2 after 5...Ne5 6.Qxf4+") {
    Position p = play({"b4", "cxb4", "cxb4", "d4", "e4", "f4", "Bxf4", "exf4",
                       "Qd2", "Ne5", "Qxf4+"});
    MateQuery q{p, Color::White, 2};
    MateResult r = proveMate(q);
    checkProvenPV(q, r);
    // the claimed 2 is an upper bound; Black's forced Qf5 allows Qxf5#
    MateQuery q1{p, Color::White, 1};
    MateResult r1 = proveMate(q1);
    checkProvenPV(q1, r1);
    CHECK(r1.movesUsed == 1);
}

TEST_CASE("no mate in 2 from the initial position") {
    MateQuery q{Position::initial(), Color::White, 2};
    CHECK(proveMate(q).status == MateResult::Status::Disproven);
}

TEST_CASE("already-checkmated defender proves with an empty PV") {
    Position p = play({"b4", "Nxb4", "f4", "Nxd3+", "Kf3", "e4#"});
    MateQuery q{p, Color::Black, 1};
    MateResult r = proveMate(q);
    CHECK(r.status == MateResult::Status::Proven);
    CHECK(r.movesUsed == 0);
    CHECK(r.pv.empty());
    CHECK(checkImmediateCheckmate(p));
}

TEST_CASE("attacker-to-move parity") {
    // After 3...Nxd3+ 4.Kf3 Black is to move and mates with 5...e4#: x=1 works
    // with the attacker to move (ply bound 1).
    Position p = play({"b4", "Nxb4", "f4", "Nxd3+", "Kf3"});
    MateQuery q{p, Color::Black, 1};
    MateResult r = proveMate(q);
    checkProvenPV(q, r);
    CHECK(r.pv.size() == 1);
}

TEST_CASE("unknown on tiny node budget, says which budget") {
    MateQuery q{afterNxb4(), Color::White, 6};
    q.budget.maxNodes = 50;
    MateResult r = proveMate(q);
    CHECK(r.status == MateResult::Status::Unknown);
    CHECK(r.exhaustedBudget == "nodes");
}

TEST_CASE("monotonicity: proven at x stays proven at x+1") {
    Position p = afterNxb4();
    p = p.apply(parseSAN(p, "Qd4"));
    p = p.apply(parseSAN(p, "exd4"));
    MateQuery q3{p, Color::White, 3};
    MateQuery q4{p, Color::White, 4};
    MateResult a = proveMate(q3), b = proveMate(q4);
    REQUIRE(a.status == MateResult::Status::Proven);
    REQUIRE(b.status == MateResult::Status::Proven);
    CHECK(b.movesUsed <= a.movesUsed);
}

TEST_CASE("TT transparency and determinism on a 50-query regression set") {
    std::mt19937 rng(2024);
    int queries = 0;
    for (const Position& p : randomPositions(120, 40, 606)) {
        if (queries >= 50) break;
        if (p.basicStatus().isOver()) continue;
        std::uniform_int_distribution<int> xs(1, 2);
        MateQuery q{p, p.sideToMove(), xs(rng)};
        q.budget.maxNodes = 2'000'000;
        MateResult on = proveMate(q);
        MateQuery qOff = q;
        qOff.useTT = false;
        MateResult off = proveMate(qOff);
        CAPTURE(formatFEN(p));
        CHECK(on.status == off.status);
        if (on.status == MateResult::Status::Proven) {
            CHECK(on.movesUsed == off.movesUsed);
            CHECK(on.pv == off.pv);
        }
        // determinism: identical query, identical result
        MateResult again = proveMate(q);
        CHECK(again.status == on.status);
        CHECK(again.pv == on.pv);
        ++queries;
    }
    CHECK(queries == 50);
}

TEST_CASE("checkNonLoss: the 1/1.1.1 draw leaf is safe at H=8") {
    Position p = play({"b4", "c4", "d4", "exd4", "exd4", "f4", "Qxe6+", "Kxe6"});
    NonLossResult r = checkNonLoss(p, Color::White, 8);
    CHECK(r.status == NonLossResult::Status::Safe);
}

TEST_CASE("checkNonLoss: mated side is unsafe at H=0") {
    Position p = play({"b4", "Nxb4", "f4", "Nxd3+", "Kf3", "e4#"});
    CHECK(checkNonLoss(p, Color::White, 0).status == NonLossResult::Status::Unsafe);
}

TEST_CASE("checkNonLoss: forced mate next ply is unsafe, with the forcing PV") {
    Position p = play({"b4", "Nxb4", "f4", "Nxd3+", "Kf3"});
    NonLossResult r = checkNonLoss(p, Color::White, 2);
    REQUIRE(r.status == NonLossResult::Status::Unsafe);
    REQUIRE(r.pv.size() == 1);
    CHECK(formatSAN(p, r.pv[0]) == "e4#");
}

TEST_CASE("checkNonLoss: stalemate is safe at any horizon") {
    Position p = parseFEN("4k/2Q2/5/5/K4 b 0 1");  // Black is stalemated
    CHECK(checkNonLoss(p, Color::Black, 20).status == NonLossResult::Status::Safe);
}

TEST_CASE("checkNonLoss monotone in the horizon") {
    Position p = play({"b4", "c4", "d4", "exd4", "exd4", "f4", "Qxe6+", "Kxe6"});
    for (int h : {0, 2, 4, 6, 8})
        CHECK(checkNonLoss(p, Color::White, h).status == NonLossResult::Status::Safe);
}

TEST_CASE("evaluate: symmetric start is zero") {
    CHECK(evaluate(Position::initial()) == 0);
}

TEST_CASE("evaluate: missing black queen is roughly +900 for White") {
    Position p = parseFEN("rnb1k/ppppp/5/PPPPP/RNBQK w 0 1");
    int e = evaluate(p);
    CHECK(e >= 850);
    CHECK(e <= 1000);
}

TEST_CASE("evaluate: invariant under the color-flip isomorphism, antisymmetric under stm swap") {
    for (const Position& p : randomPositions(200, 50, 1999)) {
        // colorFlipped is a full isomorphism (side to move flips too), so the
        // side-to-move-relative score is unchanged
        CHECK(evaluate(p) == evaluate(p.colorFlipped()));
        // handing the move to the opponent on the same board negates the score
        PositionBuilder b;
        for (int i = 0; i < kNumSquares; ++i) {
            Square sq = Square::fromIndex(i);
            if (auto piece = p.pieceAt(sq)) b.put(sq, *piece);
        }
        b.sideToMove(opposite(p.sideToMove())).clocks(p.halfmoveClock(), p.fullmoveNumber());
        CHECK(evaluate(p) == -evaluate(b.build(true)));
    }
}

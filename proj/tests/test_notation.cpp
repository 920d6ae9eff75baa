#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "gardner/board.hpp"
#include "gardner/notation.hpp"

using namespace gardner;

namespace {

Position play(Position p, std::initializer_list<const char*> sans) {
    for (const char* s : sans) p = p.apply(parseSAN(p, s));
    return p;
}

}  // namespace

TEST_CASE("parse Nd4 from start") {
    Position p = Position::initial();
    Move m = parseSAN(p, "Nd4");
    CHECK(m.from.name() == "c2");
    CHECK(m.to.name() == "d4");
    CHECK(!m.isCapture);
}

TEST_CASE("capture-promotion with check") {
    // From the published d4 analysis: ... 9.exd4 exf3 10.Qe2 fxe2=Q#
    Position p = play(Position::initial(),
                      {"d4", "e4", "c4", "bxc4", "Bc3", "Rxb3", "Rxb3", "cxb3",
                       "dxc5", "Be5", "Nd4", "Bxd4", "Bxd4", "Nxd4", "Qb2", "f4",
                       "exd4", "exf3", "Qe2"});
    Move m = parseSAN(p, "fxe2=Q+");
    CHECK(m.promotion == PieceKind::Queen);
    CHECK(m.isCapture);
    Position q = p.apply(m);
    CHECK(q.inCheck(Color::White));
    CHECK(q.legalMoves().empty());           // it is mate
    CHECK(formatSAN(p, m) == "fxe2=Q#");
}

TEST_CASE("round trip over random play") {
    std::mt19937 rng(5150);
    for (int game = 0; game < 200; ++game) {
        Position p = Position::initial();
        for (int ply = 0; ply < 60; ++ply) {
            MoveList moves = p.legalMoves();
            if (moves.empty()) break;
            for (const Move& m : moves) {
                std::string san = formatSAN(p, m);
                CAPTURE(formatFEN(p));
                CAPTURE(san);
                REQUIRE(parseSAN(p, san) == m);
            }
            std::uniform_int_distribution<size_t> pick(0, moves.size() - 1);
            p = p.apply(moves[pick(rng)]);
        }
    }
}

TEST_CASE("SAN errors") {
    Position p = Position::initial();
    CHECK_THROWS_AS(parseSAN(p, "Qe4"), UnmatchedSanError);
    CHECK_THROWS_AS(parseSAN(p, "zz9"), SanError);
    // knights on c3 and e3 both reach d5
    Position two = parseFEN("4k/5/5/1N1N1/4K w 0 1");
    CHECK_THROWS_AS(parseSAN(two, "Nd5"), AmbiguousSanError);
    Move m = parseSAN(two, "Ncd5");
    CHECK(m.from.name() == "c3");
}

TEST_CASE("FEN identity on random legal positions") {
    std::mt19937 rng(808);
    int checked = 0;
    while (checked < 1000) {
        Position p = Position::initial();
        std::uniform_int_distribution<int> plies(0, 70);
        int n = plies(rng);
        for (int i = 0; i < n; ++i) {
            MoveList moves = p.legalMoves();
            if (moves.empty()) break;
            std::uniform_int_distribution<size_t> pick(0, moves.size() - 1);
            p = p.apply(moves[pick(rng)]);
        }
        REQUIRE(parseFEN(formatFEN(p)) == p);
        ++checked;
    }
}

TEST_CASE("FEN rejects malformed and invalid positions") {
    CHECK_THROWS_AS(parseFEN("rnbqk/ppppp/5/PPPPP w 0 1"), FenError);        // missing rank
    CHECK_THROWS_AS(parseFEN("rnbqk/ppppp/5/PPPPP/RNBQK x 0 1"), FenError);  // bad stm
    CHECK_THROWS_AS(parseFEN("5/5/5/5/K4 w 0 1"), FenError);                 // missing king
    CHECK_THROWS_AS(parseFEN("kP3/5/5/5/K4 w 0 1"), FenError);               // pawn on last rank
    CHECK_THROWS_AS(parseFEN("k4/5/5/5/KQQQQ w 0 0"), FenError);             // fullmove 0
    Position p = parseFEN("k4/5/5/5/K4 w 0 1");
    CHECK(p.basicStatus().kind == GameStatusKind::DrawInsufficientMaterial);
}

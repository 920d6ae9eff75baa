#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>

#include "gardner/board.hpp"
#include "gardner/notation.hpp"
#include "naive_movegen.hpp"

using namespace gardner;

namespace {

std::set<std::string> uciSet(const MoveList& moves) {
    std::set<std::string> s;
    for (const Move& m : moves) s.insert(moveUCI(m));
    return s;
}

// Deterministic random playout positions.
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

TEST_CASE("initial position") {
    Position p = Position::initial();
    CHECK(formatFEN(p) == "rnbqk/ppppp/5/PPPPP/RNBQK w 0 1");
    CHECK(p.sideToMove() == Color::White);
    int pieces = 0;
    for (int i = 0; i < kNumSquares; ++i)
        if (p.pieceAt(Square::fromIndex(i))) ++pieces;
    CHECK(pieces == 20);
    CHECK(!p.inCheck(Color::White));
    CHECK(!p.inCheck(Color::Black));
}

TEST_CASE("seven first moves, in pawns-then-knights order") {
    Position p = Position::initial();
    MoveList moves = p.legalMoves();
    REQUIRE(moves.size() == 7);
    std::vector<std::string> san;
    for (const Move& m : moves) san.push_back(formatSAN(p, m));
    CHECK(san == std::vector<std::string>{"b4", "c4", "d4", "e4", "f4", "Nb4", "Nd4"});
}

TEST_CASE("black replies to 1.Nb4 include cxb4") {
    Position p = Position::initial().apply(parseSAN(Position::initial(), "Nb4"));
    bool found = false;
    for (const Move& m : p.legalMoves())
        if (formatSAN(p, m) == "cxb4") found = true;
    CHECK(found);
}

TEST_CASE("perft frozen values") {
    Position p = Position::initial();
    CHECK(perft(p, 0) == 1);
    CHECK(perft(p, 1) == 7);
    CHECK(perft(p, 2) == 53);
    CHECK(perft(p, 3) == 506);
    CHECK(perft(p, 4) == 4775);
    CHECK(perft(p, 5) == 52512);
}

TEST_CASE("perft matches live naive generator at depth 4") {
    CHECK(naive::perft(Position::initial(), 4) == perft(Position::initial(), 4));
}

TEST_CASE("movegen equivalence with naive mailbox generator") {
    for (const Position& p : randomPositions(400, 60, 12345)) {
        CAPTURE(formatFEN(p));
        CHECK(uciSet(p.legalMoves()) == naive::legalMoveSet(p));
    }
}

TEST_CASE("apply: b4 from start") {
    Position p = Position::initial();
    Move m = parseSAN(p, "b4");
    Position q = p.apply(m);
    auto piece = q.pieceAt(*Square::parse("b4"));
    REQUIRE(piece.has_value());
    CHECK(piece->kind == PieceKind::Pawn);
    CHECK(piece->color == Color::White);
    CHECK(q.sideToMove() == Color::Black);
    CHECK(!q.pieceAt(*Square::parse("b3")).has_value());
}

TEST_CASE("apply rejects illegal moves") {
    Position p = Position::initial();
    Move bogus{*Square::parse("b2"), *Square::parse("b4"), std::nullopt, false};
    CHECK_THROWS_AS(p.apply(bogus), IllegalMoveError);
}

TEST_CASE("make/unmake identity via value copies") {
    std::mt19937 rng(7);
    Position p = Position::initial();
    int plies = 0;
    const int kTotal = 100000;
    while (plies < kTotal) {
        MoveList moves = p.legalMoves();
        if (moves.empty() || p.basicStatus().isOver()) {
            p = Position::initial();
            continue;
        }
        std::uniform_int_distribution<size_t> pick(0, moves.size() - 1);
        Position saved = p;
        Position next = p.apply(moves[pick(rng)]);
        // the source value is untouched and a re-parse of its FEN is identical
        REQUIRE(saved == p);
        REQUIRE(parseFEN(formatFEN(p)) == p);
        REQUIRE(parseFEN(formatFEN(p)).hash() == p.hash());
        p = next;
        ++plies;
    }
}

TEST_CASE("incremental hash equals recomputed hash over random play") {
    std::mt19937 rng(99);
    Position p = Position::initial();
    for (int i = 0; i < 100000; ++i) {
        MoveList moves = p.legalMoves();
        if (moves.empty()) {
            p = Position::initial();
            continue;
        }
        std::uniform_int_distribution<size_t> pick(0, moves.size() - 1);
        p = p.apply(moves[pick(rng)]);
        REQUIRE(p.hash() == parseFEN(formatFEN(p)).hash());
    }
}

TEST_CASE("hash depends on side to move") {
    Position w = parseFEN("k4/5/2r2/5/K4 w 0 1");
    Position b = parseFEN("k4/5/2r2/5/K4 b 0 1");
    CHECK(w.hash() != b.hash());
}

TEST_CASE("color symmetry of movegen and status") {
    for (const Position& p : randomPositions(200, 50, 777)) {
        Position f = p.colorFlipped();
        CHECK(p.legalMoves().size() == f.legalMoves().size());
        CHECK(p.inCheck(p.sideToMove()) == f.inCheck(f.sideToMove()));
        GameStatus a = p.basicStatus(), b = f.basicStatus();
        CHECK(a.kind == b.kind);
        // double flip is the identity
        CHECK(f.colorFlipped().sameBoard(p));
    }
}

TEST_CASE("pawn rules: single step, promotions always tagged") {
    for (const Position& p : randomPositions(300, 70, 4242)) {
        int promoRank = p.sideToMove() == Color::White ? 4 : 0;
        for (const Move& m : p.legalMoves()) {
            auto piece = p.pieceAt(m.from);
            REQUIRE(piece.has_value());
            if (piece->kind != PieceKind::Pawn) {
                CHECK(!m.promotion.has_value());
                continue;
            }
            CHECK(std::abs(m.to.rank() - m.from.rank()) == 1);
            CHECK(m.promotion.has_value() == (m.to.rank() == promoRank));
            if (m.isCapture) CHECK(p.pieceAt(m.to).has_value());   // no en passant
        }
    }
}

TEST_CASE("all four promotion kinds are generated") {
    Position p = parseFEN("k4/3P1/5/5/K4 w 0 1");
    std::set<std::string> promos;
    for (const Move& m : p.legalMoves())
        if (m.promotion) promos.insert(moveUCI(m));
    CHECK(promos == std::set<std::string>{"e5e6q", "e5e6r", "e5e6b", "e5e6n"});
}

TEST_CASE("king safety: no legal move leaves own king attacked") {
    for (const Position& p : randomPositions(200, 80, 31337)) {
        for (const Move& m : p.legalMoves())
            CHECK(!p.apply(m).inCheck(p.sideToMove()));
    }
}

TEST_CASE("game status basics") {
    CHECK(parseFEN("k4/5/5/5/K4 w 0 1").basicStatus().kind ==
          GameStatusKind::DrawInsufficientMaterial);
    CHECK(parseFEN("k4/5/2n2/5/K4 w 0 1").basicStatus().kind ==
          GameStatusKind::DrawInsufficientMaterial);
    CHECK(parseFEN("k4/5/2r2/5/K4 w 0 1").basicStatus().kind == GameStatusKind::Ongoing);
    // rook ladder mate: Kb2 checked by Rf2, Rf3 covers the third rank
    GameStatus st = parseFEN("4k/5/5/4r/K3r w 0 1").basicStatus();
    CHECK(st.kind == GameStatusKind::Checkmate);
    CHECK(st.loser == Color::White);
}

TEST_CASE("stalemate detection") {
    // black Kf6 boxed in by Qd5, not in check
    GameStatus st = parseFEN("4k/2Q2/5/5/K4 b 0 1").basicStatus();
    CHECK(st.kind == GameStatusKind::Stalemate);
}

TEST_CASE("repetition draw via history") {
    Position p = Position::initial();
    std::vector<uint64_t> hist;
    auto play = [&](const char* san) {
        hist.push_back(p.hash());
        p = p.apply(parseSAN(p, san));
    };
    // shuffle knights back and forth
    play("Nd4");
    play("Nb4");
    play("Nc2");
    play("Nc6");
    play("Nd4");
    play("Nb4");
    play("Nc2");
    CHECK(p.status(hist).kind == GameStatusKind::Ongoing);
    play("Nc6");
    CHECK(p.status(hist).kind == GameStatusKind::DrawByRepetition);
    RuleProfile twofold{.repetitionThreshold = 2};
    CHECK(p.status(hist, twofold).kind == GameStatusKind::DrawByRepetition);
}

TEST_CASE("halfmove rule disabled by default, works when enabled") {
    Position p = parseFEN("k4/5/2r2/5/K4 w 60 31");
    CHECK(p.status({}).kind == GameStatusKind::Ongoing);
    RuleProfile enabled{.repetitionThreshold = 3, .halfmovePlies = 50};
    CHECK(p.status({}, enabled).kind == GameStatusKind::DrawByHalfmoveRule);
}

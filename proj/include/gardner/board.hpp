#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

// Gardner 5x5 minichess: files b..f, ranks 2..6, no castling, no en passant,
// no double pawn step.

namespace gardner {

using Bitboard = uint32_t;

constexpr int kBoardFiles = 5;
constexpr int kBoardRanks = 5;
constexpr int kNumSquares = 25;
constexpr Bitboard kFullBoard = (1u << kNumSquares) - 1;

enum class Color : uint8_t { White = 0, Black = 1 };

constexpr Color opposite(Color c) {
    return c == Color::White ? Color::Black : Color::White;
}

enum class PieceKind : uint8_t { Pawn = 0, Knight, Bishop, Rook, Queen, King };

struct Piece {
    Color color;
    PieceKind kind;
    bool operator==(const Piece&) const = default;
};

// 0..24, rank-major from rank "2". Display name = file letter b..f + rank digit 2..6.
struct Square {
    int8_t index = -1;

    Square() = default;
    constexpr Square(int file, int rank) : index(static_cast<int8_t>(rank * 5 + file)) {}
    static constexpr Square fromIndex(int idx) { Square s; s.index = static_cast<int8_t>(idx); return s; }

    constexpr int file() const { return index % 5; }
    constexpr int rank() const { return index / 5; }
    constexpr bool valid() const { return index >= 0 && index < kNumSquares; }
    constexpr Bitboard bit() const { return 1u << index; }

    std::string name() const;          // e.g. "b2"
    static std::optional<Square> parse(const std::string& text);

    bool operator==(const Square&) const = default;
};

struct Move {
    Square from;
    Square to;
    std::optional<PieceKind> promotion;
    bool isCapture = false;

    bool operator==(const Move&) const = default;
};

using MoveList = std::vector<Move>;

enum class GameStatusKind : uint8_t {
    Ongoing,
    Checkmate,            // loser = side to move
    Stalemate,
    DrawByRepetition,
    DrawByHalfmoveRule,
    DrawInsufficientMaterial,
};

struct GameStatus {
    GameStatusKind kind = GameStatusKind::Ongoing;
    Color loser = Color::White;   // meaningful for Checkmate only

    bool isDraw() const {
        return kind == GameStatusKind::Stalemate ||
               kind == GameStatusKind::DrawByRepetition ||
               kind == GameStatusKind::DrawByHalfmoveRule ||
               kind == GameStatusKind::DrawInsufficientMaterial;
    }
    bool isOver() const { return kind != GameStatusKind::Ongoing; }
};

std::string statusName(const GameStatus& st);

struct RuleProfile {
    int repetitionThreshold = 3;   // total occurrences needed, >= 2
    int halfmovePlies = 0;         // 0 = rule disabled
};

class Position {
public:
    // Immutable value; every mutator returns a fresh Position.
    Position();   // empty board, White to move

    static Position initial();

    std::optional<Piece> pieceAt(Square sq) const;
    Color sideToMove() const { return stm_; }
    int halfmoveClock() const { return halfmove_; }
    int fullmoveNumber() const { return fullmove_; }
    uint64_t hash() const { return hash_; }

    Bitboard pieces(Color c, PieceKind k) const { return bb_[static_cast<int>(c)][static_cast<int>(k)]; }
    Bitboard occupied(Color c) const;
    Bitboard occupied() const;
    Square kingSquare(Color c) const;

    bool isAttacked(Square sq, Color by) const;
    bool inCheck(Color c) const;

    MoveList legalMoves() const;
    bool isLegal(const Move& m) const;

    // Precondition: m is legal. Throws IllegalMoveError otherwise.
    Position apply(const Move& m) const;

    // Fast path for search: m must come from legalMoves() of this position.
    Position applyUnchecked(const Move& m) const { return appliedUnchecked(m); }

    // Status ignoring history (no repetition/halfmove checks).
    GameStatus basicStatus() const;

    // priorHashes: hashes of all earlier positions in the line (not this one).
    GameStatus status(const std::vector<uint64_t>& priorHashes,
                      const RuleProfile& rules = RuleProfile{}) const;

    // 180-degree rotation + color swap. Legality-preserving on this board.
    Position colorFlipped() const;

    bool sameBoard(const Position& other) const;
    bool operator==(const Position& other) const;

    // Invariant check used by the FEN parser; returns a message on failure.
    std::optional<std::string> invariantViolation() const;

private:
    friend class PositionBuilder;

    void applyInPlace(const Move& m);
    Position appliedUnchecked(const Move& m) const;
    void recomputeHash();

    friend uint64_t perft(const Position& p, int depth);
    friend std::vector<std::pair<Move, uint64_t>> perftSplit(const Position& p, int depth);

    Bitboard bb_[2][6] = {};
    Color stm_ = Color::White;
    int halfmove_ = 0;
    int fullmove_ = 1;
    uint64_t hash_ = 0;
};

// Mutable helper for the FEN parser and tests.
class PositionBuilder {
public:
    PositionBuilder& put(Square sq, Piece p);
    PositionBuilder& sideToMove(Color c);
    PositionBuilder& clocks(int halfmove, int fullmove);
    // Validates invariants; throws FenError on violation unless relaxed.
    Position build(bool relaxed = false) const;

private:
    Position pos_;
};

struct IllegalMoveError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

uint64_t perft(const Position& p, int depth);

// Per-move breakdown at depth >= 1.
std::vector<std::pair<Move, uint64_t>> perftSplit(const Position& p, int depth);

}  // namespace gardner

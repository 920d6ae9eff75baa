#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gardner/board.hpp"

namespace gardner {

struct Budget {
    uint64_t maxNodes = 10'000'000;
    double maxSeconds = 60.0;
};

struct MateQuery {
    Position position;
    Color attacker = Color::White;
    int maxAttackerMoves = 1;      // x: attacker full moves from the claim position
    Budget budget;
    bool useTT = true;
    int repetitionThreshold = 3;   // occurrences inside the proof line that draw
};

struct MateResult {
    enum class Status { Proven, Disproven, Unknown };
    Status status = Status::Unknown;
    int movesUsed = 0;             // attacker moves actually needed (Proven)
    std::vector<Move> pv;          // replays legally, ends in mate (Proven)
    uint64_t nodes = 0;
    std::string exhaustedBudget;   // "nodes" or "time" when Unknown
};

// Can `attacker` force checkmate within q.maxAttackerMoves attacker moves?
// Ply bound: 2x with the defender to move at the root, 2x-1 otherwise.
// Repetition along the proof line counts as a draw (defender safety).
MateResult proveMate(const MateQuery& q);

bool checkImmediateCheckmate(const Position& p);

struct NonLossResult {
    enum class Status { Safe, Unsafe, Unknown };
    Status status = Status::Unknown;
    int horizon = 0;
    std::vector<Move> pv;          // forcing line when Unsafe
    uint64_t nodes = 0;
    std::string exhaustedBudget;
};

// Can `side` avoid being checkmated for the next `horizonPlies` plies?
// Stalemate, repetition and insufficient material are safe terminals.
NonLossResult checkNonLoss(const Position& p, Color side, int horizonPlies,
                           const Budget& budget = Budget{},
                           const std::vector<uint64_t>& priorHashes = {},
                           const RuleProfile& rules = RuleProfile{});

// Material (P=100, N=300, B=300, R=500, Q=900) plus 2 x mobility difference,
// from the side to move's view. evaluate(p) == -evaluate(p.colorFlipped()).
int evaluate(const Position& p);

}  // namespace gardner

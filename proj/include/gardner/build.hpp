#pragma once

#include <map>
#include <stdexcept>
#include <string>

#include "gardner/oracle.hpp"
#include "gardner/search.hpp"

namespace gardner {

// How the builder closes non-decided positions as draws.
struct DrawCloseRule {
    enum class Kind {
        Repetition,   // close when the position repeats on the current path
        SafeHorizon,  // close quiet positions that survive a safety horizon
    };
    Kind kind = Kind::Repetition;
    int horizonPlies = 8;  // SafeHorizon only
};

struct BuildPolicy {
    Color side = Color::White;     // the side the built oracle defends
    Budget mateBudget{100'000, 10.0};   // per mate-proof attempt
    int maxMateMoves = 17;         // largest x attempted when closing by mate
    int maxDepth = 6;              // plies before leaves close as Unverified
    std::map<uint64_t, std::string> guide;  // position hash -> forced own move
    DrawCloseRule drawCloseRule{};
    int decidedThreshold = 500;    // centipawns; beyond it a mate proof is tried
    Budget safetyBudget{20'000, 5.0};   // per shallow non-loss check
    bool deterministic = false;    // node budgets only; wall clock ignored
};

struct GuideConflict : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct BuildStats {
    size_t ownNodes = 0;        // decision points for the defending side
    size_t opponentNodes = 0;
    size_t opponentBranches = 0;
    size_t leaves = 0;
    size_t refLeaves = 0;
    uint64_t searchNodes = 0;   // total search budget spent
};

struct BuildResult {
    OracleDocument document;
    std::string log;            // JSON lines, one record per closed node
    MateResult rootMate;        // unconditional mate attempt at the root
    BuildStats stats;
};

// Expands every opponent reply, picks one own move per decision point
// (guide, then provable mate, then evaluation after a safety check), and
// closes leaves by checkmate, mate proof, draw rule, transposition, or the
// depth limit. Deterministic given deterministic budgets and an empty clock.
BuildResult buildOracle(const Position& root, const BuildPolicy& policy);

}  // namespace gardner

#pragma once

#include <string>
#include <vector>

#include "gardner/board.hpp"
#include "gardner/oracle.hpp"
#include "gardner/search.hpp"

namespace gardner {

// Verification levels are cumulative:
//   L0 legality (line replay, transposition-ref targets)
//   L1 completeness (opponent-move coverage at every opponent node)
//   L2 mate claims (proveMate / checkImmediateCheckmate)
//   L3 draw leaves (checkNonLoss on DrawLeaf / CannotWin claims)
struct VerifyOptions {
    int level = 3;
    Budget mateBudget{};           // per MateDefender claim
    Budget nonLossBudget{100'000, 10.0};  // per draw/cannot-win check
    int horizonPlies = 8;          // L3 safety horizon
    RuleProfile rules{};
    bool deterministic = false;    // node budgets only; wall clock ignored
    int threads = 0;               // 0 = GARDNER_THREADS env, else 1

    // White first moves this document must answer at its root opponent node
    // (from the bundle manifest). Empty = the root must cover everything.
    // Only consulted when the tree root itself is an opponent node.
    std::vector<std::string> rootCover;
    bool complete = true;          // manifest status; partial never verifies
};

struct Obligation {
    enum class Status { Pass, Fail, Unknown, UnverifiedClaim };
    std::string path;      // SAN moves from the root, space separated
    std::string kind;      // legality | ref | coverage | coverage-default |
                           // coverage-external | mate | checkmate | nonloss |
                           // cannotwin-full | unverified
    Status status = Status::Pass;
    std::string detail;    // witness, note, or budget description
    uint64_t nodes = 0;    // search budget spent, when relevant
    std::string pv;        // SAN principal variation, when relevant
};

const char* obligationStatusName(Obligation::Status s);

struct VerificationReport {
    std::string document;
    Color side = Color::White;
    int level = 0;
    bool complete = true;
    std::vector<Obligation> records;

    int count(Obligation::Status s) const;
    bool anyFail() const { return count(Obligation::Status::Fail) > 0; }
};

VerificationReport verifyDocument(const OracleDocument& doc, const VerifyOptions& opt = {});

// Human-readable summary (non-pass records plus counters).
std::string reportText(const VerificationReport& r);
// Machine-readable record stream: one JSON object per line, schema
// {"document","path","kind","status","detail","nodes","pv"}.
std::string reportRecords(const VerificationReport& r);

struct ManifestEntry {
    std::string file;
    Color side = Color::White;
    std::string covers;    // White first move answered at the root (SAN)
    bool complete = true;
    int repetition = 3;
};

std::vector<ManifestEntry> loadManifest(const std::string& path);

struct BundleReport {
    std::vector<VerificationReport> reports;
    std::vector<Obligation> bundleRecords;  // root-union and joint-game checks
    bool anyFail() const;
};

// Verifies every manifest entry under dataDir and adds the bundle-level
// obligations: the black documents jointly cover all legal first moves, and
// the White-vs-Black 1.b4 oracle game ends in a draw.
BundleReport verifyAllBundled(const std::string& dataDir, const VerifyOptions& opt = {});

struct JointGameResult {
    GameStatus status;
    std::vector<std::string> sans;
};

// Plays both oracles against each other from the (shared) root position.
// While a side is inside its tree it follows the tree; once outside it plays
// a checkNonLoss-guarded move that prefers revisiting earlier positions, so
// drawn endings close by repetition.
JointGameResult playJointGame(const OracleDocument& whiteDoc, const OracleDocument& blackDoc,
                              const RuleProfile& rules = {}, int maxPlies = 200);

}  // namespace gardner

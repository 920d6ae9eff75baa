#pragma once

#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gardner/board.hpp"

namespace gardner {

struct OracleError : std::runtime_error {
    int line = 0;
    OracleError(const std::string& msg, int ln = 0)
        : std::runtime_error(ln ? "line " + std::to_string(ln) + ": " + msg : msg), line(ln) {}
};

struct Claim {
    enum class Kind {
        MateDefender,        // forced mate of `color` within `moves` attacker moves
        ImmediateCheckmate,  // side to move is mated right here
        DrawLeaf,
        CannotWin,           // `color` cannot win
        TranspositionRef,
        Unverified,          // the source annotation itself is doubtful
    };
    Kind kind = Kind::DrawLeaf;
    Color color = Color::Black;  // MateDefender / CannotWin
    int moves = 0;               // MateDefender
    std::string text;            // DrawLeaf reason / ref id / unverified note

    bool operator==(const Claim&) const = default;
};

std::string claimToString(const Claim& c);

struct OracleNode {
    enum class Type { OurMove, Opponent, Leaf };

    struct Branch {
        std::string san;                     // canonical SAN
        std::unique_ptr<OracleNode> node;
    };

    Type type = Type::Leaf;
    std::optional<std::string> variationId;

    // OurMove
    std::string san;
    std::unique_ptr<OracleNode> child;

    // Opponent
    std::vector<Branch> branches;
    std::optional<Claim> defaultClaim;

    // Leaf
    Claim claim;
    std::vector<std::vector<std::string>> justifications;  // SAN lines, each replayable from here
};

struct OracleDocument {
    Color side = Color::White;               // the side the oracle defends
    Position root;
    std::unique_ptr<OracleNode> tree;
    std::map<std::string, const OracleNode*> variationIds;
    std::string sourceName;

    // moves (canonical SAN) from the root to the given node
    std::map<const OracleNode*, std::vector<std::string>> nodePath;

    Position positionAt(const OracleNode* node) const;
};

OracleDocument parseOracle(const std::string& text, const std::string& sourceName = "<input>");
OracleDocument loadOracleFile(const std::string& path);

std::string printOracle(const OracleDocument& doc);

// One PGN game per root-to-leaf path; claims become comments, the leaf claim
// decides the result tag.
std::string exportPGN(const OracleDocument& doc);

struct UnknownVariationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::pair<Position, const OracleNode*> resolveVariation(const OracleDocument& doc,
                                                        const std::string& id);

// Rebuilds variationIds and nodePath after structural edits (used by the
// builder and by mutation tests that delete branches).
void reindexDocument(OracleDocument& doc);

}  // namespace gardner

#include "gardner/build.hpp"

#include <algorithm>
#include <optional>
#include <sstream>
#include <unordered_map>

#include "gardner/notation.hpp"

namespace gardner {

namespace {

Budget effectiveBudget(Budget b, bool deterministic) {
    if (deterministic) b.maxSeconds = 1e18;
    return b;
}

class Builder {
public:
    Builder(const Position& root, const BuildPolicy& policy) : root_(root), policy_(policy) {}

    BuildResult run() {
        BuildResult out;
        out.document.side = policy_.side;
        out.document.root = root_;
        out.document.sourceName = "<built>";

        // The root always gets a full mate attempt; everywhere else the
        // decidedThreshold gates the (expensive) proof.
        if (root_.basicStatus().kind == GameStatusKind::Ongoing) {
            MateQuery q;
            q.position = root_;
            q.attacker = policy_.side;
            q.maxAttackerMoves = policy_.maxMateMoves;
            q.budget = effectiveBudget(policy_.mateBudget, policy_.deterministic);
            out.rootMate = proveMate(q);
            stats_.searchNodes += out.rootMate.nodes;
        }

        if (out.rootMate.status == MateResult::Status::Proven) {
            auto leaf = std::make_unique<OracleNode>();
            leaf->type = OracleNode::Type::Leaf;
            leaf->claim = Claim{Claim::Kind::MateDefender, opposite(policy_.side),
                                out.rootMate.movesUsed, ""};
            leaf->justifications.push_back(pvSans(root_, out.rootMate.pv));
            logClose(root_, leaf->claim, out.rootMate.nodes);
            ++stats_.leaves;
            out.document.tree = std::move(leaf);
        } else {
            std::vector<uint64_t> path;
            out.document.tree = build(root_, 0, path);
        }

        reindexDocument(out.document);
        out.log = log_.str();
        out.stats = stats_;
        return out;
    }

private:
    const Position& root_;
    const BuildPolicy& policy_;
    BuildStats stats_;
    std::ostringstream log_;
    std::unordered_map<uint64_t, OracleNode*> closed_;
    int nextId_ = 0;

    static std::vector<std::string> pvSans(const Position& start, const std::vector<Move>& pv) {
        std::vector<std::string> out;
        Position p = start;
        for (const Move& m : pv) {
            out.push_back(formatSAN(p, m));
            p = p.apply(m);
        }
        return out;
    }

    int sideEval(const Position& p) const {
        int e = evaluate(p);
        return p.sideToMove() == policy_.side ? e : -e;
    }

    void logClose(const Position& p, const Claim& c, uint64_t nodes) {
        log_ << "{\"hash\":" << p.hash() << ",\"claim\":\"" << claimToString(c)
             << "\",\"nodes\":" << nodes << "}\n";
    }

    std::unique_ptr<OracleNode> leaf(const Position& p, Claim c, uint64_t nodes,
                                     std::vector<std::string> justify = {}) {
        auto n = std::make_unique<OracleNode>();
        n->type = OracleNode::Type::Leaf;
        n->claim = std::move(c);
        if (!justify.empty()) n->justifications.push_back(std::move(justify));
        logClose(p, n->claim, nodes);
        ++stats_.leaves;
        return n;
    }

    std::unique_ptr<OracleNode> build(const Position& p, int depth, std::vector<uint64_t>& path) {
        // 1. terminal positions
        GameStatus st = p.basicStatus();
        if (st.kind == GameStatusKind::Checkmate)
            return leaf(p, Claim{Claim::Kind::ImmediateCheckmate, Color::White, 0, ""}, 0);
        if (st.isDraw())
            return leaf(p, Claim{Claim::Kind::DrawLeaf, Color::White, 0, statusName(st)}, 0);

        // 2. repetition along the current path
        if (std::find(path.begin(), path.end(), p.hash()) != path.end())
            return leaf(p, Claim{Claim::Kind::DrawLeaf, Color::White, 0, "repetition"}, 0);

        // 3. transposition to a position already closed in this build
        if (auto it = closed_.find(p.hash()); it != closed_.end()) {
            if (!it->second->variationId)
                it->second->variationId = std::to_string(++nextId_);
            ++stats_.refLeaves;
            return leaf(p, Claim{Claim::Kind::TranspositionRef, Color::White, 0,
                                 *it->second->variationId},
                        0);
        }

        const int eval = sideEval(p);

        // 4. decided positions close by mate proof
        if (eval >= policy_.decidedThreshold) {
            MateQuery q;
            q.position = p;
            q.attacker = policy_.side;
            q.maxAttackerMoves = policy_.maxMateMoves;
            q.budget = effectiveBudget(policy_.mateBudget, policy_.deterministic);
            MateResult r = proveMate(q);
            stats_.searchNodes += r.nodes;
            if (r.status == MateResult::Status::Proven)
                return record(p, leaf(p, Claim{Claim::Kind::MateDefender, opposite(policy_.side),
                                               r.movesUsed, ""},
                                      r.nodes, pvSans(p, r.pv)));
        }

        // 5. quiet positions close as draws under the safe-horizon rule
        if (policy_.drawCloseRule.kind == DrawCloseRule::Kind::SafeHorizon &&
            std::abs(eval) < policy_.decidedThreshold) {
            NonLossResult r = checkNonLoss(p, policy_.side, policy_.drawCloseRule.horizonPlies,
                                           effectiveBudget(policy_.safetyBudget,
                                                           policy_.deterministic),
                                           path);
            stats_.searchNodes += r.nodes;
            if (r.status == NonLossResult::Status::Safe)
                return record(p, leaf(p, Claim{Claim::Kind::DrawLeaf, Color::White, 0,
                                               "safe within horizon"},
                                      r.nodes));
        }

        // 6. depth limit
        if (depth >= policy_.maxDepth)
            return record(p, leaf(p, Claim{Claim::Kind::Unverified, Color::White, 0,
                                           "depth limit"},
                                  0));

        // 7. expand
        path.push_back(p.hash());
        std::unique_ptr<OracleNode> n;
        if (p.sideToMove() == policy_.side)
            n = buildOwn(p, depth, path);
        else
            n = buildOpponent(p, depth, path);
        path.pop_back();
        return record(p, std::move(n));
    }

    std::unique_ptr<OracleNode> record(const Position& p, std::unique_ptr<OracleNode> n) {
        closed_[p.hash()] = n.get();
        return n;
    }

    std::unique_ptr<OracleNode> buildOwn(const Position& p, int depth,
                                         std::vector<uint64_t>& path) {
        ++stats_.ownNodes;
        Move chosen = chooseOwnMove(p, path);
        auto n = std::make_unique<OracleNode>();
        n->type = OracleNode::Type::OurMove;
        n->san = formatSAN(p, chosen);
        n->child = build(p.apply(chosen), depth + 1, path);
        return n;
    }

    std::unique_ptr<OracleNode> buildOpponent(const Position& p, int depth,
                                              std::vector<uint64_t>& path) {
        ++stats_.opponentNodes;
        MoveList moves = sortedMoves(p);
        auto n = std::make_unique<OracleNode>();
        n->type = OracleNode::Type::Opponent;
        for (const Move& m : moves) {
            OracleNode::Branch b;
            b.san = formatSAN(p, m);
            b.node = build(p.apply(m), depth + 1, path);
            n->branches.push_back(std::move(b));
            ++stats_.opponentBranches;
        }
        return n;
    }

    MoveList sortedMoves(const Position& p) const {
        MoveList moves = p.legalMoves();
        std::stable_sort(moves.begin(), moves.end(), [](const Move& a, const Move& b) {
            return moveUCI(a) < moveUCI(b);
        });
        return moves;
    }

    Move chooseOwnMove(const Position& p, const std::vector<uint64_t>& path) {
        // (1) the guide dictates
        if (auto it = policy_.guide.find(p.hash()); it != policy_.guide.end()) {
            try {
                return parseSAN(p, it->second);
            } catch (const std::exception& e) {
                throw GuideConflict("guide move '" + it->second + "' at " + formatFEN(p) + ": " +
                                    e.what());
            }
        }

        MoveList moves = sortedMoves(p);

        // (2) in decided positions, a move with a provable mate, minimal x
        if (sideEval(p) >= policy_.decidedThreshold) {
            std::optional<Move> best;
            int bestX = policy_.maxMateMoves + 1;
            for (const Move& m : moves) {
                MateQuery q;
                q.position = p.apply(m);
                q.attacker = policy_.side;
                q.maxAttackerMoves = std::min(policy_.maxMateMoves, bestX - 1);
                if (q.maxAttackerMoves < 1) break;
                q.budget = effectiveBudget(policy_.mateBudget, policy_.deterministic);
                MateResult r = proveMate(q);
                stats_.searchNodes += r.nodes;
                if (r.status == MateResult::Status::Proven && r.movesUsed < bestX) {
                    bestX = r.movesUsed;
                    best = m;
                }
            }
            if (best) return *best;
        }

        // (3) in undecided positions, closing by repetition is the most
        // equalizing choice available; otherwise best evaluation among moves
        // that survive a shallow safety check
        const bool undecided = sideEval(p) < policy_.decidedThreshold;
        std::optional<Move> best;
        int bestScore = 0;
        for (const Move& m : moves) {
            Position q = p.apply(m);
            NonLossResult r = checkNonLoss(q, policy_.side, 4,
                                           effectiveBudget(policy_.safetyBudget,
                                                           policy_.deterministic));
            stats_.searchNodes += r.nodes;
            if (r.status == NonLossResult::Status::Unsafe) continue;
            if (undecided &&
                std::find(path.begin(), path.end(), q.hash()) != path.end())
                return m;
            int score = -evaluate(q);  // q is from the opponent's view
            if (!best || score > bestScore) {
                bestScore = score;
                best = m;
            }
        }
        return best ? *best : moves.front();
    }
};

}  // namespace

BuildResult buildOracle(const Position& root, const BuildPolicy& policy) {
    return Builder(root, policy).run();
}

}  // namespace gardner

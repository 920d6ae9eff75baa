#include "gardner/search.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <unordered_map>

#include "gardner/notation.hpp"

namespace gardner {

namespace {

using Clock = std::chrono::steady_clock;

struct BudgetExhausted {
    const char* which;
};

struct Ticker {
    uint64_t nodes = 0;
    uint64_t maxNodes;
    Clock::time_point deadline;

    explicit Ticker(const Budget& b)
        : maxNodes(b.maxNodes),
          deadline(Clock::now() +
                   std::chrono::microseconds(static_cast<int64_t>(b.maxSeconds * 1e6))) {}

    void tick() {
        if (++nodes > maxNodes) throw BudgetExhausted{"nodes"};
        if ((nodes & 4095) == 0 && Clock::now() > deadline) throw BudgetExhausted{"time"};
    }
};

class MateSearcher {
public:
    MateSearcher(const MateQuery& q) : q_(q), ticker_(q.budget) {
        defender_ = opposite(q.attacker);
    }

    MateResult run() {
        MateResult res;
        try {
            GameStatus st = q_.position.basicStatus();
            if (st.kind == GameStatusKind::Checkmate && st.loser == defender_) {
                res.status = MateResult::Status::Proven;
                res.movesUsed = 0;
                res.nodes = ticker_.nodes;
                return res;
            }
            bool attackerToMove = q_.position.sideToMove() == q_.attacker;
            for (int k = 1; k <= q_.maxAttackerMoves; ++k) {
                std::vector<Move> line;
                bool rep = false;
                path_.clear();
                path_.push_back(q_.position.hash());
                bool ok = attackerToMove ? canMate(q_.position, k, &line, rep)
                                         : mustMate(q_.position, k, &line, rep);
                if (ok) {
                    res.status = MateResult::Status::Proven;
                    res.movesUsed = k;
                    res.pv = std::move(line);
                    res.nodes = ticker_.nodes;
                    return res;
                }
            }
            res.status = MateResult::Status::Disproven;
        } catch (const BudgetExhausted& e) {
            res.status = MateResult::Status::Unknown;
            res.exhaustedBudget = e.which;
        }
        res.nodes = ticker_.nodes;
        return res;
    }

private:
    MateQuery q_;
    Color defender_;
    Ticker ticker_;
    std::vector<uint64_t> path_;
    // key -> result; only path-independent results are stored
    std::unordered_map<uint64_t, bool> tt_;

    static uint64_t mix(uint64_t h, int left, bool attackerToMove) {
        uint64_t k = h ^ (0x9e3779b97f4a7c15ull * static_cast<uint64_t>(left * 2 + attackerToMove));
        k ^= k >> 29;
        return k;
    }

    bool wouldRepeat(uint64_t h) const {
        int seen = 1;  // the new occurrence itself
        for (uint64_t x : path_)
            if (x == h) ++seen;
        return seen >= q_.repetitionThreshold;
    }

    // Attacker to move; may spend `left` >= 1 attacker moves. `line` non-null
    // only along the candidate PV (TT probing is disabled there so the line
    // can be reconstructed).
    bool canMate(const Position& p, int left, std::vector<Move>* line, bool& repDep) {
        ticker_.tick();
        uint64_t key = mix(p.hash(), left, true);
        if (q_.useTT && !line) {
            auto it = tt_.find(key);
            if (it != tt_.end()) return it->second;
        }
        bool localRep = false;
        bool result = false;
        // Checking moves first, then captures: mate lines are almost always
        // forcing, so this ordering prunes most of the tree.
        std::vector<std::pair<Move, Position>> children;
        {
            MoveList moves = p.legalMoves();
            children.reserve(moves.size());
            for (const Move& m : moves) children.emplace_back(m, p.applyUnchecked(m));
            std::stable_sort(children.begin(), children.end(),
                             [this](const auto& a, const auto& b) {
                                 int ra = a.second.inCheck(defender_) ? 0 : (a.first.isCapture ? 1 : 2);
                                 int rb = b.second.inCheck(defender_) ? 0 : (b.first.isCapture ? 1 : 2);
                                 return ra < rb;
                             });
        }
        for (const auto& [m, child] : children) {
            GameStatus st = child.basicStatus();
            if (st.kind == GameStatusKind::Checkmate) {
                if (st.loser == defender_) {
                    if (line) *line = {m};
                    result = true;
                    break;
                }
                continue;  // attacker mated itself: impossible, but harmless
            }
            if (st.isOver()) continue;  // drawn terminal: this try fails
            if (wouldRepeat(child.hash())) {
                localRep = true;
                continue;
            }
            std::vector<Move> sub;
            bool childRep = false;
            path_.push_back(child.hash());
            bool ok = mustMate(child, left - 1, line ? &sub : nullptr, childRep);
            path_.pop_back();
            if (ok) {
                localRep = childRep;  // only the winning branch matters
                if (line) {
                    line->clear();
                    line->push_back(m);
                    line->insert(line->end(), sub.begin(), sub.end());
                }
                result = true;
                break;
            }
            localRep = localRep || childRep;
        }
        repDep = repDep || localRep;
        if (q_.useTT && !localRep) tt_[key] = result;
        return result;
    }

    // Defender to move; attacker still has `left` full moves afterwards.
    bool mustMate(const Position& p, int left, std::vector<Move>* line, bool& repDep) {
        ticker_.tick();
        GameStatus st = p.basicStatus();
        if (st.kind == GameStatusKind::Checkmate) return st.loser == defender_;
        if (st.isOver()) return false;
        if (left == 0) return false;
        uint64_t key = mix(p.hash(), left, false);
        if (q_.useTT && !line) {
            auto it = tt_.find(key);
            if (it != tt_.end()) return it->second;
        }
        bool localRep = false;
        bool result = true;
        bool first = true;
        // Captures first: removing attacking material is the most likely
        // refutation, and one surviving defence ends the node.
        MoveList moves = p.legalMoves();
        std::stable_sort(moves.begin(), moves.end(),
                         [](const Move& a, const Move& b) { return a.isCapture > b.isCapture; });
        for (const Move& m : moves) {
            Position child = p.applyUnchecked(m);
            GameStatus cst = child.basicStatus();
            if (cst.kind == GameStatusKind::Checkmate && cst.loser == defender_) {
                if (line && first) {
                    line->clear();
                    line->push_back(m);
                }
                first = false;
                continue;  // defender walked into mate; still lost
            }
            if (cst.isOver() || wouldRepeat(child.hash())) {
                // defender escapes into a draw (or mates the attacker)
                localRep = localRep || (!cst.isOver());
                result = false;
                break;
            }
            std::vector<Move> sub;
            bool childRep = false;
            path_.push_back(child.hash());
            bool ok = canMate(child, left, (line && first) ? &sub : nullptr, childRep);
            path_.pop_back();
            localRep = localRep || childRep;
            if (!ok) {
                result = false;
                break;
            }
            if (line && first) {
                line->clear();
                line->push_back(m);
                line->insert(line->end(), sub.begin(), sub.end());
            }
            first = false;
        }
        if (result && first) {
            // no legal defender move survived the filters above and none was
            // winning for the attacker either; cannot happen (mate/stalemate
            // were handled), kept for safety
            result = false;
        }
        repDep = repDep || localRep;
        if (q_.useTT && !localRep) tt_[key] = result;
        return result;
    }
};

}  // namespace

MateResult proveMate(const MateQuery& q) { return MateSearcher(q).run(); }

bool checkImmediateCheckmate(const Position& p) {
    GameStatus st = p.basicStatus();
    return st.kind == GameStatusKind::Checkmate;
}

namespace {

class NonLossSearcher {
public:
    NonLossSearcher(Color side, const Budget& b, const std::vector<uint64_t>& prior,
                    const RuleProfile& rules)
        : side_(side), ticker_(b), hashes_(prior), rules_(rules) {}

    NonLossResult run(const Position& p, int horizon) {
        NonLossResult res;
        res.horizon = horizon;
        try {
            std::vector<Move> line;
            bool ok = survive(p, horizon, &line);
            res.status = ok ? NonLossResult::Status::Safe : NonLossResult::Status::Unsafe;
            if (!ok) res.pv = std::move(line);
        } catch (const BudgetExhausted& e) {
            res.status = NonLossResult::Status::Unknown;
            res.exhaustedBudget = e.which;
        }
        res.nodes = ticker_.nodes;
        return res;
    }

private:
    Color side_;
    Ticker ticker_;
    std::vector<uint64_t> hashes_;  // positions before the current one
    RuleProfile rules_;

    bool survive(const Position& p, int pliesLeft, std::vector<Move>* line) {
        ticker_.tick();
        GameStatus st = p.status(hashes_, rules_);
        if (st.kind == GameStatusKind::Checkmate) return st.loser != side_;
        if (st.isOver()) return true;  // any draw is safe
        if (pliesLeft <= 0) return true;
        bool ourTurn = p.sideToMove() == side_;
        std::vector<Move> sub;
        for (const Move& m : p.legalMoves()) {
            Position child = p.apply(m);
            hashes_.push_back(p.hash());
            bool ok = survive(child, pliesLeft - 1, line ? &sub : nullptr);
            hashes_.pop_back();
            if (ourTurn && ok) return true;
            if (!ourTurn && !ok) {
                if (line) {
                    line->clear();
                    line->push_back(m);
                    line->insert(line->end(), sub.begin(), sub.end());
                }
                return false;
            }
        }
        if (ourTurn) {
            // every own move loses within the horizon; report the first line
            if (line && !p.legalMoves().empty()) {
                Move m = p.legalMoves().front();
                hashes_.push_back(p.hash());
                survive(p.apply(m), pliesLeft - 1, &sub);
                hashes_.pop_back();
                line->clear();
                line->push_back(m);
                line->insert(line->end(), sub.begin(), sub.end());
            }
            return false;
        }
        return true;
    }
};

}  // namespace

NonLossResult checkNonLoss(const Position& p, Color side, int horizonPlies, const Budget& budget,
                           const std::vector<uint64_t>& priorHashes, const RuleProfile& rules) {
    return NonLossSearcher(side, budget, priorHashes, rules).run(p, horizonPlies);
}

int evaluate(const Position& p) {
    static constexpr int kValue[6] = {100, 300, 300, 500, 900, 0};
    Color us = p.sideToMove(), them = opposite(us);
    int material = 0;
    for (int k = 0; k < 6; ++k)
        material += kValue[k] * (std::popcount(p.pieces(us, static_cast<PieceKind>(k))) -
                                 std::popcount(p.pieces(them, static_cast<PieceKind>(k))));
    int myMobility = static_cast<int>(p.legalMoves().size());
    PositionBuilder b;
    for (int i = 0; i < kNumSquares; ++i) {
        Square sq = Square::fromIndex(i);
        if (auto piece = p.pieceAt(sq)) b.put(sq, *piece);
    }
    b.sideToMove(them).clocks(p.halfmoveClock(), p.fullmoveNumber());
    int theirMobility = static_cast<int>(b.build(true).legalMoves().size());
    return material + 2 * (myMobility - theirMobility);
}

}  // namespace gardner

#include "gardner/verify.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include "gardner/notation.hpp"

namespace gardner {

namespace {

std::string joinSans(const std::vector<std::string>& sans) {
    std::string out;
    for (const std::string& s : sans) {
        if (!out.empty()) out += ' ';
        out += s;
    }
    return out;
}

std::string pvToSan(const Position& start, const std::vector<Move>& pv) {
    std::string out;
    Position p = start;
    for (const Move& m : pv) {
        if (!out.empty()) out += ' ';
        out += formatSAN(p, m);
        p = p.apply(m);
    }
    return out;
}

int resolveThreads(const VerifyOptions& opt) {
    if (opt.threads > 0) return opt.threads;
    if (const char* env = std::getenv("GARDNER_THREADS")) {
        int n = std::atoi(env);
        if (n > 0) return n;
    }
    return 1;
}

Budget effectiveBudget(Budget b, bool deterministic) {
    if (deterministic) b.maxSeconds = 1e18;  // node caps only
    return b;
}

// A claim check that needs search, queued so checks can run on worker threads
// and still land in the report in walk order.
struct Deferred {
    enum class Kind { Mate, NonLoss };
    Kind kind = Kind::Mate;
    size_t record = 0;             // index into report.records
    Position pos;
    Claim claim;
    std::vector<uint64_t> priorHashes;
    Color safeSide = Color::White;  // NonLoss
};

class Verifier {
public:
    Verifier(const OracleDocument& doc, const VerifyOptions& opt)
        : doc_(doc), opt_(opt) {
        rep_.document = doc.sourceName;
        rep_.side = doc.side;
        rep_.level = opt.level;
        rep_.complete = opt.complete;
    }

    VerificationReport run() {
        std::vector<std::string> path;
        std::vector<uint64_t> hashes;
        size_t movesReplayed = 0;
        try {
            walk(doc_.tree.get(), doc_.root, path, hashes, movesReplayed);
            add("", "legality", Obligation::Status::Pass,
                std::to_string(movesReplayed) + " moves replayed legally");
        } catch (const std::exception& e) {
            add(joinSans(path), "legality", Obligation::Status::Fail, e.what());
        }
        runDeferred();
        return std::move(rep_);
    }

private:
    const OracleDocument& doc_;
    const VerifyOptions& opt_;
    VerificationReport rep_;
    std::vector<Deferred> deferred_;

    size_t add(const std::string& path, const std::string& kind, Obligation::Status st,
               const std::string& detail, uint64_t nodes = 0, const std::string& pv = {}) {
        rep_.records.push_back({path, kind, st, detail, nodes, pv});
        return rep_.records.size() - 1;
    }

    void walk(const OracleNode* n, const Position& at, std::vector<std::string>& path,
              std::vector<uint64_t>& hashes, size_t& movesReplayed) {
        switch (n->type) {
            case OracleNode::Type::OurMove: {
                Move m = parseSAN(at, n->san);
                ++movesReplayed;
                path.push_back(n->san);
                hashes.push_back(at.hash());
                walk(n->child.get(), at.apply(m), path, hashes, movesReplayed);
                hashes.pop_back();
                path.pop_back();
                break;
            }
            case OracleNode::Type::Opponent: {
                checkCoverage(n, at, path, hashes);
                for (const auto& b : n->branches) {
                    Move m = parseSAN(at, b.san);
                    ++movesReplayed;
                    path.push_back(b.san);
                    hashes.push_back(at.hash());
                    walk(b.node.get(), at.apply(m), path, hashes, movesReplayed);
                    hashes.pop_back();
                    path.pop_back();
                }
                break;
            }
            case OracleNode::Type::Leaf:
                replayJustifications(n, at, path, movesReplayed);
                handleClaim(n->claim, at, joinSans(path), hashes, /*suppressFullDirection=*/false);
                break;
        }
    }

    void replayJustifications(const OracleNode* n, const Position& at,
                              const std::vector<std::string>& path, size_t& movesReplayed) {
        for (const auto& line : n->justifications) {
            Position p = at;
            for (const std::string& san : line) {
                p = p.apply(parseSAN(p, san));
                ++movesReplayed;
            }
        }
        (void)path;
    }

    void checkCoverage(const OracleNode* n, const Position& at,
                       const std::vector<std::string>& path, std::vector<uint64_t>& hashes) {
        if (opt_.level < 1) return;
        std::vector<std::string> legal;
        for (const Move& m : at.legalMoves()) legal.push_back(formatSAN(at, m));
        std::sort(legal.begin(), legal.end());

        std::set<std::string> covered;
        for (const auto& b : n->branches) covered.insert(b.san);

        const bool scopedRoot = (n == doc_.tree.get()) && !opt_.rootCover.empty();
        std::vector<std::string> required, external;
        for (const std::string& s : legal) {
            if (scopedRoot &&
                std::find(opt_.rootCover.begin(), opt_.rootCover.end(), s) == opt_.rootCover.end())
                external.push_back(s);
            else
                required.push_back(s);
        }

        std::vector<std::string> missing;
        for (const std::string& s : required)
            if (!covered.count(s)) missing.push_back(s);

        const std::string where = joinSans(path);
        if (!external.empty())
            add(where, "coverage-external", Obligation::Status::Pass,
                "outside this document's scope, covered by a companion document: " +
                    joinSans(external));
        if (missing.empty()) {
            add(where, "coverage", Obligation::Status::Pass,
                "all " + std::to_string(required.size()) + " opponent moves covered by branches");
        } else if (n->defaultClaim) {
            add(where, "coverage-default", Obligation::Status::Pass,
                "covered only by the default claim '" + claimToString(*n->defaultClaim) +
                    "': " + joinSans(missing));
            // The swept claim still owes its L2/L3 obligations per move.
            bool first = true;
            for (const std::string& s : missing) {
                Position next = at.apply(parseSAN(at, s));
                hashes.push_back(at.hash());
                handleClaim(*n->defaultClaim, next, where.empty() ? s : where + ' ' + s, hashes,
                            /*suppressFullDirection=*/!first);
                hashes.pop_back();
                first = false;
            }
        } else {
            add(where, "coverage", Obligation::Status::Fail,
                "uncovered opponent moves: " + joinSans(missing));
        }
    }

    void handleClaim(const Claim& c, const Position& pos, const std::string& path,
                     const std::vector<uint64_t>& hashes, bool suppressFullDirection) {
        switch (c.kind) {
            case Claim::Kind::TranspositionRef: {
                try {
                    auto [target, node] = resolveVariation(doc_, c.text);
                    (void)node;
                    if (target.hash() == pos.hash())
                        add(path, "ref", Obligation::Status::Pass,
                            "position-exact transposition to " + c.text);
                    else
                        add(path, "ref", Obligation::Status::Fail,
                            "position differs from variation " + c.text);
                } catch (const UnknownVariationError& e) {
                    add(path, "ref", Obligation::Status::Fail, e.what());
                }
                break;
            }
            case Claim::Kind::Unverified:
                add(path, "unverified", Obligation::Status::UnverifiedClaim, c.text);
                break;
            case Claim::Kind::MateDefender:
                if (opt_.level >= 2) {
                    Deferred d;
                    d.kind = Deferred::Kind::Mate;
                    d.record = add(path, "mate", Obligation::Status::Unknown, "queued");
                    d.pos = pos;
                    d.claim = c;
                    deferred_.push_back(std::move(d));
                }
                break;
            case Claim::Kind::ImmediateCheckmate:
                if (opt_.level >= 2) {
                    if (checkImmediateCheckmate(pos))
                        add(path, "checkmate", Obligation::Status::Pass, "side to move is mated");
                    else
                        add(path, "checkmate", Obligation::Status::Fail,
                            "side to move is not checkmated");
                }
                break;
            case Claim::Kind::DrawLeaf:
            case Claim::Kind::CannotWin:
                if (opt_.level >= 3) {
                    Deferred d;
                    d.kind = Deferred::Kind::NonLoss;
                    d.record = add(path, "nonloss", Obligation::Status::Unknown, "queued");
                    d.pos = pos;
                    d.claim = c;
                    d.priorHashes = hashes;
                    d.safeSide = doc_.side;
                    deferred_.push_back(std::move(d));
                    if (c.kind == Claim::Kind::CannotWin && !suppressFullDirection)
                        add(path, "cannotwin-full", Obligation::Status::Unknown,
                            "game-theoretic 'opponent cannot win' not machine-checked; "
                            "claimant safety checked instead");
                }
                break;
        }
    }

    void runDeferred() {
        if (deferred_.empty()) return;
        const int threads = resolveThreads(opt_);
        std::atomic<size_t> next{0};
        auto work = [&] {
            for (size_t i = next.fetch_add(1); i < deferred_.size(); i = next.fetch_add(1))
                runOne(deferred_[i]);
        };
        if (threads <= 1) {
            work();
        } else {
            std::vector<std::thread> pool;
            for (int t = 0; t < threads; ++t) pool.emplace_back(work);
            for (auto& th : pool) th.join();
        }
    }

    void runOne(const Deferred& d) {
        Obligation& rec = rep_.records[d.record];
        if (d.kind == Deferred::Kind::Mate) {
            MateQuery q;
            q.position = d.pos;
            q.attacker = opposite(d.claim.color);
            q.maxAttackerMoves = d.claim.moves;
            q.budget = effectiveBudget(opt_.mateBudget, opt_.deterministic);
            MateResult r = proveMate(q);
            rec.nodes = r.nodes;
            switch (r.status) {
                case MateResult::Status::Proven:
                    rec.status = Obligation::Status::Pass;
                    rec.detail = "mate proven in " + std::to_string(r.movesUsed) +
                                 " <= " + std::to_string(d.claim.moves) + " moves";
                    rec.pv = pvToSan(d.pos, r.pv);
                    break;
                case MateResult::Status::Disproven:
                    rec.status = Obligation::Status::Fail;
                    rec.detail = "no forced mate within " + std::to_string(d.claim.moves) +
                                 " moves (exhaustive to the ply bound)";
                    break;
                case MateResult::Status::Unknown:
                    rec.status = Obligation::Status::Unknown;
                    rec.detail = "budget exhausted (" + r.exhaustedBudget + ")";
                    break;
            }
        } else {
            NonLossResult r =
                checkNonLoss(d.pos, d.safeSide, opt_.horizonPlies,
                             effectiveBudget(opt_.nonLossBudget, opt_.deterministic),
                             d.priorHashes, opt_.rules);
            rec.nodes = r.nodes;
            switch (r.status) {
                case NonLossResult::Status::Safe:
                    rec.status = Obligation::Status::Pass;
                    rec.detail = "safe for " + std::to_string(opt_.horizonPlies) +
                                 " plies (approximation of the source's human argument)";
                    break;
                case NonLossResult::Status::Unsafe:
                    rec.status = Obligation::Status::Fail;
                    rec.detail = "claimant can be mated within the horizon";
                    rec.pv = pvToSan(d.pos, r.pv);
                    break;
                case NonLossResult::Status::Unknown:
                    rec.status = Obligation::Status::Unknown;
                    rec.detail = "budget exhausted (" + r.exhaustedBudget + ")";
                    break;
            }
        }
    }
};

std::string jsonEscape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    return out;
}

}  // namespace

const char* obligationStatusName(Obligation::Status s) {
    switch (s) {
        case Obligation::Status::Pass: return "pass";
        case Obligation::Status::Fail: return "fail";
        case Obligation::Status::Unknown: return "unknown";
        case Obligation::Status::UnverifiedClaim: return "unverified-claim";
    }
    return "?";
}

int VerificationReport::count(Obligation::Status s) const {
    int n = 0;
    for (const Obligation& r : records)
        if (r.status == s) ++n;
    return n;
}

VerificationReport verifyDocument(const OracleDocument& doc, const VerifyOptions& opt) {
    return Verifier(doc, opt).run();
}

std::string reportText(const VerificationReport& r) {
    std::ostringstream out;
    out << "document " << r.document << " (side "
        << (r.side == Color::White ? "white" : "black") << ", level " << r.level << ", "
        << (r.complete ? "complete" : "PARTIAL transcription") << ")\n";
    for (const Obligation& o : r.records) {
        if (o.status == Obligation::Status::Pass) continue;
        out << "  [" << obligationStatusName(o.status) << "] " << o.kind;
        if (!o.path.empty()) out << " after " << o.path;
        out << ": " << o.detail;
        if (!o.pv.empty()) out << " | pv " << o.pv;
        if (o.nodes) out << " | nodes " << o.nodes;
        out << '\n';
    }
    out << "summary: obligations=" << r.records.size()
        << " pass=" << r.count(Obligation::Status::Pass)
        << " fail=" << r.count(Obligation::Status::Fail)
        << " unknown=" << r.count(Obligation::Status::Unknown)
        << " unverified=" << r.count(Obligation::Status::UnverifiedClaim) << '\n';
    return out.str();
}

std::string reportRecords(const VerificationReport& r) {
    std::ostringstream out;
    for (const Obligation& o : r.records) {
        out << "{\"document\":\"" << jsonEscape(r.document) << "\",\"path\":\""
            << jsonEscape(o.path) << "\",\"kind\":\"" << jsonEscape(o.kind)
            << "\",\"status\":\"" << obligationStatusName(o.status) << "\",\"detail\":\""
            << jsonEscape(o.detail) << "\",\"nodes\":" << o.nodes << ",\"pv\":\""
            << jsonEscape(o.pv) << "\"}\n";
    }
    return out.str();
}

std::vector<ManifestEntry> loadManifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw OracleError("cannot open manifest " + path);
    std::vector<ManifestEntry> out;
    std::string line;
    int lineNo = 0;
    while (std::getline(in, line)) {
        ++lineNo;
        size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        ManifestEntry e;
        std::string side, status;
        if (!(ss >> e.file)) continue;  // blank line
        if (!(ss >> side >> e.covers >> status >> e.repetition))
            throw OracleError("manifest " + path + ": bad entry", lineNo);
        if (side == "white") e.side = Color::White;
        else if (side == "black") e.side = Color::Black;
        else throw OracleError("manifest " + path + ": bad side '" + side + "'", lineNo);
        if (status == "complete") e.complete = true;
        else if (status == "partial") e.complete = false;
        else throw OracleError("manifest " + path + ": bad status '" + status + "'", lineNo);
        out.push_back(std::move(e));
    }
    return out;
}

bool BundleReport::anyFail() const {
    for (const auto& r : reports)
        if (r.anyFail()) return true;
    for (const auto& o : bundleRecords)
        if (o.status == Obligation::Status::Fail) return true;
    return false;
}

namespace {

// Follows the oracle cursor across a played move; null once outside the tree.
const OracleNode* advanceCursor(const OracleNode* cur, const std::string& san) {
    if (!cur) return nullptr;
    switch (cur->type) {
        case OracleNode::Type::OurMove:
            return cur->san == san ? cur->child.get() : nullptr;
        case OracleNode::Type::Opponent:
            for (const auto& b : cur->branches)
                if (b.san == san) return b.node.get();
            return nullptr;
        case OracleNode::Type::Leaf:
            return nullptr;
    }
    return nullptr;
}

std::optional<Move> fallbackMove(const Position& p, Color side,
                                 const std::vector<uint64_t>& hashes, const RuleProfile& rules) {
    MoveList moves = p.legalMoves();
    std::stable_sort(moves.begin(), moves.end(), [](const Move& a, const Move& b) {
        return moveUCI(a) < moveUCI(b);
    });
    std::optional<Move> best;
    int bestScore = -1;
    for (const Move& m : moves) {
        Position q = p.apply(m);
        std::vector<uint64_t> prior = hashes;
        prior.push_back(p.hash());
        NonLossResult r = checkNonLoss(q, side, 6, Budget{50'000, 5.0}, prior, rules);
        if (r.status == NonLossResult::Status::Unsafe) continue;
        int score = 0;
        score += 100 * static_cast<int>(std::count(hashes.begin(), hashes.end(), q.hash()));
        auto piece = p.pieceAt(m.from);
        if (piece && piece->kind == PieceKind::King) score += 10;
        if (!m.isCapture) score += 5;
        if (score > bestScore) {
            bestScore = score;
            best = m;
        }
    }
    if (!best && !moves.empty()) best = moves.front();
    return best;
}

}  // namespace

JointGameResult playJointGame(const OracleDocument& whiteDoc, const OracleDocument& blackDoc,
                              const RuleProfile& rules, int maxPlies) {
    JointGameResult out;
    Position p = whiteDoc.root;
    const OracleNode* wcur = whiteDoc.tree.get();
    const OracleNode* bcur = blackDoc.tree.get();
    std::vector<uint64_t> hashes;
    for (int ply = 0; ply < maxPlies; ++ply) {
        out.status = p.status(hashes, rules);
        if (out.status.isOver()) return out;
        Color side = p.sideToMove();
        const OracleNode* cur = side == Color::White ? wcur : bcur;
        std::optional<Move> m;
        if (cur && cur->type == OracleNode::Type::OurMove)
            m = parseSAN(p, cur->san);
        else
            m = fallbackMove(p, side, hashes, rules);
        if (!m) break;  // no legal move; status() above should have caught it
        std::string san = formatSAN(p, *m);
        out.sans.push_back(san);
        hashes.push_back(p.hash());
        p = p.apply(*m);
        wcur = advanceCursor(wcur, san);
        bcur = advanceCursor(bcur, san);
    }
    out.status = p.status(hashes, rules);
    return out;
}

BundleReport verifyAllBundled(const std::string& dataDir, const VerifyOptions& opt) {
    BundleReport out;
    std::vector<ManifestEntry> entries = loadManifest(dataDir + "/manifest.txt");

    std::vector<OracleDocument> docs;
    docs.reserve(entries.size());
    for (const ManifestEntry& e : entries) docs.push_back(loadOracleFile(dataDir + "/" + e.file));

    for (size_t i = 0; i < entries.size(); ++i) {
        VerifyOptions o = opt;
        o.rules.repetitionThreshold = entries[i].repetition;
        o.complete = entries[i].complete;
        if (docs[i].tree && docs[i].tree->type == OracleNode::Type::Opponent)
            o.rootCover = {entries[i].covers};
        out.reports.push_back(verifyDocument(docs[i], o));
    }

    // The black documents must jointly answer every legal first move.
    std::set<std::string> blackCovers;
    for (size_t i = 0; i < entries.size(); ++i)
        if (entries[i].side == Color::Black) blackCovers.insert(entries[i].covers);
    Position initial = Position::initial();
    std::vector<std::string> missing;
    for (const Move& m : initial.legalMoves()) {
        std::string san = formatSAN(initial, m);
        if (!blackCovers.count(san)) missing.push_back(san);
    }
    if (!entries.empty()) {
        Obligation o;
        o.kind = "root-union";
        if (missing.empty()) {
            o.status = Obligation::Status::Pass;
            o.detail = "black documents jointly cover all first moves";
        } else {
            o.status = Obligation::Status::Fail;
            o.detail = "first moves not covered by any black document: " + joinSans(missing);
        }
        out.bundleRecords.push_back(std::move(o));
    }

    // Joint 1.b4 oracle-vs-oracle game.
    const OracleDocument* wdoc = nullptr;
    const OracleDocument* bdoc = nullptr;
    for (size_t i = 0; i < entries.size(); ++i) {
        if (entries[i].side == Color::White && entries[i].covers == "b4") wdoc = &docs[i];
        if (entries[i].side == Color::Black && entries[i].covers == "b4") bdoc = &docs[i];
    }
    if (wdoc && bdoc) {
        RuleProfile rules = opt.rules;
        JointGameResult g = playJointGame(*wdoc, *bdoc, rules);
        Obligation o;
        o.kind = "joint-game";
        o.path = joinSans(g.sans);
        if (g.status.isDraw()) {
            o.status = Obligation::Status::Pass;
            o.detail = "oracle-vs-oracle 1.b4 game ended: " + statusName(g.status);
        } else {
            o.status = Obligation::Status::Fail;
            o.detail = "oracle-vs-oracle 1.b4 game did not end in a draw: " + statusName(g.status);
        }
        out.bundleRecords.push_back(std::move(o));
    }
    return out;
}

}  // namespace gardner

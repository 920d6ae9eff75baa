// gardner5: command-line toolkit for Gardner 5x5 minichess oracles.
#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "gardner/build.hpp"
#include "gardner/notation.hpp"
#include "gardner/oracle.hpp"
#include "gardner/search.hpp"
#include "gardner/verify.hpp"

using namespace gardner;
namespace fs = std::filesystem;

namespace {

Position positionFromFlag(const std::string& fen) {
    return fen.empty() ? Position::initial() : parseFEN(fen);
}

Color parseColorName(const std::string& s) {
    if (s == "white" || s == "w") return Color::White;
    if (s == "black" || s == "b") return Color::Black;
    throw std::runtime_error("bad color '" + s + "' (use white|black)");
}

void writeOrPrint(const std::string& out, const std::string& text) {
    if (out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(out);
    if (!f) throw std::runtime_error("cannot write " + out);
    f << text;
}

// ---------------------------------------------------------------- perft

int cmdPerft(const std::string& fen, int depth) {
    Position p = positionFromFlag(fen);
    if (depth <= 0) {
        std::cout << "total " << perft(p, depth) << '\n';
        return 0;
    }
    uint64_t total = 0;
    for (const auto& [m, n] : perftSplit(p, depth)) {
        std::cout << formatSAN(p, m) << ' ' << n << '\n';
        total += n;
    }
    std::cout << "total " << total << '\n';
    return 0;
}

// ---------------------------------------------------------------- verify

// If the document sits next to a manifest that lists it, adopt its scope
// (covers) and repetition threshold so single-file runs match bundle runs.
void adoptManifestEntry(const std::string& path, VerifyOptions& opt) {
    fs::path manifest = fs::path(path).parent_path() / "manifest.txt";
    if (!fs::exists(manifest)) return;
    for (const ManifestEntry& e : loadManifest(manifest.string())) {
        if (e.file != fs::path(path).filename().string()) continue;
        if (opt.rootCover.empty()) opt.rootCover = {e.covers};
        opt.rules.repetitionThreshold = e.repetition;
        opt.complete = e.complete;
        std::cerr << "note: scope from " << manifest.string() << " (covers " << e.covers
                  << ", repetition " << e.repetition << ")\n";
        return;
    }
}

int cmdVerify(const std::vector<std::string>& paths, const std::string& bundleDir,
              VerifyOptions opt, const std::vector<std::string>& cover, bool records,
              const std::string& out) {
    std::ostringstream text;
    bool fail = false, unknown = false;
    if (!bundleDir.empty()) {
        BundleReport r = verifyAllBundled(bundleDir, opt);
        for (const auto& rep : r.reports) {
            text << (records ? reportRecords(rep) : reportText(rep));
            fail = fail || rep.anyFail();
            unknown = unknown || rep.count(Obligation::Status::Unknown) > 0;
        }
        for (const Obligation& o : r.bundleRecords) {
            text << "bundle [" << obligationStatusName(o.status) << "] " << o.kind << ": "
                 << o.detail << '\n';
            fail = fail || o.status == Obligation::Status::Fail;
        }
    }
    for (const std::string& path : paths) {
        VerifyOptions o = opt;
        o.rootCover = cover;
        OracleDocument doc = loadOracleFile(path);
        if (doc.tree && doc.tree->type == OracleNode::Type::Opponent) adoptManifestEntry(path, o);
        VerificationReport r = verifyDocument(doc, o);
        text << (records ? reportRecords(r) : reportText(r));
        fail = fail || r.anyFail();
        unknown = unknown || r.count(Obligation::Status::Unknown) > 0;
    }
    writeOrPrint(out, text.str());
    return fail ? 1 : 0;
}

// ---------------------------------------------------------------- solve

int cmdSolve(const std::string& fen, const std::string& attacker, int mateIn, Budget budget,
             bool deterministic) {
    MateQuery q;
    q.position = positionFromFlag(fen);
    q.attacker = parseColorName(attacker);
    q.maxAttackerMoves = mateIn;
    if (deterministic) budget.maxSeconds = 1e18;
    q.budget = budget;
    MateResult r = proveMate(q);
    switch (r.status) {
        case MateResult::Status::Proven: {
            std::cout << "Proven: mate in " << r.movesUsed << " (claimed " << mateIn << ")\npv";
            Position p = q.position;
            for (const Move& m : r.pv) {
                std::cout << ' ' << formatSAN(p, m);
                p = p.apply(m);
            }
            std::cout << '\n';
            break;
        }
        case MateResult::Status::Disproven:
            std::cout << "Disproven: no forced mate within " << mateIn << " moves\n";
            break;
        case MateResult::Status::Unknown:
            std::cout << "Unknown: budget exhausted (" << r.exhaustedBudget << ")\n";
            break;
    }
    std::cout << "nodes " << r.nodes << '\n';
    return 0;
}

// ---------------------------------------------------------------- build

std::map<uint64_t, std::string> loadGuide(const std::string& path) {
    std::map<uint64_t, std::string> guide;
    if (path.empty()) return guide;
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open guide " + path);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        size_t sep = line.find(" => ");
        if (sep == std::string::npos)
            throw std::runtime_error("guide line needs 'FEN => SAN': " + line);
        Position p = parseFEN(line.substr(0, sep));
        guide[p.hash()] = line.substr(sep + 4);
    }
    return guide;
}

int cmdBuild(const std::string& fen, const BuildPolicy& policy, const std::string& out,
             const std::string& logOut) {
    BuildResult r = buildOracle(positionFromFlag(fen), policy);
    writeOrPrint(out, printOracle(r.document));
    if (!logOut.empty()) writeOrPrint(logOut, r.log);
    std::cerr << "built: own=" << r.stats.ownNodes << " opponent=" << r.stats.opponentNodes
              << " leaves=" << r.stats.leaves << " refs=" << r.stats.refLeaves
              << " search-nodes=" << r.stats.searchNodes << '\n';
    return 0;
}

// ---------------------------------------------------------------- play

struct PlayState {
    Position pos;
    std::vector<uint64_t> hashes;
    std::vector<std::string> sans;
    const OracleNode* cursor = nullptr;  // null once outside the oracle tree
};

const OracleNode* stepCursor(const OracleNode* cur, const std::string& san) {
    if (!cur) return nullptr;
    if (cur->type == OracleNode::Type::OurMove)
        return cur->san == san ? cur->child.get() : nullptr;
    if (cur->type == OracleNode::Type::Opponent)
        for (const auto& b : cur->branches)
            if (b.san == san) return b.node.get();
    return nullptr;
}

std::optional<Move> engineReply(const Position& p, Color side, const std::vector<uint64_t>& hashes,
                                const RuleProfile& rules) {
    MoveList moves = p.legalMoves();
    std::stable_sort(moves.begin(), moves.end(),
                     [](const Move& a, const Move& b) { return moveUCI(a) < moveUCI(b); });
    std::optional<Move> best;
    int bestScore = -1;
    for (const Move& m : moves) {
        Position q = p.apply(m);
        std::vector<uint64_t> prior = hashes;
        prior.push_back(p.hash());
        NonLossResult r = checkNonLoss(q, side, 6, Budget{50'000, 5.0}, prior, rules);
        if (r.status == NonLossResult::Status::Unsafe) continue;
        int score = -evaluate(q);
        if (!best || score > bestScore) {
            bestScore = score;
            best = m;
        }
    }
    if (!best && !moves.empty()) best = moves.front();
    return best;
}

int cmdPlay(const std::string& oraclePath, const std::string& humanColor, int repetition) {
    OracleDocument doc = loadOracleFile(oraclePath);
    Color human = parseColorName(humanColor);
    if (human == doc.side)
        std::cout << "note: you play the oracle's own side; the program answers for "
                  << (human == Color::White ? "black" : "white") << " without an oracle\n";
    RuleProfile rules;
    rules.repetitionThreshold = repetition;
    PlayState st{doc.root, {}, {}, doc.tree.get()};
    std::vector<PlayState> history;
    bool leftOracle = false;

    auto announce = [&](const GameStatus& gs) {
        if (gs.isOver()) {
            std::cout << "game over: " << statusName(gs) << '\n';
            return true;
        }
        return false;
    };

    std::cout << "playing " << doc.sourceName << "; you are "
              << (human == Color::White ? "white" : "black")
              << " (commands: undo, fen, quit)\n";
    while (true) {
        GameStatus gs = st.pos.status(st.hashes, rules);
        if (announce(gs)) return 0;
        if (st.pos.sideToMove() == human) {
            std::cout << (st.pos.sideToMove() == Color::White ? "white" : "black") << "> "
                      << std::flush;
            std::string line;
            if (!std::getline(std::cin, line)) return 0;
            while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
            if (line.empty()) continue;
            if (line == "quit") return 0;
            if (line == "fen") {
                std::cout << formatFEN(st.pos) << '\n';
                continue;
            }
            if (line == "undo") {
                if (history.size() >= 2) {
                    history.pop_back();
                    st = history.back();
                    history.pop_back();
                    std::cout << "took back one full move\n";
                } else {
                    std::cout << "nothing to undo\n";
                }
                continue;
            }
            Move m;
            try {
                m = parseSAN(st.pos, line);
            } catch (const std::exception&) {
                std::cout << "illegal move '" << line << "'; legal:";
                for (const Move& lm : st.pos.legalMoves())
                    std::cout << ' ' << formatSAN(st.pos, lm);
                std::cout << '\n';
                continue;
            }
            history.push_back(st);
            std::string san = formatSAN(st.pos, m);
            st.hashes.push_back(st.pos.hash());
            st.pos = st.pos.apply(m);
            st.sans.push_back(san);
            st.cursor = stepCursor(st.cursor, san);
        } else {
            std::optional<Move> m;
            if (st.cursor && st.cursor->type == OracleNode::Type::OurMove &&
                doc.side == st.pos.sideToMove()) {
                m = parseSAN(st.pos, st.cursor->san);
            } else {
                if (!leftOracle && doc.side == st.pos.sideToMove()) {
                    std::cout << "warning: left oracle; continuing with engine play\n";
                    leftOracle = true;
                }
                m = engineReply(st.pos, st.pos.sideToMove(), st.hashes, rules);
            }
            if (!m) continue;  // terminal; the loop head reports it
            history.push_back(st);
            std::string san = formatSAN(st.pos, *m);
            std::cout << "program plays " << san << '\n';
            st.hashes.push_back(st.pos.hash());
            st.pos = st.pos.apply(*m);
            st.sans.push_back(san);
            st.cursor = stepCursor(st.cursor, san);
        }
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Gardner 5x5 minichess oracle toolkit"};
    app.require_subcommand(1);

    // perft
    auto* perftCmd = app.add_subcommand("perft", "per-move split counts and total");
    std::string perftFen;
    int perftDepth = 1;
    perftCmd->add_option("--fen", perftFen, "position (default: initial)");
    perftCmd->add_option("--depth", perftDepth, "search depth in plies")->required();

    // verify
    auto* verifyCmd = app.add_subcommand("verify", "verify oracle documents");
    std::vector<std::string> verifyPaths, verifyCover;
    std::string verifyBundle, verifyOut;
    VerifyOptions vopt;
    bool verifyRecords = false;
    verifyCmd->add_option("paths", verifyPaths, ".gdo documents");
    verifyCmd->add_option("--bundle", verifyBundle, "data directory with manifest.txt");
    verifyCmd->add_option("--level", vopt.level, "0..3 (default 3)");
    verifyCmd->add_option("--mate-nodes", vopt.mateBudget.maxNodes, "node budget per mate claim");
    verifyCmd->add_option("--mate-time", vopt.mateBudget.maxSeconds, "seconds per mate claim");
    verifyCmd->add_option("--horizon", vopt.horizonPlies, "L3 safety horizon in plies");
    verifyCmd->add_option("--repetition", vopt.rules.repetitionThreshold,
                          "repetition occurrence threshold");
    verifyCmd->add_option("--threads", vopt.threads, "worker threads (0: GARDNER_THREADS)");
    verifyCmd->add_option("--cover", verifyCover, "restrict a root opponent node to these moves");
    verifyCmd->add_flag("--deterministic", vopt.deterministic,
                        "ignore wall clock; byte-identical output");
    verifyCmd->add_flag("--records", verifyRecords, "machine-readable JSON lines");
    verifyCmd->add_option("-o,--out", verifyOut, "write report to file");

    // solve
    auto* solveCmd = app.add_subcommand("solve", "prove or disprove a mate claim");
    std::string solveFen, solveAttacker = "white";
    int solveMateIn = 1;
    Budget solveBudget;
    bool solveDet = false;
    solveCmd->add_option("--fen", solveFen, "position (default: initial)");
    solveCmd->add_option("--attacker", solveAttacker, "white|black")->required();
    solveCmd->add_option("--mate-in", solveMateIn, "attacker moves x")->required();
    solveCmd->add_option("--nodes", solveBudget.maxNodes, "node budget");
    solveCmd->add_option("--time", solveBudget.maxSeconds, "time budget in seconds");
    solveCmd->add_flag("--deterministic", solveDet, "ignore wall clock");

    // build
    auto* buildCmd = app.add_subcommand("build", "build an oracle document");
    std::string buildFen, buildSide = "white", buildGuide, buildOut, buildLog,
                buildDrawRule = "repetition";
    BuildPolicy bpol;
    buildCmd->add_option("--fen", buildFen, "root position (default: initial)");
    buildCmd->add_option("--side", buildSide, "defending side white|black")->required();
    buildCmd->add_option("--guide", buildGuide, "guide file: lines 'FEN => SAN'");
    buildCmd->add_option("--max-depth", bpol.maxDepth, "plies before Unverified leaves");
    buildCmd->add_option("--mate-moves", bpol.maxMateMoves, "largest mate length attempted");
    buildCmd->add_option("--mate-nodes", bpol.mateBudget.maxNodes, "nodes per mate attempt");
    buildCmd->add_option("--mate-time", bpol.mateBudget.maxSeconds, "seconds per mate attempt");
    buildCmd->add_option("--threshold", bpol.decidedThreshold, "decided threshold (centipawns)");
    buildCmd->add_option("--draw-rule", buildDrawRule, "repetition|safe-horizon");
    buildCmd->add_option("--horizon", bpol.drawCloseRule.horizonPlies,
                         "safe-horizon plies");
    buildCmd->add_flag("--deterministic", bpol.deterministic, "ignore wall clock");
    buildCmd->add_option("-o,--out", buildOut, "output .gdo (default stdout)");
    buildCmd->add_option("--log", buildLog, "JSON-lines build log file");

    // play
    auto* playCmd = app.add_subcommand("play", "interactive play against an oracle");
    std::string playOracle, playHuman = "white";
    int playRepetition = 3;
    playCmd->add_option("--oracle", playOracle, ".gdo document")->required();
    playCmd->add_option("--human-color", playHuman, "white|black")->required();
    playCmd->add_option("--repetition", playRepetition, "repetition occurrence threshold");

    // export-pgn
    auto* pgnCmd = app.add_subcommand("export-pgn", "export a document as PGN games");
    std::string pgnIn, pgnOut;
    pgnCmd->add_option("input", pgnIn, ".gdo document")->required();
    pgnCmd->add_option("-o,--out", pgnOut, "output file (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*perftCmd) return cmdPerft(perftFen, perftDepth);
        if (*verifyCmd) {
            if (verifyPaths.empty() && verifyBundle.empty())
                throw std::runtime_error("verify needs paths or --bundle");
            return cmdVerify(verifyPaths, verifyBundle, vopt, verifyCover, verifyRecords,
                             verifyOut);
        }
        if (*solveCmd)
            return cmdSolve(solveFen, solveAttacker, solveMateIn, solveBudget, solveDet);
        if (*buildCmd) {
            bpol.side = parseColorName(buildSide);
            bpol.guide = loadGuide(buildGuide);
            if (buildDrawRule == "repetition")
                bpol.drawCloseRule.kind = DrawCloseRule::Kind::Repetition;
            else if (buildDrawRule == "safe-horizon")
                bpol.drawCloseRule.kind = DrawCloseRule::Kind::SafeHorizon;
            else
                throw std::runtime_error("bad --draw-rule (repetition|safe-horizon)");
            return cmdBuild(buildFen, bpol, buildOut, buildLog);
        }
        if (*playCmd) return cmdPlay(playOracle, playHuman, playRepetition);
        if (*pgnCmd) {
            writeOrPrint(pgnOut, exportPGN(loadOracleFile(pgnIn)));
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <functional>
#include <random>
#include <set>

#include "gardner/notation.hpp"
#include "gardner/verify.hpp"

using namespace gardner;

namespace {

const std::string kDataDir = GARDNER_DATA_DIR;

int countKind(const VerificationReport& r, const std::string& kind, Obligation::Status st) {
    int n = 0;
    for (const Obligation& o : r.records)
        if (o.kind == kind && o.status == st) ++n;
    return n;
}

// All opponent nodes whose coverage is carried by explicit branches only, so
// deleting a branch must produce an L1 coverage failure.
void collectMutable(OracleNode* n, std::vector<OracleNode*>& out) {
    switch (n->type) {
        case OracleNode::Type::OurMove:
            collectMutable(n->child.get(), out);
            break;
        case OracleNode::Type::Opponent:
            if (!n->defaultClaim && !n->branches.empty()) out.push_back(n);
            for (auto& b : n->branches) collectMutable(b.node.get(), out);
            break;
        case OracleNode::Type::Leaf:
            break;
    }
}

}  // namespace

TEST_CASE("manifest loads all bundled documents") {
    auto entries = loadManifest(kDataDir + "/manifest.txt");
    REQUIRE(entries.size() == 8);
    CHECK(entries[0].file == "white-b4.gdo");
    CHECK(entries[0].side == Color::White);
    CHECK(entries[0].covers == "b4");
    CHECK(entries[0].complete);
    CHECK(entries[0].repetition == 3);

    std::set<std::string> covers;
    for (size_t i = 1; i < entries.size(); ++i) {
        CHECK(entries[i].side == Color::Black);
        covers.insert(entries[i].covers);
    }
    Position initial = Position::initial();
    for (const Move& m : initial.legalMoves()) CHECK(covers.count(formatSAN(initial, m)) == 1);
}

TEST_CASE("white document passes L1 with no uncovered moves") {
    OracleDocument doc = loadOracleFile(kDataDir + "/white-b4.gdo");
    VerifyOptions opt;
    opt.level = 1;
    VerificationReport r = verifyDocument(doc, opt);
    CHECK(!r.anyFail());
    CHECK(countKind(r, "coverage", Obligation::Status::Fail) == 0);
    CHECK(countKind(r, "legality", Obligation::Status::Pass) == 1);
}

TEST_CASE("black documents pass L1 under their manifest scope") {
    for (const auto& e : loadManifest(kDataDir + "/manifest.txt")) {
        if (e.side != Color::Black) continue;
        OracleDocument doc = loadOracleFile(kDataDir + "/" + e.file);
        VerifyOptions opt;
        opt.level = 1;
        opt.rootCover = {e.covers};
        VerificationReport r = verifyDocument(doc, opt);
        INFO(e.file);
        CHECK(!r.anyFail());
        // The six out-of-scope first moves show up as an external-coverage note.
        CHECK(countKind(r, "coverage-external", Obligation::Status::Pass) == 1);
    }
}

TEST_CASE("uncovered opponent move is an L1 failure with a witness") {
    OracleDocument doc = parseOracle(R"(oracle white
move b4
opponent {
  cxb4 -> { move cxb4 draw "stub" }
}
)");
    VerifyOptions opt;
    opt.level = 1;
    VerificationReport r = verifyDocument(doc, opt);
    CHECK(r.anyFail());
    bool witnessed = false;
    for (const Obligation& o : r.records)
        if (o.kind == "coverage" && o.status == Obligation::Status::Fail) {
            witnessed = true;
            CHECK(o.path == "b4");
            CHECK(o.detail.find("uncovered") != std::string::npos);
        }
    CHECK(witnessed);
}

TEST_CASE("default claim sweeps count as distinct coverage records") {
    OracleDocument doc = parseOracle(R"(oracle white
move b4
opponent {
  cxb4 -> { move cxb4 draw "stub" }
  other => cannotwin black
}
)");
    VerifyOptions opt;
    opt.level = 1;
    VerificationReport r = verifyDocument(doc, opt);
    CHECK(!r.anyFail());
    CHECK(countKind(r, "coverage-default", Obligation::Status::Pass) == 1);
    CHECK(countKind(r, "coverage", Obligation::Status::Pass) == 0);
}

TEST_CASE("random branch deletions are caught at L1") {
    std::mt19937 rng(20260825);
    for (const auto& e : loadManifest(kDataDir + "/manifest.txt")) {
        std::vector<OracleNode*> probe;
        {
            OracleDocument doc = loadOracleFile(kDataDir + "/" + e.file);
            collectMutable(doc.tree.get(), probe);
        }
        if (probe.empty()) continue;  // trivial single-leaf documents
        for (int trial = 0; trial < 3; ++trial) {
            OracleDocument doc = loadOracleFile(kDataDir + "/" + e.file);
            std::vector<OracleNode*> nodes;
            collectMutable(doc.tree.get(), nodes);
            OracleNode* victim = nodes[rng() % nodes.size()];
            victim->branches.erase(victim->branches.begin() +
                                   static_cast<long>(rng() % victim->branches.size()));
            reindexDocument(doc);
            VerifyOptions opt;
            opt.level = 1;
            opt.rootCover = {e.covers};
            VerificationReport r = verifyDocument(doc, opt);
            INFO(e.file << " trial " << trial);
            CHECK(r.anyFail());
        }
    }
}

TEST_CASE("transposition refs are hash-checked at L0") {
    OracleDocument doc = loadOracleFile(kDataDir + "/black-e4.gdo");
    VerifyOptions opt;
    opt.level = 0;
    VerificationReport r = verifyDocument(doc, opt);
    CHECK(!r.anyFail());
    CHECK(countKind(r, "ref", Obligation::Status::Pass) == 1);

    // Redirect the ref to a variation with a different position: must fail.
    OracleDocument bad = loadOracleFile(kDataDir + "/black-e4.gdo");
    bool redirected = false;
    std::function<void(OracleNode*)> fixAll = [&](OracleNode* cur) {
        if (cur->type == OracleNode::Type::Leaf &&
            cur->claim.kind == Claim::Kind::TranspositionRef) {
            cur->claim.text = "1/1";
            redirected = true;
        } else if (cur->type == OracleNode::Type::OurMove) {
            fixAll(cur->child.get());
        } else if (cur->type == OracleNode::Type::Opponent) {
            for (auto& b : cur->branches) fixAll(b.node.get());
        }
    };
    fixAll(bad.tree.get());
    REQUIRE(redirected);
    VerificationReport rb = verifyDocument(bad, opt);
    CHECK(countKind(rb, "ref", Obligation::Status::Fail) >= 1);
}

TEST_CASE("false mate and checkmate claims are disproven at L2") {
    OracleDocument doc = parseOracle(R"(oracle white
move b4
opponent {
  c4 -> { move d4  mate black 1 }
  e4 => checkmate
  other => cannotwin black
}
)");
    VerifyOptions opt;
    opt.level = 2;
    opt.mateBudget = Budget{100'000, 10.0};
    VerificationReport r = verifyDocument(doc, opt);
    CHECK(countKind(r, "mate", Obligation::Status::Fail) == 1);
    CHECK(countKind(r, "checkmate", Obligation::Status::Fail) == 1);
}

TEST_CASE("quiet draw claim is safe at a short L3 horizon") {
    OracleDocument doc = parseOracle(R"(oracle white
move b4
opponent {
  c4 => draw "closed wing position"
  other => cannotwin black
}
)");
    VerifyOptions opt;
    opt.level = 3;
    opt.horizonPlies = 4;
    VerificationReport r = verifyDocument(doc, opt);
    CHECK(countKind(r, "nonloss", Obligation::Status::Fail) == 0);
    CHECK(countKind(r, "nonloss", Obligation::Status::Pass) >= 1);
    // cannotwin keeps the full game-theoretic direction honestly unknown
    CHECK(countKind(r, "cannotwin-full", Obligation::Status::Unknown) == 1);
}

TEST_CASE("unverified source claims are reported, never passed") {
    OracleDocument doc = parseOracle(R"(oracle white
move b4
opponent {
  cxb4 => unverified "the source gives no assessment"
  other => cannotwin black
}
)");
    VerificationReport r = verifyDocument(doc, VerifyOptions{});
    CHECK(r.count(Obligation::Status::UnverifiedClaim) == 1);
    CHECK(!r.anyFail());
}

TEST_CASE("reports are deterministic") {
    OracleDocument doc = loadOracleFile(kDataDir + "/black-d4.gdo");
    VerifyOptions opt;
    opt.level = 1;
    opt.rootCover = {"d4"};
    opt.deterministic = true;
    VerificationReport a = verifyDocument(doc, opt);
    VerificationReport b = verifyDocument(doc, opt);
    CHECK(reportRecords(a) == reportRecords(b));
    CHECK(reportText(a) == reportText(b));
    CHECK(!reportRecords(a).empty());
}

TEST_CASE("joint 1.b4 oracle game is drawn") {
    OracleDocument w = loadOracleFile(kDataDir + "/white-b4.gdo");
    OracleDocument b = loadOracleFile(kDataDir + "/black-b4.gdo");
    JointGameResult g = playJointGame(w, b);
    INFO(statusName(g.status));
    CHECK(g.status.isDraw());
    CHECK(g.sans.size() >= 2);
    CHECK(g.sans[0] == "b4");
}

TEST_CASE("bundle verification at L1 has no failures") {
    VerifyOptions opt;
    opt.level = 1;
    BundleReport r = verifyAllBundled(kDataDir, opt);
    REQUIRE(r.reports.size() == 8);
    CHECK(!r.anyFail());
    bool rootUnion = false, joint = false;
    for (const Obligation& o : r.bundleRecords) {
        if (o.kind == "root-union") {
            rootUnion = true;
            CHECK(o.status == Obligation::Status::Pass);
        }
        if (o.kind == "joint-game") {
            joint = true;
            CHECK(o.status == Obligation::Status::Pass);
        }
    }
    CHECK(rootUnion);
    CHECK(joint);
}

#include "gardner/oracle.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "gardner/notation.hpp"

namespace gardner {

namespace {

struct Token {
    std::string text;
    int line = 0;
    bool isString = false;   // came from "..." quotes
    bool isNewline = false;
};

bool isMoveNumber(const std::string& t) {
    // "1." / "12..." style tokens are allowed and ignored
    size_t i = 0;
    while (i < t.size() && std::isdigit(static_cast<unsigned char>(t[i]))) ++i;
    if (i == 0 || i == t.size()) return false;
    for (size_t j = i; j < t.size(); ++j)
        if (t[j] != '.') return false;
    return true;
}

std::vector<Token> tokenize(const std::string& text) {
    std::vector<Token> out;
    int line = 1;
    size_t i = 0;
    auto newline = [&] {
        if (!out.empty() && !out.back().isNewline)
            out.push_back({"", line, false, true});
        ++line;
    };
    while (i < text.size()) {
        char c = text[i];
        if (c == '\n') { newline(); ++i; continue; }
        if (c == ' ' || c == '\t' || c == '\r') { ++i; continue; }
        if (c == '#') {
            while (i < text.size() && text[i] != '\n') ++i;
            continue;
        }
        if (c == '"') {
            size_t j = text.find('"', i + 1);
            if (j == std::string::npos) throw OracleError("unterminated string", line);
            out.push_back({text.substr(i + 1, j - i - 1), line, true, false});
            i = j + 1;
            continue;
        }
        if (c == '{' || c == '}') {
            out.push_back({std::string(1, c), line, false, false});
            ++i;
            continue;
        }
        size_t j = i;
        while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j])) &&
               text[j] != '{' && text[j] != '}' && text[j] != '#' && text[j] != '"')
            ++j;
        std::string word = text.substr(i, j - i);
        if (!isMoveNumber(word)) out.push_back({word, line, false, false});
        i = j;
    }
    out.push_back({"", line, false, true});
    return out;
}

class Parser {
public:
    Parser(const std::string& text, const std::string& sourceName)
        : tokens_(tokenize(text)) {
        doc_.sourceName = sourceName;
    }

    OracleDocument run() {
        parseHeader();
        std::vector<std::string> path;
        doc_.tree = parseNode(doc_.root, path);
        if (!atEnd()) throw err("trailing content after oracle tree");
        for (const auto& [node, claim] : refs_)
            if (!doc_.variationIds.count(claim))
                throw OracleError("dangling reference to variation '" + claim + "'");
        return std::move(doc_);
    }

private:
    std::vector<Token> tokens_;
    size_t pos_ = 0;
    OracleDocument doc_;
    std::vector<std::pair<const OracleNode*, std::string>> refs_;

    OracleError err(const std::string& msg) const {
        int line = pos_ < tokens_.size() ? tokens_[pos_].line : 0;
        return OracleError(msg, line);
    }

    const Token& peek() {
        while (pos_ < tokens_.size() && tokens_[pos_].isNewline) ++pos_;
        if (pos_ >= tokens_.size()) throw OracleError("unexpected end of input");
        return tokens_[pos_];
    }
    bool atEnd() {
        while (pos_ < tokens_.size() && tokens_[pos_].isNewline) ++pos_;
        return pos_ >= tokens_.size();
    }
    Token take() {
        const Token& t = peek();
        ++pos_;
        return t;
    }
    bool accept(const std::string& word) {
        if (!atEnd() && peek().text == word && !peek().isString) {
            ++pos_;
            return true;
        }
        return false;
    }
    void expect(const std::string& word) {
        if (!accept(word)) throw err("expected '" + word + "', got '" + peek().text + "'");
    }
    // Remaining word tokens on the current physical line, stopping at braces.
    std::vector<Token> restOfLine() {
        std::vector<Token> out;
        while (pos_ < tokens_.size() && !tokens_[pos_].isNewline &&
               !(!tokens_[pos_].isString &&
                 (tokens_[pos_].text == "{" || tokens_[pos_].text == "}")))
            out.push_back(tokens_[pos_++]);
        return out;
    }

    void parseHeader() {
        expect("oracle");
        Token side = take();
        if (side.text == "white") doc_.side = Color::White;
        else if (side.text == "black") doc_.side = Color::Black;
        else throw err("oracle side must be 'white' or 'black'");
        doc_.root = Position::initial();
        if (accept("root")) {
            std::string fen;
            for (const Token& t : restOfLine()) {
                if (!fen.empty()) fen += ' ';
                fen += t.text;
            }
            try {
                doc_.root = parseFEN(fen);
            } catch (const FenError& e) {
                throw err(std::string("bad root FEN: ") + e.what());
            }
        }
    }

    Move playSAN(const Position& p, const Token& t, const std::vector<std::string>& path) {
        try {
            return parseSAN(p, t.text);
        } catch (const SanError& e) {
            std::string at;
            for (const std::string& s : path) at += (at.empty() ? "" : " ") + s;
            throw OracleError("illegal move '" + t.text + "' (after: " +
                                  (at.empty() ? "root" : at) + "): " + e.what(),
                              t.line);
        }
    }

    Claim parseClaim() {
        Token t = take();
        Claim c;
        auto color = [&] {
            Token s = take();
            if (s.text == "white") return Color::White;
            if (s.text == "black") return Color::Black;
            throw err("expected 'white' or 'black'");
        };
        auto text = [&] {
            Token s = take();
            if (!s.isString) throw err("expected quoted string");
            return s.text;
        };
        if (t.text == "mate") {
            c.kind = Claim::Kind::MateDefender;
            c.color = color();
            Token n = take();
            try {
                c.moves = std::stoi(n.text);
            } catch (...) {
                throw err("expected move count after 'mate'");
            }
            if (c.moves < 1) throw err("mate move count must be >= 1");
        } else if (t.text == "checkmate") {
            c.kind = Claim::Kind::ImmediateCheckmate;
        } else if (t.text == "draw") {
            c.kind = Claim::Kind::DrawLeaf;
            c.text = text();
        } else if (t.text == "cannotwin") {
            c.kind = Claim::Kind::CannotWin;
            c.color = color();
        } else if (t.text == "ref") {
            c.kind = Claim::Kind::TranspositionRef;
            c.text = take().text;
        } else if (t.text == "unverified") {
            c.kind = Claim::Kind::Unverified;
            c.text = text();
        } else {
            throw OracleError("expected a claim, got '" + t.text + "'", t.line);
        }
        return c;
    }

    void parseJustifications(OracleNode* leaf, const Position& at,
                             const std::vector<std::string>& path) {
        while (!atEnd() && peek().text == "justify" && !peek().isString) {
            ++pos_;
            Position p = at;
            std::vector<std::string> line = path;
            std::vector<std::string> sans;
            for (const Token& t : restOfLine()) {
                Move m = playSAN(p, t, line);
                std::string san = formatSAN(p, m);
                sans.push_back(san);
                line.push_back(san);
                p = p.apply(m);
            }
            leaf->justifications.push_back(std::move(sans));
        }
    }

    std::unique_ptr<OracleNode> parseNode(const Position& at, std::vector<std::string>& path) {
        auto node = std::make_unique<OracleNode>();
        if (accept("id")) {
            Token id = take();
            node->variationId = id.text;
            if (!doc_.variationIds.emplace(id.text, node.get()).second)
                throw OracleError("duplicate variation id '" + id.text + "'", id.line);
        }
        const Token& head = peek();
        if (head.text == "move" && !head.isString) {
            ++pos_;
            if (at.sideToMove() != doc_.side)
                throw err("'move' while the opponent is to move");
            node->type = OracleNode::Type::OurMove;
            Token san = take();
            Move m = playSAN(at, san, path);
            node->san = formatSAN(at, m);
            path.push_back(node->san);
            node->child = parseNode(at.apply(m), path);
            path.pop_back();
        } else if (head.text == "opponent" && !head.isString) {
            ++pos_;
            if (at.sideToMove() == doc_.side)
                throw err("'opponent' while our side is to move");
            node->type = OracleNode::Type::Opponent;
            expect("{");
            while (!accept("}")) {
                if (accept("other")) {
                    expect("=>");
                    if (node->defaultClaim) throw err("multiple 'other' claims in one block");
                    node->defaultClaim = parseClaim();
                    continue;
                }
                Token san = take();
                Move m = playSAN(at, san, path);
                std::string canon = formatSAN(at, m);
                for (const auto& b : node->branches)
                    if (b.san == canon)
                        throw OracleError("duplicate branch '" + canon + "'", san.line);
                path.push_back(canon);
                Position next = at.apply(m);
                std::unique_ptr<OracleNode> sub;
                if (accept("=>")) {
                    sub = std::make_unique<OracleNode>();
                    sub->type = OracleNode::Type::Leaf;
                    sub->claim = parseClaim();
                    if (sub->claim.kind == Claim::Kind::TranspositionRef)
                        refs_.emplace_back(sub.get(), sub->claim.text);
                    parseJustifications(sub.get(), next, path);
                    doc_.nodePath[sub.get()] = path;
                } else if (accept("->")) {
                    expect("{");
                    sub = parseNode(next, path);
                    expect("}");
                } else {
                    throw err("expected '=>' or '->' after branch move");
                }
                path.pop_back();
                node->branches.push_back({canon, std::move(sub)});
            }
        } else {
            node->type = OracleNode::Type::Leaf;
            node->claim = parseClaim();
            if (node->claim.kind == Claim::Kind::TranspositionRef)
                refs_.emplace_back(node.get(), node->claim.text);
            parseJustifications(node.get(), at, path);
        }
        doc_.nodePath[node.get()] = path;
        return node;
    }
};

std::string quoted(const std::string& s) { return '"' + s + '"'; }

void printNode(const OracleNode* n, int depth, std::ostringstream& out) {
    std::string ind(2 * depth, ' ');
    if (n->variationId) out << ind << "id " << *n->variationId << '\n';
    switch (n->type) {
        case OracleNode::Type::OurMove:
            out << ind << "move " << n->san << '\n';
            printNode(n->child.get(), depth, out);
            break;
        case OracleNode::Type::Opponent:
            out << ind << "opponent {\n";
            for (const auto& b : n->branches) {
                const OracleNode* sub = b.node.get();
                if (sub->type == OracleNode::Type::Leaf && !sub->variationId) {
                    out << ind << "  " << b.san << " => " << claimToString(sub->claim) << '\n';
                    for (const auto& line : sub->justifications) {
                        out << ind << "    justify";
                        for (const std::string& s : line) out << ' ' << s;
                        out << '\n';
                    }
                } else {
                    out << ind << "  " << b.san << " -> {\n";
                    printNode(sub, depth + 2, out);
                    out << ind << "  }\n";
                }
            }
            if (n->defaultClaim)
                out << ind << "  other => " << claimToString(*n->defaultClaim) << '\n';
            out << ind << "}\n";
            break;
        case OracleNode::Type::Leaf:
            out << ind << claimToString(n->claim) << '\n';
            for (const auto& line : n->justifications) {
                out << ind << "  justify";
                for (const std::string& s : line) out << ' ' << s;
                out << '\n';
            }
            break;
    }
}

void collectLeaves(const OracleNode* n, std::vector<const OracleNode*>& out) {
    switch (n->type) {
        case OracleNode::Type::OurMove:
            collectLeaves(n->child.get(), out);
            break;
        case OracleNode::Type::Opponent:
            for (const auto& b : n->branches) collectLeaves(b.node.get(), out);
            break;
        case OracleNode::Type::Leaf:
            out.push_back(n);
            break;
    }
}

}  // namespace

std::string claimToString(const Claim& c) {
    switch (c.kind) {
        case Claim::Kind::MateDefender:
            return std::string("mate ") + (c.color == Color::White ? "white" : "black") + ' ' +
                   std::to_string(c.moves);
        case Claim::Kind::ImmediateCheckmate:
            return "checkmate";
        case Claim::Kind::DrawLeaf:
            return "draw " + quoted(c.text);
        case Claim::Kind::CannotWin:
            return std::string("cannotwin ") + (c.color == Color::White ? "white" : "black");
        case Claim::Kind::TranspositionRef:
            return "ref " + c.text;
        case Claim::Kind::Unverified:
            return "unverified " + quoted(c.text);
    }
    return "?";
}

Position OracleDocument::positionAt(const OracleNode* node) const {
    auto it = nodePath.find(node);
    if (it == nodePath.end()) throw std::logic_error("node not in document");
    Position p = root;
    for (const std::string& san : it->second) p = p.apply(parseSAN(p, san));
    return p;
}

OracleDocument parseOracle(const std::string& text, const std::string& sourceName) {
    try {
        return Parser(text, sourceName).run();
    } catch (OracleError& e) {
        throw OracleError(sourceName + ": " + e.what());
    }
}

OracleDocument loadOracleFile(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw OracleError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parseOracle(buf.str(), path);
}

std::string printOracle(const OracleDocument& doc) {
    std::ostringstream out;
    out << "oracle " << (doc.side == Color::White ? "white" : "black") << '\n';
    if (!(doc.root == Position::initial())) out << "root " << formatFEN(doc.root) << '\n';
    out << '\n';
    printNode(doc.tree.get(), 0, out);
    return out.str();
}

std::string exportPGN(const OracleDocument& doc) {
    std::vector<const OracleNode*> leaves;
    collectLeaves(doc.tree.get(), leaves);
    std::ostringstream out;
    int round = 0;
    for (const OracleNode* leaf : leaves) {
        ++round;
        const std::vector<std::string>& path = doc.nodePath.at(leaf);
        Position end = doc.positionAt(leaf);

        std::string result = "*";
        switch (leaf->claim.kind) {
            case Claim::Kind::MateDefender:
                result = leaf->claim.color == Color::Black ? "1-0" : "0-1";
                break;
            case Claim::Kind::ImmediateCheckmate:
                result = end.sideToMove() == Color::Black ? "1-0" : "0-1";
                break;
            case Claim::Kind::DrawLeaf:
                result = "1/2-1/2";
                break;
            default:
                break;
        }

        out << "[Event \"Gardner 5x5 oracle\"]\n";
        out << "[Site \"-\"]\n";
        out << "[Date \"????.??.??\"]\n";
        out << "[Round \"" << round << "\"]\n";
        out << "[White \"" << (doc.side == Color::White ? "Oracle" : "Opponent") << "\"]\n";
        out << "[Black \"" << (doc.side == Color::Black ? "Oracle" : "Opponent") << "\"]\n";
        if (leaf->variationId) out << "[Variation \"" << *leaf->variationId << "\"]\n";
        if (!(doc.root == Position::initial())) {
            out << "[SetUp \"1\"]\n";
            out << "[FEN \"" << formatFEN(doc.root) << "\"]\n";
        }
        out << "[Result \"" << result << "\"]\n\n";

        Position p = doc.root;
        std::string text;
        bool needNumber = true;
        for (const std::string& san : path) {
            if (!text.empty()) text += ' ';
            if (p.sideToMove() == Color::White) {
                text += std::to_string(p.fullmoveNumber()) + ". " + san;
                needNumber = false;
            } else {
                if (needNumber) text += std::to_string(p.fullmoveNumber()) + "... ";
                text += san;
                needNumber = true;
            }
            p = p.apply(parseSAN(p, san));
        }
        text += (text.empty() ? "" : " ") + std::string("{") + claimToString(leaf->claim) + "}";
        for (const auto& line : leaf->justifications) {
            text += " {justify:";
            for (const std::string& s : line) text += ' ' + s;
            text += '}';
        }
        text += ' ' + result;
        out << text << "\n\n";
    }
    return out.str();
}

namespace {

void reindexNode(OracleDocument& doc, const OracleNode* n, const Position& at,
                 std::vector<std::string>& path) {
    if (n->variationId) doc.variationIds[*n->variationId] = n;
    doc.nodePath[n] = path;
    switch (n->type) {
        case OracleNode::Type::OurMove: {
            Move m = parseSAN(at, n->san);
            path.push_back(n->san);
            reindexNode(doc, n->child.get(), at.apply(m), path);
            path.pop_back();
            break;
        }
        case OracleNode::Type::Opponent:
            for (const auto& b : n->branches) {
                Move m = parseSAN(at, b.san);
                path.push_back(b.san);
                reindexNode(doc, b.node.get(), at.apply(m), path);
                path.pop_back();
            }
            break;
        case OracleNode::Type::Leaf:
            break;
    }
}

}  // namespace

void reindexDocument(OracleDocument& doc) {
    doc.variationIds.clear();
    doc.nodePath.clear();
    std::vector<std::string> path;
    reindexNode(doc, doc.tree.get(), doc.root, path);
}

std::pair<Position, const OracleNode*> resolveVariation(const OracleDocument& doc,
                                                        const std::string& id) {
    auto it = doc.variationIds.find(id);
    if (it == doc.variationIds.end())
        throw UnknownVariationError("unknown variation '" + id + "' in " + doc.sourceName);
    return {doc.positionAt(it->second), it->second};
}

}  // namespace gardner

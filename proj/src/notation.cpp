#include "gardner/notation.hpp"

#include <cctype>
#include <sstream>

namespace gardner {

namespace {

std::optional<PieceKind> kindFromChar(char c) {
    switch (c) {
        case 'P': return PieceKind::Pawn;
        case 'N': return PieceKind::Knight;
        case 'B': return PieceKind::Bishop;
        case 'R': return PieceKind::Rook;
        case 'Q': return PieceKind::Queen;
        case 'K': return PieceKind::King;
    }
    return std::nullopt;
}

PieceKind moverKind(const Position& p, const Move& m) {
    auto piece = p.pieceAt(m.from);
    return piece ? piece->kind : PieceKind::Pawn;
}

}  // namespace

char pieceChar(PieceKind k) {
    return "PNBRQK"[static_cast<int>(k)];
}

std::string moveUCI(const Move& m) {
    std::string s = m.from.name() + m.to.name();
    if (m.promotion) s += static_cast<char>(std::tolower(pieceChar(*m.promotion)));
    return s;
}

Move parseSAN(const Position& p, const std::string& text) {
    std::string s = text;
    // strip annotations and check/mate marks
    while (!s.empty() && (s.back() == '+' || s.back() == '#' || s.back() == '!' || s.back() == '?'))
        s.pop_back();
    if (s.empty()) throw SanError("empty SAN token");

    PieceKind kind = PieceKind::Pawn;
    std::optional<PieceKind> promotion;
    size_t i = 0;
    if (auto k = kindFromChar(s[0]); k && *k != PieceKind::Pawn) {
        kind = *k;
        i = 1;
    }
    // promotion suffix
    size_t end = s.size();
    if (end >= 2 && s[end - 2] == '=') {
        auto pk = kindFromChar(s[end - 1]);
        if (!pk || *pk == PieceKind::Pawn || *pk == PieceKind::King)
            throw SanError("bad promotion in '" + text + "'");
        promotion = pk;
        end -= 2;
    }
    std::string body = s.substr(i, end - i);

    bool capture = body.find('x') != std::string::npos;
    if (capture) body.erase(body.find('x'), 1);

    if (body.size() < 2) throw SanError("bad SAN '" + text + "'");
    auto dest = Square::parse(body.substr(body.size() - 2));
    if (!dest) throw SanError("bad destination in '" + text + "'");
    std::string disamb = body.substr(0, body.size() - 2);
    int disFile = -1, disRank = -1;
    for (char c : disamb) {
        if (c >= 'b' && c <= 'f') disFile = c - 'b';
        else if (c >= '2' && c <= '6') disRank = c - '2';
        else throw SanError("bad disambiguation in '" + text + "'");
    }
    if (kind == PieceKind::Pawn && capture && disFile < 0)
        throw SanError("pawn capture needs source file in '" + text + "'");

    MoveList candidates;
    for (const Move& m : p.legalMoves()) {
        if (moverKind(p, m) != kind) continue;
        if (!(m.to == *dest)) continue;
        if (m.isCapture != capture) continue;
        if (disFile >= 0 && m.from.file() != disFile) continue;
        if (disRank >= 0 && m.from.rank() != disRank) continue;
        if (promotion.has_value() != m.promotion.has_value()) continue;
        if (promotion && m.promotion != promotion) continue;
        candidates.push_back(m);
    }
    if (candidates.empty()) throw UnmatchedSanError("no legal move matches '" + text + "'");
    if (candidates.size() > 1) throw AmbiguousSanError("ambiguous SAN '" + text + "'");
    return candidates[0];
}

std::string formatSAN(const Position& p, const Move& m) {
    PieceKind kind = moverKind(p, m);
    std::string s;
    if (kind == PieceKind::Pawn) {
        if (m.isCapture) {
            s += static_cast<char>('b' + m.from.file());
            s += 'x';
        }
        s += m.to.name();
        if (m.promotion) {
            s += '=';
            s += pieceChar(*m.promotion);
        }
    } else {
        s += pieceChar(kind);
        // minimal disambiguation among same-kind moves to the same square
        bool needFile = false, needRank = false, clash = false;
        for (const Move& other : p.legalMoves()) {
            if (other == m || !(other.to == m.to)) continue;
            if (moverKind(p, other) != kind || other.from == m.from) continue;
            clash = true;
            if (other.from.file() == m.from.file()) needRank = true;
            if (other.from.rank() == m.from.rank()) needFile = true;
        }
        if (clash && !needFile && !needRank) needFile = true;
        if (needFile) s += static_cast<char>('b' + m.from.file());
        if (needRank) s += static_cast<char>('2' + m.from.rank());
        if (m.isCapture) s += 'x';
        s += m.to.name();
    }
    Position next = p.apply(m);
    if (next.inCheck(next.sideToMove()))
        s += next.legalMoves().empty() ? '#' : '+';
    return s;
}

Position parseFEN(const std::string& text) {
    std::istringstream in(text);
    std::string boardPart, stmPart;
    int halfmove, fullmove;
    if (!(in >> boardPart >> stmPart >> halfmove >> fullmove))
        throw FenError("expected 4 fields in FEN '" + text + "'");
    std::string rest;
    if (in >> rest) throw FenError("trailing data in FEN '" + text + "'");

    PositionBuilder b;
    int rank = 4, file = 0;
    for (char c : boardPart) {
        if (c == '/') {
            if (file != 5) throw FenError("short rank in FEN '" + text + "'");
            --rank;
            file = 0;
            if (rank < 0) throw FenError("too many ranks in FEN '" + text + "'");
            continue;
        }
        if (c >= '1' && c <= '5') {
            file += c - '0';
            if (file > 5) throw FenError("rank overflow in FEN '" + text + "'");
            continue;
        }
        auto kind = kindFromChar(static_cast<char>(std::toupper(c)));
        if (!kind || file >= 5) throw FenError("bad board character in FEN '" + text + "'");
        Color color = std::isupper(c) ? Color::White : Color::Black;
        b.put(Square(file, rank), {color, *kind});
        ++file;
    }
    if (rank != 0 || file != 5) throw FenError("wrong board shape in FEN '" + text + "'");

    if (stmPart == "w") b.sideToMove(Color::White);
    else if (stmPart == "b") b.sideToMove(Color::Black);
    else throw FenError("bad side-to-move in FEN '" + text + "'");
    if (halfmove < 0 || fullmove < 1) throw FenError("bad clocks in FEN '" + text + "'");
    b.clocks(halfmove, fullmove);
    return b.build();
}

std::string formatFEN(const Position& p) {
    std::string s;
    for (int rank = 4; rank >= 0; --rank) {
        int empty = 0;
        for (int file = 0; file < 5; ++file) {
            auto piece = p.pieceAt(Square(file, rank));
            if (!piece) {
                ++empty;
                continue;
            }
            if (empty) {
                s += static_cast<char>('0' + empty);
                empty = 0;
            }
            char c = pieceChar(piece->kind);
            s += piece->color == Color::White ? c : static_cast<char>(std::tolower(c));
        }
        if (empty) s += static_cast<char>('0' + empty);
        if (rank) s += '/';
    }
    s += p.sideToMove() == Color::White ? " w " : " b ";
    s += std::to_string(p.halfmoveClock()) + " " + std::to_string(p.fullmoveNumber());
    return s;
}

}  // namespace gardner

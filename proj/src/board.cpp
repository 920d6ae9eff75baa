#include "gardner/board.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

#include "gardner/notation.hpp"

namespace gardner {

namespace {

constexpr int fileOf(int idx) { return idx % 5; }
constexpr int rankOf(int idx) { return idx / 5; }

struct AttackTables {
    std::array<Bitboard, kNumSquares> knight{};
    std::array<Bitboard, kNumSquares> king{};
    std::array<Bitboard, kNumSquares> pawnAtt[2]{};   // capture targets, indexed by color
    // rays[sq][dir] = squares outward from sq, nearest first
    std::array<std::array<std::vector<int>, 8>, kNumSquares> rays{};

    AttackTables() {
        constexpr int knightD[8][2] = {{1, 2},  {2, 1},  {2, -1}, {1, -2},
                                       {-1, -2}, {-2, -1}, {-2, 1}, {-1, 2}};
        constexpr int kingD[8][2] = {{1, 0},  {1, 1},  {0, 1},  {-1, 1},
                                     {-1, 0}, {-1, -1}, {0, -1}, {1, -1}};
        // dirs 0..3 bishop, 4..7 rook
        constexpr int rayD[8][2] = {{1, 1},  {1, -1}, {-1, 1}, {-1, -1},
                                    {1, 0},  {-1, 0}, {0, 1},  {0, -1}};
        for (int sq = 0; sq < kNumSquares; ++sq) {
            int f = fileOf(sq), r = rankOf(sq);
            for (auto& d : knightD) {
                int nf = f + d[0], nr = r + d[1];
                if (nf >= 0 && nf < 5 && nr >= 0 && nr < 5)
                    knight[sq] |= 1u << (nr * 5 + nf);
            }
            for (auto& d : kingD) {
                int nf = f + d[0], nr = r + d[1];
                if (nf >= 0 && nf < 5 && nr >= 0 && nr < 5)
                    king[sq] |= 1u << (nr * 5 + nf);
            }
            for (int dir = 0; dir < 8; ++dir) {
                int nf = f + rayD[dir][0], nr = r + rayD[dir][1];
                while (nf >= 0 && nf < 5 && nr >= 0 && nr < 5) {
                    rays[sq][dir].push_back(nr * 5 + nf);
                    nf += rayD[dir][0];
                    nr += rayD[dir][1];
                }
            }
            for (int c = 0; c < 2; ++c) {
                int dr = (c == 0) ? 1 : -1;
                for (int df : {-1, 1}) {
                    int nf = f + df, nr = r + dr;
                    if (nf >= 0 && nf < 5 && nr >= 0 && nr < 5)
                        pawnAtt[c][sq] |= 1u << (nr * 5 + nf);
                }
            }
        }
    }
};

const AttackTables& tables() {
    static const AttackTables t;
    return t;
}

uint64_t splitmix64(uint64_t& x) {
    x += 0x9e3779b97f4a7c15ull;
    uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

struct ZobristKeys {
    uint64_t piece[2][6][kNumSquares];
    uint64_t blackToMove;

    ZobristKeys() {
        uint64_t seed = 0x6761726472e57235ull;
        for (auto& c : piece)
            for (auto& k : c)
                for (auto& sq : k) sq = splitmix64(seed);
        blackToMove = splitmix64(seed);
    }
};

const ZobristKeys& zobrist() {
    static const ZobristKeys z;
    return z;
}

int promotionRank(Color c) { return c == Color::White ? 4 : 0; }

}  // namespace

std::string Square::name() const {
    std::string s;
    s += static_cast<char>('b' + file());
    s += static_cast<char>('2' + rank());
    return s;
}

std::optional<Square> Square::parse(const std::string& text) {
    if (text.size() != 2) return std::nullopt;
    int f = text[0] - 'b', r = text[1] - '2';
    if (f < 0 || f >= 5 || r < 0 || r >= 5) return std::nullopt;
    return Square(f, r);
}

std::string statusName(const GameStatus& st) {
    switch (st.kind) {
        case GameStatusKind::Ongoing: return "ongoing";
        case GameStatusKind::Checkmate:
            return st.loser == Color::White ? "checkmate (white loses)"
                                            : "checkmate (black loses)";
        case GameStatusKind::Stalemate: return "stalemate";
        case GameStatusKind::DrawByRepetition: return "draw by repetition";
        case GameStatusKind::DrawByHalfmoveRule: return "draw by halfmove rule";
        case GameStatusKind::DrawInsufficientMaterial: return "draw, insufficient material";
    }
    return "?";
}

Position::Position() = default;

Position Position::initial() {
    PositionBuilder b;
    const PieceKind back[5] = {PieceKind::Rook, PieceKind::Knight, PieceKind::Bishop,
                               PieceKind::Queen, PieceKind::King};
    for (int f = 0; f < 5; ++f) {
        b.put(Square(f, 0), {Color::White, back[f]});
        b.put(Square(f, 1), {Color::White, PieceKind::Pawn});
        b.put(Square(f, 3), {Color::Black, PieceKind::Pawn});
        b.put(Square(f, 4), {Color::Black, back[f]});
    }
    return b.build();
}

std::optional<Piece> Position::pieceAt(Square sq) const {
    Bitboard bit = sq.bit();
    for (int c = 0; c < 2; ++c)
        for (int k = 0; k < 6; ++k)
            if (bb_[c][k] & bit)
                return Piece{static_cast<Color>(c), static_cast<PieceKind>(k)};
    return std::nullopt;
}

Bitboard Position::occupied(Color c) const {
    Bitboard o = 0;
    for (int k = 0; k < 6; ++k) o |= bb_[static_cast<int>(c)][k];
    return o;
}

Bitboard Position::occupied() const { return occupied(Color::White) | occupied(Color::Black); }

Square Position::kingSquare(Color c) const {
    Bitboard k = pieces(c, PieceKind::King);
    return k ? Square::fromIndex(std::countr_zero(k)) : Square{};
}

bool Position::isAttacked(Square sq, Color by) const {
    const auto& t = tables();
    int i = sq.index;
    int b = static_cast<int>(by);
    // A pawn of color `by` attacks sq iff sq is a pawn-attack target *from* the
    // pawn's square; equivalently the reverse table of the other color.
    if (t.pawnAtt[1 - b][i] & pieces(by, PieceKind::Pawn)) return true;
    if (t.knight[i] & pieces(by, PieceKind::Knight)) return true;
    if (t.king[i] & pieces(by, PieceKind::King)) return true;
    Bitboard occ = occupied();
    Bitboard diag = pieces(by, PieceKind::Bishop) | pieces(by, PieceKind::Queen);
    Bitboard orth = pieces(by, PieceKind::Rook) | pieces(by, PieceKind::Queen);
    for (int dir = 0; dir < 8; ++dir) {
        Bitboard sliders = dir < 4 ? diag : orth;
        if (!sliders) continue;
        for (int s : t.rays[i][dir]) {
            Bitboard bit = 1u << s;
            if (sliders & bit) return true;
            if (occ & bit) break;
        }
    }
    return false;
}

bool Position::inCheck(Color c) const {
    Square k = kingSquare(c);
    return k.valid() && isAttacked(k, opposite(c));
}

namespace {

void pushPawnMove(MoveList& out, Square from, Square to, bool capture, Color us) {
    if (to.rank() == promotionRank(us)) {
        for (PieceKind pk : {PieceKind::Queen, PieceKind::Rook, PieceKind::Bishop, PieceKind::Knight})
            out.push_back({from, to, pk, capture});
    } else {
        out.push_back({from, to, std::nullopt, capture});
    }
}

}  // namespace

MoveList Position::legalMoves() const {
    const auto& t = tables();
    Color us = stm_;
    Color them = opposite(us);
    Bitboard own = occupied(us);
    Bitboard enemy = occupied(them);
    Bitboard occ = own | enemy;

    MoveList pawnMoves, pieceMoves[5];  // N,B,R,Q,K

    Bitboard pawns = pieces(us, PieceKind::Pawn);
    int forward = us == Color::White ? 5 : -5;
    for (Bitboard b = pawns; b; b &= b - 1) {
        int from = std::countr_zero(b);
        int to = from + forward;
        if (to >= 0 && to < kNumSquares && !(occ & (1u << to)))
            pushPawnMove(pawnMoves, Square::fromIndex(from), Square::fromIndex(to), false, us);
        Bitboard caps = t.pawnAtt[static_cast<int>(us)][from] & enemy;
        for (Bitboard cb = caps; cb; cb &= cb - 1) {
            int cto = std::countr_zero(cb);
            pushPawnMove(pawnMoves, Square::fromIndex(from), Square::fromIndex(cto), true, us);
        }
    }

    auto genJumper = [&](PieceKind kind, const std::array<Bitboard, kNumSquares>& att, MoveList& out) {
        for (Bitboard b = pieces(us, kind); b; b &= b - 1) {
            int from = std::countr_zero(b);
            Bitboard targets = att[from] & ~own;
            for (Bitboard tb = targets; tb; tb &= tb - 1) {
                int to = std::countr_zero(tb);
                out.push_back({Square::fromIndex(from), Square::fromIndex(to), std::nullopt,
                               (enemy >> to) & 1u ? true : false});
            }
        }
    };
    auto genSlider = [&](PieceKind kind, int dirBegin, int dirEnd, MoveList& out) {
        for (Bitboard b = pieces(us, kind); b; b &= b - 1) {
            int from = std::countr_zero(b);
            for (int dir = dirBegin; dir < dirEnd; ++dir) {
                for (int to : t.rays[from][dir]) {
                    Bitboard bit = 1u << to;
                    if (own & bit) break;
                    out.push_back({Square::fromIndex(from), Square::fromIndex(to), std::nullopt,
                                   (enemy & bit) != 0});
                    if (enemy & bit) break;
                }
            }
        }
    };

    genJumper(PieceKind::Knight, t.knight, pieceMoves[0]);
    genSlider(PieceKind::Bishop, 0, 4, pieceMoves[1]);
    genSlider(PieceKind::Rook, 4, 8, pieceMoves[2]);
    genSlider(PieceKind::Queen, 0, 8, pieceMoves[3]);
    genJumper(PieceKind::King, t.king, pieceMoves[4]);

    // Deterministic enumeration: pawns by (from file, to index), then pieces in
    // kind order N,B,R,Q,K, each by (from index, to index).
    auto key = [](const Move& m) {
        return std::tuple(m.from.index, m.to.index,
                          m.promotion ? static_cast<int>(*m.promotion) : 9);
    };
    std::stable_sort(pawnMoves.begin(), pawnMoves.end(), [&](const Move& a, const Move& b) {
        return std::tuple(a.from.file(), a.to.index,
                          a.promotion ? static_cast<int>(*a.promotion) : 9) <
               std::tuple(b.from.file(), b.to.index,
                          b.promotion ? static_cast<int>(*b.promotion) : 9);
    });
    MoveList all = std::move(pawnMoves);
    for (auto& pm : pieceMoves) {
        std::stable_sort(pm.begin(), pm.end(),
                         [&](const Move& a, const Move& b) { return key(a) < key(b); });
        all.insert(all.end(), pm.begin(), pm.end());
    }

    // Keep only moves that leave our king safe.
    MoveList legal;
    legal.reserve(all.size());
    for (const Move& m : all) {
        Position next = appliedUnchecked(m);
        if (!next.inCheck(us)) legal.push_back(m);
    }
    return legal;
}

bool Position::isLegal(const Move& m) const {
    MoveList moves = legalMoves();
    return std::find(moves.begin(), moves.end(), m) != moves.end();
}

Position Position::appliedUnchecked(const Move& m) const {
    Position next = *this;
    next.applyInPlace(m);
    return next;
}

void Position::applyInPlace(const Move& m) {
    const auto& z = zobrist();
    Color us = stm_;
    Color them = opposite(us);
    int u = static_cast<int>(us), e = static_cast<int>(them);

    int fromKind = -1;
    for (int k = 0; k < 6; ++k)
        if (bb_[u][k] & m.from.bit()) { fromKind = k; break; }
    if (fromKind < 0) throw IllegalMoveError("no piece on " + m.from.name());

    bool capture = false;
    for (int k = 0; k < 6; ++k) {
        if (bb_[e][k] & m.to.bit()) {
            bb_[e][k] &= ~m.to.bit();
            hash_ ^= z.piece[e][k][m.to.index];
            capture = true;
            break;
        }
    }

    bb_[u][fromKind] &= ~m.from.bit();
    hash_ ^= z.piece[u][fromKind][m.from.index];
    int toKind = m.promotion ? static_cast<int>(*m.promotion) : fromKind;
    bb_[u][toKind] |= m.to.bit();
    hash_ ^= z.piece[u][toKind][m.to.index];

    if (fromKind == static_cast<int>(PieceKind::Pawn) || capture)
        halfmove_ = 0;
    else
        ++halfmove_;
    if (us == Color::Black) ++fullmove_;
    stm_ = them;
    hash_ ^= z.blackToMove;
}

Position Position::apply(const Move& m) const {
    if (!isLegal(m)) throw IllegalMoveError("illegal move from " + m.from.name() + " to " + m.to.name());
    Position next = *this;
    next.applyInPlace(m);
    return next;
}

GameStatus Position::basicStatus() const {
    if (legalMoves().empty()) {
        if (inCheck(stm_)) return {GameStatusKind::Checkmate, stm_};
        return {GameStatusKind::Stalemate};
    }
    // Insufficient material: K vs K, K+B vs K, K+N vs K.
    Bitboard nonKing[2];
    for (int c = 0; c < 2; ++c)
        nonKing[c] = occupied(static_cast<Color>(c)) & ~bb_[c][static_cast<int>(PieceKind::King)];
    int extra = std::popcount(nonKing[0]) + std::popcount(nonKing[1]);
    if (extra == 0) return {GameStatusKind::DrawInsufficientMaterial};
    if (extra == 1) {
        Bitboard minors = bb_[0][static_cast<int>(PieceKind::Bishop)] |
                          bb_[0][static_cast<int>(PieceKind::Knight)] |
                          bb_[1][static_cast<int>(PieceKind::Bishop)] |
                          bb_[1][static_cast<int>(PieceKind::Knight)];
        if ((nonKing[0] | nonKing[1]) == minors)
            return {GameStatusKind::DrawInsufficientMaterial};
    }
    return {GameStatusKind::Ongoing};
}

GameStatus Position::status(const std::vector<uint64_t>& priorHashes,
                            const RuleProfile& rules) const {
    GameStatus st = basicStatus();
    if (st.kind != GameStatusKind::Ongoing) return st;
    int count = 1;
    for (uint64_t h : priorHashes)
        if (h == hash_) ++count;
    if (count >= rules.repetitionThreshold) return {GameStatusKind::DrawByRepetition};
    if (rules.halfmovePlies > 0 && halfmove_ >= rules.halfmovePlies)
        return {GameStatusKind::DrawByHalfmoveRule};
    return {GameStatusKind::Ongoing};
}

Position Position::colorFlipped() const {
    Position out;
    for (int c = 0; c < 2; ++c)
        for (int k = 0; k < 6; ++k)
            for (Bitboard b = bb_[c][k]; b; b &= b - 1) {
                int sq = std::countr_zero(b);
                out.bb_[1 - c][k] |= 1u << (24 - sq);
            }
    out.stm_ = opposite(stm_);
    out.halfmove_ = halfmove_;
    out.fullmove_ = fullmove_;
    out.recomputeHash();
    return out;
}

bool Position::sameBoard(const Position& other) const {
    for (int c = 0; c < 2; ++c)
        for (int k = 0; k < 6; ++k)
            if (bb_[c][k] != other.bb_[c][k]) return false;
    return stm_ == other.stm_;
}

bool Position::operator==(const Position& other) const {
    return sameBoard(other) && halfmove_ == other.halfmove_ && fullmove_ == other.fullmove_;
}

std::optional<std::string> Position::invariantViolation() const {
    for (int c = 0; c < 2; ++c) {
        Color color = static_cast<Color>(c);
        if (std::popcount(bb_[c][static_cast<int>(PieceKind::King)]) != 1)
            return "each side must have exactly one king";
        if (std::popcount(bb_[c][static_cast<int>(PieceKind::Pawn)]) > 5)
            return "more than 5 pawns on one side";
        if (std::popcount(occupied(color)) > 10)
            return "more than 10 pieces on one side";
        int promo = promotionRank(color);
        for (Bitboard b = bb_[c][static_cast<int>(PieceKind::Pawn)]; b; b &= b - 1)
            if (rankOf(std::countr_zero(b)) == promo)
                return "pawn on promotion rank";
    }
    Square wk = kingSquare(Color::White), bk = kingSquare(Color::Black);
    if (tables().king[wk.index] & bk.bit()) return "kings adjacent";
    if (inCheck(opposite(stm_))) return "side not to move is in check";
    Bitboard all = 0;
    for (int c = 0; c < 2; ++c)
        for (int k = 0; k < 6; ++k) {
            if (bb_[c][k] & all) return "two pieces on one square";
            all |= bb_[c][k];
        }
    return std::nullopt;
}

void Position::recomputeHash() {
    const auto& z = zobrist();
    hash_ = stm_ == Color::Black ? z.blackToMove : 0;
    for (int c = 0; c < 2; ++c)
        for (int k = 0; k < 6; ++k)
            for (Bitboard b = bb_[c][k]; b; b &= b - 1)
                hash_ ^= z.piece[c][k][std::countr_zero(b)];
}

PositionBuilder& PositionBuilder::put(Square sq, Piece p) {
    pos_.bb_[static_cast<int>(p.color)][static_cast<int>(p.kind)] |= sq.bit();
    return *this;
}

PositionBuilder& PositionBuilder::sideToMove(Color c) {
    pos_.stm_ = c;
    return *this;
}

PositionBuilder& PositionBuilder::clocks(int halfmove, int fullmove) {
    pos_.halfmove_ = halfmove;
    pos_.fullmove_ = fullmove;
    return *this;
}

Position PositionBuilder::build(bool relaxed) const {
    Position p = pos_;
    p.recomputeHash();
    if (!relaxed)
        if (auto msg = p.invariantViolation())
            throw FenError("invalid position: " + *msg);
    return p;
}

uint64_t perft(const Position& p, int depth) {
    if (depth <= 0) return 1;
    MoveList moves = p.legalMoves();
    if (depth == 1) return moves.size();
    uint64_t total = 0;
    for (const Move& m : moves) {
        Position next = p;
        next.applyInPlace(m);
        total += perft(next, depth - 1);
    }
    return total;
}

std::vector<std::pair<Move, uint64_t>> perftSplit(const Position& p, int depth) {
    std::vector<std::pair<Move, uint64_t>> out;
    for (const Move& m : p.legalMoves()) {
        Position next = p;
        next.applyInPlace(m);
        out.emplace_back(m, perft(next, depth - 1));
    }
    return out;
}

}  // namespace gardner

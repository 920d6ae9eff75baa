#pragma once

#include <stdexcept>
#include <string>

#include "gardner/board.hpp"

namespace gardner {

struct SanError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct AmbiguousSanError : SanError {
    using SanError::SanError;
};
struct UnmatchedSanError : SanError {
    using SanError::SanError;
};
struct FenError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// SAN over files b..f, ranks 2..6. Check/mate suffixes are computed on output
// and ignored (but syntax-checked) on input.
Move parseSAN(const Position& p, const std::string& text);
std::string formatSAN(const Position& p, const Move& m);

// FEN-5: "<rank6>/<rank5>/<rank4>/<rank3>/<rank2> <w|b> <halfmove> <fullmove>"
Position parseFEN(const std::string& text);
std::string formatFEN(const Position& p);

char pieceChar(PieceKind k);               // uppercase: P N B R Q K
std::string moveUCI(const Move& m);        // "b3b4", "c5b4q"

}  // namespace gardner

#pragma once

#include "grrm/finite_space.hpp"
#include "grrm/harness/rng.hpp"

#include <array>
#include <iosfwd>
#include <span>
#include <vector>

namespace grrm::harness {

/// Cell symbols in alphabet order.
inline constexpr std::array<char, 3> kCellSymbols{'x', 'o', 'b'};

/// Terminal tic-tac-toe position. Cells are row-major (0 = top-left).
struct Board {
    std::array<char, 9> cells{};
    bool x_wins = false;

    friend bool operator==(const Board&, const Board&) = default;
};

/// Named board windows.
std::vector<std::size_t> upper_left_block();   // cells 0,1,3,4
std::vector<std::size_t> middle_column();      // cells 1,4,7
std::vector<std::size_t> without_corners();   // all but top-right and bottom-left

/// Every distinct terminal position reachable in legal play with x moving
/// first, sorted by cell string.
const std::vector<Board>& endgame_corpus();

void write_uci(std::span<const Board> boards, std::ostream& out);
/// Lines "c1,…,c9,positive|negative"; blank lines are skipped.
std::vector<Board> read_uci(std::istream& in);

/// n uniform draws with replacement from the corpus.
std::vector<Board> tictactoe_generate(std::uint64_t seed, std::size_t n);

FiniteSpace cell_space();
/// Product of one cell space per window cell, factors named by cell order.
FiniteSpace window_space(std::span<const std::size_t> window);

std::size_t symbol_index(char c);
/// Flat index of the window's cells in window_space(window).
std::size_t encode_window(const Board& b, std::span<const std::size_t> window);
/// 0 = negative (−1), 1 = positive (+1), matching binary_labels().
inline std::size_t label_index(const Board& b) { return b.x_wins ? 1 : 0; }
/// Flat index in window_space × binary_labels.
inline std::size_t encode_sample(const Board& b, std::span<const std::size_t> window) {
    return encode_window(b, window) * 2 + label_index(b);
}
std::vector<std::size_t> encode_samples(std::span<const Board> boards, std::span<const std::size_t> window);

/// Flips labels with ρ+ (positives) and ρ− (negatives), and replaces each
/// cell with probability η by one of the two other symbols chosen
/// uniformly. One draw for the label then one per cell, board by board.
std::vector<Board> inject_noise(std::span<const Board> boards, double rho_minus, double rho_plus, double eta, Rng& rng);

}  // namespace grrm::harness

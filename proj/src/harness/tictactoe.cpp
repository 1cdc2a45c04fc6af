#include "grrm/harness/tictactoe.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>

namespace grrm::harness {

namespace {

constexpr int kLines[8][3] = {{0, 1, 2}, {3, 4, 5}, {6, 7, 8}, {0, 3, 6}, {1, 4, 7}, {2, 5, 8}, {0, 4, 8}, {2, 4, 6}};

bool wins(const std::array<char, 9>& c, char p) {
    for (const auto& l : kLines)
        if (c[l[0]] == p && c[l[1]] == p && c[l[2]] == p) return true;
    return false;
}

void explore(std::array<char, 9>& cells, char player, std::set<std::string>& seen, std::vector<Board>& out) {
    const bool x = wins(cells, 'x');
    const bool o = wins(cells, 'o');
    const bool full = std::find(cells.begin(), cells.end(), 'b') == cells.end();
    if (x || o || full) {
        const std::string key(cells.begin(), cells.end());
        if (seen.insert(key).second) out.push_back({cells, x});
        return;
    }
    for (std::size_t i = 0; i < 9; ++i) {
        if (cells[i] != 'b') continue;
        cells[i] = player;
        explore(cells, player == 'x' ? 'o' : 'x', seen, out);
        cells[i] = 'b';
    }
}

}  // namespace

std::vector<std::size_t> upper_left_block() { return {0, 1, 3, 4}; }
std::vector<std::size_t> middle_column() { return {1, 4, 7}; }
std::vector<std::size_t> without_corners() { return {0, 1, 3, 4, 5, 7, 8}; }

const std::vector<Board>& endgame_corpus() {
    static const std::vector<Board> corpus = [] {
        std::array<char, 9> cells;
        cells.fill('b');
        std::set<std::string> seen;
        std::vector<Board> out;
        explore(cells, 'x', seen, out);
        std::sort(out.begin(), out.end(), [](const Board& a, const Board& b) { return a.cells < b.cells; });
        return out;
    }();
    return corpus;
}

void write_uci(std::span<const Board> boards, std::ostream& out) {
    for (const auto& b : boards) {
        for (char c : b.cells) out << c << ',';
        out << (b.x_wins ? "positive" : "negative") << '\n';
    }
}

std::vector<Board> read_uci(std::istream& in) {
    std::vector<Board> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string field;
        Board b;
        std::size_t k = 0;
        while (std::getline(ss, field, ',')) {
            if (k < 9) {
                if (field.size() != 1 || std::find(kCellSymbols.begin(), kCellSymbols.end(), field[0]) == kCellSymbols.end())
                    throw std::runtime_error("read_uci: bad cell on line " + std::to_string(lineno));
                b.cells[k] = field[0];
            } else if (k == 9) {
                if (field != "positive" && field != "negative")
                    throw std::runtime_error("read_uci: bad class on line " + std::to_string(lineno));
                b.x_wins = field == "positive";
            }
            ++k;
        }
        if (k != 10) throw std::runtime_error("read_uci: expected 10 fields on line " + std::to_string(lineno));
        out.push_back(b);
    }
    return out;
}

std::vector<Board> tictactoe_generate(std::uint64_t seed, std::size_t n) {
    const auto& corpus = endgame_corpus();
    Rng rng(seed, 0);
    std::vector<Board> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(corpus[rng.below(corpus.size())]);
    return out;
}

FiniteSpace cell_space() { return make_space({"x", "o", "b"}); }

FiniteSpace window_space(std::span<const std::size_t> window) {
    for (auto c : window)
        if (c >= 9) throw std::invalid_argument("window_space: cell outside the board");
    std::vector<FiniteSpace> factors(window.size(), cell_space());
    return product_space(factors);
}

std::size_t symbol_index(char c) {
    switch (c) {
        case 'x': return 0;
        case 'o': return 1;
        case 'b': return 2;
        default: throw std::invalid_argument("symbol_index: unknown cell symbol");
    }
}

std::size_t encode_window(const Board& b, std::span<const std::size_t> window) {
    std::size_t idx = 0;
    for (auto c : window) idx = idx * 3 + symbol_index(b.cells.at(c));
    return idx;
}

std::vector<std::size_t> encode_samples(std::span<const Board> boards, std::span<const std::size_t> window) {
    std::vector<std::size_t> out;
    out.reserve(boards.size());
    for (const auto& b : boards) out.push_back(encode_sample(b, window));
    return out;
}

std::vector<Board> inject_noise(std::span<const Board> boards, double rho_minus, double rho_plus, double eta, Rng& rng) {
    for (double r : {rho_minus, rho_plus, eta})
        if (!(r >= 0.0 && r <= 1.0)) throw std::invalid_argument("inject_noise: rates must lie in [0,1]");
    std::vector<Board> out(boards.begin(), boards.end());
    for (auto& b : out) {
        if (rng.bernoulli(b.x_wins ? rho_plus : rho_minus)) b.x_wins = !b.x_wins;
        for (auto& c : b.cells) {
            if (!rng.bernoulli(eta)) continue;
            const std::size_t s = symbol_index(c);
            const std::size_t shift = 1 + rng.below(2);
            c = kCellSymbols[(s + shift) % 3];
        }
    }
    return out;
}

}  // namespace grrm::harness

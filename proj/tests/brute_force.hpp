#pragma once

// Exhaustive enumerators used as independent oracles in the tests. They walk
// every gain/loss sequence explicitly and share no code with the library.

#include <cstdint>
#include <vector>

namespace ruinlab::testing {

/// Counts sequences with `gains` gains and `distance + gains` losses whose
/// running net loss first touches `distance` on the final trial.
inline std::uint64_t count_first_passage(int distance, int gains) {
    const int length = distance + 2 * gains;
    std::uint64_t count = 0;
    std::vector<int> seq(static_cast<std::size_t>(length));
    // Recursive generation keeps the walk state explicit.
    auto rec = [&](auto&& self, int pos, int net_loss, int gains_left) -> void {
        if (pos == length) {
            if (net_loss == distance && gains_left == 0) ++count;
            return;
        }
        if (net_loss == distance) return;  // reached too early
        if (gains_left > 0) self(self, pos + 1, net_loss - 1, gains_left - 1);
        self(self, pos + 1, net_loss + 1, gains_left);
    };
    rec(rec, 0, 0, gains);
    return count;
}

/// P(net loss reaches `distance` within `horizon` trials) by summing the
/// probability of all 2^horizon sequences.
inline double enumerate_ruin_probability(double p, int distance, int horizon) {
    const double q = 1.0 - p;
    double total = 0.0;
    const std::uint64_t n = std::uint64_t{1} << horizon;
    for (std::uint64_t bits = 0; bits < n; ++bits) {
        int net_loss = 0;
        bool ruined = false;
        double prob = 1.0;
        for (int i = 0; i < horizon; ++i) {
            const bool gain = (bits >> i) & 1U;
            prob *= gain ? p : q;
            net_loss += gain ? -1 : 1;
            if (net_loss == distance) ruined = true;
        }
        if (ruined) total += prob;
    }
    return total;
}

/// Row n of Pascal's triangle by additive recurrence (n <= 60 fits in 64 bits).
inline std::vector<std::uint64_t> pascal_row(int n) {
    std::vector<std::uint64_t> row{1};
    for (int i = 1; i <= n; ++i) {
        std::vector<std::uint64_t> next(static_cast<std::size_t>(i) + 1, 1);
        for (int k = 1; k < i; ++k) next[k] = row[k - 1] + row[k];
        row = std::move(next);
    }
    return row;
}

}  // namespace ruinlab::testing

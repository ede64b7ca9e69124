#pragma once

// Factories for subsquare-free Latin squares and hypercubes: fixed recipes
// for the ten base orders, a seeded annealing search for the two orders that
// have no closed-form recipe, the order-doubling/tripling extension step with
// witness propagation, and the planner that reduces any 2^x*3^y order to a
// base order.  Everything a factory returns has been pushed through the
// certification layer; nothing is taken on faith from the recipe alone.

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ninf/certify.hpp"
#include "ninf/core.hpp"
#include "ninf/tables.hpp"
#include "ninf/verify.hpp"

namespace ninf {

// A recipe produced a square but its required switch could not be applied.
struct construction_failed : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A recipe square failed certification; the message names the failing clause.
struct certification_failed : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The extension step's propagated structure did not survive re-verification.
struct witness_propagation_failed : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Kotzig-Turgeon squares K(n, J): the cyclic square of order n-3 with three
// disjoint transversals replaced by three new rows, columns and symbols, and
// a copy of J in the bottom-right corner.  Requires gcd(n,6) = 2; when n-3 is
// prime the J copy is the unique proper subsquare, and that certificate is
// checked here rather than assumed.

namespace detail {

// K(n, J) with new symbol/column labels sym_of[k+1] for transversal k and
// row labels mirrored (row label of transversal k = sym_of[1-k]).
inline LatinSquare kotzig_turgeon_build(int n, const LatinSquare& J,
                                        const std::array<int, 3>& sym_of) {
    int m = n - 3;
    auto md = [m](long v) {
        int r = static_cast<int>(((v % m) + m) % m);
        return r == 0 ? m : r;
    };
    std::vector<int> cells(static_cast<size_t>(n) * n, 0);
    auto put = [&](int r, int c, int s) {
        cells[static_cast<size_t>(r - 1) * n + (c - 1)] = s;
    };
    for (int i = 1; i <= m; ++i)
        for (int j = 1; j <= m; ++j) put(i, j, shift_by(i, j, m));
    for (int k = -1; k <= 1; ++k) {
        int sym = sym_of[static_cast<size_t>(k + 1)];
        int row = sym_of[static_cast<size_t>(1 - k)];
        for (int j = 1; j <= m; ++j) {
            int i = md(2L * j - 3L * k);
            int l = md(3L * j - 3L * k);
            put(i, j, sym);
            put(i, sym, l);
            put(row, j, l);
        }
    }
    for (int i = 1; i <= 3; ++i)
        for (int j = 1; j <= 3; ++j) put(m + i, m + j, m + J.at(i, j));
    return LatinSquare(n, std::move(cells));
}

// Latin already holds for any label assignment; the subsquare certificate is
// what distinguishes a usable one.
inline bool kotzig_turgeon_certified(const LatinSquare& K) {
    int n = K.order();
    auto boxes = enumerate_proper_subsquares(K);
    if (boxes.size() != 1) return false;
    std::vector<int> corner = {n - 2, n - 1, n};
    return boxes[0].rows == corner && boxes[0].cols == corner && boxes[0].syms == corner;
}

}  // namespace detail

inline LatinSquare kotzig_turgeon(int n, const LatinSquare& J) {
    if (J.order() != 3) throw std::invalid_argument("J must have order 3");
    if (n < 16 || std::gcd(n, 6) != 2)
        throw std::invalid_argument("order must satisfy gcd(n,6) = 2 and n >= 16");
    // The three transversals carry new labels n-2, n-1, n; the intended
    // assignment gives transversal k the symbol/column label n-1+k and the
    // row label n-1-k.  Sorted order is exactly that assignment, so it is
    // tried first; the other five permutations are fallbacks.
    std::array<int, 3> sym_of = {n - 2, n - 1, n};
    do {
        LatinSquare K = detail::kotzig_turgeon_build(n, J, sym_of);
        if (detail::kotzig_turgeon_certified(K)) return K;
    } while (std::next_permutation(sym_of.begin(), sym_of.end()));
    throw construction_failed("no transversal labelling yields a unique corner subsquare");
}

// ---------------------------------------------------------------------------
// Triple inflation L(E, (k,l)): rows, columns and symbols are pairs in
// [3] x [e].  The bulk of the square is the direct product Z x E with the
// (2,2) block's inner symbols shifted by e/2; the six cells whose inner part
// sits over (k,l) in the outer pattern Z realize a length-3 symbol cycle
// between (1, E[k,l]) and (2, E[k,l]).  Pairs are then flattened in
// first-coordinate-major order.

inline LatinSquare triple_inflate(const LatinSquare& E, int k, int l) {
    int e = E.order();
    if (e % 2 != 0) throw unsupported_order("inner square must have even order");
    if (k < 1 || k > e || l < 1 || l > e)
        throw std::invalid_argument("cell lies outside the inner square");
    if (find_proper_subsquare(E))
        throw std::invalid_argument("inner square must be subsquare-free");
    const LatinSquare& Z = table_Z();
    auto hi = [](int i, int x, std::initializer_list<std::pair<int, int>> set) {
        for (auto [a, b] : set)
            if (i == a && x == b) return true;
        return false;
    };
    int n = 3 * e;
    int special = E.at(k, l);
    std::vector<int> cells(static_cast<size_t>(n) * n);
    for (int i = 1; i <= 3; ++i)
        for (int j = 1; j <= e; ++j) {
            size_t rbase = (static_cast<size_t>(e) * (i - 1) + (j - 1)) * n;
            for (int x = 1; x <= 3; ++x)
                for (int y = 1; y <= e; ++y) {
                    int a, b;
                    if (j == k && y == l && hi(i, x, {{1, 1}, {2, 3}, {3, 2}})) {
                        a = 2, b = special;
                    } else if (j == k && y == l && hi(i, x, {{1, 2}, {2, 1}, {3, 3}})) {
                        a = 1, b = special;
                    } else if (i == 2 && x == 2) {
                        a = Z.at(2, 2), b = shift_by(E.at(j, y), e / 2, e);
                    } else {
                        a = Z.at(i, x), b = E.at(j, y);
                    }
                    cells[rbase + static_cast<size_t>(e) * (x - 1) + (y - 1)] =
                        e * (a - 1) + b;
                }
        }
    return LatinSquare(n, std::move(cells));
}

// ---------------------------------------------------------------------------
// Seeded annealing search.  The objective is the weighted count of proper
// subsquares (intercalates weigh 1, anything larger weighs 4); moves are
// random row-cycle switches, which preserve Latin-ness.  A zero objective is
// equivalent to subsquare-freeness, and the winner is re-verified by the
// detector before being returned.

namespace detail {

// Exact weighted subsquare count.  For orders <= 64 the closure runs on
// bitmasks; a fixpoint of the row/column/symbol saturation with all three
// sets equal and of size <= n/2 is exactly a proper subsquare, and every
// proper subsquare is reached from a seed (one row, two of its columns).
// Counting stops early once the total exceeds `stop_above`.
inline long long weighted_box_count_masked(const LatinSquare& L, long long stop_above) {
    int n = L.order();
    int bound = n / 2;
    if (bound < 2) return 0;
    long long total = 0;
    std::vector<std::pair<std::uint64_t, std::uint64_t>> seen;  // (rows, cols)
    auto bit = [](int v) { return std::uint64_t{1} << (v - 1); };
    for (int r = 1; r <= n; ++r)
        for (int c1 = 1; c1 < n; ++c1)
            for (int c2 = c1 + 1; c2 <= n; ++c2) {
                std::uint64_t rows = bit(r);
                std::uint64_t cols = bit(c1) | bit(c2);
                std::uint64_t syms = bit(L.at(r, c1)) | bit(L.at(r, c2));
                bool alive = true;
                for (;;) {
                    std::uint64_t rows2 = rows, cols2 = cols, syms2 = syms;
                    for (std::uint64_t rm = rows; rm;) {
                        int rr = std::countr_zero(rm) + 1;
                        rm &= rm - 1;
                        for (std::uint64_t cm = cols; cm;) {
                            int cc = std::countr_zero(cm) + 1;
                            cm &= cm - 1;
                            syms2 |= bit(L.at(rr, cc));
                        }
                    }
                    if (std::popcount(syms2) > bound) {
                        alive = false;
                        break;
                    }
                    for (std::uint64_t rm = rows; rm;) {
                        int rr = std::countr_zero(rm) + 1;
                        rm &= rm - 1;
                        for (std::uint64_t sm = syms2; sm;) {
                            int ss = std::countr_zero(sm) + 1;
                            sm &= sm - 1;
                            cols2 |= bit(L.row_inv(rr, ss));
                        }
                    }
                    for (std::uint64_t cm = cols2; cm;) {
                        int cc = std::countr_zero(cm) + 1;
                        cm &= cm - 1;
                        for (std::uint64_t sm = syms2; sm;) {
                            int ss = std::countr_zero(sm) + 1;
                            sm &= sm - 1;
                            rows2 |= bit(L.col_inv(cc, ss));
                        }
                    }
                    if (rows2 == rows && cols2 == cols && syms2 == syms) break;
                    rows = rows2, cols = cols2, syms = syms2;
                    if (std::popcount(rows) > bound || std::popcount(cols) > bound) {
                        alive = false;
                        break;
                    }
                }
                if (!alive) continue;
                if (std::popcount(rows) != std::popcount(syms)) continue;
                auto key = std::make_pair(rows, cols);
                if (std::find(seen.begin(), seen.end(), key) != seen.end()) continue;
                seen.push_back(key);
                total += std::popcount(rows) == 2 ? 1 : 4;
                if (total > stop_above) return total;
            }
    return total;
}

inline long long weighted_box_count(const LatinSquare& L,
                                    long long stop_above =
                                        std::numeric_limits<long long>::max()) {
    int n = L.order();
    if (n <= 64) return weighted_box_count_masked(L, stop_above);
    long long total = 0;
    std::vector<SubBox> boxes;
    for (int r = 1; r <= n && total <= stop_above; ++r)
        for (int c1 = 1; c1 < n; ++c1)
            for (int c2 = c1 + 1; c2 <= n; ++c2)
                if (auto box = closure(L, {r}, {c1, c2}, n / 2)) {
                    auto it = std::find(boxes.begin(), boxes.end(), *box);
                    if (it != boxes.end()) continue;
                    boxes.push_back(*box);
                    total += box->order() == 2 ? 1 : 4;
                }
    return total;
}

// Uniform-ish random square: rows are filled left to right with a random
// feasible symbol, retrying a row when it dead-ends (every Latin rectangle
// extends, so retries always terminate in practice).
inline LatinSquare random_square(int n, std::mt19937_64& rng) {
    for (;;) {
        std::vector<int> cells(static_cast<size_t>(n) * n, 0);
        std::vector<std::vector<char>> col_used(n + 1, std::vector<char>(n + 1, 0));
        bool stuck = false;
        for (int r = 1; r <= n && !stuck; ++r) {
            int tries = 0;
            for (;;) {
                std::vector<char> row_used(n + 1, 0);
                std::vector<int> written;
                bool dead = false;
                for (int c = 1; c <= n; ++c) {
                    std::vector<int> feasible;
                    for (int s = 1; s <= n; ++s)
                        if (!row_used[s] && !col_used[c][s]) feasible.push_back(s);
                    if (feasible.empty()) {
                        dead = true;
                        break;
                    }
                    int s = feasible[std::uniform_int_distribution<size_t>(
                        0, feasible.size() - 1)(rng)];
                    cells[static_cast<size_t>(r - 1) * n + (c - 1)] = s;
                    row_used[s] = 1;
                    col_used[c][s] = 1;
                    written.push_back(c);
                }
                if (!dead) break;
                for (int c : written)
                    col_used[c][cells[static_cast<size_t>(r - 1) * n + (c - 1)]] = 0;
                if (++tries > 200) {
                    stuck = true;
                    break;
                }
            }
        }
        if (!stuck) return LatinSquare(n, std::move(cells));
    }
}

// One compound move of the Jacobson-Matthews walk, on a raw rows matrix
// (0-based indices, 1-based symbols).  The move passes through improper
// squares (one cell holding a symbol pair) and terminates back at a proper
// Latin square; unlike cycle switches, the walk it generates connects the
// whole space.  When (r_fix, c_fix) is given the chain starts at that cell,
// which guarantees the cell's value changes.
inline bool jm_move(std::vector<std::vector<int>>& rows, std::mt19937_64& rng,
                    int r_fix = -1, int c_fix = -1) {
    int n = static_cast<int>(rows.size());
    auto pos_in_row = [&](int r, int s, int skip = -1) {
        for (int c = 0; c < n; ++c)
            if (c != skip && rows[r][c] == s) return c;
        return -1;
    };
    auto pos_in_col = [&](int c, int s, int skip = -1) {
        for (int r = 0; r < n; ++r)
            if (r != skip && rows[r][c] == s) return r;
        return -1;
    };
    int r = r_fix >= 0 ? r_fix : static_cast<int>(rng() % n);
    int c = c_fix >= 0 ? c_fix : static_cast<int>(rng() % n);
    int s = 1 + static_cast<int>(rng() % n);
    if (s == rows[r][c]) return false;
    int s0 = rows[r][c];
    int c2 = pos_in_row(r, s), r2 = pos_in_col(c, s);
    rows[r][c] = s;
    rows[r][c2] = s0;
    rows[r2][c] = s0;
    int R = r2, C = c2, gain = s, miss = s0;
    for (int flips = 0; flips < 2000; ++flips) {
        int u = rows[R][C];
        if (u == miss) {  // proper again: the owed symbol sits here
            rows[R][C] = gain;
            return true;
        }
        int keep = (rng() & 1) ? u : gain;
        int kick = keep == u ? gain : u;
        int ca = pos_in_row(R, miss), cb = pos_in_row(R, miss, ca);
        int cpick = (cb >= 0 && (rng() & 1)) ? cb : ca;
        int ra = pos_in_col(C, miss), rb = pos_in_col(C, miss, ra);
        int rpick = (rb >= 0 && (rng() & 1)) ? rb : ra;
        rows[R][C] = keep;
        rows[rpick][C] = kick;
        rows[R][cpick] = kick;
        R = rpick;
        C = cpick;
        gain = miss;
        miss = kick;
    }
    return false;
}

// Exact intercalate count via per-row-pair stamps; stops early past `stop`.
inline long long intercalate_count(const LatinSquare& L, long long stop) {
    int n = L.order();
    long long cnt = 0;
    std::vector<int> mark(static_cast<size_t>(n) * n, 0);
    int epoch = 0;
    for (int r1 = 1; r1 < n; ++r1)
        for (int r2 = r1 + 1; r2 <= n; ++r2) {
            ++epoch;
            for (int c = 1; c <= n; ++c) {
                int a = L.at(r1, c), b = L.at(r2, c);
                if (mark[static_cast<size_t>(b - 1) * n + (a - 1)] == epoch) ++cnt;
                mark[static_cast<size_t>(a - 1) * n + (b - 1)] = epoch;
            }
            if (cnt > stop) return cnt;
        }
    return cnt;
}

// The cells of every intercalate, for aiming moves at them.
inline std::vector<std::pair<int, int>> intercalate_cells(const LatinSquare& L) {
    int n = L.order();
    std::vector<std::pair<int, int>> out;
    std::vector<int> mark(static_cast<size_t>(n) * n, 0);
    std::vector<int> colat(static_cast<size_t>(n) * n, 0);
    int epoch = 0;
    for (int r1 = 1; r1 < n; ++r1)
        for (int r2 = r1 + 1; r2 <= n; ++r2) {
            ++epoch;
            for (int c = 1; c <= n; ++c) {
                int a = L.at(r1, c), b = L.at(r2, c);
                size_t rev = static_cast<size_t>(b - 1) * n + (a - 1);
                if (mark[rev] == epoch) {
                    int c0 = colat[rev];
                    out.push_back({r1, c0});
                    out.push_back({r1, c});
                    out.push_back({r2, c0});
                    out.push_back({r2, c});
                }
                size_t key = static_cast<size_t>(a - 1) * n + (b - 1);
                mark[key] = epoch;
                colat[key] = c;
            }
        }
    return out;
}

// Cheap search objective: the intercalate count, plus a closure pass for
// larger boxes only when the count alone cannot rule the square out.  A
// return of zero is authoritative — it means no proper subsquare at all.
inline long long quick_box_score(const LatinSquare& L, long long stop) {
    if (L.order() < 4) return 0;  // order 2 is all of an order-2 square, not proper
    long long ic = intercalate_count(L, stop);
    if (ic > stop || ic > 2) return ic;
    auto box = find_proper_subsquare(L);
    if (!box) return ic;
    if (box->order() == 2) return ic;
    return ic + 4;
}

}  // namespace detail

inline constexpr long long kDefaultSearchBudget = 600000;

// Annealed random walk to a subsquare-free square.  Proposals mix row-cycle
// switches (both orientations) with Jacobson-Matthews compound moves: cycle
// switches alone provably stall — at order 18 every low state the walk
// reaches is a strict local minimum of theirs — while the J-M walk connects
// the space.  The objective is the exact intercalate count with a closure
// pass for larger boxes near zero.  The temperature ramps down once and then
// holds long at a floor scaling inversely with the order; when at most two
// intercalates survive, half the proposals start their chain inside one,
// which forces that box to break and leaves the rest to Metropolis.  Returns
// the first square that a full exhaustive scan confirms subsquare-free.
inline LatinSquare search_ninf(int n, std::uint64_t seed,
                               long long budget = kDefaultSearchBudget) {
    if (n < 1) throw std::invalid_argument("order must be positive");
    std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ULL + 0xD1B54A32D192ED03ULL + n);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double t0 = 1.5;
    const double floor_t = std::clamp(6.0 / n, 0.3, 0.6);
    const long long ramp = 4000, hold = 400000;
    const int reheats = 2;
    long long used = 0;
    auto confirmed = [](const LatinSquare& L) { return !find_proper_subsquare(L); };
    std::vector<std::pair<int, int>> targets;
    while (used < budget) {
        LatinSquare cur = detail::random_square(n, rng);
        long long cur_e = detail::quick_box_score(cur, 1LL << 40);
        ++used;
        if (cur_e == 0 && confirmed(cur)) return cur;
        for (int heat = 0; heat < reheats && used < budget; ++heat) {
            double temp = heat == 0 ? t0 : 1.0;
            const double cool = std::pow(floor_t / temp, 1.0 / static_cast<double>(ramp));
            bool targets_fresh = false;
            for (long long step = 0; step < ramp + hold && used < budget; ++step) {
                if (temp > floor_t) temp = std::max(temp * cool, floor_t);
                LatinSquare cand;
                bool aim = cur_e >= 1 && cur_e <= 2 && rng() % 2 == 0;
                if (aim && !targets_fresh) {
                    targets = detail::intercalate_cells(cur);
                    targets_fresh = true;
                }
                if (aim && targets.empty()) aim = false;
                if (aim || rng() % 2 == 0) {
                    std::vector<std::vector<int>> rows(n, std::vector<int>(n));
                    for (int r = 1; r <= n; ++r)
                        for (int c = 1; c <= n; ++c) rows[r - 1][c - 1] = cur.at(r, c);
                    bool made;
                    if (aim) {
                        auto [tr, tc] = targets[rng() % targets.size()];
                        made = detail::jm_move(rows, rng, tr - 1, tc - 1);
                    } else {
                        made = detail::jm_move(rows, rng);
                    }
                    if (!made) continue;
                    cand = ls_from_rows(rows);
                } else {
                    int i = std::uniform_int_distribution<int>(1, n)(rng);
                    int j = std::uniform_int_distribution<int>(1, n - 1)(rng);
                    if (j >= i) ++j;
                    int c = std::uniform_int_distribution<int>(1, n)(rng);
                    if (rng() & 1) {
                        LatinSquare tr = transpose(cur);
                        cand = transpose(switch_row_cycle(
                            tr, row_cycle(tr, std::min(i, j), std::max(i, j), c)));
                    } else {
                        cand = switch_row_cycle(
                            cur, row_cycle(cur, std::min(i, j), std::max(i, j), c));
                    }
                }
                long long margin = static_cast<long long>(30.0 * temp) + 4;
                long long cand_e = detail::quick_box_score(cand, cur_e + margin);
                ++used;
                if (cand_e == 0 && confirmed(cand)) return cand;
                if (cand_e <= cur_e ||
                    unif(rng) < std::exp(static_cast<double>(cur_e - cand_e) / temp)) {
                    cur = std::move(cand);
                    cur_e = cand_e;
                    targets_fresh = false;
                }
            }
        }
    }
    throw budget_exhausted("no subsquare-free square of order " + std::to_string(n) +
                           " found within the move budget");
}

// ---------------------------------------------------------------------------
// Base-case recipes.  Every base order is certified with shift 1.  The
// documented witness coordinates are tried first; if a recipe square does not
// validate them (label conventions can shift coordinates), certification
// falls back to a fresh lexicographic witness search, which is authoritative.

struct BaseRecipeKeys {
    std::array<int, 3> w_ii;   // (x1, x2, y3)
    std::array<int, 3> w_iii;  // (r1, r2, sigma)
};

inline std::optional<BaseRecipeKeys> documented_base_witnesses(int n) {
    switch (n) {
        case 16:
        case 32:
        case 64:
            return BaseRecipeKeys{{2, 8, n / 2 + 4}, {2, 3, n - 2}};
        case 24:
            return BaseRecipeKeys{{2, 7, 16}, {2, 5, 3}};
        case 36:
            return BaseRecipeKeys{{2, 11, 35}, {2, 3, 15}};
        case 48:
            return BaseRecipeKeys{{2, 8, 12}, {2, 3, 14}};
        case 54:
            return BaseRecipeKeys{{2, 10, 29}, {2, 8, 34}};
        case 72:
            return BaseRecipeKeys{{2, 7, 48}, {2, 5, 19}};
        default:
            return std::nullopt;  // orders 12 and 18 come from search
    }
}

namespace detail {

inline XMember certify_base(const LatinSquare& L, int n) {
    if (auto keys = documented_base_witnesses(n)) {
        auto w_ii = expand_cond_ii(L, keys->w_ii[0], keys->w_ii[1], keys->w_ii[2]);
        auto w_iii = expand_cond_iii(L, keys->w_iii[0], keys->w_iii[1], keys->w_iii[2]);
        if (w_ii && w_iii) {
            auto out = certify_with_witnesses(L, 1, *w_ii, *w_iii,
                                              CertLevel::fully_verified);
            if (out.ok()) return *out.member;
        }
    }
    auto out = certify_x_member(L, 1, CertLevel::fully_verified);
    if (!out.ok())
        throw certification_failed("order " + std::to_string(n) + ": " + out.failure);
    return *out.member;
}

inline LatinSquare switch_eta_or_throw(const LatinSquare& L, int i, int j, int x) {
    auto plan = eta_plan(L, i, j, x);
    if (!plan)
        throw construction_failed("trade through rows " + std::to_string(i) + "," +
                                  std::to_string(j) + " column " + std::to_string(x) +
                                  " does not apply");
    return switch_eta(L, *plan);
}

// Anneals from a fixed starting square (restarts return to it rather than to
// a random square) until the weighted box count reaches zero.  Used to repair
// inflated recipes: the inflation of a subsquare-free inner square starts
// within a handful of switches of subsquare-free.
inline std::optional<LatinSquare> polish_to_ninf(const LatinSquare& start,
                                                 std::uint64_t seed,
                                                 long long budget) {
    int n = start.order();
    std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ULL + 0x9FB21C651E98DF25ULL + n);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double floor_t = std::clamp(6.0 / n, 0.3, 0.6);
    const double t0 = 3.0 * floor_t;
    const long long ramp = 2000, round_len = 150000;

    // The big boxes an inflation leaves behind sit at positions that are known
    // up front, so the score does not run a closure sweep per candidate: it
    // counts intercalates exactly (they move around freely and are cheap to
    // enumerate) and checks each box on a fixed watch list for survival.  A
    // watched box survives iff every cell of its block still draws from its
    // symbol set, an O(e^2) test.  Any box the watch list misses is caught by
    // the exact detector at the accept-zero gate and added to the list.
    std::vector<SubBox> watch;
    for (auto& b : enumerate_proper_subsquares(start))
        if (b.rows.size() > 2) watch.push_back(b);
    auto watch_add = [&watch](const SubBox& b) {
        for (auto& w : watch)
            if (w.rows == b.rows && w.cols == b.cols && w.syms == b.syms) return;
        watch.push_back(b);
    };
    auto box_alive = [n](const LatinSquare& L, const SubBox& b) {
        std::vector<char> in_sym(n + 1, 0);
        for (int s : b.syms) in_sym[s] = 1;
        for (int r : b.rows)
            for (int c : b.cols)
                if (!in_sym[L.at(r, c)]) return false;
        return true;
    };
    auto score = [&](const LatinSquare& L, long long stop, long long& ic_out) {
        long long total = intercalate_count(L, stop);
        ic_out = total;
        if (total > stop) return total;
        for (auto& b : watch) {
            if (box_alive(L, b)) total += 4;
            if (total > stop) return total;
        }
        return total;
    };
    long long used = 0;
    while (used < budget) {
        LatinSquare cur = start;
        long long cur_ic = 0;
        long long cur_e = score(cur, 1LL << 40, cur_ic);
        ++used;
        if (cur_e == 0) {
            auto box = find_proper_subsquare(cur);
            if (!box) return cur;
            watch_add(*box);
            cur_e = score(cur, 1LL << 40, cur_ic);
        }
        std::vector<std::size_t> cur_alive;  // indices into watch
        auto refresh_alive = [&]() {
            cur_alive.clear();
            for (std::size_t i = 0; i < watch.size(); ++i)
                if (box_alive(cur, watch[i])) cur_alive.push_back(i);
        };
        refresh_alive();
        std::vector<std::pair<int, int>> ic_targets;
        bool ic_fresh = false;
        double temp = t0;
        const double cool = std::pow(floor_t / t0, 1.0 / static_cast<double>(ramp));
        for (long long step = 0; step < round_len && used < budget; ++step) {
            if (temp > floor_t) temp = std::max(temp * cool, floor_t);
            LatinSquare cand;
            bool aim = rng() % 2 == 0;
            if (aim && !cur_alive.empty()) {
                const SubBox& box = watch[cur_alive[rng() % cur_alive.size()]];
                if (rng() & 1) {
                    // J-M chain started inside the box: its first write lands
                    // in the box's block, so the box cannot survive unchanged
                    std::vector<std::vector<int>> rows(n, std::vector<int>(n));
                    for (int r = 1; r <= n; ++r)
                        for (int c = 1; c <= n; ++c) rows[r - 1][c - 1] = cur.at(r, c);
                    int r = box.rows[rng() % box.rows.size()];
                    int c = box.cols[rng() % box.cols.size()];
                    if (!jm_move(rows, rng, r - 1, c - 1)) continue;
                    cand = ls_from_rows(rows);
                } else {
                    // cycle switch through one box row, one outside row, and a
                    // box column: it writes a foreign symbol into the box
                    int r1 = box.rows[rng() % box.rows.size()];
                    int c = box.cols[rng() % box.cols.size()];
                    int r2 = 1 + static_cast<int>(rng() % n);
                    if (std::find(box.rows.begin(), box.rows.end(), r2) !=
                        box.rows.end())
                        continue;
                    cand = switch_row_cycle(
                        cur, row_cycle(cur, std::min(r1, r2), std::max(r1, r2), c));
                }
            } else if (aim && cur_ic >= 1 && cur_ic <= 2) {
                if (!ic_fresh) {
                    ic_targets = intercalate_cells(cur);
                    ic_fresh = true;
                }
                if (ic_targets.empty()) continue;
                auto [tr, tc] = ic_targets[rng() % ic_targets.size()];
                std::vector<std::vector<int>> rows(n, std::vector<int>(n));
                for (int r = 1; r <= n; ++r)
                    for (int c = 1; c <= n; ++c) rows[r - 1][c - 1] = cur.at(r, c);
                if (!jm_move(rows, rng, tr - 1, tc - 1)) continue;
                cand = ls_from_rows(rows);
            } else if (rng() % 2 == 0) {
                std::vector<std::vector<int>> rows(n, std::vector<int>(n));
                for (int r = 1; r <= n; ++r)
                    for (int c = 1; c <= n; ++c) rows[r - 1][c - 1] = cur.at(r, c);
                if (!jm_move(rows, rng)) continue;
                cand = ls_from_rows(rows);
            } else {
                int i = std::uniform_int_distribution<int>(1, n)(rng);
                int j = std::uniform_int_distribution<int>(1, n - 1)(rng);
                if (j >= i) ++j;
                int c = std::uniform_int_distribution<int>(1, n)(rng);
                if (rng() & 1) {
                    LatinSquare tr = transpose(cur);
                    cand = transpose(switch_row_cycle(
                        tr, row_cycle(tr, std::min(i, j), std::max(i, j), c)));
                } else {
                    cand = switch_row_cycle(
                        cur, row_cycle(cur, std::min(i, j), std::max(i, j), c));
                }
            }
            long long margin = static_cast<long long>(30.0 * temp) + 4;
            long long cand_ic = 0;
            long long cand_e = score(cand, cur_e + margin, cand_ic);
            ++used;
            if (cand_e == 0) {
                auto box = find_proper_subsquare(cand);
                if (!box) return cand;
                // an unwatched box: score it from now on (for cur as well)
                watch_add(*box);
                cand_e = score(cand, 1LL << 40, cand_ic);
                cur_e = score(cur, 1LL << 40, cur_ic);
            }
            if (cand_e <= cur_e ||
                unif(rng) < std::exp(static_cast<double>(cur_e - cand_e) / temp)) {
                cur = std::move(cand);
                cur_e = cand_e;
                cur_ic = cand_ic;
                refresh_alive();
                ic_fresh = false;
            }
        }
    }
    return std::nullopt;
}

// Targeted repair: a cycle switch through a row inside a subsquare, a row
// outside it, and a column of it necessarily writes a foreign symbol into the
// box, so it breaks that box.  Greedily applies the best such move for the
// first surviving box; breaking one box can mint another, so the loop is
// bounded and scored by the weighted box count.
inline std::optional<LatinSquare> shatter_boxes(const LatinSquare& start,
                                                std::uint64_t seed) {
    std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ULL + 0xA0761D6478BD642FULL);
    LatinSquare cur = start;
    int n = cur.order();
    for (int step = 0; step < 64; ++step) {
        auto box = find_proper_subsquare(cur);
        if (!box) return cur;
        std::vector<int> rows_out;
        std::vector<char> in_box(n + 1, 0);
        for (int r : box->rows) in_box[r] = 1;
        for (int r = 1; r <= n; ++r)
            if (!in_box[r]) rows_out.push_back(r);
        std::optional<LatinSquare> best;
        long long best_e = std::numeric_limits<long long>::max();
        for (int trial = 0; trial < 24; ++trial) {
            int r1 = box->rows[rng() % box->rows.size()];
            int r2 = rows_out[rng() % rows_out.size()];
            int c = box->cols[rng() % box->cols.size()];
            LatinSquare cand = switch_row_cycle(
                cur, row_cycle(cur, std::min(r1, r2), std::max(r1, r2), c));
            long long e = weighted_box_count(cand, best_e);
            if (e < best_e) {
                best_e = e;
                best = std::move(cand);
            }
        }
        cur = std::move(*best);
        if (best_e == 0 && !find_proper_subsquare(cur)) return cur;
    }
    return std::nullopt;
}

// An inflated base case: triple inflation of the inner square, the documented
// trade when it applies and certifies, otherwise a repair.  The documented
// trade coordinates were chosen against one specific inner square; a
// different searched inner moves the inflation's subsquares, so the trade may
// not apply (or may not be enough), and the repair path takes over.
inline XMember inflated_base(const LatinSquare& inner, int k, int l,
                             std::array<int, 3> eta, int n, std::uint64_t seed) {
    LatinSquare T = triple_inflate(inner, k, l);
    if (auto plan = eta_plan(T, eta[0], eta[1], eta[2])) {
        try {
            return certify_base(switch_eta(T, *plan), n);
        } catch (const certification_failed&) {
        }
    }
    std::string last = "inflation repair exhausted its budget";
    for (std::uint64_t attempt = 0; attempt < 8; ++attempt) {
        auto fixed = shatter_boxes(T, seed + attempt);
        if (!fixed) continue;
        auto out = certify_x_member(*fixed, 1, CertLevel::fully_verified);
        if (out.ok()) return *out.member;
        last = out.failure;
    }
    for (std::uint64_t attempt = 0; attempt < 3; ++attempt) {
        auto fixed = polish_to_ninf(T, seed + 17 * attempt, 1200000);
        if (!fixed) continue;
        auto out = certify_x_member(*fixed, 1, CertLevel::fully_verified);
        if (out.ok()) return *out.member;
        last = out.failure;
    }
    throw construction_failed("order " + std::to_string(n) + ": " + last);
}

}  // namespace detail

inline constexpr long long kBaseSearchBudget = 4000000;

// Searched inner squares (orders 12 and 18) may be supplied to avoid
// repeating the search when a cached copy exists.  `search_budget` is the
// per-attempt move budget for the searched orders.
inline XMember base_square(int n, std::uint64_t seed = 0,
                           const std::optional<LatinSquare>& inner12 = std::nullopt,
                           const std::optional<LatinSquare>& inner18 = std::nullopt,
                           long long search_budget = kBaseSearchBudget) {
    if (inner12 && inner12->order() != 12)
        throw std::invalid_argument("supplied order-12 square has the wrong order");
    if (inner18 && inner18->order() != 18)
        throw std::invalid_argument("supplied order-18 square has the wrong order");
    switch (n) {
        case 12:
        case 18: {
            // A found square can still miss a witness; retry with fresh seeds.
            std::string last = "search budget exhausted";
            for (std::uint64_t attempt = 0; attempt < 12; ++attempt) {
                std::optional<LatinSquare> L;
                try {
                    L = search_ninf(n, seed + attempt, search_budget);
                } catch (const budget_exhausted&) {
                    continue;
                }
                auto out = certify_x_member(*L, 1, CertLevel::fully_verified);
                if (out.ok()) return *out.member;
                last = out.failure;
            }
            throw certification_failed("order " + std::to_string(n) + ": " + last);
        }
        case 16:
        case 32:
        case 64: {
            LatinSquare K = kotzig_turgeon(n, table_J());
            LatinSquare L = detail::switch_eta_or_throw(K, n, 1, n / 2 - 1);
            L = detail::switch_eta_or_throw(L, 4, n - 1, n - 2);
            return detail::certify_base(L, n);
        }
        case 24:
            return detail::inflated_base(table_E(), 1, 2, {6, 14, 18}, n, seed);
        case 36: {
            LatinSquare inner =
                inner12 ? *inner12 : base_square(12, seed).square;
            return detail::inflated_base(inner, 2, 3, {1, 21, 30}, n, seed);
        }
        case 48:
            return detail::inflated_base(base_square(16, seed).square, 16, 8,
                                         {1, 17, 41}, n, seed);
        case 54: {
            LatinSquare inner =
                inner18 ? *inner18 : base_square(18, seed).square;
            return detail::inflated_base(inner, 7, 7, {1, 19, 52}, n, seed);
        }
        case 72: {
            PairSquare P = corrupted_product(table_A9(), table_B9(), 5, table_E());
            LatinSquare F = relabel_prec1(P);
            LatinSquare L = switch_row_cycle(F, row_cycle(F, 2, 11, 3));
            return detail::certify_base(L, n);
        }
        default:
            throw std::invalid_argument("order " + std::to_string(n) +
                                        " is not a base order");
    }
}

// ---------------------------------------------------------------------------
// The extension step: from a certified member (M, s) of order mu and the
// corrupting pair of order alpha, build P = (A,B) *_s M, switch on the pivot
// row cycle, flatten, and hand back (Q, mu) with both witnesses rebuilt from
// the old ones.  Exhaustive re-verification (subsquare sweep + Condition (i))
// is applied below `threshold`; above it the output carries re-checked
// witnesses only.

inline constexpr int kDefaultVerifyThreshold = 200;

inline XMember extend(const XMember& x, int alpha,
                      int threshold = kDefaultVerifyThreshold) {
    if (alpha != 8 && alpha != 9)
        throw std::invalid_argument("extension factor must be 8 or 9");
    if (x.level < CertLevel::conditions_checked)
        throw std::invalid_argument(
            "input member must be verified subsquare-free before extension");
    const CorrupterData& cd = corrupter_data(alpha);
    const LatinSquare& M = x.square;
    const int mu = M.order();
    const int s = x.shift;
    const CondIIWitness& w2 = x.w_ii;
    const CondIIIWitness& w3 = x.w_iii;
    auto phi = [mu](int a, int b) { return mu * (a - 1) + b; };
    auto fail = [](const std::string& what) {
        throw witness_propagation_failed(what);
    };

    PairSquare P = corrupted_product(cd.A, cd.B, s, M);
    const LatinSquare& F = P.flat();

    // The corrupted block places (d1, sigma+s) where M had sigma.
    if (F.at(phi(1, w3.r1), phi(1, w3.c1)) !=
        phi(cd.d_triple[0], shift_by(w3.sigma, s, mu)))
        fail("principal block does not shift the pivot symbol");
    RowCycle rc = row_cycle(F, phi(1, w3.r1), phi(2, w3.r2), phi(3, w3.c3));
    if (rc.length() != 3) fail("pivot row cycle does not have length 3");
    std::vector<int> want_cols = {phi(1, w3.c1), phi(2, w3.c2), phi(3, w3.c3)};
    std::sort(want_cols.begin(), want_cols.end());
    if (rc.sorted_cols() != want_cols) fail("pivot row cycle strays off-block");

    LatinSquare Q = switch_row_cycle(F, rc);

    auto nw2 = expand_cond_ii(Q, phi(1, w3.r1), phi(2, w3.r2), phi(3, w3.c3));
    if (!nw2) fail("switched row cycle lost length 3");
    const auto [i, j, l1, l2, l3, k] = cd.p3;
    auto nw3 = expand_cond_iii(Q, phi(i, w2.x1), phi(j, w2.x2), phi(k, w2.z1));
    if (!nw3) fail("propagated symbol orbit collapsed");
    if (nw3->c1 != phi(l1, w2.y1) || nw3->c2 != phi(l2, w2.y2) ||
        nw3->c3 != phi(l3, w2.y3))
        fail("propagated orbit columns disagree with the stored tuple");
    // The six distinguished cells that realize the new orbit: rows
    // (i,x1) and (j,x2) meet columns (l_f, y_f) in the shifted symbols.
    const int t1 = row_permutation(cd.A, i, j, k);
    const int t2 = row_permutation(cd.A, i, j, t1);
    const std::array<std::array<int, 3>, 6> want = {{
        {l1, w2.y1, phi(k, w2.z1)},
        {l2, w2.y2, phi(t1, w2.z2)},
        {l3, w2.y3, phi(t2, w2.z3)},
        {l1, w2.y1, phi(t1, w2.z2)},
        {l2, w2.y2, phi(t2, w2.z3)},
        {l3, w2.y3, phi(k + 1, w2.z1)},
    }};
    for (size_t t = 0; t < want.size(); ++t) {
        int row = phi(t < 3 ? i : j, t < 3 ? w2.x1 : w2.x2);
        if (Q.at(row, phi(want[t][0], want[t][1])) != want[t][2])
            fail("distinguished orbit cell holds the wrong symbol");
    }

    CertLevel level = Q.order() <= threshold ? CertLevel::fully_verified
                                             : CertLevel::witnessed;
    auto out = certify_with_witnesses(Q, mu, *nw2, *nw3, level);
    if (!out.ok()) fail(out.failure);
    return *out.member;
}

// ---------------------------------------------------------------------------
// Order planner: n = 8^i * 9^k * base with base in the ten base orders,
// following the residue table for n = 2^(3i+j) * 3^(2k+l).

struct OrderPlan {
    int i = 0;     // count of x8 extension steps
    int k = 0;     // count of x9 extension steps
    int base = 0;  // base order
};

inline OrderPlan plan_order(long long n) {
    if (n < 12) throw unsupported_order("planned orders start at 12");
    long long r = n;
    int x = 0, y = 0;
    while (r % 2 == 0) r /= 2, ++x;
    while (r % 3 == 0) r /= 3, ++y;
    if (r != 1 || x < 1)
        throw unsupported_order("order is not 2^x * 3^y with x >= 1");
    int i = x / 3, jj = x % 3, k = y / 2, ll = y % 2;
    if (jj == 0 && ll == 0) {
        if (i >= 2) return {i - 2, k, 64};
        if (i == 1 && k >= 1) return {0, k - 1, 72};
    } else if (jj == 0 && ll == 1) {
        if (i >= 1) return {i - 1, k, 24};
    } else if (jj == 1 && ll == 0) {
        if (i >= 1) return {i - 1, k, 16};
        if (k >= 1) return {0, k - 1, 18};
    } else if (jj == 1 && ll == 1) {
        if (i >= 1) return {i - 1, k, 48};
        if (k >= 1) return {0, k - 1, 54};
    } else if (jj == 2 && ll == 0) {
        if (i >= 1) return {i - 1, k, 32};
        if (k >= 1) return {0, k - 1, 36};
    } else {
        return {i, k, 12};
    }
    throw unsupported_order("no decomposition into base order and extensions");
}

// ---------------------------------------------------------------------------
// Top-level builders.

inline LatinSquare build_square(int n, std::uint64_t seed = 0,
                                int threshold = kDefaultVerifyThreshold,
                                long long budget = kDefaultSearchBudget) {
    if (n == 4 || n == 6)
        throw unsupported_order("no subsquare-free square of order " +
                                std::to_string(n) + " exists");
    if (n < 1) throw std::invalid_argument("order must be positive");
    if (n <= 3 || n == 5 || n == 7 || n == 11) return cyclic_square(n);
    if (n == 8) return table_E();
    if (n == 9) return table_A9();
    long long r = n;
    while (r % 2 == 0) r /= 2;
    while (r % 3 == 0) r /= 3;
    if (r == 1 && n % 2 == 0 && n >= 12) {
        OrderPlan plan = plan_order(n);
        XMember m = base_square(plan.base, seed, std::nullopt, std::nullopt, budget);
        for (int t = 0; t < plan.i + plan.k; ++t) {
            if (m.level < CertLevel::conditions_checked)
                throw budget_exhausted(
                    "intermediate order " + std::to_string(m.square.order()) +
                    " exceeds the exhaustive-verification threshold; deeper "
                    "chains are not certified for further extension");
            m = extend(m, t < plan.i ? 8 : 9, threshold);
        }
        return m.square;
    }
    return search_ninf(n, seed, budget);
}

inline Hypercube build_hypercube(int n, int d, std::uint64_t seed = 0,
                                 int threshold = kDefaultVerifyThreshold,
                                 long long budget = kDefaultSearchBudget) {
    if (d < 2) throw std::invalid_argument("hypercubes start at dimension 2");
    if (d == 2 && (n == 4 || n == 6))
        throw no_such_object("no subsquare-free latin square of order " +
                             std::to_string(n) + " exists");
    if (n == 4) return boost(table_cube4(), d);
    if (n == 6) return boost(table_cube6(), d);
    return boost(square_as_cube(build_square(n, seed, threshold, budget)), d);
}

}  // namespace ninf

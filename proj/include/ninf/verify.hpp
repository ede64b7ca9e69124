#pragma once
// Detection of subsquares, intercalates, and subhypercubes.
//
// The workhorse is a closure sweep: a subsquare is exactly a box of rows,
// columns and symbols closed under "this symbol must appear in this row /
// column inside the box".  The minimal closed box containing a seed is
// computed by a queue-driven fixpoint; any proper subsquare has order at
// most floor(n/2), so a closure whose row, column or symbol set grows past
// that bound can be abandoned immediately.  Every subsquare of order >= 2
// contains a seed of the form ({r}, {c1,c2}), and every closed box is
// reachable from some seed's minimal closure by adding one row or column at
// a time and re-closing, which is how the sweep enumerates non-minimal boxes.
//
// Perturbed squares (a Latin square with a few overridden cells) get the
// same treatment, except a symbol may occur 0, 1 or 2 times in a row or
// column, so lookups can branch; discovered boxes are re-validated before
// they are reported.

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "ninf/core.hpp"

namespace ninf {

struct SubBox {
    std::vector<int> rows, cols, syms;  // each sorted ascending
    int order() const { return static_cast<int>(rows.size()); }
    friend bool operator==(const SubBox&, const SubBox&) = default;
};

// Witness order: by row set, then column set (symbols are determined).
inline bool lex_less(const SubBox& a, const SubBox& b) {
    if (a.rows != b.rows) return a.rows < b.rows;
    return a.cols < b.cols;
}

namespace detail {

// Reusable closure workspace; one instance amortizes allocations over an
// entire seed sweep.
class BoxScanner {
  public:
    explicit BoxScanner(const LatinSquare& L)
        : L_(&L),
          n_(L.order()),
          rstamp_(n_ + 1, 0),
          cstamp_(n_ + 1, 0),
          sstamp_(n_ + 1, 0) {}

    // Minimal closed box containing the seed, or nullopt if any of the three
    // sets would grow past `bound`.
    std::optional<SubBox> close(const std::vector<int>& rows0,
                                const std::vector<int>& cols0, int bound) {
        ++epoch_;
        rows_.clear();
        cols_.clear();
        syms_.clear();
        ok_ = true;
        bound_ = bound;
        for (int r : rows0) add_row(r);
        for (int c : cols0) add_col(c);
        size_t pr = 0, pc = 0, ps = 0;
        while (ok_ && (pr < rows_.size() || pc < cols_.size() || ps < syms_.size())) {
            while (ok_ && pr < rows_.size()) {
                int r = rows_[pr++];
                for (size_t t = 0; ok_ && t < cols_.size(); ++t)
                    add_sym(L_->at(r, cols_[t]));
                for (size_t t = 0; ok_ && t < syms_.size(); ++t)
                    add_col(L_->row_inv(r, syms_[t]));
            }
            while (ok_ && pc < cols_.size()) {
                int c = cols_[pc++];
                for (size_t t = 0; ok_ && t < rows_.size(); ++t)
                    add_sym(L_->at(rows_[t], c));
                for (size_t t = 0; ok_ && t < syms_.size(); ++t)
                    add_row(L_->col_inv(c, syms_[t]));
            }
            while (ok_ && ps < syms_.size()) {
                int s = syms_[ps++];
                for (size_t t = 0; ok_ && t < rows_.size(); ++t)
                    add_col(L_->row_inv(rows_[t], s));
                for (size_t t = 0; ok_ && t < cols_.size(); ++t)
                    add_row(L_->col_inv(cols_[t], s));
            }
        }
        if (!ok_) return std::nullopt;
        SubBox box{rows_, cols_, syms_};
        std::sort(box.rows.begin(), box.rows.end());
        std::sort(box.cols.begin(), box.cols.end());
        std::sort(box.syms.begin(), box.syms.end());
        return box;
    }

  private:
    void add_row(int r) {
        if (rstamp_[r] == epoch_) return;
        if (static_cast<int>(rows_.size()) >= bound_) {
            ok_ = false;
            return;
        }
        rstamp_[r] = epoch_;
        rows_.push_back(r);
    }
    void add_col(int c) {
        if (cstamp_[c] == epoch_) return;
        if (static_cast<int>(cols_.size()) >= bound_) {
            ok_ = false;
            return;
        }
        cstamp_[c] = epoch_;
        cols_.push_back(c);
    }
    void add_sym(int s) {
        if (sstamp_[s] == epoch_) return;
        // A closed box has as many symbols as rows, so overflowing the symbol
        // set also proves no small box contains the seed.
        if (static_cast<int>(syms_.size()) >= bound_) {
            ok_ = false;
            return;
        }
        sstamp_[s] = epoch_;
        syms_.push_back(s);
    }

    const LatinSquare* L_;
    int n_;
    int bound_ = 0;
    bool ok_ = true;
    int64_t epoch_ = 0;
    std::vector<int64_t> rstamp_, cstamp_, sstamp_;
    std::vector<int> rows_, cols_, syms_;
};

// Runs `fn` on every closed box of L with order <= bound (deduplicated), in
// unspecified order: all minimal closures over seeds ({r},{c1,c2}) plus
// everything reachable from them by extend-and-reclose.
template <class Fn>
void sweep_closed_boxes(const LatinSquare& L, int bound, Fn&& fn) {
    int n = L.order();
    bound = std::min(bound, n / 2);
    if (bound < 2) return;
    BoxScanner sc(L);
    std::set<std::pair<std::vector<int>, std::vector<int>>> seen;
    std::vector<SubBox> work;
    auto record = [&](std::optional<SubBox> box) {
        if (!box) return;
        if (!seen.insert({box->rows, box->cols}).second) return;
        fn(static_cast<const SubBox&>(*box));
        work.push_back(std::move(*box));
    };
    std::vector<int> seed_rows(1), seed_cols(2);
    for (int r = 1; r <= n; ++r)
        for (int c1 = 1; c1 <= n; ++c1)
            for (int c2 = c1 + 1; c2 <= n; ++c2) {
                seed_rows[0] = r;
                seed_cols[0] = c1;
                seed_cols[1] = c2;
                record(sc.close(seed_rows, seed_cols, bound));
            }
    // Non-minimal boxes: grow each discovered box by one row or column.
    std::vector<int> grown;
    while (!work.empty()) {
        SubBox box = std::move(work.back());
        work.pop_back();
        if (box.order() >= bound) continue;
        for (int r = 1; r <= n; ++r) {
            if (std::binary_search(box.rows.begin(), box.rows.end(), r)) continue;
            grown = box.rows;
            grown.push_back(r);
            record(sc.close(grown, box.cols, bound));
        }
        for (int c = 1; c <= n; ++c) {
            if (std::binary_search(box.cols.begin(), box.cols.end(), c)) continue;
            grown = box.cols;
            grown.push_back(c);
            record(sc.close(box.rows, grown, bound));
        }
    }
}

}  // namespace detail

// Minimal subsquare containing all of rows0 x cols0, or nullopt if it would
// exceed `bound` rows, columns or symbols.
inline std::optional<SubBox> closure(const LatinSquare& L, const std::vector<int>& rows0,
                                     const std::vector<int>& cols0, int bound) {
    detail::BoxScanner sc(L);
    return sc.close(rows0, cols0, bound);
}

// Lexicographically least proper subsquare (order in [2, n-1]), if any.
inline std::optional<SubBox> find_proper_subsquare(const LatinSquare& L) {
    std::optional<SubBox> best;
    detail::sweep_closed_boxes(L, L.order() / 2, [&](const SubBox& box) {
        if (!best || lex_less(box, *best)) best = box;
    });
    return best;
}

// All proper subsquares, in witness order.  Meant for squares that have few;
// cost grows with the number of closed boxes.
inline std::vector<SubBox> enumerate_proper_subsquares(const LatinSquare& L) {
    std::vector<SubBox> out;
    detail::sweep_closed_boxes(L, L.order() / 2,
                               [&](const SubBox& box) { out.push_back(box); });
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return lex_less(a, b); });
    return out;
}

// Runs `num_seeds` random-seed closures; any hit is a genuine proper
// subsquare, and a miss means no proper subsquare contains any sampled seed.
inline std::optional<SubBox> sample_proper_subsquare(const LatinSquare& L,
                                                     long num_seeds, uint64_t seed) {
    int n = L.order();
    int bound = n / 2;
    if (bound < 2) return std::nullopt;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> dist(1, n);
    detail::BoxScanner sc(L);
    std::vector<int> rows0(1), cols0(2);
    for (long t = 0; t < num_seeds; ++t) {
        rows0[0] = dist(rng);
        int c1 = dist(rng), c2 = dist(rng);
        while (c2 == c1) c2 = dist(rng);
        cols0[0] = c1;
        cols0[1] = c2;
        if (auto box = sc.close(rows0, cols0, bound)) return box;
    }
    return std::nullopt;
}

namespace detail {

inline bool next_combination(std::vector<int>& combo, int n) {
    int k = static_cast<int>(combo.size());
    for (int i = k - 1; i >= 0; --i) {
        if (combo[i] < n - (k - 1 - i)) {
            ++combo[i];
            for (int j = i + 1; j < k; ++j) combo[j] = combo[j - 1] + 1;
            return true;
        }
    }
    return false;
}

inline std::vector<int> first_combination(int k) {
    std::vector<int> combo(k);
    for (int i = 0; i < k; ++i) combo[i] = i + 1;
    return combo;
}

}  // namespace detail

// Independent oracle: tests every k x k row/column subset pair directly.
inline std::vector<SubBox> brute_force_subsquares(const LatinSquare& L) {
    int n = L.order();
    if (n > 8)
        throw unsupported_order("exhaustive subsquare enumeration is capped at order 8");
    std::vector<SubBox> out;
    std::vector<int> seen(n + 1, 0);
    int stamp = 0;
    for (int k = 2; k < n; ++k) {
        auto rows = detail::first_combination(k);
        do {
            auto cols = detail::first_combination(k);
            do {
                bool ok = true;
                std::vector<int> syms;
                // Rows distinct and drawn from a common k-symbol set.
                ++stamp;
                for (int i = 0; ok && i < k; ++i) {
                    int s = L.at(rows[0], cols[i]);
                    if (seen[s] == stamp) ok = false;
                    seen[s] = stamp;
                    syms.push_back(s);
                }
                for (int r = 1; ok && r < k; ++r) {
                    ++stamp;
                    for (int i = 0; ok && i < k; ++i) {
                        int s = L.at(rows[r], cols[i]);
                        if (seen[s] == stamp ||
                            std::find(syms.begin(), syms.end(), s) == syms.end())
                            ok = false;
                        seen[s] = stamp;
                    }
                }
                // Columns distinct.
                for (int i = 0; ok && i < k; ++i) {
                    ++stamp;
                    for (int r = 0; ok && r < k; ++r) {
                        int s = L.at(rows[r], cols[i]);
                        if (seen[s] == stamp) ok = false;
                        seen[s] = stamp;
                    }
                }
                if (ok) {
                    std::sort(syms.begin(), syms.end());
                    out.push_back(SubBox{rows, cols, syms});
                }
            } while (detail::next_combination(cols, n));
        } while (detail::next_combination(rows, n));
    }
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return lex_less(a, b); });
    return out;
}

// ---------------------------------------------------------------------------
// Intercalates (order-2 subsquares), including in perturbed squares.

inline bool contains_intercalate(const PerturbedSquare& P) {
    int n = P.order();
    std::vector<int64_t> stamp(static_cast<size_t>(n) * n, 0);
    int64_t ep = 0;
    for (int r1 = 1; r1 < n; ++r1)
        for (int r2 = r1 + 1; r2 <= n; ++r2) {
            ++ep;
            for (int c = 1; c <= n; ++c) {
                int a = P.at(r1, c), b = P.at(r2, c);
                if (a == b) continue;
                if (stamp[static_cast<size_t>(b - 1) * n + (a - 1)] == ep) return true;
                stamp[static_cast<size_t>(a - 1) * n + (b - 1)] = ep;
            }
        }
    return false;
}

inline bool contains_intercalate(const LatinSquare& L) {
    return contains_intercalate(PerturbedSquare(L, {}));
}

// Lexicographically least intercalate, if any.
inline std::optional<SubBox> find_intercalate(const PerturbedSquare& P) {
    int n = P.order();
    std::vector<int64_t> stamp(static_cast<size_t>(n) * n, 0);
    std::vector<int> colof(static_cast<size_t>(n) * n, 0);
    int64_t ep = 0;
    for (int r1 = 1; r1 < n; ++r1)
        for (int r2 = r1 + 1; r2 <= n; ++r2) {
            ++ep;
            std::optional<std::pair<int, int>> best;
            for (int c = 1; c <= n; ++c) {
                int a = P.at(r1, c), b = P.at(r2, c);
                if (a == b) continue;
                size_t rev = static_cast<size_t>(b - 1) * n + (a - 1);
                if (stamp[rev] == ep) {
                    std::pair<int, int> cand{colof[rev], c};
                    if (!best || cand < *best) best = cand;
                }
                size_t fwd = static_cast<size_t>(a - 1) * n + (b - 1);
                if (stamp[fwd] != ep) {  // keep the earliest column per pattern
                    stamp[fwd] = ep;
                    colof[fwd] = c;
                }
            }
            if (best) {
                int c1 = best->first, c2 = best->second;
                std::vector<int> syms{P.at(r1, c1), P.at(r1, c2)};
                std::sort(syms.begin(), syms.end());
                return SubBox{{r1, r2}, {c1, c2}, syms};
            }
        }
    return std::nullopt;
}

inline std::optional<SubBox> find_intercalate(const LatinSquare& L) {
    return find_intercalate(PerturbedSquare(L, {}));
}

// True iff (sigma into cell (r,c) of L) lies in an intercalate that uses the
// overridden cell itself.  O(n); intercalates avoiding the cell are exactly
// intercalates of L and are the caller's business.
inline bool intercalate_through_cell(const LatinSquare& L, int r, int c, int sigma) {
    int n = L.order();
    for (int r2 = 1; r2 <= n; ++r2) {
        if (r2 == r) continue;
        int b = L.at(r2, c);
        if (b == sigma) continue;
        int c2 = L.row_inv(r, b);
        if (c2 == c) continue;
        if (L.at(r2, c2) == sigma) return true;
    }
    return false;
}

// ---------------------------------------------------------------------------
// Subsquares of perturbed squares via branching closure.

namespace detail {

class PerturbedScanner {
  public:
    PerturbedScanner(const PerturbedSquare& P, int bound) : P_(&P), bound_(bound) {}

    // Visits every Latin box of order <= bound containing the seed, dedup'd
    // across calls on this instance.  cb returns false to stop the sweep;
    // enumerate() then returns false as well.
    bool enumerate(const std::vector<int>& rows0, const std::vector<int>& cols0,
                   const std::function<bool(const SubBox&)>& cb) {
        cb_ = &cb;
        stopped_ = false;
        State st;
        st.rows = rows0;
        st.cols = cols0;
        close_branch(std::move(st));
        while (!stopped_ && !work_.empty()) {
            SubBox box = std::move(work_.back());
            work_.pop_back();
            if (box.order() >= bound_) continue;
            int n = P_->order();
            for (int r = 1; r <= n && !stopped_; ++r) {
                if (std::binary_search(box.rows.begin(), box.rows.end(), r)) continue;
                State st2;
                st2.rows = box.rows;
                st2.rows.push_back(r);
                st2.cols = box.cols;
                close_branch(std::move(st2));
            }
            for (int c = 1; c <= n && !stopped_; ++c) {
                if (std::binary_search(box.cols.begin(), box.cols.end(), c)) continue;
                State st2;
                st2.rows = box.rows;
                st2.cols = box.cols;
                st2.cols.push_back(c);
                close_branch(std::move(st2));
            }
        }
        return !stopped_;
    }

  private:
    struct State {
        std::vector<int> rows, cols, syms;
        bool has(const std::vector<int>& v, int x) const {
            return std::find(v.begin(), v.end(), x) != v.end();
        }
    };

    // Fixpoint with branching: symbol lookups in perturbed rows/columns can
    // return two candidates, in which case both worlds are explored.
    void close_branch(State st) {
        if (stopped_) return;
        std::vector<int> cand;
        for (;;) {
            if (static_cast<int>(st.rows.size()) > bound_ ||
                static_cast<int>(st.cols.size()) > bound_ ||
                static_cast<int>(st.syms.size()) > bound_)
                return;
            bool changed = false;
            for (size_t i = 0; i < st.rows.size(); ++i)
                for (size_t j = 0; j < st.cols.size(); ++j) {
                    int s = P_->at(st.rows[i], st.cols[j]);
                    if (!st.has(st.syms, s)) {
                        st.syms.push_back(s);
                        changed = true;
                    }
                }
            if (static_cast<int>(st.syms.size()) > bound_) return;
            for (size_t i = 0; i < st.rows.size(); ++i)
                for (size_t j = 0; j < st.syms.size(); ++j) {
                    P_->row_candidates(st.rows[i], st.syms[j], cand);
                    bool satisfied = false;
                    for (int c : cand)
                        if (st.has(st.cols, c)) satisfied = true;
                    if (satisfied) continue;
                    if (cand.empty()) return;  // symbol missing from this row
                    if (cand.size() == 1) {
                        st.cols.push_back(cand[0]);
                        changed = true;
                        continue;
                    }
                    for (size_t t = 1; t < cand.size(); ++t) {
                        State branch = st;
                        branch.cols.push_back(cand[t]);
                        close_branch(std::move(branch));
                    }
                    st.cols.push_back(cand[0]);
                    changed = true;
                }
            if (static_cast<int>(st.cols.size()) > bound_) return;
            for (size_t i = 0; i < st.cols.size(); ++i)
                for (size_t j = 0; j < st.syms.size(); ++j) {
                    P_->col_candidates(st.cols[i], st.syms[j], cand);
                    bool satisfied = false;
                    for (int r : cand)
                        if (st.has(st.rows, r)) satisfied = true;
                    if (satisfied) continue;
                    if (cand.empty()) return;
                    if (cand.size() == 1) {
                        st.rows.push_back(cand[0]);
                        changed = true;
                        continue;
                    }
                    for (size_t t = 1; t < cand.size(); ++t) {
                        State branch = st;
                        branch.rows.push_back(cand[t]);
                        close_branch(std::move(branch));
                    }
                    st.rows.push_back(cand[0]);
                    changed = true;
                }
            if (static_cast<int>(st.rows.size()) > bound_) return;
            if (!changed) break;
        }
        dispatch(st);
    }

    // A fixpoint inside any genuine Latin box is itself Latin, so boxes that
    // fail validation here cannot sit inside one and are safe to drop.
    void dispatch(const State& st) {
        if (st.rows.size() != st.cols.size() || st.rows.size() != st.syms.size())
            return;
        for (int r : st.rows) {
            for (size_t i = 0; i < st.cols.size(); ++i) {
                int s = P_->at(r, st.cols[i]);
                if (!st.has(st.syms, s)) return;
                for (size_t j = i + 1; j < st.cols.size(); ++j)
                    if (P_->at(r, st.cols[j]) == s) return;
            }
        }
        for (int c : st.cols) {
            for (size_t i = 0; i < st.rows.size(); ++i) {
                int s = P_->at(st.rows[i], c);
                for (size_t j = i + 1; j < st.rows.size(); ++j)
                    if (P_->at(st.rows[j], c) == s) return;
            }
        }
        SubBox box{st.rows, st.cols, st.syms};
        std::sort(box.rows.begin(), box.rows.end());
        std::sort(box.cols.begin(), box.cols.end());
        std::sort(box.syms.begin(), box.syms.end());
        if (!seen_.insert({box.rows, box.cols}).second) return;
        if (!(*cb_)(box)) {
            stopped_ = true;
            return;
        }
        work_.push_back(std::move(box));
    }

    const PerturbedSquare* P_;
    int bound_;
    const std::function<bool(const SubBox&)>* cb_ = nullptr;
    bool stopped_ = false;
    std::set<std::pair<std::vector<int>, std::vector<int>>> seen_;
    std::vector<SubBox> work_;
};

// Seeds covering every Latin box that contains all of `must_contain`.
template <class Fn>
bool perturbed_sweep(const PerturbedSquare& P, const std::vector<Entry>& must_contain,
                     int bound, Fn&& fn) {
    std::vector<int> rows0, cols0;
    for (const auto& e : must_contain) {
        if (std::find(rows0.begin(), rows0.end(), e.row) == rows0.end())
            rows0.push_back(e.row);
        if (std::find(cols0.begin(), cols0.end(), e.col) == cols0.end())
            cols0.push_back(e.col);
    }
    PerturbedScanner sc(P, bound);
    std::function<bool(const SubBox&)> cb = fn;
    if (rows0.size() >= 2 || cols0.size() >= 2)
        return sc.enumerate(rows0, cols0, cb);
    // Single anchor cell: pair its column with every other column.
    int n = P.order();
    std::vector<int> cols(2);
    cols[0] = cols0[0];
    for (int c = 1; c <= n; ++c) {
        if (c == cols0[0]) continue;
        cols[1] = c;
        if (!sc.enumerate(rows0, cols, cb)) return false;
    }
    return true;
}

}  // namespace detail

// All Latin boxes of P with order in [min_order, max_order] containing every
// cell of must_contain (which must be nonempty), in witness order.  The
// search caps at ceil((n+1)/2): a box through an overridden cell cannot be
// larger, and anything avoiding the overrides is a subsquare of the base.
inline std::vector<SubBox> perturbed_subsquares(const PerturbedSquare& P, int min_order,
                                                int max_order,
                                                const std::vector<Entry>& must_contain) {
    int n = P.order();
    int bound = std::min(max_order, (n + 2) / 2);
    std::vector<SubBox> out;
    detail::perturbed_sweep(P, must_contain, bound, [&](const SubBox& box) {
        if (box.order() < min_order || box.order() > max_order) return true;
        for (const auto& e : must_contain)
            if (!std::binary_search(box.rows.begin(), box.rows.end(), e.row) ||
                !std::binary_search(box.cols.begin(), box.cols.end(), e.col))
                return true;
        out.push_back(box);
        return true;
    });
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return lex_less(a, b); });
    return out;
}

// Existence-only variant with early exit.
inline bool has_perturbed_subsquare(const PerturbedSquare& P, int min_order, int max_order,
                                    const std::vector<Entry>& must_contain) {
    int n = P.order();
    int bound = std::min(max_order, (n + 2) / 2);
    bool finished = detail::perturbed_sweep(P, must_contain, bound, [&](const SubBox& box) {
        if (box.order() < min_order || box.order() > max_order) return true;
        for (const auto& e : must_contain)
            if (!std::binary_search(box.rows.begin(), box.rows.end(), e.row) ||
                !std::binary_search(box.cols.begin(), box.cols.end(), e.col))
                return true;
        return false;  // found one: stop
    });
    return !finished;
}

// True iff some single-symbol square submatrix of P contains both cells.
// Any such k x k witness contains a 2 x 2 one through the same two cells,
// so only the 2 x 2 cases need checking.
inline bool mono_square_through(const PerturbedSquare& P, Entry e1, Entry e2) {
    int s = P.at(e1.row, e1.col);
    if (P.at(e2.row, e2.col) != s) return false;
    int n = P.order();
    if (e1.row != e2.row && e1.col != e2.col)
        return P.at(e1.row, e2.col) == s && P.at(e2.row, e1.col) == s;
    if (e1.row == e2.row) {
        for (int r = 1; r <= n; ++r)
            if (r != e1.row && P.at(r, e1.col) == s && P.at(r, e2.col) == s) return true;
        return false;
    }
    if (e1.col == e2.col) {
        for (int c = 1; c <= n; ++c)
            if (c != e1.col && P.at(e1.row, c) == s && P.at(e2.row, c) == s) return true;
        return false;
    }
    return false;
}

// ---------------------------------------------------------------------------
// Subhypercubes.

struct HyperBox {
    std::vector<std::vector<int>> axes;  // axes[k-1]: sorted coordinates on axis k
    std::vector<int> syms;
    int order() const { return static_cast<int>(axes.at(0).size()); }
    friend bool operator==(const HyperBox&, const HyperBox&) = default;
};

inline bool lex_less(const HyperBox& a, const HyperBox& b) { return a.axes < b.axes; }

namespace detail {

// Fixpoint closure of a coordinate box in a hypercube; nullopt when any axis
// or the symbol set would exceed `bound`.
inline std::optional<HyperBox> close_cube(const Hypercube& H,
                                          std::vector<std::vector<int>> axes, int bound) {
    int n = H.order(), d = H.dim();
    std::vector<int> syms;
    std::vector<char> in_sym(n + 1, 0);
    std::vector<std::vector<char>> in_axis(d, std::vector<char>(n + 1, 0));
    for (int k = 0; k < d; ++k)
        for (int x : axes[k]) in_axis[k][x] = 1;
    std::vector<int> pos(n + 1, 0);
    for (;;) {
        bool changed = false;
        // Symbols on box cells.
        std::vector<size_t> idx(d, 0);
        std::vector<int> coords(d);
        for (;;) {
            for (int k = 0; k < d; ++k) coords[k] = axes[k][idx[k]];
            int s = H.at(coords);
            if (!in_sym[s]) {
                if (static_cast<int>(syms.size()) >= bound) return std::nullopt;
                in_sym[s] = 1;
                syms.push_back(s);
                changed = true;
            }
            int k = d - 1;
            while (k >= 0 && ++idx[k] == axes[k].size()) idx[k--] = 0;
            if (k < 0) break;
        }
        // Each symbol must appear on every line through the box.
        for (int k = 0; k < d; ++k) {
            size_t st = H.stride(k + 1);
            std::vector<size_t> jdx(d, 0);
            for (;;) {
                size_t base = 0;
                for (int i = 0; i < d; ++i) {
                    int coord = (i == k) ? 1 : axes[i][jdx[i]];
                    base = base * n + (coord - 1);
                }
                for (int t = 1; t <= n; ++t)
                    pos[H.data()[base + st * (t - 1)]] = t;
                for (int s : syms) {
                    int t = pos[s];
                    if (!in_axis[k][t]) {
                        if (static_cast<int>(axes[k].size()) >= bound) return std::nullopt;
                        in_axis[k][t] = 1;
                        axes[k].push_back(t);
                        changed = true;
                    }
                }
                int i = d - 1;
                while (i >= 0) {
                    if (i == k) {
                        --i;
                        continue;
                    }
                    if (++jdx[i] < axes[i].size()) break;
                    jdx[i--] = 0;
                }
                if (i < 0) break;
            }
        }
        if (!changed) break;
    }
    HyperBox box{std::move(axes), std::move(syms)};
    for (auto& ax : box.axes) std::sort(ax.begin(), ax.end());
    std::sort(box.syms.begin(), box.syms.end());
    return box;
}

}  // namespace detail

// Lexicographically least proper subhypercube reachable as a minimal closure:
// seeds are a coordinate pair on axis 1 and one coordinate on each other
// axis, which every subhypercube contains.
inline std::optional<HyperBox> find_proper_subhypercube(const Hypercube& H) {
    int n = H.order(), d = H.dim();
    int bound = n / 2;
    if (bound < 2) return std::nullopt;
    std::optional<HyperBox> best;
    std::vector<int> rest(d - 1, 1);
    for (int a = 1; a <= n; ++a)
        for (int b = a + 1; b <= n; ++b) {
            std::fill(rest.begin(), rest.end(), 1);
            for (;;) {
                std::vector<std::vector<int>> axes(d);
                axes[0] = {a, b};
                for (int k = 1; k < d; ++k) axes[k] = {rest[k - 1]};
                auto box = detail::close_cube(H, std::move(axes), bound);
                if (box && (!best || lex_less(*box, *best))) best = box;
                int k = d - 2;
                while (k >= 0 && ++rest[k] > n) rest[k--] = 1;
                if (k < 0) break;
            }
        }
    return best;
}

// Direct oracle over all coordinate subset triples; order <= 4, dim 3 only.
inline std::vector<HyperBox> brute_force_subhypercubes(const Hypercube& H) {
    int n = H.order();
    if (n > 4 || H.dim() != 3)
        throw unsupported_order("exhaustive subhypercube enumeration is capped at order 4, dim 3");
    std::vector<HyperBox> out;
    for (int k = 2; k < n; ++k) {
        auto xs = detail::first_combination(k);
        do {
            auto ys = detail::first_combination(k);
            do {
                auto zs = detail::first_combination(k);
                do {
                    std::vector<int> syms;
                    bool ok = true;
                    for (int x : xs)
                        for (int y : ys)
                            for (int z : zs) {
                                int s = H.at({x, y, z});
                                if (std::find(syms.begin(), syms.end(), s) == syms.end())
                                    syms.push_back(s);
                            }
                    if (static_cast<int>(syms.size()) != k) ok = false;
                    // Every line inside the box must avoid repeats.
                    for (int x : xs)
                        for (int y : ys) {
                            std::vector<int> seen;
                            for (int z : zs) {
                                int s = H.at({x, y, z});
                                if (std::find(seen.begin(), seen.end(), s) != seen.end())
                                    ok = false;
                                seen.push_back(s);
                            }
                        }
                    for (int x : xs)
                        for (int z : zs) {
                            std::vector<int> seen;
                            for (int y : ys) {
                                int s = H.at({x, y, z});
                                if (std::find(seen.begin(), seen.end(), s) != seen.end())
                                    ok = false;
                                seen.push_back(s);
                            }
                        }
                    for (int y : ys)
                        for (int z : zs) {
                            std::vector<int> seen;
                            for (int x : xs) {
                                int s = H.at({x, y, z});
                                if (std::find(seen.begin(), seen.end(), s) != seen.end())
                                    ok = false;
                                seen.push_back(s);
                            }
                        }
                    if (ok) {
                        std::sort(syms.begin(), syms.end());
                        out.push_back(HyperBox{{xs, ys, zs}, syms});
                    }
                } while (detail::next_combination(zs, n));
            } while (detail::next_combination(ys, n));
        } while (detail::next_combination(xs, n));
    }
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return lex_less(a, b); });
    return out;
}

// ---------------------------------------------------------------------------
// Isotopy.

struct Isotopism {
    std::vector<int> row_map, col_map, sym_map;  // 1-based images
};

// Searches row bijections; each choice of the image of column 1 then forces
// the symbol map (via column 1) and the column map (via row 1), leaving an
// O(n^2) verification.  Capped at order 9.
inline std::optional<Isotopism> is_isotopic(const LatinSquare& A, const LatinSquare& B) {
    int n = A.order();
    if (B.order() != n) return std::nullopt;
    if (n > 9) throw unsupported_order("isotopy search is capped at order 9");
    std::vector<int> p(n);
    for (int i = 0; i < n; ++i) p[i] = i + 1;
    std::vector<int> sym(n + 1, 0), col(n + 1, 0);
    do {
        for (int c1 = 1; c1 <= n; ++c1) {
            for (int i = 1; i <= n; ++i) sym[A.at(i, 1)] = B.at(p[i - 1], c1);
            for (int j = 1; j <= n; ++j) col[j] = B.row_inv(p[0], sym[A.at(1, j)]);
            bool ok = true;
            for (int i = 2; ok && i <= n; ++i)
                for (int j = 1; ok && j <= n; ++j)
                    if (B.at(p[i - 1], col[j]) != sym[A.at(i, j)]) ok = false;
            if (ok) {
                Isotopism iso;
                iso.row_map = p;
                iso.col_map.assign(col.begin() + 1, col.end());
                iso.sym_map.resize(n);
                for (int s = 1; s <= n; ++s) iso.sym_map[s - 1] = sym[s];
                return iso;
            }
        }
    } while (std::next_permutation(p.begin(), p.end()));
    return std::nullopt;
}

}  // namespace ninf

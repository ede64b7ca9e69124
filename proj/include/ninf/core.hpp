#pragma once
// Latin squares and hypercubes over the symbol set [n] = {1..n}, plus the
// local surgery used to build squares with no proper subsquares: row-cycle
// switches, eta trades, direct and corrupted products, and the +shift boost
// that lifts squares to higher-dimensional hypercubes.
//
// Conventions used throughout the library:
//   * rows, columns and symbols are 1-based representatives in [n],
//   * every wrap-around goes through shift_by(), never through raw %.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ninf {

// v + t over the representatives {1..n}; t may be negative or large.
inline int shift_by(int v, long t, int n) {
    long r = (static_cast<long>(v) - 1 + t) % n;
    if (r < 0) r += n;
    return static_cast<int>(r) + 1;
}

struct not_latin_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct unsupported_order : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct no_such_object : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct budget_exhausted : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Entry {
    int row = 0, col = 0, sym = 0;
    friend bool operator==(const Entry&, const Entry&) = default;
};

// An order-n Latin square with row and column inverses kept alongside the
// cell grid, so that "where does symbol s sit in row r / column c" is O(1).
class LatinSquare {
  public:
    LatinSquare() = default;

    // Validates that `cells` (row-major, 1-based symbols) is Latin.
    LatinSquare(int order, std::vector<int> cells)
        : n_(order), cells_(std::move(cells)) {
        if (n_ <= 0 || cells_.size() != static_cast<size_t>(n_) * n_)
            throw not_latin_error("cell grid does not match order");
        row_inv_.assign(cells_.size(), 0);
        col_inv_.assign(cells_.size(), 0);
        for (int r = 1; r <= n_; ++r)
            for (int c = 1; c <= n_; ++c) {
                int s = at(r, c);
                if (s < 1 || s > n_)
                    throw not_latin_error("symbol out of range");
                int& rslot = row_inv_[idx(r, s)];
                if (rslot != 0)
                    throw not_latin_error("repeated symbol in a row");
                rslot = c;
                int& cslot = col_inv_[idx(c, s)];
                if (cslot != 0)
                    throw not_latin_error("repeated symbol in a column");
                cslot = r;
            }
    }

    int order() const { return n_; }
    int at(int r, int c) const { return cells_[idx(r, c)]; }
    // Column holding symbol s in row r.
    int row_inv(int r, int s) const { return row_inv_[idx(r, s)]; }
    // Row holding symbol s in column c.
    int col_inv(int c, int s) const { return col_inv_[idx(c, s)]; }

    std::vector<int> row(int r) const {
        return {cells_.begin() + static_cast<long>(r - 1) * n_,
                cells_.begin() + static_cast<long>(r) * n_};
    }
    std::vector<std::vector<int>> rows() const {
        std::vector<std::vector<int>> out;
        out.reserve(n_);
        for (int r = 1; r <= n_; ++r) out.push_back(row(r));
        return out;
    }
    const std::vector<int>& cells() const { return cells_; }

    friend bool operator==(const LatinSquare& a, const LatinSquare& b) {
        return a.n_ == b.n_ && a.cells_ == b.cells_;
    }

  private:
    size_t idx(int a, int b) const {
        return static_cast<size_t>(a - 1) * n_ + (b - 1);
    }
    int n_ = 0;
    std::vector<int> cells_;
    std::vector<int> row_inv_;
    std::vector<int> col_inv_;
};

inline LatinSquare ls_from_rows(const std::vector<std::vector<int>>& rows) {
    int n = static_cast<int>(rows.size());
    std::vector<int> cells;
    cells.reserve(static_cast<size_t>(n) * n);
    for (const auto& r : rows) {
        if (static_cast<int>(r.size()) != n)
            throw not_latin_error("ragged row");
        cells.insert(cells.end(), r.begin(), r.end());
    }
    return LatinSquare(n, std::move(cells));
}

// C[i,j] = i + j over [n].
inline LatinSquare cyclic_square(int n) {
    std::vector<int> cells(static_cast<size_t>(n) * n);
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j)
            cells[static_cast<size_t>(i - 1) * n + (j - 1)] = shift_by(i, j, n);
    return LatinSquare(n, std::move(cells));
}

inline LatinSquare transpose(const LatinSquare& L) {
    int n = L.order();
    std::vector<int> cells(static_cast<size_t>(n) * n);
    for (int r = 1; r <= n; ++r)
        for (int c = 1; c <= n; ++c)
            cells[static_cast<size_t>(c - 1) * n + (r - 1)] = L.at(r, c);
    return LatinSquare(n, std::move(cells));
}

// ---------------------------------------------------------------------------
// Row cycles and switches.
//
// tau_{i,j} maps L[i,c] to L[j,c] for every column c; its cycles partition the
// symbols.  A row cycle rho(i,j,c) is the set of columns visited by following
// tau_{i,j} from the symbol in cell (i,c); swapping rows i and j on exactly
// those columns preserves Latin-ness.

struct RowCycle {
    int i = 0, j = 0;
    std::vector<int> cols;  // in traversal order, starting at the anchor column

    int length() const { return static_cast<int>(cols.size()); }
    std::vector<int> sorted_cols() const {
        auto s = cols;
        std::sort(s.begin(), s.end());
        return s;
    }
};

inline RowCycle row_cycle(const LatinSquare& L, int i, int j, int c) {
    if (i == j) throw std::invalid_argument("row cycle needs two distinct rows");
    RowCycle rc{i, j, {}};
    int col = c;
    do {
        rc.cols.push_back(col);
        col = L.row_inv(i, L.at(j, col));  // column of tau(L[i,col]) in row i
    } while (col != c);
    return rc;
}

// Swaps rows rc.i and rc.j on the cycle's columns.  Rejects column sets that
// are not a tau_{i,j} cycle of this square, since an arbitrary swap would not
// stay Latin.
inline LatinSquare switch_row_cycle(const LatinSquare& L, const RowCycle& rc) {
    auto again = row_cycle(L, rc.i, rc.j, rc.cols.at(0));
    if (again.sorted_cols() != rc.sorted_cols())
        throw std::invalid_argument("column set is not a row cycle of this square");
    auto cells = L.cells();
    int n = L.order();
    for (int c : rc.cols)
        std::swap(cells[static_cast<size_t>(rc.i - 1) * n + (c - 1)],
                  cells[static_cast<size_t>(rc.j - 1) * n + (c - 1)]);
    return LatinSquare(n, std::move(cells));
}

// ---------------------------------------------------------------------------
// Eta trades.
//
// eta(i,j,x) is a 2(l+3)-cell trade anchored at three rows i, j, k and the
// column pair x, y, where a = L[i,x] = L[k,y], b = L[i,y] = L[j,x], and b
// lies on the tau_{j,k} cycle through a, written (a, z_1, ..., z_l, b, ...).
// Switching the trade swaps a with b, and each intermediate z_w between rows
// j and k, column by column.

struct EtaPlan {
    int i = 0, j = 0, k = 0;
    int x = 0, y = 0;
    int a = 0, b = 0;
    std::vector<int> zs;          // z_1 .. z_l (may be empty)
    std::vector<int> chain_cols;  // c_0 .. c_l: L[j, c_0] = a, L[j, c_w] = z_w
    std::vector<std::pair<int, int>> cells;  // all 2l+6 touched cells

    int l() const { return static_cast<int>(zs.size()); }
};

inline std::optional<EtaPlan> eta_plan(const LatinSquare& L, int i, int j, int x) {
    if (i == j) return std::nullopt;
    EtaPlan p;
    p.i = i;
    p.j = j;
    p.x = x;
    p.a = L.at(i, x);
    p.b = L.at(j, x);
    p.y = L.row_inv(i, p.b);
    p.k = L.col_inv(p.y, p.a);
    if (p.k == i || p.k == j) return std::nullopt;
    // Walk tau_{j,k} from a; b must appear before the cycle closes.
    int s = L.at(p.k, L.row_inv(j, p.a));  // tau(a)
    while (s != p.b) {
        if (s == p.a) return std::nullopt;  // cycle closed without reaching b
        p.zs.push_back(s);
        s = L.at(p.k, L.row_inv(j, s));
    }
    p.chain_cols.push_back(L.row_inv(j, p.a));
    for (int z : p.zs) p.chain_cols.push_back(L.row_inv(j, z));
    p.cells = {{p.i, p.x}, {p.i, p.y}, {p.j, p.x}, {p.k, p.y}};
    for (int c : p.chain_cols) {
        p.cells.emplace_back(p.j, c);
        p.cells.emplace_back(p.k, c);
    }
    // Column y may coincide with a chain column, which would write two
    // symbols into one cell; such trades are undefined.
    auto sorted = p.cells;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        return std::nullopt;
    return p;
}

// Applies the trade: every touched cell swaps its symbol with the other
// touched symbol in the same column.
inline LatinSquare switch_eta(const LatinSquare& L, const EtaPlan& p) {
    auto cells = L.cells();
    int n = L.order();
    auto put = [&](int r, int c, int s) {
        cells[static_cast<size_t>(r - 1) * n + (c - 1)] = s;
    };
    put(p.i, p.x, p.b);
    put(p.k, p.y, p.b);
    put(p.j, p.chain_cols.back(), p.b);
    put(p.i, p.y, p.a);
    put(p.j, p.x, p.a);
    put(p.k, p.chain_cols.front(), p.a);
    for (int w = 1; w <= p.l(); ++w) {
        put(p.j, p.chain_cols[w - 1], p.zs[w - 1]);
        put(p.k, p.chain_cols[w], p.zs[w - 1]);
    }
    return LatinSquare(n, std::move(cells));
}

// ---------------------------------------------------------------------------
// Perturbed squares: a Latin square with up to a couple of cells overridden.
// Not Latin itself; subsquare detection on these drives the certification
// checks, so symbol lookups report *all* candidate positions (0, 1 or 2 in
// any row or column touched by at most one override).

class PerturbedSquare {
  public:
    PerturbedSquare(const LatinSquare& base, std::vector<Entry> overrides)
        : base_(&base), overrides_(std::move(overrides)) {
        for (const auto& e : overrides_)
            if (base.at(e.row, e.col) == e.sym)
                throw std::invalid_argument("override repeats the existing symbol");
    }

    const LatinSquare& base() const { return *base_; }
    const std::vector<Entry>& overrides() const { return overrides_; }
    int order() const { return base_->order(); }

    int at(int r, int c) const {
        for (const auto& e : overrides_)
            if (e.row == r && e.col == c) return e.sym;
        return base_->at(r, c);
    }

    // Columns of row r that hold symbol s.
    void row_candidates(int r, int s, std::vector<int>& out) const {
        out.clear();
        int c0 = base_->row_inv(r, s);
        if (!overridden(r, c0)) out.push_back(c0);
        for (const auto& e : overrides_)
            if (e.row == r && e.sym == s) out.push_back(e.col);
        std::sort(out.begin(), out.end());
    }

    // Rows of column c that hold symbol s.
    void col_candidates(int c, int s, std::vector<int>& out) const {
        out.clear();
        int r0 = base_->col_inv(c, s);
        if (!overridden(r0, c)) out.push_back(r0);
        for (const auto& e : overrides_)
            if (e.col == c && e.sym == s) out.push_back(e.row);
        std::sort(out.begin(), out.end());
    }

  private:
    bool overridden(int r, int c) const {
        for (const auto& e : overrides_)
            if (e.row == r && e.col == c) return true;
        return false;
    }
    const LatinSquare* base_;
    std::vector<Entry> overrides_;
};

// sigma into cell (r,c) of L; sigma must differ from the resident symbol.
inline PerturbedSquare near_copy(const LatinSquare& L, int r, int c, int sigma) {
    return PerturbedSquare(L, {Entry{r, c, sigma}});
}

// ---------------------------------------------------------------------------
// Pair-indexed squares.  Rows, columns and symbols are pairs (a,b) with
// a in [outer], b in [inner]; the flat representative of (a,b) is
// phi(a,b) = inner*(a-1) + b, which is exactly the relabelling that sorts
// pairs by first coordinate.  The pair alphabet is kept as a view until
// relabel_prec1() is called.

class PairSquare {
  public:
    PairSquare(int outer, int inner, LatinSquare flat)
        : outer_(outer), inner_(inner), flat_(std::move(flat)) {
        if (flat_.order() != outer_ * inner_)
            throw std::invalid_argument("flat order must be outer*inner");
    }

    int outer() const { return outer_; }
    int inner() const { return inner_; }
    int order() const { return flat_.order(); }

    int phi(int a, int b) const { return inner_ * (a - 1) + b; }
    std::pair<int, int> unphi(int v) const {
        return {(v - 1) / inner_ + 1, (v - 1) % inner_ + 1};
    }

    std::pair<int, int> at(std::pair<int, int> row, std::pair<int, int> col) const {
        return unphi(flat_.at(phi(row.first, row.second), phi(col.first, col.second)));
    }

    const LatinSquare& flat() const { return flat_; }

  private:
    int outer_, inner_;
    LatinSquare flat_;
};

// Drops the pair alphabet: symbols (a,b) become phi(a,b) in [outer*inner].
inline LatinSquare relabel_prec1(const PairSquare& P) { return P.flat(); }

// (L x M)[(i,j),(x,y)] = (L[i,x], M[j,y]).
inline PairSquare direct_product(const LatinSquare& L, const LatinSquare& M) {
    int a = L.order(), m = M.order(), n = a * m;
    std::vector<int> cells(static_cast<size_t>(n) * n);
    for (int i = 1; i <= a; ++i)
        for (int j = 1; j <= m; ++j) {
            size_t rbase = (static_cast<size_t>(m) * (i - 1) + (j - 1)) * n;
            for (int x = 1; x <= a; ++x)
                for (int y = 1; y <= m; ++y)
                    cells[rbase + m * (x - 1) + (y - 1)] =
                        m * (L.at(i, x) - 1) + M.at(j, y);
        }
    return PairSquare(a, m, LatinSquare(n, std::move(cells)));
}

// The corrupted product (A,B) *_s M: the principal row of M-blocks takes its
// M-part shifted by s with A's first row, the rest of the principal column of
// M-block positions takes B entries, and everything else is A x M.
inline PairSquare corrupted_product(const LatinSquare& A, const LatinSquare& B,
                                    int s, const LatinSquare& M) {
    int a = A.order(), m = M.order();
    if (B.order() != a) throw std::invalid_argument("A and B must share an order");
    if (s < 1 || s >= m) throw std::invalid_argument("shift must lie in [order(M)-1]");
    int n = a * m;
    std::vector<int> cells(static_cast<size_t>(n) * n);
    for (int i = 1; i <= a; ++i)
        for (int j = 1; j <= m; ++j) {
            size_t rbase = (static_cast<size_t>(m) * (i - 1) + (j - 1)) * n;
            for (int k = 1; k <= a; ++k)
                for (int l = 1; l <= m; ++l) {
                    int asym, msym;
                    if (i == 1 && k == 1) {
                        asym = A.at(1, 1);
                        msym = shift_by(M.at(j, l), s, m);
                    } else if (j == 1 && l == 1) {
                        asym = B.at(i, k);
                        msym = M.at(1, 1);
                    } else {
                        asym = A.at(i, k);
                        msym = M.at(j, l);
                    }
                    cells[rbase + m * (k - 1) + (l - 1)] = m * (asym - 1) + msym;
                }
        }
    return PairSquare(a, m, LatinSquare(n, std::move(cells)));
}

// ---------------------------------------------------------------------------
// Hypercubes.  data is flat with the last axis fastest; every axis-parallel
// line must be a permutation of [n].

class Hypercube {
  public:
    Hypercube(int order, int dim, std::vector<int> data)
        : n_(order), d_(dim), data_(std::move(data)) {
        if (d_ < 2) throw std::invalid_argument("hypercubes start at dimension 2");
        size_t want = 1;
        for (int i = 0; i < d_; ++i) want *= static_cast<size_t>(n_);
        if (data_.size() != want)
            throw not_latin_error("data length does not match order^dim");
        validate();
    }

    int order() const { return n_; }
    int dim() const { return d_; }
    const std::vector<int>& data() const { return data_; }

    // coords are 1-based, coords.size() == dim.
    int at(const std::vector<int>& coords) const { return data_[offset(coords)]; }

    size_t offset(const std::vector<int>& coords) const {
        size_t off = 0;
        for (int i = 0; i < d_; ++i) off = off * n_ + (coords[i] - 1);
        return off;
    }

    // Stride between consecutive coordinates along `axis` (1-based).
    size_t stride(int axis) const {
        size_t s = 1;
        for (int i = 0; i < d_ - axis; ++i) s *= static_cast<size_t>(n_);
        return s;
    }

    friend bool operator==(const Hypercube& a, const Hypercube& b) {
        return a.n_ == b.n_ && a.d_ == b.d_ && a.data_ == b.data_;
    }

  private:
    void validate() const {
        std::vector<int> seen(n_ + 1, 0);
        int stampv = 0;
        size_t total = data_.size();
        for (int axis = 1; axis <= d_; ++axis) {
            size_t st = stride(axis);
            size_t block = st * static_cast<size_t>(n_);
            for (size_t base = 0; base < total; base += block)
                for (size_t off = base; off < base + st; ++off) {
                    ++stampv;
                    for (int t = 0; t < n_; ++t) {
                        int v = data_[off + st * t];
                        if (v < 1 || v > n_ || seen[v] == stampv)
                            throw not_latin_error("axis line is not a permutation");
                        seen[v] = stampv;
                    }
                }
        }
    }

    int n_, d_;
    std::vector<int> data_;
};

inline Hypercube square_as_cube(const LatinSquare& L) {
    return Hypercube(L.order(), 2, L.cells());
}

// Lifts H to dimension d2 >= dim(H): the new value is the old one shifted by
// the sum of all added coordinates.  Preserves the absence of proper
// subhypercubes.
inline Hypercube boost(const Hypercube& H, int d2) {
    int n = H.order(), d = H.dim();
    if (d2 < d) throw std::invalid_argument("target dimension below source");
    if (d2 == d) return H;
    size_t old_total = H.data().size();
    size_t total = old_total;
    for (int i = d; i < d2; ++i) total *= static_cast<size_t>(n);
    std::vector<int> data(total);
    // Old coordinates keep the leading axes; added axes trail (fastest).
    std::vector<int> tail(d2 - d, 1);
    size_t chunk = total / old_total;  // n^(d2-d)
    for (size_t base = 0; base < old_total; ++base) {
        int v = H.data()[base];
        std::fill(tail.begin(), tail.end(), 1);
        for (size_t t = 0; t < chunk; ++t) {
            long add = 0;
            for (int x : tail) add += x;
            data[base * chunk + t] = shift_by(v, add, n);
            for (int i = d2 - d - 1; i >= 0; --i) {
                if (++tail[i] <= n) break;
                tail[i] = 1;
            }
        }
    }
    return Hypercube(n, d2, std::move(data));
}

inline Hypercube boost(const LatinSquare& L, int d2) {
    return boost(square_as_cube(L), d2);
}

}  // namespace ninf

#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <utility>

#include "ninf/core.hpp"
#include "ninf/tables.hpp"

using namespace ninf;

TEST_CASE("shift_by wraps within [1, n] for any integer shift") {
    CHECK(shift_by(1, 1, 8) == 2);
    CHECK(shift_by(8, 1, 8) == 1);
    CHECK(shift_by(1, -1, 8) == 8);
    CHECK(shift_by(3, 0, 5) == 3);
    CHECK(shift_by(5, 13, 5) == 3);
    CHECK(shift_by(2, -17, 5) == 5);
    for (int n : {1, 2, 7})
        for (int v = 1; v <= n; ++v)
            for (long t = -2L * n; t <= 2L * n; ++t) {
                int r = shift_by(v, t, n);
                CHECK(r >= 1);
                CHECK(r <= n);
                CHECK(shift_by(r, -t, n) == v);
            }
}

TEST_CASE("latin square construction validates rows and columns") {
    auto C = cyclic_square(5);
    CHECK(C.order() == 5);
    CHECK(C.at(1, 1) == 2);  // shifted diagonal form: C[i,j] = i + j mod 5
    CHECK(C.at(5, 5) == 5);

    auto cells = C.cells();
    cells[0] = cells[1];  // duplicate in row 1
    CHECK_THROWS_AS(LatinSquare(5, cells), not_latin_error);

    cells = C.cells();
    cells[0] = 9;  // out of range
    CHECK_THROWS_AS(LatinSquare(5, cells), not_latin_error);

    CHECK_THROWS_AS(LatinSquare(5, std::vector<int>(24, 1)), not_latin_error);
    CHECK_THROWS_AS(ls_from_rows({{1, 2}, {2}}), not_latin_error);

    // column duplicate with valid rows
    CHECK_THROWS_AS(ls_from_rows({{1, 2}, {1, 2}}), not_latin_error);
}

TEST_CASE("inverse lookups agree with cell contents") {
    auto C = cyclic_square(7);
    for (int r = 1; r <= 7; ++r)
        for (int c = 1; c <= 7; ++c) {
            int s = C.at(r, c);
            CHECK(C.row_inv(r, s) == c);
            CHECK(C.col_inv(c, s) == r);
        }
}

TEST_CASE("embedded squares are Latin and match spot values") {
    const auto& E = table_E();
    const auto& A8 = table_A8();
    const auto& B8 = table_B8();
    const auto& A9 = table_A9();
    const auto& B9 = table_B9();
    CHECK(E.order() == 8);
    CHECK(A8.order() == 8);
    CHECK(B8.order() == 8);
    CHECK(A9.order() == 9);
    CHECK(B9.order() == 9);
    CHECK(E.at(1, 1) == 1);
    CHECK(E.at(2, 4) == 7);
    CHECK(E.at(8, 8) == 3);
    CHECK(A8.at(1, 1) == 4);
    CHECK(B8.at(1, 1) == 4);
    CHECK(A9.at(1, 1) == 2);
    CHECK(B9.at(1, 1) == 2);
    CHECK(table_J().at(1, 1) == 3);
    CHECK(table_Z().at(1, 1) == 1);
    CHECK(table_cube4().order() == 4);
    CHECK(table_cube6().order() == 6);
    CHECK(table_cube4().at({1, 1, 1}) == 1);
}

TEST_CASE("row cycles traverse and switch correctly") {
    auto C = cyclic_square(5);
    auto rc = row_cycle(C, 1, 2, 1);
    CHECK(rc.length() == 5);  // adjacent rows of an odd cyclic square: one big cycle
    CHECK(rc.sorted_cols() == std::vector<int>{1, 2, 3, 4, 5});

    auto S = switch_row_cycle(C, rc);  // full cycle = swap the two rows
    CHECK(S.row(1) == C.row(2));
    CHECK(S.row(2) == C.row(1));
    CHECK(S.row(3) == C.row(3));

    CHECK_THROWS_AS(row_cycle(C, 2, 2, 1), std::invalid_argument);
    RowCycle bogus{1, 2, {1, 2}};
    CHECK_THROWS_AS(switch_row_cycle(C, bogus), std::invalid_argument);
}

TEST_CASE("row cycle switch on an embedded square") {
    const auto& A = table_A8();
    auto rc = row_cycle(A, 1, 2, 1);
    CHECK(rc.sorted_cols() == std::vector<int>{1, 2, 3});
    auto S = switch_row_cycle(A, rc);
    CHECK(S.row(1) == std::vector<int>{8, 6, 4, 7, 5, 1, 3, 2});
    CHECK(S.row(2) == std::vector<int>{4, 8, 6, 2, 7, 5, 1, 3});
    for (int r = 3; r <= 8; ++r) CHECK(S.row(r) == A.row(r));
}

TEST_CASE("eta trade plan and switch") {
    const auto& E = table_E();
    auto p = eta_plan(E, 4, 7, 2);
    REQUIRE(p.has_value());
    CHECK(p->a == 7);
    CHECK(p->b == 8);
    CHECK(p->y == 4);
    CHECK(p->k == 2);
    CHECK(p->l() == 1);
    CHECK(p->zs == std::vector<int>{2});
    CHECK(p->chain_cols == std::vector<int>{1, 5});

    std::vector<std::pair<int, int>> cells = p->cells;
    std::sort(cells.begin(), cells.end());
    std::vector<std::pair<int, int>> want{{2, 1}, {2, 4}, {2, 5}, {4, 2},
                                          {4, 4}, {7, 1}, {7, 2}, {7, 5}};
    CHECK(cells == want);

    auto R = switch_eta(E, *p);
    CHECK(R.at(4, 2) == 8);
    CHECK(R.at(7, 2) == 7);
    CHECK(R.at(4, 4) == 7);
    CHECK(R.at(2, 4) == 8);
    CHECK(R.at(2, 1) == 7);
    CHECK(R.at(7, 1) == 2);
    CHECK(R.at(7, 5) == 8);
    CHECK(R.at(2, 5) == 2);
    // untouched cells survive
    int touched = 0;
    for (int r = 1; r <= 8; ++r)
        for (int c = 1; c <= 8; ++c)
            if (R.at(r, c) != E.at(r, c)) ++touched;
    CHECK(touched == 2 * p->l() + 6);
}

TEST_CASE("every touched eta cell swaps with the other touched symbol in its column") {
    const auto& E = table_E();
    for (int i = 1; i <= 8; ++i)
        for (int j = 1; j <= 8; ++j)
            for (int x = 1; x <= 8; ++x) {
                auto p = eta_plan(E, i, j, x);
                if (!p) continue;
                auto R = switch_eta(E, *p);
                std::map<int, std::vector<std::pair<int, int>>> by_col;
                for (auto [r, c] : p->cells) by_col[c].push_back({r, c});
                for (auto& [c, two] : by_col) {
                    REQUIRE(two.size() == 2);
                    CHECK(R.at(two[0].first, c) == E.at(two[1].first, c));
                    CHECK(R.at(two[1].first, c) == E.at(two[0].first, c));
                }
            }
}

TEST_CASE("eta plan rejects degenerate anchors") {
    const auto& E = table_E();
    CHECK_FALSE(eta_plan(E, 3, 3, 1).has_value());
}

TEST_CASE("perturbed squares answer candidate queries") {
    const auto& E = table_E();
    CHECK_THROWS_AS(near_copy(E, 1, 1, 1), std::invalid_argument);  // same symbol
    auto P = near_copy(E, 1, 1, 7);
    CHECK(P.at(1, 1) == 7);
    CHECK(P.at(1, 2) == 2);
    std::vector<int> out;
    P.row_candidates(1, 7, out);
    CHECK(out == std::vector<int>{1, 7});
    P.row_candidates(1, 1, out);
    CHECK(out.empty());
    P.col_candidates(1, 7, out);
    CHECK(out == std::vector<int>{1, 7});  // base occurrence plus the override
    P.row_candidates(2, 7, out);
    CHECK(out == std::vector<int>{4});
}

TEST_CASE("pair squares relabel by first coordinate") {
    auto P = direct_product(cyclic_square(2), cyclic_square(3));
    CHECK(P.order() == 6);
    CHECK(P.outer() == 2);
    CHECK(P.inner() == 3);
    CHECK(P.phi(1, 1) == 1);
    CHECK(P.phi(2, 3) == 6);
    CHECK(P.unphi(4) == std::make_pair(2, 1));
    for (int a = 1; a <= 2; ++a)
        for (int b = 1; b <= 3; ++b) CHECK(P.unphi(P.phi(a, b)) == std::make_pair(a, b));
    auto got = P.at({1, 2}, {2, 3});
    CHECK(got.first == cyclic_square(2).at(1, 2));
    CHECK(got.second == cyclic_square(3).at(2, 3));
    auto flat = relabel_prec1(P);
    CHECK(flat.order() == 6);
    CHECK(flat.at(1, 1) == P.phi(cyclic_square(2).at(1, 1), cyclic_square(3).at(1, 1)));
}

TEST_CASE("direct product matches the block formula everywhere") {
    const auto& E = table_E();
    auto C3 = cyclic_square(3);
    auto P = direct_product(C3, E);
    for (int i = 1; i <= 3; ++i)
        for (int j = 1; j <= 8; ++j)
            for (int x = 1; x <= 3; ++x)
                for (int y = 1; y <= 8; ++y)
                    CHECK(P.at({i, j}, {x, y}) ==
                          std::make_pair(C3.at(i, x), E.at(j, y)));
}

TEST_CASE("corrupted product follows its three-case formula") {
    const auto& A9 = table_A9();
    const auto& B9 = table_B9();
    const auto& E = table_E();
    auto P = corrupted_product(A9, B9, 5, E);
    CHECK(P.order() == 72);
    CHECK(P.at({1, 1}, {1, 1}) == std::make_pair(2, 6));
    CHECK(P.at({2, 1}, {1, 1}) == std::make_pair(3, 1));
    CHECK(P.at({2, 2}, {3, 4}) == std::make_pair(2, 7));
    // default region is plain product
    for (int i = 2; i <= 9; ++i)
        for (int k = 2; k <= 9; ++k)
            CHECK(P.at({i, 2}, {k, 3}) == std::make_pair(A9.at(i, k), E.at(2, 3)));
    // principal row of blocks: A's first row with shifted inner symbols
    for (int j = 1; j <= 8; ++j)
        for (int l = 1; l <= 8; ++l)
            CHECK(P.at({1, j}, {1, l}) ==
                  std::make_pair(A9.at(1, 1), shift_by(E.at(j, l), 5, 8)));
    CHECK_THROWS_AS(corrupted_product(A9, table_B8(), 5, E), std::invalid_argument);
    CHECK_THROWS_AS(corrupted_product(A9, B9, 0, E), std::invalid_argument);
    CHECK_THROWS_AS(corrupted_product(A9, B9, 8, E), std::invalid_argument);
}

TEST_CASE("hypercube validation and indexing") {
    const auto& H4 = table_cube4();
    CHECK(H4.dim() == 3);
    CHECK(H4.at({2, 3, 4}) == 2);
    auto bad = H4.data();
    bad[0] = 2;  // clashes along some line
    CHECK_THROWS_AS(Hypercube(4, 3, bad), not_latin_error);
    CHECK_THROWS_AS(Hypercube(4, 1, {1, 2, 3, 4}), std::invalid_argument);
    CHECK_THROWS_AS(Hypercube(3, 2, {1, 2, 3}), not_latin_error);
}

TEST_CASE("boost lifts dimension by shifting with the added coordinates") {
    const auto& E = table_E();
    auto H = boost(E, 3);
    CHECK(H.dim() == 3);
    CHECK(H.order() == 8);
    CHECK(H.at({1, 1, 1}) == 2);  // E[1,1] shifted by 1
    for (int z = 1; z <= 8; ++z)
        for (int r = 1; r <= 8; ++r)
            for (int c = 1; c <= 8; ++c)
                CHECK(H.at({r, c, z}) == shift_by(E.at(r, c), z, 8));
    auto H4 = boost(H, 4);
    CHECK(H4.at({3, 5, 2, 7}) == shift_by(E.at(3, 5), 2 + 7, 8));
    CHECK(boost(H, 3) == H);
    CHECK_THROWS_AS(boost(H, 2), std::invalid_argument);
    CHECK(square_as_cube(E).dim() == 2);
    CHECK(square_as_cube(E).at({2, 4}) == 7);
}

TEST_CASE("transpose swaps rows and columns") {
    const LatinSquare& E = table_E();
    LatinSquare T = transpose(E);
    for (int r = 1; r <= 8; ++r)
        for (int c = 1; c <= 8; ++c)
            CHECK(T.at(r, c) == E.at(c, r));
    CHECK(transpose(T) == E);
    CHECK(transpose(cyclic_square(5)) == cyclic_square(5));
}

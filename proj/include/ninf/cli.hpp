#pragma once

// Command surface.  Each cmd_* function is the body of one subcommand and
// returns the process exit code:
//   0  success / property holds
//   1  property violated, object does not exist, or order unsupported
//   2  usage or parse error
//   3  stochastic search budget exhausted
// The functions take parsed options so tests can call them directly; main()
// does flag parsing and dispatch.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "ninf/io.hpp"

namespace ninf::cli {

struct ParsedInput {
    std::vector<std::vector<int>> grid;  // square candidate (unvalidated)
    std::optional<Hypercube> cube;       // set when the input is a hypercube
};

// Reads a square or hypercube from a file ("-" = stdin), auto-detecting JSON
// vs text and square vs hypercube.  Throws io_error on malformed input.
inline ParsedInput read_input(const std::string& path) {
    std::stringstream buf;
    if (path == "-") {
        buf << std::cin.rdbuf();
    } else {
        std::ifstream in(path);
        if (!in) throw io_error("cannot open " + path);
        buf << in.rdbuf();
    }
    std::string text = buf.str();
    size_t at = text.find_first_not_of(" \t\r\n");
    if (at == std::string::npos) throw io_error("empty input");
    ParsedInput out;
    if (text[at] == '{') {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(text);
        } catch (const nlohmann::json::exception& e) {
            throw io_error(std::string("bad JSON: ") + e.what());
        }
        std::string kind;
        try {
            kind = j.at("kind").get<std::string>();
        } catch (const nlohmann::json::exception&) {
            throw io_error("record has no kind");
        }
        if (kind == "latin_square") {
            out.grid = grid_from_json(j);
        } else if (kind == "latin_hypercube") {
            out.cube = cube_from_json(j);
        } else {
            throw io_error("unknown record kind: " + kind);
        }
        return out;
    }
    // text: "n" starts a square, "n d" a hypercube
    std::istringstream is(text);
    std::string first_line;
    std::getline(is, first_line);
    std::istringstream head(first_line);
    long long a, b;
    bool two = static_cast<bool>(head >> a) && static_cast<bool>(head >> b);
    is.clear();
    is.seekg(0);
    if (two)
        out.cube = read_cube_text(is);
    else
        out.grid = read_grid_text(is);
    return out;
}

inline void emit(const std::string& out_path, const std::string& text) {
    if (out_path.empty() || out_path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path);
    out << text;
    if (!out) throw io_error("cannot write " + out_path);
}

inline std::string render_square(const LatinSquare& L, const std::string& format) {
    if (format == "text") {
        std::ostringstream os;
        write_square_text(os, L);
        return os.str();
    }
    return square_to_json(L).dump(1) + "\n";
}

inline std::string render_cube(const Hypercube& H, const std::string& format) {
    if (format == "text") {
        std::ostringstream os;
        write_cube_text(os, H);
        return os.str();
    }
    return cube_to_json(H).dump(1) + "\n";
}

inline std::string render_box(const SubBox& box) {
    std::ostringstream os;
    os << "rows {";
    for (size_t i = 0; i < box.rows.size(); ++i) os << (i ? "," : "") << box.rows[i];
    os << "} cols {";
    for (size_t i = 0; i < box.cols.size(); ++i) os << (i ? "," : "") << box.cols[i];
    os << "} syms {";
    for (size_t i = 0; i < box.syms.size(); ++i) os << (i ? "," : "") << box.syms[i];
    os << "}";
    return os.str();
}

// ---------------------------------------------------------------------------

struct GenOptions {
    int order = 0;
    int dim = 2;
    std::uint64_t seed = 0;
    int threshold = kDefaultVerifyThreshold;
    long long budget = kDefaultSearchBudget;
    std::string format = "json";
    std::string out = "-";
    bool use_cache = true;
};

inline int cmd_gen(const GenOptions& opt) {
    if (opt.order < 1 || opt.dim < 2 || (opt.format != "json" && opt.format != "text")) {
        std::cerr << "gen: order must be >= 1, dim >= 2, format json|text\n";
        return 2;
    }
    try {
        ArtifactCache cache;
        if (opt.dim == 2) {
            LatinSquare L =
                opt.use_cache
                    ? build_square_cached(opt.order, opt.seed, cache, opt.threshold,
                                          opt.budget)
                    : build_square(opt.order, opt.seed, opt.threshold, opt.budget);
            emit(opt.out, render_square(L, opt.format));
        } else {
            Hypercube H =
                opt.use_cache
                    ? build_hypercube_cached(opt.order, opt.dim, opt.seed, cache,
                                             opt.threshold, opt.budget)
                    : build_hypercube(opt.order, opt.dim, opt.seed, opt.threshold,
                                      opt.budget);
            emit(opt.out, render_cube(H, opt.format));
        }
        return 0;
    } catch (const no_such_object& e) {
        std::cerr << "gen: " << e.what() << "\n";
        return 1;
    } catch (const unsupported_order& e) {
        std::cerr << "gen: " << e.what() << "\n";
        return 1;
    } catch (const budget_exhausted& e) {
        std::cerr << "gen: " << e.what() << "\n";
        return 3;
    }
}

inline int cmd_verify(const std::string& input, const std::string& mode) {
    ParsedInput in;
    try {
        in = read_input(input);
    } catch (const io_error& e) {
        std::cerr << "verify: " << e.what() << "\n";
        return 2;
    }
    if (mode == "hypercube") {
        if (!in.cube) {
            std::cerr << "verify: input is not a hypercube\n";
            return 2;
        }
        auto box = find_proper_subhypercube(*in.cube);
        if (!box) {
            std::cout << "ok: latin hypercube, no proper subhypercube\n";
            return 0;
        }
        std::cout << "proper subhypercube: order " << box->order() << "\n";
        return 1;
    }
    if (in.cube) {
        if (in.cube->dim() != 2) {
            std::cerr << "verify: mode " << mode << " expects a square\n";
            return 2;
        }
        int n = in.cube->order();
        in.grid.assign(n, std::vector<int>(n));
        for (int r = 1; r <= n; ++r)
            for (int c = 1; c <= n; ++c)
                in.grid[r - 1][c - 1] = in.cube->at({r, c});
    }
    LatinSquare L;
    try {
        L = ls_from_rows(in.grid);
    } catch (const std::invalid_argument& e) {
        std::cout << "not a latin square: " << e.what() << "\n";
        return 1;
    }
    if (mode == "latin") {
        std::cout << "ok: latin square of order " << L.order() << "\n";
        return 0;
    }
    if (mode == "intercalates") {
        auto box = find_intercalate(L);
        if (!box) {
            std::cout << "ok: no intercalate\n";
            return 0;
        }
        std::cout << "intercalate: " << render_box(*box) << "\n";
        return 1;
    }
    if (mode == "ninf") {
        auto box = find_proper_subsquare(L);
        if (!box) {
            std::cout << "ok: no proper subsquare\n";
            return 0;
        }
        std::cout << "proper subsquare: " << render_box(*box) << "\n";
        return 1;
    }
    std::cerr << "verify: unknown mode " << mode << "\n";
    return 2;
}

struct CertifyOptions {
    std::string mode;  // "pair" or "xmember"
    std::string input_a;
    std::string input_b;  // pair mode only
    int shift = 1;
    std::string level = "fully_verified";
    std::string out = "-";
};

inline int cmd_certify(const CertifyOptions& opt) {
    try {
        if (opt.mode == "pair") {
            ParsedInput pa = read_input(opt.input_a);
            ParsedInput pb = read_input(opt.input_b);
            if (pa.cube || pb.cube) {
                std::cerr << "certify: pair mode expects two squares\n";
                return 2;
            }
            LatinSquare A = ls_from_rows(pa.grid), B = ls_from_rows(pb.grid);
            auto pair_rep = check_corrupting_pair(A, B);
            nlohmann::json cert = {{"order", A.order()},
                                   {"pair", pair_rep.pass()},
                                   {"properties", nullptr}};
            if (!pair_rep.pass()) {
                emit(opt.out, cert.dump(1) + "\n");
                std::cerr << "certify: " << pair_rep.violations.front() << "\n";
                return 1;
            }
            CorrupterData data = make_corrupter_data(A, B);
            auto prop_rep = check_properties(data);
            cert["properties"] = {{"p2", prop_rep.p2}, {"p3", prop_rep.p3},
                                  {"p4", prop_rep.p4}, {"p5", prop_rep.p5},
                                  {"p6", prop_rep.p6}, {"p7", prop_rep.p7}};
            emit(opt.out, cert.dump(1) + "\n");
            if (!prop_rep.pass()) {
                std::cerr << "certify: " << prop_rep.violations.front() << "\n";
                return 1;
            }
            return 0;
        }
        if (opt.mode == "xmember") {
            ParsedInput pa = read_input(opt.input_a);
            if (pa.cube) {
                std::cerr << "certify: xmember mode expects a square\n";
                return 2;
            }
            LatinSquare L = ls_from_rows(pa.grid);
            auto out = certify_x_member(L, opt.shift, cert_level_from_name(opt.level));
            if (!out.ok()) {
                std::cerr << "certify: " << out.failure << "\n";
                return 1;
            }
            emit(opt.out, certificate_to_json(*out.member).dump(1) + "\n");
            return 0;
        }
        std::cerr << "certify: unknown mode " << opt.mode << "\n";
        return 2;
    } catch (const io_error& e) {
        std::cerr << "certify: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "certify: " << e.what() << "\n";
        return 1;
    } catch (const std::runtime_error& e) {
        // e.g. no property-3 tuple exists for the supplied pair
        std::cerr << "certify: " << e.what() << "\n";
        return 1;
    }
}

struct SearchOptions {
    int order = 0;
    std::uint64_t seed = 0;
    long long budget = kDefaultSearchBudget;
    std::string format = "json";
    std::string out = "-";
};

inline int cmd_search(const SearchOptions& opt) {
    if (opt.order < 1) {
        std::cerr << "search: order must be >= 1\n";
        return 2;
    }
    try {
        LatinSquare L = search_ninf(opt.order, opt.seed, opt.budget);
        emit(opt.out, render_square(L, opt.format));
        return 0;
    } catch (const budget_exhausted& e) {
        std::cerr << "search: " << e.what() << "\n";
        return 3;
    }
}

inline int cmd_plan(long long order) {
    try {
        OrderPlan p = plan_order(order);
        std::cout << "8^" << p.i << " * 9^" << p.k << " * " << p.base << "\n";
        return 0;
    } catch (const unsupported_order& e) {
        std::cerr << "plan: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace ninf::cli

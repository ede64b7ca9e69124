#include <CLI11.hpp>

#include "ninf/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"subsquare-free latin square and hypercube toolkit"};
    app.require_subcommand(1);

    ninf::cli::GenOptions gen;
    auto* cgen = app.add_subcommand("gen", "construct a certified object");
    cgen->add_option("--order", gen.order, "object order")->required();
    cgen->add_option("--dim", gen.dim, "dimension (2 = square)");
    cgen->add_option("--seed", gen.seed, "seed for any stochastic search");
    cgen->add_option("--threshold", gen.threshold,
                     "largest order that is exhaustively re-verified");
    cgen->add_option("--budget", gen.budget, "stochastic search move budget");
    cgen->add_option("--format", gen.format, "output format: json|text");
    cgen->add_option("--out", gen.out, "output file (- = stdout)");
    cgen->add_flag("!--no-cache", gen.use_cache, "bypass the artifact cache");

    std::string vin = "-", vmode;
    auto* cver = app.add_subcommand("verify", "check a property of an input object");
    cver->add_option("--mode", vmode, "latin|ninf|intercalates|hypercube")->required();
    cver->add_option("input", vin, "input file (- = stdin)");

    ninf::cli::CertifyOptions cert;
    auto* ccert = app.add_subcommand("certify", "produce a certificate");
    ccert->add_option("--mode", cert.mode, "pair|xmember")->required();
    ccert->add_option("input", cert.input_a, "square (or first of the pair)")
        ->required();
    ccert->add_option("input_b", cert.input_b, "second square (pair mode)");
    ccert->add_option("--shift", cert.shift, "candidate shift (xmember mode)");
    ccert->add_option("--level", cert.level,
                      "witnessed|conditions_checked|fully_verified");
    ccert->add_option("--out", cert.out, "certificate file (- = stdout)");

    ninf::cli::SearchOptions srch;
    auto* csearch = app.add_subcommand("search", "stochastic subsquare-free search");
    csearch->add_option("--order", srch.order, "square order")->required();
    csearch->add_option("--seed", srch.seed, "search seed");
    csearch->add_option("--budget", srch.budget, "move budget");
    csearch->add_option("--format", srch.format, "output format: json|text");
    csearch->add_option("--out", srch.out, "output file (- = stdout)");

    long long plan_n = 0;
    auto* cplan = app.add_subcommand("plan", "factor an order over the base set");
    cplan->add_option("--order", plan_n, "target order")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (cgen->parsed()) return ninf::cli::cmd_gen(gen);
        if (cver->parsed()) return ninf::cli::cmd_verify(vin, vmode);
        if (ccert->parsed()) return ninf::cli::cmd_certify(cert);
        if (csearch->parsed()) return ninf::cli::cmd_search(srch);
        if (cplan->parsed()) return ninf::cli::cmd_plan(plan_n);
    } catch (const ninf::io_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

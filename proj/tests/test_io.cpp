#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ninf/cli.hpp"
#include "ninf/io.hpp"
#include "ninf/tables.hpp"

using namespace ninf;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const char* tag) {
    fs::path p = fs::temp_directory_path() / (std::string("ninf-test-") + tag);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

fs::path write_file(const fs::path& dir, const char* name, const std::string& text) {
    fs::path p = dir / name;
    std::ofstream out(p);
    out << text;
    return p;
}

std::string square_text(const LatinSquare& L) {
    std::ostringstream os;
    write_square_text(os, L);
    return os.str();
}

}  // namespace

TEST_CASE("text and JSON round-trips are identities on the embedded tables",
          "[io]") {
    for (const LatinSquare* L : {&table_E(), &table_A8(), &table_B8(), &table_A9(),
                                 &table_B9(), &table_J(), &table_Z()}) {
        std::stringstream ss(square_text(*L));
        CHECK(read_square_text(ss) == *L);
        CHECK(square_from_json(square_to_json(*L)) == *L);
        // JSON survives a dump/parse cycle too
        auto reparsed = nlohmann::json::parse(square_to_json(*L).dump());
        CHECK(square_from_json(reparsed) == *L);
    }
    for (const Hypercube* H : {&table_cube4(), &table_cube6()}) {
        std::stringstream ss;
        write_cube_text(ss, *H);
        CHECK(read_cube_text(ss) == *H);
        CHECK(cube_from_json(cube_to_json(*H)) == *H);
    }
}

TEST_CASE("malformed inputs are rejected with parse errors", "[io]") {
    auto reject = [](const std::string& text) {
        std::stringstream ss(text);
        CHECK_THROWS_AS(read_square_text(ss), io_error);
    };
    reject("");
    reject("x");
    reject("3\n1 2 3\n2 3");            // truncated
    reject("2\n1 2\n2 9\n");            // symbol out of range
    reject("-4\n");                     // order out of range

    // grid parses but is not latin: the validation layer rejects it
    std::stringstream ss("2\n1 2\n1 2\n");
    CHECK_THROWS_AS(read_square_text(ss), std::invalid_argument);

    CHECK_THROWS_AS(square_from_json({{"kind", "other"}}), io_error);
    CHECK_THROWS_AS(square_from_json({{"kind", "latin_square"}, {"order", 2}}),
                    io_error);
    CHECK_THROWS_AS(
        square_from_json(
            {{"kind", "latin_square"}, {"order", 3}, {"rows", {{1, 2}, {2, 1}}}}),
        io_error);
    CHECK_THROWS_AS(cube_from_json({{"kind", "latin_square"}}), io_error);

    std::stringstream cube_bad("2 9\n");
    CHECK_THROWS_AS(read_cube_text(cube_bad), io_error);
}

TEST_CASE("certificates round-trip through JSON and re-certify on load", "[io]") {
    LatinSquare L = search_ninf(10, 0);
    auto out = certify_x_member(L, 1, CertLevel::fully_verified);
    REQUIRE(out.ok());
    const XMember& m = *out.member;

    nlohmann::json cert = certificate_to_json(m);
    CHECK(cert.at("order") == 10);
    CHECK(cert.at("shift") == 1);
    CHECK(cert.at("cert_level") == "fully_verified");
    CHECK(cert.at("checks").at("exhaustive_subsquare_scan") == true);

    XMember back = x_member_from_json(square_to_json(m.square), cert);
    CHECK(back.square == m.square);
    CHECK(back.shift == m.shift);
    CHECK(back.level == m.level);
    CHECK(back.w_ii.x1 == m.w_ii.x1);
    CHECK(back.w_iii.sigma == m.w_iii.sigma);

    // a certificate pointing at a different square must not restore
    nlohmann::json wrong = cert;
    wrong["witness_ii"]["x1"] = m.w_ii.x1 == 1 ? 2 : 1;
    CHECK_THROWS_AS(x_member_from_json(square_to_json(m.square), wrong), io_error);

    CHECK_THROWS_AS(cert_level_from_name("bogus"), io_error);
    CHECK(cert_level_from_name("witnessed") == CertLevel::witnessed);
}

TEST_CASE("artifact cache stores, validates, and rejects tampering", "[io]") {
    fs::path dir = fresh_dir("cache");
    ArtifactCache cache(dir);

    CHECK_FALSE(cache.load("latin_square", 8, 2, "table", 0).has_value());

    nlohmann::json payload = square_to_json(table_E());
    cache.store("latin_square", 8, 2, "table", 0, payload, "fully_verified", "test");
    auto loaded = cache.load("latin_square", 8, 2, "table", 0);
    REQUIRE(loaded.has_value());
    CHECK(square_from_json(*loaded) == table_E());

    // no stray temporaries after an atomic store
    for (const auto& entry : fs::directory_iterator(dir))
        CHECK(entry.path().extension() == ".json");

    // corrupt one payload byte: checksum must reject the record
    fs::path rec_path = cache.path_for("latin_square", 8, 2, "table", 0);
    std::ifstream in(rec_path);
    std::string text((std::istreambuf_iterator<char>(in)), {});
    in.close();
    size_t at = text.find("\"rows\"");
    REQUIRE(at != std::string::npos);
    text.replace(text.find("1", at), 1, "2");
    std::ofstream(rec_path) << text;
    CHECK_FALSE(cache.load("latin_square", 8, 2, "table", 0).has_value());

    // a store over the bad record repairs it
    cache.store("latin_square", 8, 2, "table", 0, payload, "fully_verified", "test");
    CHECK(cache.load("latin_square", 8, 2, "table", 0).has_value());

    // environment variable picks the default directory
    setenv("NINF_CACHE_DIR", dir.string().c_str(), 1);
    CHECK(ArtifactCache().dir() == dir);
    unsetenv("NINF_CACHE_DIR");
    CHECK(ArtifactCache().dir() == fs::path(".ninf-cache"));
}

TEST_CASE("cached base squares hit the cache on the second call", "[io][search]") {
    fs::path dir = fresh_dir("cache-base");
    ArtifactCache cache(dir);

    XMember first = cached_base_square(12, 2, cache);
    CHECK(first.level == CertLevel::fully_verified);
    REQUIRE(fs::exists(cache.path_for("x_member", 12, 2, "base", 2)));

    XMember again = cached_base_square(12, 2, cache);
    CHECK(again.square == first.square);
    CHECK(again.w_ii.x1 == first.w_ii.x1);

    // tampered record: rejected, rebuilt, and rewritten
    fs::path rec_path = cache.path_for("x_member", 12, 2, "base", 2);
    std::ifstream in(rec_path);
    std::string text((std::istreambuf_iterator<char>(in)), {});
    in.close();
    text.replace(text.find("checksum"), 8, "checksuM");
    std::ofstream(rec_path) << text;
    XMember rebuilt = cached_base_square(12, 2, cache);
    CHECK(rebuilt.square == first.square);
    CHECK(cache.load("x_member", 12, 2, "base", 2).has_value());
}

TEST_CASE("command layer maps outcomes to the exit-code contract", "[io]") {
    fs::path dir = fresh_dir("cli");
    setenv("NINF_CACHE_DIR", (dir / "cache").string().c_str(), 1);

    fs::path e_text = write_file(dir, "e.txt", square_text(table_E()));
    fs::path c4_text = write_file(dir, "c4.txt", square_text(cyclic_square(4)));
    fs::path a8_json = write_file(dir, "a8.json", square_to_json(table_A8()).dump());
    fs::path b8_json = write_file(dir, "b8.json", square_to_json(table_B8()).dump());
    fs::path garbage = write_file(dir, "bad.txt", "not a square\n");

    CHECK(cli::cmd_verify(e_text.string(), "latin") == 0);
    CHECK(cli::cmd_verify(e_text.string(), "ninf") == 0);
    CHECK(cli::cmd_verify(e_text.string(), "intercalates") == 0);
    CHECK(cli::cmd_verify(c4_text.string(), "ninf") == 1);
    CHECK(cli::cmd_verify(c4_text.string(), "intercalates") == 1);
    CHECK(cli::cmd_verify(garbage.string(), "ninf") == 2);
    CHECK(cli::cmd_verify(e_text.string(), "nope") == 2);
    CHECK(cli::cmd_verify((dir / "missing.txt").string(), "latin") == 2);

    // non-latin grid is a property violation, not a parse error
    fs::path not_latin = write_file(dir, "nl.txt", "2\n1 2\n1 2\n");
    CHECK(cli::cmd_verify(not_latin.string(), "latin") == 1);

    cli::GenOptions gen;
    gen.order = 4;
    gen.dim = 2;
    CHECK(cli::cmd_gen(gen) == 1);
    gen.order = 6;
    CHECK(cli::cmd_gen(gen) == 1);
    gen.order = 0;
    CHECK(cli::cmd_gen(gen) == 2);

    gen.order = 4;
    gen.dim = 3;
    gen.format = "text";
    gen.out = (dir / "cube4.txt").string();
    CHECK(cli::cmd_gen(gen) == 0);
    {
        std::ifstream in(gen.out);
        CHECK(read_cube_text(in) == table_cube4());
    }
    CHECK(cli::cmd_verify(gen.out, "hypercube") == 0);

    gen = cli::GenOptions{};
    gen.order = 7;
    gen.format = "json";
    gen.out = (dir / "s7.json").string();
    CHECK(cli::cmd_gen(gen) == 0);
    CHECK(cli::cmd_verify(gen.out, "ninf") == 0);

    cli::CertifyOptions cert;
    cert.mode = "pair";
    cert.input_a = a8_json.string();
    cert.input_b = b8_json.string();
    cert.out = (dir / "pair.json").string();
    CHECK(cli::cmd_certify(cert) == 0);
    cert.input_b = a8_json.string();  // (A8, A8) violates the agreement clause
    CHECK(cli::cmd_certify(cert) == 1);
    cert.mode = "nope";
    CHECK(cli::cmd_certify(cert) == 2);

    cli::SearchOptions srch;
    srch.order = 4;
    srch.budget = 2000;
    srch.out = (dir / "s4.json").string();
    CHECK(cli::cmd_search(srch) == 3);
    srch.order = 11;
    srch.budget = kDefaultSearchBudget;
    srch.out = (dir / "s11.json").string();
    CHECK(cli::cmd_search(srch) == 0);
    CHECK(cli::cmd_verify(srch.out, "ninf") == 0);

    unsetenv("NINF_CACHE_DIR");
}

TEST_CASE("input auto-detection reads all emitted shapes back", "[io]") {
    fs::path dir = fresh_dir("detect");

    write_file(dir, "sq.json", square_to_json(table_E()).dump());
    auto in1 = cli::read_input((dir / "sq.json").string());
    CHECK_FALSE(in1.cube.has_value());
    CHECK(ls_from_rows(in1.grid) == table_E());

    write_file(dir, "cb.json", cube_to_json(table_cube6()).dump());
    auto in2 = cli::read_input((dir / "cb.json").string());
    REQUIRE(in2.cube.has_value());
    CHECK(*in2.cube == table_cube6());

    std::ostringstream cb;
    write_cube_text(cb, table_cube4());
    write_file(dir, "cb.txt", cb.str());
    auto in3 = cli::read_input((dir / "cb.txt").string());
    REQUIRE(in3.cube.has_value());
    CHECK(*in3.cube == table_cube4());

    write_file(dir, "sq.txt", square_text(table_A9()));
    auto in4 = cli::read_input((dir / "sq.txt").string());
    CHECK(ls_from_rows(in4.grid) == table_A9());

    write_file(dir, "empty.txt", "   \n");
    CHECK_THROWS_AS(cli::read_input((dir / "empty.txt").string()), io_error);
}

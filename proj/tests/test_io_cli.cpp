#include <doctest.h>

#include "stuffedmap/cli.hpp"

#include <cstdio>
#include <fstream>

using namespace smap;

namespace {

std::string write_temp(const std::string& name, const std::string& body) {
    std::string path = "./" + name;
    std::ofstream out(path);
    out << body;
    return path;
}

int run_cli(std::initializer_list<const char*> args) {
    std::vector<const char*> argv{"stuffedmap"};
    argv.insert(argv.end(), args.begin(), args.end());
    return cli::run(int(argv.size()), argv.data());
}

} // namespace

TEST_CASE("stuffed-map json round-trips byte-stable") {
    CellSet bq = bridged_quadrangulation_cells();
    EnumResult r = enumerate_bms(bq, 2, 5);
    int checked = 0;
    for (auto& m : r.maps) {
        nlohmann::json j = to_json(m);
        StuffedMap back = stuffed_map_from_json(j);
        CHECK(canonical_code(back) == canonical_code(m));
        CHECK(to_json(back).dump() == j.dump());
        if (++checked >= 60) break;
    }
}

TEST_CASE("hypermobile json round-trips byte-stable") {
    CellSet bq = bridged_quadrangulation_cells();
    auto hms = enumerate_hypermobiles(bq, 5);
    int checked = 0;
    for (auto& h : hms.list) {
        nlohmann::json j = to_json(h);
        Hypermobile back = hypermobile_from_json(j);
        CHECK(canonical_code(back) == canonical_code(h));
        CHECK(to_json(back).dump() == j.dump());
        if (++checked >= 60) break;
    }
}

TEST_CASE("malformed inputs are rejected") {
    CHECK_THROWS_AS(stuffed_map_from_json(nlohmann::json{{"schema", "nope"}}), InvalidInput);
    CHECK_THROWS_AS(hypermobile_from_json(nlohmann::json::array()), InvalidInput);
    CHECK_THROWS_AS(CellSet::parse_json(nlohmann::json{{"cells", 3}}), InvalidCellSpec);
    CHECK_THROWS_AS(CellSet::parse_json(nlohmann::json::parse(R"({"cells":[{"boundaries":[3]}]})")),
                    InvalidCellSpec);
    CHECK_THROWS_AS(CellSet::parse_json(nlohmann::json::parse(R"({"cells":[{"boundaries":[2]}]})")),
                    InvalidCellSpec);
}

TEST_CASE("cli: enumerate exits cleanly and writes the table") {
    std::string spec = write_temp("cells_quad.json", R"({"cells":[{"boundaries":[4]}]})");
    std::string out = "./cli_enum_out.json";
    CHECK(run_cli({"enumerate", "--cells", spec.c_str(), "--boundary", "2", "--max-vertices", "4",
                   "--out", out.c_str()}) == cli::kOk);
    std::ifstream in(out);
    nlohmann::json j;
    in >> j;
    CHECK(j["entries"].size() == 3);
    // odd boundary: empty table, still success
    CHECK(run_cli({"enumerate", "--cells", spec.c_str(), "--boundary", "3", "--max-vertices", "4",
                   "--out", out.c_str()}) == cli::kOk);
    std::remove(out.c_str());
    std::remove(spec.c_str());
}

TEST_CASE("cli: invalid cell spec exits with code 2") {
    std::string bad = write_temp("cells_bad.json", R"({"cells":[{"boundaries":[3]}]})");
    CHECK(run_cli({"enumerate", "--cells", bad.c_str(), "--boundary", "2", "--max-vertices", "4"}) ==
          cli::kInvalidInput);
    CHECK(run_cli({"enumerate", "--cells", "./does_not_exist.json", "--boundary", "2",
                   "--max-vertices", "4"}) == cli::kInvalidInput);
    std::remove(bad.c_str());
}

TEST_CASE("cli: series routes and csv output") {
    std::string spec = write_temp("cells_quad2.json", R"({"cells":[{"boundaries":[4]}]})");
    std::string out = "./cli_series_out.csv";
    CHECK(run_cli({"series", "--cells", spec.c_str(), "--which", "tree", "--order", "5",
                   "--format", "csv", "--out", out.c_str()}) == cli::kOk);
    std::ifstream in(out);
    std::string csv((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(csv.find("t_power,monomial,num,den") == 0);
    CHECK(csv.find("t_4") != std::string::npos);
    std::remove(out.c_str());
    std::remove(spec.c_str());
}

TEST_CASE("cli: bijection apply then inverse restores the map") {
    CellSet quad = quadrangle_cells();
    EnumResult rooted = enumerate_bms(quad, -1, 4);
    auto maps = detail::gasket_pointed(rooted);
    REQUIRE(!maps.empty());
    std::string in_path = write_temp("cli_map.json", to_json(maps[0]).dump());
    std::string mid = "./cli_hm.json", back = "./cli_map_back.json";
    CHECK(run_cli({"bijection", "apply", "--input", in_path.c_str(), "--out", mid.c_str()}) ==
          cli::kOk);
    CHECK(run_cli({"bijection", "apply", "--inverse", "--input", mid.c_str(), "--out",
                   back.c_str()}) == cli::kOk);
    std::ifstream f(back);
    nlohmann::json j;
    f >> j;
    CHECK(canonical_code(stuffed_map_from_json(j)) == canonical_code(maps[0]));
    CHECK(run_cli({"bijection", "apply", "--inverse", "--input", in_path.c_str()}) ==
          cli::kInvalidInput); // a map is not a hypermobile
    std::remove(in_path.c_str());
    std::remove(mid.c_str());
    std::remove(back.c_str());
}

TEST_CASE("cli: bijection check exit codes") {
    std::string spec = write_temp("cells_quad3.json", R"({"cells":[{"boundaries":[4]}]})");
    std::string out = "./cli_check.json";
    CHECK(run_cli({"bijection", "check", "--cells", spec.c_str(), "--max-vertices", "4", "--out",
                   out.c_str()}) == cli::kOk);
    std::remove(spec.c_str());
    std::string bspec =
        write_temp("cells_bq.json", R"({"cells":[{"boundaries":[2,2]},{"boundaries":[4]}]})");
    // the bridged set has the degenerate families: roundtrip failure exit
    CHECK(run_cli({"bijection", "check", "--cells", bspec.c_str(), "--max-vertices", "5", "--out",
                   out.c_str()}) == cli::kRoundtripFailure);
    std::remove(bspec.c_str());
    std::remove(out.c_str());
}

TEST_CASE("cli outputs are identical across runs") {
    std::string spec =
        write_temp("cells_bq2.json", R"({"cells":[{"boundaries":[2,2]},{"boundaries":[4]}]})");
    std::string a = "./det_a.json", b = "./det_b.json";
    for (auto* out : {a.c_str(), b.c_str()})
        CHECK(run_cli({"enumerate", "--cells", spec.c_str(), "--boundary", "2", "--max-vertices",
                       "5", "--bms", "--out", out}) == cli::kOk);
    std::ifstream fa(a), fb(b);
    std::string sa((std::istreambuf_iterator<char>(fa)), std::istreambuf_iterator<char>());
    std::string sb((std::istreambuf_iterator<char>(fb)), std::istreambuf_iterator<char>());
    CHECK(sa == sb);
    CHECK(!sa.empty());
    std::remove(spec.c_str());
    std::remove(a.c_str());
    std::remove(b.c_str());
}

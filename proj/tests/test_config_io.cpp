#include "doctest.h"

#include "wulff/config.hpp"
#include "wulff/io.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

using namespace wulff;
using nlohmann::json;

namespace {

std::filesystem::path scratch(const std::string& name)
{
    const auto dir = std::filesystem::temp_directory_path() / "wulff_unit_tests";
    std::filesystem::create_directories(dir);
    return dir / name;
}

} // namespace

TEST_CASE("config parsing, defaults and validation")
{
    const RunConfig d = parse_config(json::object());
    CHECK(d.n == 2);
    CHECK(d.resolution == 32);
    CHECK_THROWS_AS(parse_config(json{{"bogus", 1}}), InputError);
    CHECK_THROWS_AS(validate_config(parse_config(json{{"n", 1}})), InputError);
    CHECK_THROWS_AS(validate_config(parse_config(json{{"suites", {"nope"}}})), InputError);
    const RunConfig c = parse_config(json{{"n", 3}, {"problem", {{"r", 0}, {"s", 1}, {"a", {1.0, 2.0}}}}});
    CHECK_NOTHROW(validate_config(c));
    CHECK(c.problem.a.size() == 2);
}

TEST_CASE("config hash ignores the worker count and output directory")
{
    RunConfig a = parse_config(json{{"n", 2}});
    RunConfig b = a;
    b.workers = 8;
    b.out = "elsewhere";
    CHECK(config_hash(a) == config_hash(b));
    b.resolution = 64;
    CHECK(config_hash(a) != config_hash(b));
}

TEST_CASE("report JSON keeps a stable key order")
{
    const RunConfig cfg = parse_config(json::object());
    const auto h = report_header(cfg, "verify");
    std::vector<std::string> keys;
    for (const auto& [k, v] : h.items()) keys.push_back(k);
    REQUIRE(keys.size() >= 3);
    CHECK(keys[0] == "tool");
    CHECK(h.dump() == report_header(cfg, "verify").dump());
}

TEST_CASE("OFF export of a sphere has Euler characteristic 2")
{
    const SampledImmersion imm = build_parametric(sphere_map(2, 1.0), 16);
    const auto path = scratch("sphere.off");
    write_off(imm, path.string());
    std::ifstream in(path);
    std::string tag;
    std::size_t v = 0, f = 0, e_unused = 0;
    in >> tag >> v >> f >> e_unused;
    CHECK(tag == "OFF");
    for (std::size_t i = 0; i < v; ++i) {
        double x, y, z;
        in >> x >> y >> z;
    }
    std::set<std::pair<std::size_t, std::size_t>> edges;
    for (std::size_t i = 0; i < f; ++i) {
        std::size_t k = 0;
        in >> k;
        std::vector<std::size_t> idx(k);
        for (auto& x : idx) in >> x;
        for (std::size_t j = 0; j < k; ++j) {
            const auto a = idx[j], b = idx[(j + 1) % k];
            edges.insert({std::min(a, b), std::max(a, b)});
        }
    }
    CHECK(static_cast<long>(v) - static_cast<long>(edges.size()) + static_cast<long>(f) == 2);
}

TEST_CASE("CSV field export")
{
    const SampledImmersion imm = build_parametric(sphere_map(2, 1.0), 16);
    const std::vector<double> field(imm.size(), 0.5);
    const auto path = scratch("field.csv");
    write_field_csv(imm, field, path.string());
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "chart,i,j,value");
    std::size_t rows = 0;
    for (std::string line; std::getline(in, line);) ++rows;
    CHECK(rows == imm.size());
}

#include <gtest/gtest.h>

#include <cstdlib>

#include "opa/io.hpp"

using namespace opa;
using io::json;

TEST(Format, SeventeenDigits) {
    EXPECT_EQ(io::format_double(0.1), "0.10000000000000001");
    EXPECT_EQ(io::format_double(1.0), "1");
    EXPECT_EQ(io::format_double(std::nan("")), "null");
    EXPECT_EQ(io::format_double(-std::numeric_limits<double>::infinity()), "null");
    // round trip is exact
    for (double v : {1.0 / 3.0, 2.0 / 3.0, 1e-300, 6.02214076e23, -0.0})
        EXPECT_EQ(std::strtod(io::format_double(v).c_str(), nullptr), v);
}

TEST(Dump, LayoutAndReparse) {
    json j = {{"a", 0.1}, {"b", json::array({1, 2, 3})}, {"c", {{"d", json::array({json::array({0.5, -0.25})})}}},
              {"s", "x\"y"}, {"n", nullptr}, {"t", true}};
    auto text = io::dump(j);
    EXPECT_NE(text.find("\"b\": [1, 2, 3]"), std::string::npos);
    EXPECT_NE(text.find("0.10000000000000001"), std::string::npos);
    auto back = json::parse(text);
    EXPECT_EQ(back["a"].get<double>(), 0.1);
    EXPECT_EQ(back["s"], "x\"y");
    EXPECT_TRUE(back["n"].is_null());
    auto flat = io::dump(j, false);
    EXPECT_EQ(flat.find('\n'), std::string::npos);
    EXPECT_EQ(json::parse(flat), back);
}

TEST(Parse, CoeffSeries) {
    auto a = io::parse_coeff_series(json::parse(R"({"coeffs": [1, [0.5, -2]], "tail_bound": 0.125})"));
    EXPECT_EQ(a[0], cplx(1.0, 0.0));
    EXPECT_EQ(a[1], cplx(0.5, -2.0));
    EXPECT_EQ(a.tail_bound(), 0.125);
    auto round = io::parse_coeff_series(io::to_json(a));
    EXPECT_EQ(round.coeffs(), a.coeffs());
    EXPECT_EQ(round.tail_bound(), a.tail_bound());
    for (const char* bad : {R"({"coeffs": []})", R"({"x": 1})", R"({"coeffs": [[1, 2, 3]]})", R"([1, 2])"}) {
        try {
            io::parse_coeff_series(json::parse(bad));
            FAIL() << bad;
        } catch (const Error& e) {
            EXPECT_EQ(e.kind(), ErrorKind::invalid_input);
        }
    }
}

TEST(Parse, BoundarySetAndTargets) {
    auto j = json::parse(R"({"points": [3.141592653589793, 0.0], "arcs": [[1.0, 0.1]], "sample_density": 64})");
    auto E = io::parse_boundary_set(j);
    EXPECT_EQ(E.points.size(), 2u);
    EXPECT_EQ(E.arcs.size(), 1u);
    EXPECT_EQ(E.sample_density, 64.0);
    auto back = io::parse_boundary_set(io::to_json(E));
    EXPECT_EQ(back.points, E.points);

    auto t1 = io::parse_targets(json::parse(R"({"values": [[2, 0], -1]})"), {0.0, 3.14});
    ASSERT_EQ(t1.size(), 2u);
    EXPECT_EQ(t1[1].first, 3.14);
    EXPECT_EQ(t1[1].second, cplx(-1.0));
    auto t2 = io::parse_targets(json::parse(R"({"targets": [{"theta": 1.5, "value": [0, 1]}]})"), {});
    EXPECT_EQ(t2[0].second, cplx(0.0, 1.0));
    EXPECT_THROW(io::parse_targets(json::parse(R"({"values": [1]})"), {0.0, 1.0}), Error);
    EXPECT_THROW(io::parse_targets(json::parse(R"({})"), {}), Error);
}

TEST(Serialize, OpaResultFields) {
    auto r = opa_solve(CoeffSeries{1.0, -1.0}, 1);
    auto j = json::parse(io::dump(io::to_json(r)));
    EXPECT_NEAR(j["Q"]["coeffs"][0][0].get<double>(), 2.0 / 3.0, 1e-15);
    EXPECT_NEAR(j["residual_squared"].get<double>(), 1.0 / 3.0, 1e-15);
    EXPECT_EQ(j["n"], 1);
    EXPECT_EQ(j["alpha"], 0.0);
}

TEST(Serialize, ErrorObject) {
    Error e(ErrorKind::boundary_root, "root on the circle", {{"root", {1.0, 0.0}}});
    auto j = io::error_json(e);
    EXPECT_EQ(j["kind"], "boundary-root");
    EXPECT_EQ(j["message"], "root on the circle");
    EXPECT_EQ(j["details"]["root"][0], 1.0);
    EXPECT_TRUE(is_domain_error(ErrorKind::invalid_input));
    EXPECT_FALSE(is_domain_error(ErrorKind::approximation_budget));
}

TEST(Files, AtomicWriteAndRead) {
    auto dir = std::filesystem::temp_directory_path() / "opa_io_test";
    std::filesystem::remove_all(dir);
    auto path = dir / "sub" / "out.json";
    io::write_atomic(path, "{\"k\": 1}\n");
    EXPECT_FALSE(std::filesystem::exists(path.string() + ".tmp"));
    EXPECT_EQ(io::read_json_file(path.string())["k"], 1);
    io::write_atomic(path, "not json");
    try {
        io::read_json_file(path.string());
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::invalid_input);
    }
    EXPECT_THROW(io::read_json_file((dir / "missing.json").string()), Error);
    std::filesystem::remove_all(dir);
}

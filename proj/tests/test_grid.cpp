#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mfilm/errors.hpp"
#include "mfilm/grid.hpp"

using namespace mfilm;

namespace {

GridField sample_field() {
    GridField f(6, 4, 3.0, 2.0);
    for (int i = 0; i < f.nx; ++i)
        for (int j = 0; j < f.ny; ++j) {
            f.h[f.idx(i, j)] = 1.0 + 0.1 * std::sin(2 * M_PI * f.x(i) / f.Lx) + 1e-13 * j;
            f.theta[f.idx(i, j)] = 1.0 - 0.05 * std::cos(2 * M_PI * f.y(j) / f.Ly) / 3.0;
        }
    return f;
}

}  // namespace

TEST_CASE("constructor fills constants and rejects bad sizes") {
    const GridField f(4, 3, 1.0, 2.0, 0.9, 1.1);
    CHECK(f.h.size() == 12);
    CHECK(f.mean_h() == doctest::Approx(0.9));
    CHECK(f.mean_theta() == doctest::Approx(1.1));
    CHECK(f.min_h() == 0.9);
    CHECK(f.x(2) == doctest::Approx(0.5));
    CHECK(f.y(1) == doctest::Approx(2.0 / 3.0));
    CHECK_THROWS_AS(GridField(0, 3, 1.0, 1.0), UsageError);
    CHECK_THROWS_AS(GridField(3, 3, -1.0, 1.0), UsageError);
}

TEST_CASE("min and mean") {
    GridField f(2, 2, 1.0, 1.0);
    f.h = {1.0, 2.0, 0.5, 1.5};
    CHECK(f.min_h() == 0.5);
    CHECK(f.mean_h() == doctest::Approx(1.25));
}

TEST_CASE("csv round trip is exact") {
    const GridField f = sample_field();
    std::stringstream ss;
    write_csv(ss, f);
    std::string header;
    std::getline(std::istringstream(ss.str()), header);
    CHECK(header == "x,y,h,theta");
    const GridField g = read_csv(ss, f.nx, f.ny, f.Lx, f.Ly);
    CHECK(g.h == f.h);
    CHECK(g.theta == f.theta);
}

TEST_CASE("csv errors") {
    std::istringstream bad_header("a,b,c,d\n0,0,1,1\n");
    CHECK_THROWS_AS(read_csv(bad_header, 1, 1, 1.0, 1.0), UsageError);
    std::istringstream short_rows("x,y,h,theta\n0,0,1,1\n");
    CHECK_THROWS_AS(read_csv(short_rows, 2, 1, 1.0, 1.0), UsageError);
}

TEST_CASE("binary round trip with sidecar") {
    const GridField f = sample_field();
    const auto dir = std::filesystem::temp_directory_path() / "mfilm_grid_test";
    std::filesystem::create_directories(dir);
    const std::string path = (dir / "snap.bin").string();
    write_binary(path, f);
    CHECK(std::filesystem::file_size(path) == 2 * f.h.size() * sizeof(double));
    std::ifstream side(path + ".json");
    REQUIRE(side.good());
    const auto j = nlohmann::json::parse(side);
    CHECK(j.at("nx") == 6);
    CHECK(j.at("ny") == 4);
    CHECK(j.at("Lx").get<double>() == 3.0);
    CHECK(j == grid_sidecar(f));
    const GridField g = read_binary(path);
    CHECK(g.nx == f.nx);
    CHECK(g.Ly == f.Ly);
    CHECK(g.h == f.h);
    CHECK(g.theta == f.theta);
    CHECK_THROWS_AS(read_binary((dir / "missing.bin").string()), std::ios_base::failure);
    std::filesystem::remove_all(dir);
}

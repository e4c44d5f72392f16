#pragma once

#include <cmath>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

namespace mfilm {

struct Grid {
    int nx = 64, ny = 64;
    double Lx = 2 * M_PI, Ly = 2 * M_PI;
};

// Real (h, theta) samples on a periodic rectangle; row-major with x as the slow index.
struct GridField {
    int nx = 0, ny = 0;
    double Lx = 0, Ly = 0;
    std::vector<double> h, theta;

    GridField() = default;
    GridField(int nx_, int ny_, double Lx_, double Ly_, double h0 = 1.0, double theta0 = 1.0);

    size_t idx(int i, int j) const { return static_cast<size_t>(i) * ny + j; }
    double x(int i) const { return Lx * i / nx; }
    double y(int j) const { return Ly * j / ny; }

    double min_h() const;
    double mean_h() const;
    double mean_theta() const;
};

void write_csv(std::ostream& os, const GridField& f);
GridField read_csv(std::istream& is, int nx, int ny, double Lx, double Ly);
// flat row-major doubles (h then theta) plus {"nx","ny","Lx","Ly"} sidecar
void write_binary(const std::string& path, const GridField& f);
GridField read_binary(const std::string& path);
nlohmann::json grid_sidecar(const GridField& f);

}  // namespace mfilm

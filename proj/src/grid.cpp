#include "mfilm/grid.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "mfilm/errors.hpp"

namespace mfilm {

GridField::GridField(int nx_, int ny_, double Lx_, double Ly_, double h0, double theta0)
    : nx(nx_), ny(ny_), Lx(Lx_), Ly(Ly_) {
    if (nx <= 0 || ny <= 0) throw UsageError("grid sizes must be positive");
    if (!(Lx > 0) || !(Ly > 0)) throw UsageError("domain lengths must be positive");
    h.assign(static_cast<size_t>(nx) * ny, h0);
    theta.assign(static_cast<size_t>(nx) * ny, theta0);
}

double GridField::min_h() const { return *std::min_element(h.begin(), h.end()); }

double GridField::mean_h() const { return std::accumulate(h.begin(), h.end(), 0.0) / h.size(); }

double GridField::mean_theta() const { return std::accumulate(theta.begin(), theta.end(), 0.0) / theta.size(); }

void write_csv(std::ostream& os, const GridField& f) {
    os << "x,y,h,theta\n";
    os << std::setprecision(17);
    for (int i = 0; i < f.nx; ++i)
        for (int j = 0; j < f.ny; ++j)
            os << f.x(i) << ',' << f.y(j) << ',' << f.h[f.idx(i, j)] << ',' << f.theta[f.idx(i, j)] << '\n';
}

GridField read_csv(std::istream& is, int nx, int ny, double Lx, double Ly) {
    GridField f(nx, ny, Lx, Ly);
    std::string line;
    if (!std::getline(is, line) || line.rfind("x,y,h,theta", 0) != 0) throw UsageError("grid CSV: bad header");
    size_t n = 0;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (n >= f.h.size()) throw UsageError("grid CSV: too many rows");
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ls(line);
        double x, y;
        ls >> x >> y >> f.h[n] >> f.theta[n];
        if (!ls) throw UsageError("grid CSV: malformed row " + std::to_string(n + 2));
        ++n;
    }
    if (n != f.h.size()) throw UsageError("grid CSV: expected " + std::to_string(f.h.size()) + " rows");
    return f;
}

nlohmann::json grid_sidecar(const GridField& f) {
    return {{"nx", f.nx}, {"ny", f.ny}, {"Lx", f.Lx}, {"Ly", f.Ly}, {"layout", "row-major h then theta, float64"}};
}

void write_binary(const std::string& path, const GridField& f) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::ios_base::failure("cannot open " + path);
    os.write(reinterpret_cast<const char*>(f.h.data()), static_cast<std::streamsize>(f.h.size() * sizeof(double)));
    os.write(reinterpret_cast<const char*>(f.theta.data()),
             static_cast<std::streamsize>(f.theta.size() * sizeof(double)));
    std::ofstream js(path + ".json");
    if (!os || !js) throw std::ios_base::failure("cannot write " + path);
    js << grid_sidecar(f).dump(2) << '\n';
}

GridField read_binary(const std::string& path) {
    std::ifstream js(path + ".json");
    if (!js) throw std::ios_base::failure("cannot open " + path + ".json");
    const auto meta = nlohmann::json::parse(js);
    GridField f(meta.at("nx").get<int>(), meta.at("ny").get<int>(), meta.at("Lx").get<double>(),
                meta.at("Ly").get<double>());
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::ios_base::failure("cannot open " + path);
    is.read(reinterpret_cast<char*>(f.h.data()), static_cast<std::streamsize>(f.h.size() * sizeof(double)));
    is.read(reinterpret_cast<char*>(f.theta.data()), static_cast<std::streamsize>(f.theta.size() * sizeof(double)));
    if (!is) throw std::ios_base::failure("short read from " + path);
    return f;
}

}  // namespace mfilm

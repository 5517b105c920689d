#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "nlsdefect/pde_oracle.hpp"
#include "nlsdefect/spectral.hpp"

// Structured key=value run configuration. Every numeric knob the experiments
// use lives here; the documented default block below is the only implicit
// state. Seed profiles are lists of bump tuples
//   mu0 = amp_re,amp_im,center,width,deg ; ...
// so a config file round-trips the exact analytic data.

namespace nlsdefect {

struct RunConfig {
    ModelParams params{0.05, 1.0};
    Quadrature quad{};
    int truncation = 2;
    std::vector<double> times = {0.0, 0.5, 1.0};
    OracleGrid oracle{};
    double oracle_t_final = 1.0;
    double boundary_tol = 1e-6;
    double energy_tol = 1e-4;
    double compare_tol = 5e-3;
    std::uint64_t seed = 1;
    std::string out_dir = "out";
    // seed bumps: (amp, center, width, deg)
    struct Bump {
        cplx amp;
        double center;
        double width;
        int deg;
    };
    std::vector<Bump> mu0 = {{cplx(0.36, 0.0), 0.6, 0.9, 0}, {cplx(0.0, -0.18), -1.1, 0.8, 1}};
    std::vector<Bump> mu1 = {{cplx(0.14, 0.0), 1.2, 0.7, 0}};  // symmetrized on build

    SeedProfiles seeds() const {
        SeedProfiles s;
        s.mu0 = AnalyticProfile::zero();
        for (const auto& b : mu0) s.mu0 = s.mu0 + AnalyticProfile::bump(b.amp, b.center, b.width, b.deg);
        AnalyticProfile m1 = AnalyticProfile::zero();
        for (const auto& b : mu1) m1 = m1 + AnalyticProfile::bump(b.amp, b.center, b.width, b.deg);
        s.mu1 = m1.empty() ? m1 : (m1 + m1.reflected()).scaled(0.5);
        return s;
    }
};

namespace config_detail {

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

inline std::vector<double> parse_list(const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        tok = trim(tok);
        if (!tok.empty()) out.push_back(std::stod(tok));
    }
    return out;
}

inline std::vector<RunConfig::Bump> parse_bumps(const std::string& v) {
    std::vector<RunConfig::Bump> out;
    std::stringstream ss(v);
    std::string tuple;
    while (std::getline(ss, tuple, ';')) {
        const auto nums = parse_list(tuple);
        if (nums.empty()) continue;
        if (nums.size() != 5)
            throw std::invalid_argument("config: bump tuples need amp_re,amp_im,center,width,deg");
        out.push_back({cplx(nums[0], nums[1]), nums[2], nums[3], static_cast<int>(nums[4])});
    }
    return out;
}

}  // namespace config_detail

inline void apply_config_line(RunConfig& c, const std::string& key, const std::string& value) {
    using namespace config_detail;
    if (key == "g") c.params.g = std::stod(value);
    else if (key == "eta") c.params.eta = std::stod(value);
    else if (key == "P") c.quad.P = std::stod(value);
    else if (key == "M") c.quad.M = std::stoi(value);
    else if (key == "eps_ladder") c.quad.eps_ladder = parse_list(value);
    else if (key == "h0") c.quad.h0 = std::stod(value);
    else if (key == "N") c.truncation = std::stoi(value);
    else if (key == "times") c.times = parse_list(value);
    else if (key == "oracle_X") c.oracle.X = std::stod(value);
    else if (key == "oracle_dx") c.oracle.dx = std::stod(value);
    else if (key == "oracle_dt") c.oracle.dt = std::stod(value);
    else if (key == "oracle_t_final") c.oracle_t_final = std::stod(value);
    else if (key == "boundary_tol") c.boundary_tol = std::stod(value);
    else if (key == "energy_tol") c.energy_tol = std::stod(value);
    else if (key == "compare_tol") c.compare_tol = std::stod(value);
    else if (key == "seed") c.seed = std::stoull(value);
    else if (key == "out") c.out_dir = value;
    else if (key == "mu0") c.mu0 = parse_bumps(value);
    else if (key == "mu1") c.mu1 = parse_bumps(value);
    else throw std::invalid_argument("config: unknown key '" + key + "'");
}

inline RunConfig load_config(const std::string& path) {
    RunConfig c;
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = config_detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: line " + std::to_string(lineno) +
                                        " is not key=value");
        apply_config_line(c, config_detail::trim(line.substr(0, eq)),
                          config_detail::trim(line.substr(eq + 1)));
    }
    c.params.validate();
    c.quad.validate();
    return c;
}

inline std::string serialize_config(const RunConfig& c) {
    std::ostringstream os;
    os.precision(17);
    os << "g = " << c.params.g << "\n";
    os << "eta = " << c.params.eta << "\n";
    os << "P = " << c.quad.P << "\n";
    os << "M = " << c.quad.M << "\n";
    os << "eps_ladder = ";
    for (std::size_t i = 0; i < c.quad.eps_ladder.size(); ++i)
        os << (i ? "," : "") << c.quad.eps_ladder[i];
    os << "\n";
    os << "h0 = " << c.quad.h0 << "\n";
    os << "N = " << c.truncation << "\n";
    os << "times = ";
    for (std::size_t i = 0; i < c.times.size(); ++i) os << (i ? "," : "") << c.times[i];
    os << "\n";
    os << "oracle_X = " << c.oracle.X << "\n";
    os << "oracle_dx = " << c.oracle.dx << "\n";
    os << "oracle_dt = " << c.oracle.dt << "\n";
    os << "oracle_t_final = " << c.oracle_t_final << "\n";
    os << "seed = " << c.seed << "\n";
    auto bumps = [&](const char* key, const std::vector<RunConfig::Bump>& bs) {
        os << key << " = ";
        for (std::size_t i = 0; i < bs.size(); ++i) {
            if (i) os << " ; ";
            os << bs[i].amp.real() << "," << bs[i].amp.imag() << "," << bs[i].center << ","
               << bs[i].width << "," << bs[i].deg;
        }
        os << "\n";
    };
    bumps("mu0", c.mu0);
    bumps("mu1", c.mu1);
    return os.str();
}

}  // namespace nlsdefect

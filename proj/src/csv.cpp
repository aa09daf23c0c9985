#include "sfp/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace sfp {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);  // binary: LF on every platform
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
    return in;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_spectrum_csv(const std::filesystem::path& path,
                        const HarmonicSpectrum& spec) {
    std::ofstream out = open_out(path);
    out << "ell,j,re,im\n";
    for (int l = 0; l <= spec.ell_max(); ++l)
        for (int j = -l; j <= l; ++j) {
            const Complex c = spec(l, j);
            out << l << ',' << j << ',' << fmt17(c.real()) << ',' << fmt17(c.imag())
                << '\n';
        }
}

HarmonicSpectrum read_spectrum_csv(const std::filesystem::path& path) {
    std::ifstream in = open_in(path);
    std::string line;
    std::getline(in, line);  // header
    struct Row {
        int l, j;
        Complex c;
    };
    std::vector<Row> rows;
    int ell_max = -1;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split_csv(line);
        if (f.size() != 4) throw std::runtime_error("spectrum csv: bad row");
        Row r{std::stoi(f[0]), std::stoi(f[1]), {std::stod(f[2]), std::stod(f[3])}};
        ell_max = std::max(ell_max, r.l);
        rows.push_back(r);
    }
    HarmonicSpectrum spec(ell_max);
    for (const Row& r : rows) spec.at(r.l, r.j) = r.c;
    return spec;
}

void write_loss_csv(const std::filesystem::path& path, const ErrorTrace& trace) {
    std::ofstream out = open_out(path);
    out << "epoch,loss\n";
    for (const TraceEntry& e : trace.entries)
        out << e.epoch << ',' << fmt17(e.loss) << '\n';
}

void write_harmonics_csv(const std::filesystem::path& path, const ErrorTrace& trace) {
    std::ofstream out = open_out(path);
    out << "epoch,ell,j,abs_err\n";
    for (const TraceEntry& e : trace.entries)
        for (int l = 0; l <= trace.ell_max; ++l)
            for (int j = -l; j <= l; ++j)
                out << e.epoch << ',' << l << ',' << j << ','
                    << fmt17(e.harmonic_errors[HarmonicSpectrum::flat_index(l, j)])
                    << '\n';
}

ErrorTrace read_trace_csv(const std::filesystem::path& loss_path,
                          const std::filesystem::path& harmonics_path) {
    ErrorTrace trace;
    std::map<int, double> losses;
    {
        std::ifstream in = open_in(loss_path);
        std::string line;
        std::getline(in, line);
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            const auto f = split_csv(line);
            if (f.size() != 2) throw std::runtime_error("loss csv: bad row");
            losses[std::stoi(f[0])] = std::stod(f[1]);
        }
    }
    std::map<int, std::map<std::pair<int, int>, double>> by_epoch;
    int ell_max = 0;
    {
        std::ifstream in = open_in(harmonics_path);
        std::string line;
        std::getline(in, line);
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            const auto f = split_csv(line);
            if (f.size() != 4) throw std::runtime_error("harmonics csv: bad row");
            const int epoch = std::stoi(f[0]);
            const int l = std::stoi(f[1]);
            const int j = std::stoi(f[2]);
            if (l < 0 || std::abs(j) > l)
                throw std::runtime_error("harmonics csv: invalid (ell, j) row");
            ell_max = std::max(ell_max, l);
            by_epoch[epoch][{l, j}] = std::stod(f[3]);
        }
    }
    trace.ell_max = ell_max;
    const std::size_t n = static_cast<std::size_t>((ell_max + 1) * (ell_max + 1));
    for (const auto& [epoch, errs] : by_epoch) {
        TraceEntry e;
        e.epoch = epoch;
        const auto it = losses.find(epoch);
        e.loss = (it != losses.end()) ? it->second : 0.0;
        e.harmonic_errors.assign(n, 0.0);
        for (const auto& [lj, v] : errs)
            e.harmonic_errors[HarmonicSpectrum::flat_index(lj.first, lj.second)] = v;
        trace.entries.push_back(std::move(e));
    }
    return trace;
}

void write_params_csv(const std::filesystem::path& path, const NetworkParams& params) {
    std::ofstream out = open_out(path);
    out << "i,a,wx,wy,wz\n";
    for (std::size_t i = 0; i < params.m(); ++i)
        out << i << ',' << fmt17(params.a[i]) << ',' << fmt17(params.w[i].v.x) << ','
            << fmt17(params.w[i].v.y) << ',' << fmt17(params.w[i].v.z) << '\n';
}

NetworkParams read_params_csv(const std::filesystem::path& path, WeightMode mode) {
    std::ifstream in = open_in(path);
    std::string line;
    std::getline(in, line);
    NetworkParams params;
    params.mode = mode;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split_csv(line);
        if (f.size() != 5) throw std::runtime_error("params csv: bad row");
        params.a.push_back(std::stod(f[1]));
        params.w.push_back(
            Direction{{std::stod(f[2]), std::stod(f[3]), std::stod(f[4])}});
    }
    return params;
}

void write_verdicts_csv(const std::filesystem::path& path,
                        const std::vector<FpVerdict>& verdicts) {
    std::ofstream out = open_out(path);
    out << "j,label,n_pairs,n_inverted\n";
    for (const FpVerdict& v : verdicts)
        out << v.j << ',' << to_string(v.label) << ',' << v.n_pairs << ','
            << v.n_inverted << '\n';
}

void write_evolution_csv(const std::filesystem::path& path,
                         const EvolutionTerms& terms) {
    std::ofstream out = open_out(path);
    out << "ell,j,C_re,C_im,G_re,G_im\n";
    for (int l = 0; l <= terms.ell_max; ++l)
        for (int j = -l; j <= l; ++j) {
            const Complex c = terms.c_at(l, j);
            const Complex g = terms.g_at(l, j);
            out << l << ',' << j << ',' << fmt17(c.real()) << ',' << fmt17(c.imag())
                << ',' << fmt17(g.real()) << ',' << fmt17(g.imag()) << '\n';
        }
}

}  // namespace sfp

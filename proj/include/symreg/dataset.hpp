#pragma once

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "symreg/parse.hpp"

namespace symreg {

enum class Parity { none, even, odd };

inline const char* parity_name(Parity p) {
    switch (p) {
    case Parity::even: return "even";
    case Parity::odd: return "odd";
    default: return "none";
    }
}

// Immutable once loaded: input columns x1..xd plus target y.
struct Dataset {
    std::vector<std::vector<double>> x;  // column-major inputs
    std::vector<double> y;

    int dim() const { return static_cast<int>(x.size()); }
    size_t size() const { return y.size(); }

    std::pair<double, double> range(int var) const {
        double lo = x[static_cast<size_t>(var)][0], hi = lo;
        for (double v : x[static_cast<size_t>(var)]) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        return {lo, hi};
    }
};

// CSV with header `x1,...,xd,y`; `#` starts a comment line.
inline Dataset load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    int d = -1;
    Dataset ds;
    while (std::getline(in, line)) {
        size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        bool blank = true;
        for (char c : line)
            if (!std::isspace(static_cast<unsigned char>(c))) { blank = false; break; }
        if (blank) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (d < 0) {
            // header row
            d = static_cast<int>(cells.size()) - 1;
            if (d < 1 || cells.back().find('y') == std::string::npos)
                throw std::runtime_error(path + ": expected header x1,...,xd,y");
            ds.x.resize(static_cast<size_t>(d));
            continue;
        }
        if (static_cast<int>(cells.size()) != d + 1)
            throw std::runtime_error(path + ": row with wrong column count");
        for (int i = 0; i < d; ++i)
            ds.x[static_cast<size_t>(i)].push_back(std::stod(cells[static_cast<size_t>(i)]));
        ds.y.push_back(std::stod(cells.back()));
    }
    if (d < 0 || ds.y.empty()) throw std::runtime_error(path + ": no data rows");
    return ds;
}

inline void save_csv(const std::string& path, const Dataset& ds) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    for (int i = 0; i < ds.dim(); ++i) out << "x" << (i + 1) << ",";
    out << "y\n";
    for (size_t r = 0; r < ds.size(); ++r) {
        for (int i = 0; i < ds.dim(); ++i)
            out << format_number(ds.x[static_cast<size_t>(i)][r]) << ",";
        out << format_number(ds.y[r]) << "\n";
    }
}

}  // namespace symreg

#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "fields.hpp"

namespace minflow::io {

inline std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

namespace detail {

inline std::string read_all_or_throw(const std::string& path, std::ifstream& in) {
    if (!in) throw InvalidInput("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Parses "# <tag> nx=<int> ny=<int> h=<float>".
inline Grid2D parse_header(const std::string& line, const std::string& tag, const std::string& path) {
    std::istringstream ss(line);
    std::string hash, kind, kv;
    ss >> hash >> kind;
    if (hash != "#" || kind != tag) throw InvalidInput(path + ": expected '# " + tag + "' header");
    int nx = 0, ny = 0;
    double h = 0.0;
    while (ss >> kv) {
        if (kv.rfind("nx=", 0) == 0) nx = std::stoi(kv.substr(3));
        else if (kv.rfind("ny=", 0) == 0) ny = std::stoi(kv.substr(3));
        else if (kv.rfind("h=", 0) == 0) h = std::stod(kv.substr(2));
    }
    return Grid2D(nx, ny, h);
}

inline void parse_row(const std::string& line, std::vector<double>& out) {
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        if (cell.find_first_not_of(" \t\r") == std::string::npos) continue;
        out.push_back(std::stod(cell));
    }
}

} // namespace detail

inline void write_scalar(const std::string& path, const ScalarField& f) {
    std::ofstream out(path);
    if (!out) throw InvalidInput("cannot write file: " + path);
    const Grid2D& g = f.grid();
    out << "# scalar nx=" << g.nx << " ny=" << g.ny << " h=" << fmt17(g.h) << "\n";
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) out << (i ? "," : "") << fmt17(f.at(i, j));
        out << "\n";
    }
}

inline ScalarField read_scalar(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw InvalidInput(path + ": empty file");
    Grid2D g = detail::parse_header(line, "scalar", path);
    ScalarField f(g);
    std::vector<double> row;
    for (int j = 0; j < g.ny; ++j) {
        if (!std::getline(in, line)) throw InvalidInput(path + ": truncated scalar data");
        row.clear();
        detail::parse_row(line, row);
        if (static_cast<int>(row.size()) != g.nx)
            throw InvalidInput(path + ": expected " + std::to_string(g.nx) + " values per row");
        for (int i = 0; i < g.nx; ++i) f.at(i, j) = row[static_cast<size_t>(i)];
    }
    return f;
}

inline void write_vector(const std::string& path, const VectorField& v) {
    std::ofstream out(path);
    if (!out) throw InvalidInput("cannot write file: " + path);
    const Grid2D& g = v.grid();
    out << "# vector nx=" << g.nx << " ny=" << g.ny << " h=" << fmt17(g.h) << "\n";
    out << "u:\n";
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i <= g.nx; ++i) out << (i ? "," : "") << fmt17(v.u(i, j));
        out << "\n";
    }
    out << "w:\n";
    for (int j = 0; j <= g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) out << (i ? "," : "") << fmt17(v.w(i, j));
        out << "\n";
    }
}

inline VectorField read_vector(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw InvalidInput(path + ": empty file");
    Grid2D g = detail::parse_header(line, "vector", path);
    VectorField v(g);
    auto expect = [&](const std::string& tag) {
        if (!std::getline(in, line) || line.rfind(tag, 0) != 0)
            throw InvalidInput(path + ": expected '" + tag + "' block");
    };
    std::vector<double> row;
    expect("u:");
    for (int j = 0; j < g.ny; ++j) {
        if (!std::getline(in, line)) throw InvalidInput(path + ": truncated u block");
        row.clear();
        detail::parse_row(line, row);
        if (static_cast<int>(row.size()) != g.nx + 1)
            throw InvalidInput(path + ": expected " + std::to_string(g.nx + 1) + " u values per row");
        for (int i = 0; i <= g.nx; ++i) v.u(i, j) = row[static_cast<size_t>(i)];
    }
    expect("w:");
    for (int j = 0; j <= g.ny; ++j) {
        if (!std::getline(in, line)) throw InvalidInput(path + ": truncated w block");
        row.clear();
        detail::parse_row(line, row);
        if (static_cast<int>(row.size()) != g.nx)
            throw InvalidInput(path + ": expected " + std::to_string(g.nx) + " w values per row");
        for (int i = 0; i < g.nx; ++i) v.w(i, j) = row[static_cast<size_t>(i)];
    }
    return v;
}

// Peeks at the header tag of a field file ("scalar" or "vector").
inline std::string field_kind(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open file: " + path);
    std::string hash, kind;
    in >> hash >> kind;
    if (hash != "#") throw InvalidInput(path + ": missing field header");
    return kind;
}

} // namespace minflow::io

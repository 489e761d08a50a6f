#include "proxima/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace proxima {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.push_back("");
    return cells;
}

std::string trim(const std::string& s) {
    auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double parse_cell(const std::string& cell, const std::string& path, std::size_t line_no) {
    const std::string t = trim(cell);
    std::size_t pos = 0;
    double v = 0;
    try {
        v = std::stod(t, &pos);
    } catch (const std::exception&) {
        throw std::runtime_error(path + ": non-numeric cell '" + t + "' at line " +
                                 std::to_string(line_no));
    }
    if (pos != t.size())
        throw std::runtime_error(path + ": non-numeric cell '" + t + "' at line " +
                                 std::to_string(line_no));
    return v;
}

// Parses the "x1,...,xD" prefix of a header; returns D or 0 when malformed.
int header_dimension(const std::vector<std::string>& cols, std::size_t n_coord) {
    for (std::size_t i = 0; i < n_coord; ++i)
        if (trim(cols[i]) != "x" + std::to_string(i + 1)) return 0;
    return static_cast<int>(n_coord);
}

std::string format17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

}  // namespace

FittingSet read_fitting_csv(const std::string& path) {
    const auto lines = read_lines(path);
    if (lines.empty()) throw std::runtime_error(path + ": empty file");
    const auto header = split_csv_line(lines[0]);
    if (header.size() < 2 || trim(header.back()) != "y" ||
        header_dimension(header, header.size() - 1) == 0)
        throw std::runtime_error(path + ": malformed header, expected x1,...,xD,y");
    const int d = static_cast<int>(header.size()) - 1;

    std::vector<FittingPoint> points;
    for (std::size_t li = 1; li < lines.size(); ++li) {
        if (trim(lines[li]).empty()) continue;
        const auto cells = split_csv_line(lines[li]);
        if (cells.size() != header.size())
            throw std::runtime_error(path + ": ragged row at line " + std::to_string(li + 1));
        FittingPoint p;
        p.x.resize(d);
        for (int j = 0; j < d; ++j) p.x[j] = parse_cell(cells[j], path, li + 1);
        p.y = parse_cell(cells[d], path, li + 1);
        points.push_back(std::move(p));
    }
    if (points.empty()) throw std::runtime_error(path + ": no fitting points");
    return FittingSet(d, std::move(points));
}

ValidationSet read_validation_csv(const std::string& path) {
    const auto lines = read_lines(path);
    if (lines.empty()) throw std::runtime_error(path + ": empty file");
    auto header = split_csv_line(lines[0]);
    bool has_base = false, has_asset = false;
    if (!header.empty() && trim(header.back()) == "base") {
        has_base = true;
        header.pop_back();
    }
    if (!header.empty() && trim(header.back()) == "a") {
        has_asset = true;
        header.pop_back();
    }
    if (header.size() < 2 || trim(header.back()) != "y" ||
        header_dimension(header, header.size() - 1) == 0)
        throw std::runtime_error(path + ": malformed header, expected x1,...,xD,y[,a][,base]");
    const int d = static_cast<int>(header.size()) - 1;
    const std::size_t row_len = header.size() + (has_asset ? 1 : 0) + (has_base ? 1 : 0);

    std::vector<ValidationPoint> points;
    std::optional<BasePoint> base;
    for (std::size_t li = 1; li < lines.size(); ++li) {
        if (trim(lines[li]).empty()) continue;
        const auto cells = split_csv_line(lines[li]);
        if (cells.size() != row_len)
            throw std::runtime_error(path + ": ragged row at line " + std::to_string(li + 1));
        ValidationPoint p;
        p.x.resize(d);
        std::size_t c = 0;
        for (int j = 0; j < d; ++j) p.x[j] = parse_cell(cells[c++], path, li + 1);
        p.y = parse_cell(cells[c++], path, li + 1);
        if (has_asset) p.asset = parse_cell(cells[c++], path, li + 1);
        bool is_base = false;
        if (has_base) {
            const double flag = parse_cell(cells[c++], path, li + 1);
            if (flag != 0.0 && flag != 1.0)
                throw std::runtime_error(path + ": base flag must be 0 or 1 at line " +
                                         std::to_string(li + 1));
            is_base = flag == 1.0;
        }
        if (is_base) {
            if (base) throw std::runtime_error(path + ": multiple base rows");
            base = BasePoint{p.x, p.y};
        } else {
            points.push_back(std::move(p));
        }
    }
    if (has_base && !base) throw std::runtime_error(path + ": base column present but no base row");
    return ValidationSet(d, std::move(points), std::move(base));
}

void write_fitting_csv(const FittingSet& set, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    for (int j = 1; j <= set.dimension(); ++j) out << "x" << j << ",";
    out << "y\n";
    for (const auto& p : set.points()) {
        for (double v : p.x) out << format17(v) << ",";
        out << format17(p.y) << "\n";
    }
}

void write_validation_csv(const ValidationSet& set, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    const bool has_asset = set.has_assets();
    const bool has_base = set.base().has_value();
    for (int j = 1; j <= set.dimension(); ++j) out << "x" << j << ",";
    out << "y";
    if (has_asset) out << ",a";
    if (has_base) out << ",base";
    out << "\n";
    for (const auto& p : set.points()) {
        for (double v : p.x) out << format17(v) << ",";
        out << format17(p.y);
        if (has_asset) out << "," << format17(*p.asset);
        if (has_base) out << ",0";
        out << "\n";
    }
    if (has_base) {
        for (double v : set.base()->x) out << format17(v) << ",";
        out << format17(set.base()->y);
        if (has_asset) out << "," << format17(0.0);
        out << ",1\n";
    }
}

}  // namespace proxima

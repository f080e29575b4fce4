#include "fdrecon/csv_io.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "fdrecon/errors.hpp"

namespace fdrecon {
namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::vector<std::string> split_row(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    if (out.empty()) out.emplace_back();
    return out;
}

bool is_nan_token(const std::string& s) {
    if (s.size() != 3) return false;
    auto lower = [](char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); };
    return lower(s[0]) == 'n' && lower(s[1]) == 'a' && lower(s[2]) == 'n';
}

double parse_number(const std::string& cell, std::size_t line_no, std::size_t col,
                    const std::string& source) {
    try {
        std::size_t used = 0;
        double v = std::stod(cell, &used);
        if (used != cell.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw CsvFormatError(source + ":" + std::to_string(line_no) + ": column " +
                             std::to_string(col + 1) + ": not a number: '" + cell + "'");
    }
}

}  // namespace

std::string format_value(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

FunctionalSample read_sample_csv(std::istream& in, const std::string& source_name) {
    std::string line;
    std::size_t line_no = 0;

    if (!std::getline(in, line))
        throw CsvFormatError(source_name + ": empty input, expected a header row of grid points");
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto header = split_row(line);
    std::vector<double> points;
    points.reserve(header.size());
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (header[c].empty())
            throw CsvFormatError(source_name + ":1: empty header cell at column " +
                                 std::to_string(c + 1));
        points.push_back(parse_number(header[c], line_no, c, source_name));
    }
    Grid grid = Grid::from_points(points);

    std::vector<PartialCurve> curves;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() && in.peek() == std::char_traits<char>::eof()) break;
        auto cells = split_row(line);
        if (cells.size() != grid.size())
            throw CsvFormatError(source_name + ":" + std::to_string(line_no) + ": expected " +
                                 std::to_string(grid.size()) + " cells, got " +
                                 std::to_string(cells.size()));
        std::vector<double> values(grid.size());
        ObservationMask mask(grid.size());
        for (std::size_t c = 0; c < cells.size(); ++c) {
            if (cells[c].empty() || is_nan_token(cells[c])) {
                values[c] = std::numeric_limits<double>::quiet_NaN();
            } else {
                values[c] = parse_number(cells[c], line_no, c, source_name);
                mask.set(c, true);
            }
        }
        curves.emplace_back(std::move(values), std::move(mask));
    }
    if (curves.empty())
        throw CsvFormatError(source_name + ": no curve rows after the header");
    return FunctionalSample(std::move(grid), std::move(curves));
}

FunctionalSample read_sample_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open for reading: " + path);
    return read_sample_csv(in, path);
}

void write_sample_csv(std::ostream& out, const FunctionalSample& sample) {
    const Grid& g = sample.grid();
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (k) out << ',';
        out << format_value(g.point(k));
    }
    out << '\n';
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const PartialCurve& c = sample.curve(i);
        for (std::size_t k = 0; k < g.size(); ++k) {
            if (k) out << ',';
            if (c.observed(k)) out << format_value(c.value(k));
        }
        out << '\n';
    }
}

void write_sample_csv_file(const std::string& path, const FunctionalSample& sample) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    write_sample_csv(out, sample);
    out.flush();
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace fdrecon

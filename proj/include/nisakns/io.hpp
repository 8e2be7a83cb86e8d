#pragma once

// Field and report serialization.
//
// CSV: header "x,t,re_<name>_<i><j>,im_<name>_<i><j>,..." (scalar columns
// drop the index suffix), shortest round-trip numbers, rows t-major then x.

#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "nisakns/error.hpp"
#include "nisakns/grid.hpp"
#include "nisakns/matrix.hpp"
#include "nisakns/stencil.hpp"

namespace nisakns {

using json = nlohmann::ordered_json;

inline std::string format_number(double v) {
    char buf[40];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

/// A named real column, t-major over the grid.
struct Column {
    std::string name;
    std::vector<double> values;
};

inline std::vector<Column> matrix_columns(const std::string& name, const FieldGrid& f) {
    const Grid& g = f.grid();
    const std::size_t n = f.dim();
    std::vector<Column> cols;
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) {
            const std::string idx = "_" + std::to_string(a + 1) + std::to_string(b + 1);
            Column re{"re_" + name + idx, {}}, im{"im_" + name + idx, {}};
            for (std::size_t ti = 0; ti < g.nt(); ++ti)
                for (std::size_t xi = 0; xi < g.nx(); ++xi) {
                    re.values.push_back(f.at(ti, xi)(a, b).real());
                    im.values.push_back(f.at(ti, xi)(a, b).imag());
                }
            cols.push_back(std::move(re));
            cols.push_back(std::move(im));
        }
    return cols;
}

inline std::vector<Column> scalar_columns(const std::string& name, std::vector<double> values) {
    return {Column{"re_" + name, std::move(values)}, Column{"im_" + name, {}}};
}

inline std::string field_csv(const Grid& g, const std::vector<Column>& cols) {
    const std::size_t rows = g.nt() * g.nx();
    for (const auto& c : cols)
        if (!c.values.empty() && c.values.size() != rows) {
            throw Error(ErrorKind::shape, "column " + c.name + " has " + std::to_string(c.values.size()) +
                                              " values, expected " + std::to_string(rows));
        }
    std::string out = "x,t";
    for (const auto& c : cols) out += "," + c.name;
    out += "\n";
    for (std::size_t ti = 0; ti < g.nt(); ++ti)
        for (std::size_t xi = 0; xi < g.nx(); ++xi) {
            out += format_number(g.x(xi));
            out += ",";
            out += format_number(g.t()[ti]);
            const std::size_t r = ti * g.nx() + xi;
            for (const auto& c : cols) {
                out += ",";
                out += format_number(c.values.empty() ? 0.0 : c.values[r]);
            }
            out += "\n";
        }
    return out;
}

/// Parsed CSV: header names and numeric rows.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    std::size_t column(const std::string& name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        throw Error(ErrorKind::io, "column '" + name + "' not found");
    }
};

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::io, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline CsvTable parse_csv(const std::string& text, const std::string& origin) {
    CsvTable t;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (t.header.empty()) {
            t.header = std::move(cells);
            continue;
        }
        if (cells.size() != t.header.size()) {
            throw Error(ErrorKind::io, origin + ":" + std::to_string(line_no) + ": expected " +
                                           std::to_string(t.header.size()) + " cells");
        }
        std::vector<double> row;
        for (const auto& c : cells) {
            try {
                row.push_back(std::stod(c));
            } catch (const std::exception&) {
                throw Error(ErrorKind::io, origin + ":" + std::to_string(line_no) + ": '" + c + "' is not a number");
            }
        }
        t.rows.push_back(std::move(row));
    }
    if (t.header.empty() || t.rows.empty()) throw Error(ErrorKind::io, origin + " has no data rows");
    return t;
}

inline CsvTable read_csv(const std::filesystem::path& path) { return parse_csv(read_file(path), path.string()); }

/// Files of one run, held in memory and written together once every step
/// has succeeded.
class OutputSet {
public:
    void add(std::string name, std::string content) { files_[std::move(name)] = std::move(content); }
    const std::map<std::string, std::string>& files() const noexcept { return files_; }

    void write(const std::filesystem::path& dir) const {
        std::error_code ec;
        std::filesystem::create_directories(dir, ec);
        if (ec) throw Error(ErrorKind::io, "cannot create " + dir.string() + ": " + ec.message());
        for (const auto& [name, content] : files_) {
            const auto path = dir / name;
            std::ofstream out(path, std::ios::binary);
            if (!out) throw Error(ErrorKind::io, "cannot write " + path.string());
            out << content;
        }
    }

private:
    std::map<std::string, std::string> files_;
};

/// One (h, residual) series of a refinement study.
struct StudySeries {
    std::string name;
    std::vector<double> h;
    std::vector<double> residual;
};

/// Gnuplot script with inline data: one curve per t sample of `column` in
/// the field table and, for each study series, a log-log residual plot whose
/// legend carries the fitted slope.
inline std::string plot_script(const CsvTable& field, const std::string& column,
                               const std::vector<StudySeries>& studies, const std::string& image_prefix) {
    const std::size_t xc = field.column("x");
    const std::size_t tc = field.column("t");
    const std::size_t vc = field.column(column);
    std::vector<std::pair<double, std::vector<std::pair<double, double>>>> curves;
    for (const auto& row : field.rows) {
        if (curves.empty() || curves.back().first != row[tc]) curves.push_back({row[tc], {}});
        curves.back().second.push_back({row[xc], row[vc]});
    }
    std::ostringstream o;
    o << "# gnuplot script\nset terminal pngcairo size 900,600\n";
    for (std::size_t k = 0; k < curves.size(); ++k) {
        o << "$curve" << k << " << EOD\n";
        for (const auto& [x, v] : curves[k].second) o << format_number(x) << " " << format_number(v) << "\n";
        o << "EOD\n";
    }
    o << "set output '" << image_prefix << "_field.png'\nset xlabel 'x'\nset ylabel '" << column << "'\nplot ";
    for (std::size_t k = 0; k < curves.size(); ++k) {
        if (k) o << ", \\\n     ";
        o << "$curve" << k << " using 1:2 with lines title 't = " << format_number(curves[k].first) << "'";
    }
    o << "\n";
    for (std::size_t s = 0; s < studies.size(); ++s) {
        const auto& st = studies[s];
        if (st.h.size() < 2) throw Error(ErrorKind::io, "study " + st.name + " needs at least two levels");
        const double slope = observed_order(st.h, st.residual);
        o << "$study" << s << " << EOD\n";
        for (std::size_t i = 0; i < st.h.size(); ++i)
            o << format_number(st.h[i]) << " " << format_number(st.residual[i]) << "\n";
        o << "EOD\n";
        char legend[160];
        std::snprintf(legend, sizeof legend, "%s (slope %.3f)", st.name.c_str(), slope);
        o << "set output '" << image_prefix << "_study" << s << ".png'\nset logscale xy\nset xlabel 'h'\n"
          << "set ylabel 'residual'\nplot $study" << s << " using 1:2 with linespoints title '" << legend
          << "'\nunset logscale\n";
    }
    return o.str();
}

}  // namespace nisakns

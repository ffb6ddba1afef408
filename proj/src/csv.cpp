#include "cavityforge/csv.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "cavityforge/errors.hpp"

namespace cavityforge
{

namespace
{

constexpr std::array kUnits{
    "per_s", "v_per_m", "kv_per_m", "nm", "pm", "um", "mm", "m", "ns", "ps", "us", "s", "hz", "khz",
    "mhz", "ghz", "counts", "arb", "rad", "deg", "frac", "1", "um2", "um3",
};

std::string lower(std::string s)
{
    for (auto& c : s) {
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return s;
}

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line)
{
    std::vector<std::string> out;
    std::string cur;
    std::istringstream ss(line);
    while (std::getline(ss, cur, ',')) {
        out.push_back(trim(cur));
    }
    if (!line.empty() && line.back() == ',') {
        out.emplace_back();
    }
    return out;
}

double parse_cell(const std::string& cell, std::size_t row, std::size_t col)
{
    double v = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    if (!cell.empty() && *first == '+') {
        ++first;
    }
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (cell.empty() || ec != std::errc() || ptr != last || !std::isfinite(v)) {
        std::ostringstream msg;
        msg << "CSV row " << row << ", column " << col + 1 << ": '" << cell << "' is not a finite number";
        throw InputError(msg.str());
    }
    return v;
}

} // namespace

std::string format_number(double value)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", value);
    return buf;
}

std::string unit_of(const std::string& column)
{
    const std::string c = lower(column);
    std::string best;
    for (const char* u : kUnits) {
        const std::string unit(u);
        if (c == unit && unit == "counts") {
            return unit;
        }
        if (c.size() > unit.size() + 1 && c.compare(c.size() - unit.size(), unit.size(), unit) == 0 &&
            c[c.size() - unit.size() - 1] == '_' && unit.size() > best.size()) {
            best = unit;
        }
    }
    return best;
}

bool has_unit_suffix(const std::string& column) { return !unit_of(column).empty(); }

CsvTable read_csv(std::istream& in)
{
    CsvTable t;
    std::string line;
    if (!std::getline(in, line)) {
        throw InputError("CSV is empty");
    }
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) {
        line.erase(0, 3);
    }
    t.header = split(trim(line));
    for (const auto& h : t.header) {
        if (h.empty()) {
            throw InputError("CSV header has an empty column name");
        }
        if (!has_unit_suffix(h)) {
            throw InputError("CSV column '" + h + "' does not declare a unit (e.g. delta_l_pm, rate_per_s)");
        }
    }
    t.columns.assign(t.header.size(), {});
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto cells = split(line);
        if (cells.size() != t.header.size()) {
            std::ostringstream msg;
            msg << "CSV row " << row << " has " << cells.size() << " cells, header has " << t.header.size();
            throw InputError(msg.str());
        }
        for (std::size_t c = 0; c < cells.size(); ++c) {
            t.columns[c].push_back(parse_cell(cells[c], row, c));
        }
    }
    if (t.rows() == 0) {
        throw InputError("CSV has no data rows");
    }
    return t;
}

CsvTable read_csv_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open '" + path + "'");
    }
    return read_csv(in);
}

XYSeries to_series(const CsvTable& t)
{
    if (t.header.size() != 2 && t.header.size() != 3) {
        throw InputError("expected 2 or 3 CSV columns (x, y[, y_err])");
    }
    XYSeries s;
    s.x_label = t.header[0];
    s.y_label = t.header[1];
    s.x = t.columns[0];
    s.y = t.columns[1];
    if (t.header.size() == 3) {
        s.y_err = t.columns[2];
    }
    validate(s);
    return s;
}

CsvTable from_series(const XYSeries& s)
{
    CsvTable t;
    t.header = {s.x_label, s.y_label};
    t.columns = {s.x, s.y};
    if (s.y_err) {
        const std::string unit = unit_of(s.y_label);
        if (unit.empty()) {
            t.header.push_back(s.y_label + "_err");
        } else if (unit == s.y_label) {
            t.header.push_back("err_" + unit);
        } else {
            t.header.push_back(s.y_label.substr(0, s.y_label.size() - unit.size() - 1) + "_err_" + unit);
        }
        t.columns.push_back(*s.y_err);
    }
    return t;
}

void write_csv(std::ostream& out, const CsvTable& t)
{
    CsvWriter w(out, t.header);
    for (std::size_t r = 0; r < t.rows(); ++r) {
        for (const auto& col : t.columns) {
            w.cell(col[r]);
        }
        w.end_row();
    }
}

CsvWriter::CsvWriter(std::ostream& out, const std::vector<std::string>& header) : out_(out), columns_(header.size())
{
    for (std::size_t i = 0; i < header.size(); ++i) {
        out_ << (i ? "," : "") << header[i];
    }
    out_ << '\n';
}

CsvWriter& CsvWriter::cell(const std::string& value)
{
    out_ << (filled_ ? "," : "") << value;
    ++filled_;
    return *this;
}

CsvWriter& CsvWriter::cell(double value) { return cell(format_number(value)); }

CsvWriter& CsvWriter::cell(long long value) { return cell(std::to_string(value)); }

void CsvWriter::end_row()
{
    if (filled_ != columns_) {
        throw std::logic_error("CSV row has the wrong number of cells");
    }
    out_ << '\n';
    filled_ = 0;
}

} // namespace cavityforge

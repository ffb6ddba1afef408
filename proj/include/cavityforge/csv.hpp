#ifndef CAVITYFORGE_CSV_HPP
#define CAVITYFORGE_CSV_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "cavityforge/fit.hpp"

namespace cavityforge
{

// 9 significant digits, '.' decimal separator, no grouping.
std::string format_number(double value);

// Column names end in a unit token: `delta_l_pm`, `rate_per_s`, `counts`.
bool has_unit_suffix(const std::string& column);
// Unit part of a column name ("pm" for delta_l_pm).
std::string unit_of(const std::string& column);

struct CsvTable
{
    std::vector<std::string> header;
    std::vector<std::vector<double>> columns;

    std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }
};

// Numeric table with a one-line header declaring units. InputError on
// missing units, ragged rows or non-numeric cells.
CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::string& path);

// Two columns (x, y) or three (x, y, y_err).
XYSeries to_series(const CsvTable& table);
CsvTable from_series(const XYSeries& series);

void write_csv(std::ostream& out, const CsvTable& table);

class CsvWriter
{
public:
    CsvWriter(std::ostream& out, const std::vector<std::string>& header);

    CsvWriter& cell(double value);
    CsvWriter& cell(const std::string& value);
    CsvWriter& cell(long long value);
    void end_row();

private:
    std::ostream& out_;
    std::size_t columns_;
    std::size_t filled_ = 0;
};

} // namespace cavityforge

#endif // CAVITYFORGE_CSV_HPP

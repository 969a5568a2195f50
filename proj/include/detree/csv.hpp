#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "detree/data_table.hpp"

namespace detree {

/// Reads the named columns (all columns when empty) of a comma-separated file
/// with a header row. Throws MissingColumnError, NonNumericError or EmptyInputError.
DataTable load_csv(const std::string& path, std::span<const std::string> columns = {});
DataTable parse_csv(std::istream& in, std::span<const std::string> columns = {});

/// Shortest text that reads back as the same double.
std::string format_double(double v);

void write_csv(std::ostream& out, std::span<const std::string> columns, std::span<const double> row_major);
void write_csv(const std::string& path, std::span<const std::string> columns, std::span<const double> row_major);

std::vector<std::string> split_list(const std::string& text, char sep = ',');

}  // namespace detree

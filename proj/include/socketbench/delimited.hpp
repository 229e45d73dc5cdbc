#pragma once

// Comma-delimited text with a header row. Lines starting with '#' are
// comments; `# key=value key=value` comments declare directives
// (grid size, declared units and the like).

#include <filesystem>
#include <istream>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace socketbench {

struct DelimitedTable {
    std::string source;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> line_numbers;  // source line of each row
    std::map<std::string, std::string> directives;

    bool has_column(std::string_view name) const;
    // ParseError when the column is absent.
    std::size_t column(std::string_view name) const;

    const std::string& cell(std::size_t row, std::size_t col) const { return rows[row][col]; }
    // ParseError naming source, line and column on a non-numeric cell.
    double number(std::size_t row, std::size_t col) const;

    std::string directive(std::string_view key) const;  // ParseError if missing
    bool has_directive(std::string_view key) const;
};

DelimitedTable parse_delimited(std::istream& in, std::string source_name);
DelimitedTable parse_delimited(std::string_view text, std::string source_name);
DelimitedTable load_delimited(const std::filesystem::path& path);

// Fixed "%.*f" formatting used by every text writer.
std::string format_fixed(double value, int decimals);

}  // namespace socketbench

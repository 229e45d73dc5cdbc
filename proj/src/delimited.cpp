#include "socketbench/delimited.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "socketbench/error.hpp"

namespace socketbench {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

void parse_directives(std::string_view comment, std::map<std::string, std::string>& out) {
    std::istringstream words{std::string(comment)};
    std::string word;
    while (words >> word) {
        const auto eq = word.find('=');
        if (eq == std::string::npos || eq == 0) continue;
        out[word.substr(0, eq)] = word.substr(eq + 1);
    }
}

}  // namespace

bool DelimitedTable::has_column(std::string_view name) const {
    for (const auto& h : header)
        if (h == name) return true;
    return false;
}

std::size_t DelimitedTable::column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return i;
    throw ParseError(source + ": missing column '" + std::string(name) + "'");
}

double DelimitedTable::number(std::size_t row, std::size_t col) const {
    const std::string& s = rows[row][col];
    double value = 0.0;
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, value);
    if (ec != std::errc() || ptr != end || s.empty())
        throw ParseError(source + ":" + std::to_string(line_numbers[row]) + ": column '" + header[col] +
                         "' is not a number ('" + s + "')");
    return value;
}

bool DelimitedTable::has_directive(std::string_view key) const {
    return directives.find(std::string(key)) != directives.end();
}

std::string DelimitedTable::directive(std::string_view key) const {
    auto it = directives.find(std::string(key));
    if (it == directives.end()) throw ParseError(source + ": missing header directive '" + std::string(key) + "'");
    return it->second;
}

DelimitedTable parse_delimited(std::istream& in, std::string source_name) {
    DelimitedTable table;
    table.source = std::move(source_name);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty()) continue;
        if (t[0] == '#') {
            parse_directives(std::string_view(t).substr(1), table.directives);
            continue;
        }
        auto cells = split(t);
        if (table.header.empty()) {
            table.header = std::move(cells);
            continue;
        }
        if (cells.size() != table.header.size())
            throw ParseError(table.source + ":" + std::to_string(line_no) + ": expected " +
                             std::to_string(table.header.size()) + " columns, got " + std::to_string(cells.size()));
        table.rows.push_back(std::move(cells));
        table.line_numbers.push_back(line_no);
    }
    if (table.header.empty()) throw ParseError(table.source + ": no header row");
    return table;
}

DelimitedTable parse_delimited(std::string_view text, std::string source_name) {
    std::istringstream in{std::string(text)};
    return parse_delimited(in, std::move(source_name));
}

DelimitedTable load_delimited(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());
    return parse_delimited(in, path.string());
}

std::string format_fixed(double value, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
    return buf;
}

}  // namespace socketbench

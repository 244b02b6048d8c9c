#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cellmix::csv {

/// One data row of a header-named, delimiter-separated table.
struct Row {
    std::size_t line = 0;  // 1-based line number in the source
    std::vector<std::string> fields;
};

/// Header-addressed reader. The delimiter is sniffed from the header line
/// (comma, semicolon or tab); double-quoted fields may contain the delimiter.
class Table {
public:
    static Table read(std::istream& in);

    const std::vector<std::string>& header() const { return header_; }
    const std::vector<Row>& rows() const { return rows_; }
    char delimiter() const { return delimiter_; }

    /// Column index for `name` (case-sensitive, surrounding blanks ignored).
    std::optional<std::size_t> find(std::string_view name) const;
    /// Like find() but throws InputError naming the missing column.
    std::size_t require(std::string_view name) const;

private:
    std::vector<std::string> header_;
    std::vector<Row> rows_;
    char delimiter_ = ',';
};

std::vector<std::string> split_line(std::string_view line, char delim);
std::string trim(std::string_view s);

}  // namespace cellmix::csv

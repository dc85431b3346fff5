#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fakebook::csv {

/// One logical record. `row` is 1-based and counts records, so the header
/// is row 1 and the first data record row 2.
struct Record {
    std::size_t row = 0;
    std::vector<std::string> fields;
};

class SyntaxError : public std::runtime_error {
public:
    SyntaxError(std::size_t row, const std::string& message)
        : std::runtime_error(message), row_(row) {}
    std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

/// RFC 4180 reader: comma separator, double-quote quoting with "" escapes,
/// CRLF or LF record terminators. A leading UTF-8 BOM is skipped and blank
/// lines are ignored (they still advance the row counter).
std::vector<Record> read(std::string_view bytes);

/// Quotes a field only when it contains a comma, quote, CR or LF.
std::string escape(std::string_view field);
std::string write_row(const std::vector<std::string>& fields);

/// Header plus rows, LF terminated.
std::string write(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows);

}  // namespace fakebook::csv

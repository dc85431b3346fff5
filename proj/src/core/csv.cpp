#include "fakebook/core/csv.hpp"

namespace fakebook::csv {

std::vector<Record> read(std::string_view bytes) {
    if (bytes.substr(0, 3) == "\xEF\xBB\xBF") bytes.remove_prefix(3);

    std::vector<Record> records;
    std::size_t row = 1;
    std::size_t i = 0;
    const std::size_t n = bytes.size();

    while (i < n) {
        // blank line
        if (bytes[i] == '\n' || (bytes[i] == '\r' && i + 1 < n && bytes[i + 1] == '\n')) {
            i += bytes[i] == '\r' ? 2 : 1;
            ++row;
            continue;
        }

        Record rec{row, {}};
        std::string field;
        bool done = false;
        while (!done) {
            if (i < n && bytes[i] == '"') {
                ++i;
                while (true) {
                    if (i >= n) throw SyntaxError(row, "unterminated quoted field");
                    if (bytes[i] == '"') {
                        if (i + 1 < n && bytes[i + 1] == '"') {
                            field += '"';
                            i += 2;
                            continue;
                        }
                        ++i;
                        break;
                    }
                    field += bytes[i++];
                }
                if (i < n && bytes[i] != ',' && bytes[i] != '\n' && bytes[i] != '\r')
                    throw SyntaxError(row, "unexpected character after closing quote");
            } else {
                while (i < n && bytes[i] != ',' && bytes[i] != '\n' && bytes[i] != '\r') {
                    if (bytes[i] == '"') throw SyntaxError(row, "quote inside unquoted field");
                    field += bytes[i++];
                }
            }
            rec.fields.push_back(std::move(field));
            field.clear();

            if (i >= n) {
                done = true;
            } else if (bytes[i] == ',') {
                ++i;
            } else if (bytes[i] == '\n') {
                ++i;
                done = true;
            } else {  // '\r'
                if (i + 1 < n && bytes[i + 1] == '\n') {
                    i += 2;
                    done = true;
                } else {
                    throw SyntaxError(row, "bare carriage return");
                }
            }
        }
        records.push_back(std::move(rec));
        ++row;
    }
    return records;
}

std::string escape(std::string_view field) {
    if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string write_row(const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out += ',';
        out += escape(fields[i]);
    }
    return out;
}

std::string write(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
    std::string out = write_row(header);
    out += '\n';
    for (const auto& r : rows) {
        out += write_row(r);
        out += '\n';
    }
    return out;
}

}  // namespace fakebook::csv

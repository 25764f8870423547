#include "cilc/csv.hpp"

#include <cstdio>

#include "cilc/errors.hpp"

namespace cilc {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& file) : out_(file) {
    if (!out_) throw Error("cannot open CSV file for writing: " + file.string());
}

void CsvWriter::header(const std::vector<std::string>& columns) {
    for (size_t i = 0; i < columns.size(); ++i) {
        if (i) out_ << ',';
        out_ << columns[i];
    }
    out_ << '\n';
}

CsvWriter& CsvWriter::cell(const std::string& v) {
    if (row_open_) out_ << ',';
    out_ << v;
    row_open_ = true;
    return *this;
}

CsvWriter& CsvWriter::cell(const char* v) { return cell(std::string(v)); }

CsvWriter& CsvWriter::cell(double v) { return cell(format_double(v)); }

CsvWriter& CsvWriter::cell(int v) { return cell(std::to_string(v)); }

CsvWriter& CsvWriter::cell(bool v) { return cell(std::string(v ? "1" : "0")); }

void CsvWriter::end_row() {
    out_ << '\n';
    row_open_ = false;
}

} // namespace cilc

#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace cilc {

/// Deterministic CSV writer: doubles rendered with %.17g so identical
/// runs produce byte-identical files.
class CsvWriter {
  public:
    explicit CsvWriter(const std::filesystem::path& file);

    void header(const std::vector<std::string>& columns);

    CsvWriter& cell(const std::string& v);
    CsvWriter& cell(const char* v); // keeps literals away from the bool overload
    CsvWriter& cell(double v);
    CsvWriter& cell(int v);
    CsvWriter& cell(bool v); // rendered 0/1
    void end_row();

  private:
    std::ofstream out_;
    bool row_open_ = false;
};

std::string format_double(double v); // the %.17g rendering used everywhere

} // namespace cilc

#pragma once

#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace bhzcli {

/// Unreadable / unwritable output (CLI exit code 2).
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// 17 significant digits; reads back bit-exactly.
std::string format_double(double v);

/// Writes '\n'-terminated rows; the header is mandatory.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header);

  void row(const std::vector<std::string>& fields);
  void close();

 private:
  std::string path_;
  std::ofstream out_;
  std::size_t width_;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

CsvTable read_csv(const std::string& path);

}  // namespace bhzcli

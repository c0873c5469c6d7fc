#pragma once

// CSV logging with a versioned schema comment on the first line. Doubles are
// printed with %.17g so identical runs produce byte-identical files.

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace ctsim {

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::string& schema_name,
            int schema_version, const std::vector<std::string>& columns)
      : out_(path) {
    if (!out_)
      throw std::runtime_error("cannot open csv for writing: " + path);
    out_ << "# schema: " << schema_name << " v" << schema_version << "\n";
    for (size_t i = 0; i < columns.size(); ++i) {
      if (i) out_ << ",";
      out_ << columns[i];
    }
    out_ << "\n";
    row_.reserve(columns.size());
    n_columns_ = columns.size();
  }

  CsvWriter& add(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    row_.emplace_back(buf);
    return *this;
  }

  CsvWriter& add(long v) {
    row_.push_back(std::to_string(v));
    return *this;
  }

  CsvWriter& add(int v) { return add(static_cast<long>(v)); }

  CsvWriter& add(const std::string& v) {
    row_.push_back(v);
    return *this;
  }

  void end_row() {
    if (row_.size() != n_columns_)
      throw std::logic_error("csv row has wrong number of fields");
    for (size_t i = 0; i < row_.size(); ++i) {
      if (i) out_ << ",";
      out_ << row_[i];
    }
    out_ << "\n";
    row_.clear();
  }

  void flush() { out_.flush(); }

 private:
  std::ofstream out_;
  std::vector<std::string> row_;
  size_t n_columns_ = 0;
};

}  // namespace ctsim

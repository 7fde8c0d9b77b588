#pragma once

// Minimal CSV emission with the conventions shared by every output file:
// `#`-prefixed header comments (configuration echo), one mandatory column
// header row, 12-significant-digit numeric cells, '\n' line endings
// regardless of platform.  No timestamps or other run-dependent content:
// a fixed configuration must produce byte-identical files.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "qdc/errors.hpp"

namespace qdc::csv {

// 12 significant digits, the precision contract for all tabular data.
inline std::string format(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

class Writer {
 public:
  explicit Writer(const std::filesystem::path& path)
      : path_(path), out_(path, std::ios::binary) {
    if (!out_) {
      throw io_error("cannot open '" + path_.string() + "' for writing");
    }
  }

  Writer(Writer&&) = default;

  const std::filesystem::path& path() const { return path_; }
  long rows() const { return rows_; }

  void comment(std::string_view text) {
    out_ << "# " << text << '\n';
    check();
  }

  // Column header or a row with non-numeric cells.
  void cells(const std::vector<std::string>& cs) {
    for (std::size_t i = 0; i < cs.size(); ++i) {
      if (i) out_ << ',';
      out_ << cs[i];
    }
    out_ << '\n';
    check();
  }

  void row(const std::vector<double>& vs) {
    for (std::size_t i = 0; i < vs.size(); ++i) {
      if (i) out_ << ',';
      out_ << format(vs[i]);
    }
    out_ << '\n';
    ++rows_;
    check();
  }

  // Flush and confirm the bytes reached the file; call before relying on
  // the output.  The destructor closes silently.
  void close() {
    out_.flush();
    check();
    out_.close();
  }

 private:
  void check() const {
    if (!out_) {
      throw io_error("write failed for '" + path_.string() + "'");
    }
  }

  std::filesystem::path path_;
  std::ofstream out_;
  long rows_ = 0;
};

}  // namespace qdc::csv

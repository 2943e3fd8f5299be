#ifndef HDMI_DATASET_HPP
#define HDMI_DATASET_HPP

// Column-addressable numeric matrices. A DatasetHandle is immutable and cheap
// to copy; concurrent column reads need no synchronization.
//
// Binary matrix layout (all integers little-endian):
//   offset 0   4 bytes   magic "HDMI"
//   offset 4   u32       version (1)
//   offset 8   u64       rows
//   offset 16  u64       cols
//   offset 24  u64       name-table length in bytes
//   offset 32  ...       UTF-8 column names joined by '\n' (no trailing newline)
//   then       rows*cols IEEE-754 binary64 values, column-major; NaN = missing

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <fcntl.h>
#include <sys/mman.h>
#include <sys/stat.h>
#include <unistd.h>

#include "hdmi/error.hpp"

namespace hdmi {

inline constexpr char kBinaryMagic[4] = {'H', 'D', 'M', 'I'};
inline constexpr std::uint32_t kBinaryVersion = 1;
inline constexpr std::size_t kBinaryFixedHeaderBytes = 32;

struct BinaryMatrixHeader {
  std::uint32_t version = kBinaryVersion;
  std::uint64_t rows = 0;
  std::uint64_t cols = 0;
  std::uint64_t name_table_bytes = 0;

  std::uint64_t payload_offset() const { return kBinaryFixedHeaderBytes + name_table_bytes; }
  std::uint64_t payload_bytes() const { return rows * cols * sizeof(double); }
};

namespace detail {

template <typename T>
T from_little_endian(const unsigned char* p) {
  T v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(p[i]) << (8 * i);
  return v;
}

template <typename T>
void put_little_endian(std::ostream& out, T v) {
  unsigned char bytes[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i) bytes[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

/// Read-only private mapping of a whole file; unmapped on destruction.
class MappedFile {
 public:
  explicit MappedFile(const std::string& path) {
    const int fd = ::open(path.c_str(), O_RDONLY);
    if (fd < 0) fail_data("cannot open " + path);
    struct stat st {};
    if (::fstat(fd, &st) != 0) {
      ::close(fd);
      fail_data("cannot stat " + path);
    }
    size_ = static_cast<std::size_t>(st.st_size);
    if (size_ > 0) {
      void* p = ::mmap(nullptr, size_, PROT_READ, MAP_SHARED, fd, 0);
      if (p == MAP_FAILED) {
        ::close(fd);
        fail_data("cannot map " + path);
      }
      data_ = static_cast<const unsigned char*>(p);
    }
    ::close(fd);
  }
  ~MappedFile() {
    if (data_ != nullptr) ::munmap(const_cast<unsigned char*>(data_), size_);
  }
  MappedFile(const MappedFile&) = delete;
  MappedFile& operator=(const MappedFile&) = delete;

  const unsigned char* data() const { return data_; }
  std::size_t size() const { return size_; }

 private:
  const unsigned char* data_ = nullptr;
  std::size_t size_ = 0;
};

inline void require_unique(const std::vector<std::string>& names) {
  std::unordered_set<std::string_view> seen;
  for (const auto& n : names) {
    if (!seen.insert(n).second) fail_data("duplicate column name '" + n + "'");
  }
}

}  // namespace detail

class DatasetHandle {
 public:
  enum class Backing { in_memory, file_mapped };

  DatasetHandle() = default;

  /// Takes ownership of column-major values: columns[j][i] is row i of column j.
  static DatasetHandle from_columns(std::vector<std::string> names, std::vector<std::vector<double>> columns) {
    if (names.size() != columns.size()) fail_usage("dataset: name count differs from column count");
    if (columns.empty()) fail_data("dataset: no columns");
    const std::size_t rows = columns.front().size();
    if (rows == 0) fail_data("dataset: no rows");
    auto store = std::make_shared<Store>();
    store->values.reserve(rows * columns.size());
    for (auto& c : columns) {
      if (c.size() != rows) fail_data("dataset: ragged columns");
      store->values.insert(store->values.end(), c.begin(), c.end());
      std::vector<double>().swap(c);
    }
    detail::require_unique(names);
    DatasetHandle h;
    h.rows_ = rows;
    h.cols_ = names.size();
    h.names_ = std::make_shared<const std::vector<std::string>>(std::move(names));
    h.store_ = std::move(store);
    return h;
  }

  static DatasetHandle mapped(std::shared_ptr<const detail::MappedFile> file, const BinaryMatrixHeader& header,
                              std::vector<std::string> names) {
    DatasetHandle h;
    h.rows_ = header.rows;
    h.cols_ = header.cols;
    h.names_ = std::make_shared<const std::vector<std::string>>(std::move(names));
    h.file_ = std::move(file);
    h.payload_offset_ = header.payload_offset();
    return h;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  const std::vector<std::string>& column_names() const { return *names_; }
  Backing backing() const { return file_ ? Backing::file_mapped : Backing::in_memory; }

  std::optional<std::size_t> find(std::string_view name) const {
    const auto& n = *names_;
    const auto it = std::find(n.begin(), n.end(), name);
    if (it == n.end()) return std::nullopt;
    return static_cast<std::size_t>(it - n.begin());
  }

  /// Column j as exactly rows() values. In-memory data is returned as a view;
  /// mapped data is decoded into `buffer`, which must outlive the result.
  std::span<const double> column(std::size_t j, std::vector<double>& buffer) const {
    if (j >= cols_) fail_usage("column index out of range");
    if (store_) return {store_->values.data() + j * rows_, rows_};
    buffer.resize(rows_);
    const unsigned char* src = file_->data() + payload_offset_ + j * rows_ * sizeof(double);
    if constexpr (std::endian::native == std::endian::little) {
      std::memcpy(buffer.data(), src, rows_ * sizeof(double));
    } else {
      for (std::size_t i = 0; i < rows_; ++i) {
        buffer[i] = std::bit_cast<double>(detail::from_little_endian<std::uint64_t>(src + 8 * i));
      }
    }
    return buffer;
  }

  /// Owned copy of column j.
  std::vector<double> column_copy(std::size_t j) const {
    std::vector<double> buffer;
    const auto view = column(j, buffer);
    return {view.begin(), view.end()};
  }

  /// Bytes of heap memory held by the handle's values (zero for mapped data).
  std::size_t private_value_bytes() const { return store_ ? store_->values.size() * sizeof(double) : 0; }

 private:
  struct Store {
    std::vector<double> values;
  };

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::shared_ptr<const std::vector<std::string>> names_ = std::make_shared<const std::vector<std::string>>();
  std::shared_ptr<const Store> store_;
  std::shared_ptr<const detail::MappedFile> file_;
  std::size_t payload_offset_ = 0;
};

// ---------------------------------------------------------------------------
// CSV

struct CsvOptions {
  char delimiter = ',';
  std::vector<std::string> na_tokens{"", "NA", "NaN", "nan"};
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split(std::string_view line, char delimiter) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(delimiter, start);
    if (pos == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      return out;
    }
    out.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
}

inline std::string unquote(std::string_view s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return std::string(s);
}

}  // namespace detail

/// Parses a headed numeric CSV into an in-memory dataset.
inline DatasetHandle read_csv(std::istream& in, const CsvOptions& options = {}) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> names;
  while (std::getline(in, line)) {
    ++line_no;
    if (!detail::trim(line).empty()) break;
  }
  if (detail::trim(line).empty()) fail_data("csv: missing header row");
  for (auto field : detail::split(line, options.delimiter)) names.push_back(detail::unquote(field));
  detail::require_unique(names);

  std::vector<std::vector<double>> columns(names.size());
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto fields = detail::split(line, options.delimiter);
    if (fields.size() != names.size()) {
      fail_data("csv: line " + std::to_string(line_no) + " has " + std::to_string(fields.size()) +
                " fields, expected " + std::to_string(names.size()));
    }
    for (std::size_t j = 0; j < fields.size(); ++j) {
      const std::string_view f = fields[j];
      if (std::find(options.na_tokens.begin(), options.na_tokens.end(), f) != options.na_tokens.end()) {
        columns[j].push_back(std::numeric_limits<double>::quiet_NaN());
        continue;
      }
      double v = 0.0;
      const char* first = f.data();
      if (!f.empty() && f.front() == '+') ++first;
      const auto [ptr, ec] = std::from_chars(first, f.data() + f.size(), v);
      if (ec != std::errc() || ptr != f.data() + f.size()) {
        fail_data("csv: line " + std::to_string(line_no) + ", column '" + names[j] + "': not a number: '" +
                  std::string(f) + "'");
      }
      columns[j].push_back(v);
    }
  }
  if (columns.front().empty()) fail_data("csv: no data rows");
  return DatasetHandle::from_columns(std::move(names), std::move(columns));
}

inline DatasetHandle read_csv(const std::string& path, const CsvOptions& options = {}) {
  std::ifstream in(path);
  if (!in) fail_data("cannot open " + path);
  return read_csv(in, options);
}

/// Shortest decimal text that reads back to the same double.
inline std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

/// Headed CSV with round-trip precision; missing values are written as NA.
inline void write_csv(std::ostream& out, const DatasetHandle& data) {
  for (std::size_t j = 0; j < data.cols(); ++j) out << (j ? "," : "") << data.column_names()[j];
  out << '\n';
  std::vector<std::vector<double>> buffers(data.cols());
  std::vector<std::span<const double>> cols;
  for (std::size_t j = 0; j < data.cols(); ++j) cols.push_back(data.column(j, buffers[j]));
  for (std::size_t i = 0; i < data.rows(); ++i) {
    for (std::size_t j = 0; j < data.cols(); ++j) {
      if (j) out << ',';
      const double v = cols[j][i];
      out << (std::isnan(v) ? std::string("NA") : format_double(v));
    }
    out << '\n';
  }
}

// ---------------------------------------------------------------------------
// Binary matrix

inline BinaryMatrixHeader write_binary(const DatasetHandle& data, const std::string& path) {
  std::string names;
  for (std::size_t j = 0; j < data.cols(); ++j) {
    const std::string& n = data.column_names()[j];
    if (n.find('\n') != std::string::npos) fail_data("column name contains a newline");
    if (j > 0) names.push_back('\n');
    names += n;
  }
  BinaryMatrixHeader header;
  header.rows = data.rows();
  header.cols = data.cols();
  header.name_table_bytes = names.size();

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail_data("cannot create " + path);
  out.write(kBinaryMagic, 4);
  detail::put_little_endian(out, header.version);
  detail::put_little_endian(out, header.rows);
  detail::put_little_endian(out, header.cols);
  detail::put_little_endian(out, header.name_table_bytes);
  out.write(names.data(), static_cast<std::streamsize>(names.size()));
  std::vector<double> buffer;
  for (std::size_t j = 0; j < data.cols(); ++j) {
    for (double v : data.column(j, buffer)) detail::put_little_endian(out, std::bit_cast<std::uint64_t>(v));
  }
  out.flush();
  if (!out) fail_data("write failed for " + path);
  return header;
}

inline BinaryMatrixHeader convert_to_binary(const std::string& csv_path, const std::string& out_path,
                                            const CsvOptions& options = {}) {
  return write_binary(read_csv(csv_path, options), out_path);
}

/// Parses and validates the header; the payload is not touched.
inline std::pair<BinaryMatrixHeader, std::vector<std::string>> read_binary_header(const unsigned char* data,
                                                                                  std::size_t size) {
  if (size < kBinaryFixedHeaderBytes) fail_data("binary matrix: file shorter than its header");
  if (std::memcmp(data, kBinaryMagic, 4) != 0) fail_data("binary matrix: bad magic");
  BinaryMatrixHeader h;
  h.version = detail::from_little_endian<std::uint32_t>(data + 4);
  if (h.version != kBinaryVersion) fail_data("binary matrix: unsupported version " + std::to_string(h.version));
  h.rows = detail::from_little_endian<std::uint64_t>(data + 8);
  h.cols = detail::from_little_endian<std::uint64_t>(data + 16);
  h.name_table_bytes = detail::from_little_endian<std::uint64_t>(data + 24);
  if (h.rows == 0 || h.cols == 0) fail_data("binary matrix: empty shape");
  if (h.name_table_bytes > size - kBinaryFixedHeaderBytes) fail_data("binary matrix: truncated name table");
  const std::uint64_t max_cells = std::numeric_limits<std::uint64_t>::max() / sizeof(double);
  if (h.rows > max_cells / h.cols) fail_data("binary matrix: shape overflows");
  if (size != h.payload_offset() + h.payload_bytes()) {
    fail_data("binary matrix: payload size " + std::to_string(size - std::min<std::uint64_t>(size, h.payload_offset())) +
              " does not match rows*cols*8 = " + std::to_string(h.payload_bytes()));
  }
  std::vector<std::string> names;
  std::string_view table(reinterpret_cast<const char*>(data + kBinaryFixedHeaderBytes), h.name_table_bytes);
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = table.find('\n', start);
    names.emplace_back(table.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  if (names.size() != h.cols) fail_data("binary matrix: name count does not match column count");
  detail::require_unique(names);
  return {h, std::move(names)};
}

/// Maps a binary matrix file; columns are decoded on demand.
inline DatasetHandle open_binary(const std::string& path) {
  auto file = std::make_shared<const detail::MappedFile>(path);
  auto [header, names] = read_binary_header(file->data(), file->size());
  return DatasetHandle::mapped(std::move(file), header, std::move(names));
}

/// Opens `path` as a binary matrix when it starts with the magic, else as CSV.
inline DatasetHandle open_dataset(const std::string& path, const CsvOptions& options = {}) {
  std::ifstream probe(path, std::ios::binary);
  if (!probe) fail_data("cannot open " + path);
  char magic[4] = {};
  probe.read(magic, 4);
  if (probe.gcount() == 4 && std::memcmp(magic, kBinaryMagic, 4) == 0) return open_binary(path);
  return read_csv(path, options);
}

}  // namespace hdmi

#endif  // HDMI_DATASET_HPP

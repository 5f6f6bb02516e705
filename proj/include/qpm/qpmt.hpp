// Copyright 2026 The QPM Toolkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QPM_QPMT_HPP
#define QPM_QPMT_HPP

// QPMT container format:
//   "QPMT" | version u32 (=1) | rank u32 | rank x dim u32 | dtype u32 | payload
// All integers and the payload are little-endian. dtype 0 is float32, dtype 1
// is uint32. The payload is row-major.

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "qpm/matrix.hpp"
#include "qpm/tensor.hpp"

namespace qpm::io {

enum class DType : std::uint32_t { kFloat32 = 0, kUInt32 = 1 };

inline constexpr std::uint32_t kFormatVersion = 1;

/// A decoded QPMT payload. Values are widened to double; both float32 and
/// uint32 round-trip exactly through it.
struct RawTensor {
  std::vector<std::uint32_t> dims;
  DType dtype = DType::kFloat32;
  std::vector<double> values;

  std::size_t rank() const { return dims.size(); }
  std::size_t element_count() const {
    std::size_t n = 1;
    for (auto d : dims) n *= d;
    return n;
  }
};

namespace detail {

inline std::uint32_t to_le(std::uint32_t v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    return ((v & 0xffu) << 24) | ((v & 0xff00u) << 8) | ((v >> 8) & 0xff00u) |
           (v >> 24);
  }
}

class ByteReader {
 public:
  explicit ByteReader(const std::vector<char>& bytes) : bytes_(bytes) {}

  std::uint32_t u32(const char* what) {
    if (pos_ + 4 > bytes_.size()) {
      throw FormatError(std::string("truncated header while reading ") + what);
    }
    std::uint32_t v;
    std::memcpy(&v, bytes_.data() + pos_, 4);
    pos_ += 4;
    return to_le(v);
  }

  std::size_t remaining() const { return bytes_.size() - pos_; }
  std::size_t position() const { return pos_; }
  const char* cursor() const { return bytes_.data() + pos_; }

 private:
  const std::vector<char>& bytes_;
  std::size_t pos_ = 0;
};

inline void put_u32(std::string& out, std::uint32_t v) {
  v = to_le(v);
  char buf[4];
  std::memcpy(buf, &v, 4);
  out.append(buf, 4);
}

}  // namespace detail

inline RawTensor decode_qpmt(const std::vector<char>& bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), "QPMT", 4) != 0) {
    throw FormatError("bad magic: expected \"QPMT\"");
  }
  std::vector<char> rest(bytes.begin() + 4, bytes.end());
  detail::ByteReader in(rest);
  std::uint32_t version = in.u32("version");
  if (version != kFormatVersion) {
    throw FormatError("unsupported QPMT version " + std::to_string(version));
  }
  std::uint32_t rank = in.u32("rank");
  if (rank != 1 && rank != 2 && rank != 4) {
    throw FormatError("rank " + std::to_string(rank) + " outside {1,2,4}");
  }
  RawTensor t;
  for (std::uint32_t i = 0; i < rank; ++i) t.dims.push_back(in.u32("dims"));
  std::uint32_t dtype = in.u32("dtype");
  if (dtype > 1) throw FormatError("unknown dtype code " + std::to_string(dtype));
  t.dtype = static_cast<DType>(dtype);

  const std::size_t count = t.element_count();
  if (in.remaining() < count * 4) {
    throw FormatError("truncated payload: expected " + std::to_string(count * 4) +
                      " bytes, found " + std::to_string(in.remaining()));
  }
  if (in.remaining() > count * 4) {
    throw FormatError("trailing bytes after payload");
  }
  t.values.resize(count);
  const char* p = in.cursor();
  for (std::size_t i = 0; i < count; ++i) {
    std::uint32_t bits;
    std::memcpy(&bits, p + 4 * i, 4);
    bits = detail::to_le(bits);
    if (t.dtype == DType::kFloat32) {
      float f = std::bit_cast<float>(bits);
      if (!std::isfinite(f)) {
        throw FormatError("non-finite entry at flat index " + std::to_string(i));
      }
      t.values[i] = f;
    } else {
      t.values[i] = bits;
    }
  }
  return t;
}

inline std::string encode_qpmt(const RawTensor& t) {
  if (t.values.size() != t.element_count()) {
    throw FormatError("payload size does not match dims");
  }
  std::string out = "QPMT";
  detail::put_u32(out, kFormatVersion);
  detail::put_u32(out, static_cast<std::uint32_t>(t.rank()));
  for (auto d : t.dims) detail::put_u32(out, d);
  detail::put_u32(out, static_cast<std::uint32_t>(t.dtype));
  out.reserve(out.size() + 4 * t.values.size());
  for (std::size_t i = 0; i < t.values.size(); ++i) {
    double v = t.values[i];
    std::uint32_t bits;
    if (t.dtype == DType::kFloat32) {
      bits = std::bit_cast<std::uint32_t>(static_cast<float>(v));
    } else {
      if (v < 0 || v > 4294967295.0 || v != std::floor(v)) {
        throw FormatError("value at flat index " + std::to_string(i) +
                          " is not a uint32");
      }
      bits = static_cast<std::uint32_t>(v);
    }
    detail::put_u32(out, bits);
  }
  return out;
}

inline std::vector<char> read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_bytes(const std::filesystem::path& path,
                        const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

/// Comma separated values, no header. One value per row gives rank 1.
inline RawTensor parse_csv(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::size_t flat = 0;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<double> row;
    std::stringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      std::size_t used = 0;
      double v;
      try {
        v = std::stod(cell, &used);
      } catch (const std::exception&) {
        throw FormatError("unparseable CSV cell '" + cell + "'");
      }
      if (cell.find_first_not_of(" \t", used) != std::string::npos) {
        throw FormatError("unparseable CSV cell '" + cell + "'");
      }
      if (!std::isfinite(v)) {
        throw FormatError("non-finite entry at flat index " +
                          std::to_string(flat));
      }
      row.push_back(v);
      ++flat;
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw FormatError("ragged CSV row " + std::to_string(rows.size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw FormatError("empty CSV");
  RawTensor t;
  t.dtype = DType::kFloat32;
  const std::size_t cols = rows.front().size();
  if (cols == 1) {
    t.dims = {static_cast<std::uint32_t>(rows.size())};
  } else {
    t.dims = {static_cast<std::uint32_t>(rows.size()),
              static_cast<std::uint32_t>(cols)};
  }
  for (auto& r : rows) t.values.insert(t.values.end(), r.begin(), r.end());
  return t;
}

/// Reads a QPMT file, or a CSV file when the extension is ".csv".
inline RawTensor read_raw(const std::filesystem::path& path) {
  auto bytes = read_bytes(path);
  if (path.extension() == ".csv") {
    return parse_csv(std::string(bytes.begin(), bytes.end()));
  }
  return decode_qpmt(bytes);
}

inline void write_raw(const std::filesystem::path& path, const RawTensor& t) {
  write_bytes(path, encode_qpmt(t));
}

// Typed views ---------------------------------------------------------------

inline FeatureTensor to_feature_tensor(const RawTensor& t) {
  if (t.rank() != 4) throw FormatError("feature maps need rank 4");
  return FeatureTensor(t.dims[0], t.dims[1], t.dims[2], t.dims[3], t.values);
}

inline PooledFeatures to_pooled(const RawTensor& t) {
  if (t.rank() == 4) return pool(to_feature_tensor(t));
  if (t.rank() != 2) throw FormatError("pooled features need rank 2");
  return PooledFeatures{DenseMatrix(t.dims[0], t.dims[1], t.values)};
}

inline LabelVector to_labels(const RawTensor& t, std::size_t n_classes = 0) {
  bool column = t.rank() == 1 || (t.rank() == 2 && t.dims[1] == 1);
  if (!column) throw FormatError("labels need rank 1");
  std::vector<std::uint32_t> labels;
  labels.reserve(t.values.size());
  for (std::size_t i = 0; i < t.values.size(); ++i) {
    double v = t.values[i];
    if (v < 0 || v != std::floor(v)) {
      throw FormatError("label at index " + std::to_string(i) +
                        " is not a non-negative integer");
    }
    labels.push_back(static_cast<std::uint32_t>(v));
  }
  return LabelVector::from(std::move(labels), n_classes);
}

inline AttributeMatrix to_attributes(const RawTensor& t) {
  if (t.rank() != 2) throw FormatError("attributes need rank 2");
  return AttributeMatrix::from(DenseMatrix(t.dims[0], t.dims[1], t.values));
}

/// Rank-directed load: rank 4 gives maps, rank 2 pooled features, rank 1
/// labels.
using AnyTensor = std::variant<FeatureTensor, PooledFeatures, LabelVector>;

inline AnyTensor load_tensor(const std::filesystem::path& path) {
  RawTensor t = read_raw(path);
  switch (t.rank()) {
    case 4:
      return to_feature_tensor(t);
    case 2:
      return to_pooled(t);
    case 1:
      return to_labels(t);
    default:
      throw FormatError("rank " + std::to_string(t.rank()) + " outside {1,2,4}");
  }
}

// Writers -------------------------------------------------------------------

inline RawTensor raw_from(const FeatureTensor& t) {
  return RawTensor{{static_cast<std::uint32_t>(t.samples()),
                    static_cast<std::uint32_t>(t.features()),
                    static_cast<std::uint32_t>(t.height()),
                    static_cast<std::uint32_t>(t.width())},
                   DType::kFloat32,
                   t.data()};
}

inline RawTensor raw_from(const DenseMatrix& m) {
  return RawTensor{{static_cast<std::uint32_t>(m.rows()),
                    static_cast<std::uint32_t>(m.cols())},
                   DType::kFloat32,
                   m.data()};
}

inline RawTensor raw_from(const LabelVector& l) {
  RawTensor t{{static_cast<std::uint32_t>(l.size())}, DType::kUInt32, {}};
  t.values.assign(l.labels.begin(), l.labels.end());
  return t;
}

inline RawTensor raw_from(const BinaryVector& v) {
  RawTensor t{{static_cast<std::uint32_t>(v.size())}, DType::kUInt32, {}};
  t.values.assign(v.begin(), v.end());
  return t;
}

inline RawTensor raw_from(const BinaryMatrix& m) {
  RawTensor t{{static_cast<std::uint32_t>(m.rows()),
               static_cast<std::uint32_t>(m.cols())},
              DType::kUInt32,
              {}};
  t.values.assign(m.data().begin(), m.data().end());
  return t;
}

}  // namespace qpm::io

#endif  // QPM_QPMT_HPP

#include "safebench/npy.hpp"

#include <bit>
#include <cstring>
#include <limits>
#include <optional>
#include <string_view>

namespace safebench::npy {

static_assert(std::endian::native == std::endian::little,
              "array payloads are copied verbatim and assume a little-endian host");

namespace {

constexpr std::uint8_t kMagic[6] = {0x93, 'N', 'U', 'M', 'P', 'Y'};
constexpr std::size_t kAlignment = 64;

std::optional<DType> dtype_from_descr(std::string_view s) {
  if (s == "<f8") return DType::F64;
  if (s == "<f4") return DType::F32;
  if (s == "<i8") return DType::I64;
  if (s == "<i4") return DType::I32;
  if (s == "|b1") return DType::Bool;
  return std::nullopt;
}

// Recursive-descent reader for the restricted Python literal grammar used in
// .npy headers.
class DictParser {
 public:
  DictParser(std::string_view text, std::size_t base) : text_(text), base_(base) {}

  Descriptor parse() {
    skip_ws();
    expect('{');
    bool have_descr = false;
    bool have_order = false;
    bool have_shape = false;
    Descriptor d;

    skip_ws();
    while (peek() != '}') {
      const std::size_t key_pos = pos_;
      const std::string key = parse_string();
      skip_ws();
      expect(':');
      skip_ws();
      if (key == "descr") {
        if (have_descr) fail(key_pos, "duplicate key 'descr'");
        const std::size_t value_pos = pos_;
        const std::string value = parse_string();
        const auto dtype = dtype_from_descr(value);
        if (!dtype) {
          throw Error(ErrorKind::UnsupportedDtype, base_ + value_pos,
                      "unsupported dtype '" + value + "'");
        }
        d.dtype = *dtype;
        have_descr = true;
      } else if (key == "fortran_order") {
        if (have_order) fail(key_pos, "duplicate key 'fortran_order'");
        d.fortran_order = parse_bool();
        have_order = true;
      } else if (key == "shape") {
        if (have_shape) fail(key_pos, "duplicate key 'shape'");
        d.shape = parse_shape();
        have_shape = true;
      } else {
        fail(key_pos, "unexpected key '" + key + "'");
      }
      skip_ws();
      if (peek() == ',') {
        ++pos_;
        skip_ws();
      } else if (peek() != '}') {
        fail(pos_, "expected ',' or '}'");
      }
    }
    expect('}');
    skip_ws();
    if (pos_ != text_.size()) fail(pos_, "trailing characters after header dictionary");
    if (!have_descr || !have_order || !have_shape) {
      fail(pos_, "header dictionary must contain descr, fortran_order and shape");
    }
    return d;
  }

 private:
  [[noreturn]] void fail(std::size_t at, const std::string& what) const {
    throw Error(ErrorKind::HeaderSyntax, base_ + at,
                "npy header syntax error at byte " + std::to_string(base_ + at) + ": " + what);
  }

  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  void expect(char c) {
    if (peek() != c) fail(pos_, std::string("expected '") + c + "'");
    ++pos_;
  }

  void skip_ws() {
    while (pos_ < text_.size() &&
           (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n' || text_[pos_] == '\r')) {
      ++pos_;
    }
  }

  std::string parse_string() {
    const char quote = peek();
    if (quote != '\'' && quote != '"') fail(pos_, "expected a quoted string");
    ++pos_;
    const std::size_t start = pos_;
    while (pos_ < text_.size() && text_[pos_] != quote) {
      if (text_[pos_] == '\\') fail(pos_, "escape sequences are not supported");
      ++pos_;
    }
    if (pos_ >= text_.size()) fail(start, "unterminated string");
    std::string out(text_.substr(start, pos_ - start));
    ++pos_;
    return out;
  }

  bool parse_bool() {
    if (text_.substr(pos_, 4) == "True") {
      pos_ += 4;
      return true;
    }
    if (text_.substr(pos_, 5) == "False") {
      pos_ += 5;
      return false;
    }
    fail(pos_, "expected True or False");
  }

  std::uint64_t parse_uint() {
    const std::size_t start = pos_;
    std::uint64_t v = 0;
    while (pos_ < text_.size() && text_[pos_] >= '0' && text_[pos_] <= '9') {
      const auto digit = static_cast<std::uint64_t>(text_[pos_] - '0');
      if (v > (std::numeric_limits<std::uint64_t>::max() - digit) / 10) {
        fail(start, "shape dimension overflows 64 bits");
      }
      v = v * 10 + digit;
      ++pos_;
    }
    if (pos_ == start) fail(start, "expected a non-negative integer");
    // Python 2 era writers emit 3L.
    if (peek() == 'L') ++pos_;
    return v;
  }

  std::vector<std::uint64_t> parse_shape() {
    expect('(');
    std::vector<std::uint64_t> dims;
    skip_ws();
    while (peek() != ')') {
      dims.push_back(parse_uint());
      skip_ws();
      if (peek() == ',') {
        ++pos_;
        skip_ws();
      } else if (peek() != ')') {
        fail(pos_, "expected ',' or ')' in shape");
      }
    }
    expect(')');
    return dims;
  }

  std::string_view text_;
  std::size_t base_;
  std::size_t pos_ = 0;
};

std::uint64_t checked_count(const std::vector<std::uint64_t>& shape) {
  std::uint64_t n = 1;
  for (auto dim : shape) {
    if (dim != 0 && n > std::numeric_limits<std::uint64_t>::max() / dim) {
      throw Error(ErrorKind::HeaderSyntax, 0, "array shape overflows 64 bits");
    }
    n *= dim;
  }
  return n;
}

std::string shape_literal(const std::vector<std::uint64_t>& shape) {
  std::string s = "(";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i > 0) s += ", ";
    s += std::to_string(shape[i]);
  }
  if (shape.size() == 1) s += ",";
  s += ")";
  return s;
}

template <typename T>
Array pack(std::span<const T> values, std::vector<std::uint64_t> shape, DType dtype) {
  Array a;
  a.descriptor.dtype = dtype;
  a.descriptor.shape = std::move(shape);
  if (a.descriptor.element_count() != values.size()) {
    throw std::invalid_argument("array shape does not match value count");
  }
  a.data.resize(values.size() * sizeof(T));
  if (!values.empty()) std::memcpy(a.data.data(), values.data(), a.data.size());
  return a;
}

template <typename T>
T load(const std::uint8_t* p) {
  T v;
  std::memcpy(&v, p, sizeof(T));
  return v;
}

}  // namespace

std::string descr(DType dtype) {
  switch (dtype) {
    case DType::F64:
      return "<f8";
    case DType::F32:
      return "<f4";
    case DType::I64:
      return "<i8";
    case DType::I32:
      return "<i4";
    case DType::Bool:
      return "|b1";
  }
  return "?";
}

std::size_t item_size(DType dtype) {
  switch (dtype) {
    case DType::F64:
    case DType::I64:
      return 8;
    case DType::F32:
    case DType::I32:
      return 4;
    case DType::Bool:
      return 1;
  }
  return 0;
}

std::uint64_t Descriptor::element_count() const { return checked_count(shape); }

Header parse_header(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 6 || std::memcmp(bytes.data(), kMagic, 6) != 0) {
    throw Error(ErrorKind::NotNpy, 0, "missing \\x93NUMPY magic");
  }
  if (bytes.size() < 10) throw Error(ErrorKind::Truncated, bytes.size(), "truncated preamble");

  Header h;
  h.major_version = bytes[6];
  std::size_t header_len = 0;
  std::size_t header_start = 0;
  if (bytes[6] == 1 && bytes[7] == 0) {
    header_len = load<std::uint16_t>(bytes.data() + 8);
    header_start = 10;
  } else if ((bytes[6] == 2 || bytes[6] == 3) && bytes[7] == 0) {
    if (bytes.size() < 12) throw Error(ErrorKind::Truncated, bytes.size(), "truncated preamble");
    header_len = load<std::uint32_t>(bytes.data() + 8);
    header_start = 12;
  } else {
    throw Error(ErrorKind::HeaderSyntax, 6,
                "unsupported format version " + std::to_string(bytes[6]) + "." +
                    std::to_string(bytes[7]));
  }
  if (bytes.size() - header_start < header_len) {
    throw Error(ErrorKind::Truncated, bytes.size(),
                "header declares " + std::to_string(header_len) + " bytes but only " +
                    std::to_string(bytes.size() - header_start) + " remain");
  }

  const std::string_view text(reinterpret_cast<const char*>(bytes.data() + header_start),
                              header_len);
  h.descriptor = DictParser(text, header_start).parse();
  (void)h.descriptor.element_count();
  h.data_offset = header_start + header_len;
  return h;
}

Array Array::from_doubles(std::span<const double> values, std::vector<std::uint64_t> shape) {
  return pack(values, std::move(shape), DType::F64);
}

Array Array::from_int32s(std::span<const std::int32_t> values, std::vector<std::uint64_t> shape) {
  return pack(values, std::move(shape), DType::I32);
}

Array Array::from_int64s(std::span<const std::int64_t> values, std::vector<std::uint64_t> shape) {
  return pack(values, std::move(shape), DType::I64);
}

std::vector<double> Array::to_doubles() const {
  if (descriptor.fortran_order) throw std::runtime_error("fortran-ordered arrays are not supported");
  const std::size_t n = descriptor.element_count();
  const std::size_t w = item_size(descriptor.dtype);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint8_t* p = data.data() + i * w;
    switch (descriptor.dtype) {
      case DType::F64:
        out[i] = load<double>(p);
        break;
      case DType::F32:
        out[i] = load<float>(p);
        break;
      case DType::I64:
        out[i] = static_cast<double>(load<std::int64_t>(p));
        break;
      case DType::I32:
        out[i] = load<std::int32_t>(p);
        break;
      case DType::Bool:
        out[i] = *p != 0 ? 1.0 : 0.0;
        break;
    }
  }
  return out;
}

std::vector<std::int64_t> Array::to_int64s() const {
  if (descriptor.fortran_order) throw std::runtime_error("fortran-ordered arrays are not supported");
  const std::size_t n = descriptor.element_count();
  const std::size_t w = item_size(descriptor.dtype);
  std::vector<std::int64_t> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint8_t* p = data.data() + i * w;
    switch (descriptor.dtype) {
      case DType::I64:
        out[i] = load<std::int64_t>(p);
        break;
      case DType::I32:
        out[i] = load<std::int32_t>(p);
        break;
      case DType::Bool:
        out[i] = *p != 0 ? 1 : 0;
        break;
      default:
        throw std::runtime_error("expected an integer array, found " + descr(descriptor.dtype));
    }
  }
  return out;
}

std::vector<std::uint8_t> encode(const Array& array) {
  const Descriptor& d = array.descriptor;
  if (array.data.size() != d.element_count() * item_size(d.dtype)) {
    throw std::invalid_argument("array payload size does not match its shape");
  }
  std::string dict = "{'descr': '" + descr(d.dtype) +
                     "', 'fortran_order': " + (d.fortran_order ? "True" : "False") +
                     ", 'shape': " + shape_literal(d.shape) + ", }";
  // Pad with spaces so preamble + dict + '\n' lands on the alignment.
  const std::size_t unpadded = 10 + dict.size() + 1;
  dict.append((kAlignment - unpadded % kAlignment) % kAlignment, ' ');
  dict.push_back('\n');

  std::vector<std::uint8_t> out;
  out.reserve(10 + dict.size() + array.data.size());
  out.insert(out.end(), kMagic, kMagic + 6);
  out.push_back(1);
  out.push_back(0);
  const auto len = static_cast<std::uint16_t>(dict.size());
  out.push_back(static_cast<std::uint8_t>(len & 0xff));
  out.push_back(static_cast<std::uint8_t>(len >> 8));
  out.insert(out.end(), dict.begin(), dict.end());
  out.insert(out.end(), array.data.begin(), array.data.end());
  return out;
}

Array decode(std::span<const std::uint8_t> bytes) {
  const Header h = parse_header(bytes);
  const std::uint64_t n = h.descriptor.element_count();
  const std::size_t w = item_size(h.descriptor.dtype);
  const std::size_t available = bytes.size() - h.data_offset;
  if (n > available / w || n * w != available) {
    throw Error(ErrorKind::Truncated, h.data_offset,
                "payload holds " + std::to_string(available) + " bytes, shape needs " +
                    std::to_string(n) + " x " + std::to_string(w));
  }
  Array a;
  a.descriptor = h.descriptor;
  a.data.assign(bytes.begin() + static_cast<std::ptrdiff_t>(h.data_offset), bytes.end());
  return a;
}

}  // namespace safebench::npy

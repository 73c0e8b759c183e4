#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace safebench::npy {

enum class DType : std::uint8_t { F64, F32, I64, I32, Bool };

/// NumPy descr string for the dtype ("<f8", "|b1", ...).
std::string descr(DType dtype);
std::size_t item_size(DType dtype);

struct Descriptor {
  DType dtype = DType::F64;
  bool fortran_order = false;
  std::vector<std::uint64_t> shape;

  /// Product of the shape; 1 for a scalar (empty shape).
  std::uint64_t element_count() const;

  bool operator==(const Descriptor&) const = default;
};

struct Header {
  Descriptor descriptor;
  std::size_t data_offset = 0;
  int major_version = 1;
};

enum class ErrorKind : std::uint8_t { NotNpy, UnsupportedDtype, HeaderSyntax, Truncated };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::size_t position, const std::string& message)
      : std::runtime_error(message), kind_(kind), position_(position) {}

  ErrorKind kind() const { return kind_; }
  /// Byte offset (from the start of the file) where the problem was found.
  std::size_t position() const { return position_; }

 private:
  ErrorKind kind_;
  std::size_t position_;
};

/// Parses the preamble and header dictionary of an .npy file. Accepts format
/// versions 1.0, 2.0 and 3.0; the dictionary must contain exactly the keys
/// descr, fortran_order and shape, in any order.
Header parse_header(std::span<const std::uint8_t> bytes);

/// An array held as raw little-endian bytes.
struct Array {
  Descriptor descriptor;
  std::vector<std::uint8_t> data;

  static Array from_doubles(std::span<const double> values, std::vector<std::uint64_t> shape);
  static Array from_int32s(std::span<const std::int32_t> values, std::vector<std::uint64_t> shape);
  static Array from_int64s(std::span<const std::int64_t> values, std::vector<std::uint64_t> shape);

  /// Converts any supported dtype to double (C order only).
  std::vector<double> to_doubles() const;
  /// Converts integer and bool dtypes; floats are rejected.
  std::vector<std::int64_t> to_int64s() const;
};

/// Serialises a version 1.0 .npy file whose payload starts at a multiple of
/// 64 bytes.
std::vector<std::uint8_t> encode(const Array& array);

/// Parses a complete .npy file; the payload must be exactly the declared size.
Array decode(std::span<const std::uint8_t> bytes);

}  // namespace safebench::npy

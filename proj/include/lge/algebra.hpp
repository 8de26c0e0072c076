#pragma once

// Category codes over a quasigroup with identity.
//
// A code is num_bytes bytes of bits_per_byte bits. Byte b belongs to base
// type b; within a byte, bit i (0-based, left to right) stands for the
// element e_{i+1} of the fixed order
//
//     //x  /x  x  x\  x\\        (n = 5)
//          /x  x  x\             (n = 3)
//
// and a bit value of 1 means the element is present. Adjacent elements
// e_{i+1} e_i cancel, so a byte can be written as a product of two bytes in
// exactly 2n ways (n+1 splits, n-1 pair insertions).

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace lge {

enum class AlgebraErrc {
  kUnknownBaseType,
  kDuplicateElement,
  kUnrepresentableOrder,
  kLengthMismatch,
  kInvalidByteLength,
  kInvalidAdjacency,
  kInvalidConfig,
  kParse,
};

class AlgebraError : public std::runtime_error {
 public:
  AlgebraError(AlgebraErrc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  AlgebraErrc code() const noexcept { return code_; }

 private:
  AlgebraErrc code_;
};

struct AlgebraConfig {
  int num_bytes = 3;
  int bits_per_byte = 3;
  // Labels used only for reading and printing algebraic expressions.
  std::vector<std::string> base_type_names{"S", "NP", "N"};

  int code_length() const { return num_bytes * bits_per_byte; }
  // 0-based index of the bit that stands for the base type itself.
  int central_bit() const { return (bits_per_byte - 1) / 2; }

  // Throws AlgebraError(kInvalidConfig) on violated invariants.
  void validate() const;

  // Config with generic names B1..Bk, used when no names were given.
  static AlgebraConfig with_default_names(int num_bytes, int bits_per_byte);

  bool operator==(const AlgebraConfig&) const = default;
};

class CategoryCode {
 public:
  CategoryCode() = default;
  // All-zero code (the identity).
  CategoryCode(int num_bytes, int bits_per_byte);
  CategoryCode(int num_bytes, int bits_per_byte, std::vector<std::uint8_t> bits);

  static CategoryCode identity(const AlgebraConfig& config) {
    return CategoryCode(config.num_bytes, config.bits_per_byte);
  }

  // Parses "010 101 000". Byte groups are separated by whitespace; the
  // group width must be uniform.
  static CategoryCode parse(std::string_view text);
  static CategoryCode parse(std::string_view text, const AlgebraConfig& config);

  int num_bytes() const { return num_bytes_; }
  int bits_per_byte() const { return bits_per_byte_; }
  int size() const { return static_cast<int>(bits_.size()); }

  std::uint8_t bit(int index) const { return bits_[index]; }
  std::uint8_t bit(int byte, int pos) const { return bits_[byte * bits_per_byte_ + pos]; }
  void set_bit(int index, std::uint8_t value) { bits_[index] = value ? 1 : 0; }
  void set_bit(int byte, int pos, std::uint8_t value) {
    bits_[byte * bits_per_byte_ + pos] = value ? 1 : 0;
  }

  std::span<const std::uint8_t> bits() const { return bits_; }
  std::span<const std::uint8_t> byte(int b) const {
    return std::span<const std::uint8_t>(bits_).subspan(b * bits_per_byte_, bits_per_byte_);
  }

  bool matches(const AlgebraConfig& config) const {
    return num_bytes_ == config.num_bytes && bits_per_byte_ == config.bits_per_byte;
  }

  std::string to_string() const;

  auto operator<=>(const CategoryCode&) const = default;
  bool operator==(const CategoryCode&) const = default;

 private:
  int num_bytes_ = 0;
  int bits_per_byte_ = 0;
  std::vector<std::uint8_t> bits_;
};

struct CategoryCodeHash {
  std::size_t operator()(const CategoryCode& code) const noexcept;
};

// One of the 2n ways to write a byte as a product of two bytes.
//
// left[i] / right[i] describe parent bit i: a value >= 0 copies that child
// bit, kFixedZero / kFixedOne pin the parent bit.
struct DecompositionPattern {
  enum class Kind { kSplit, kInsertion };
  static constexpr int kFixedZero = -1;
  static constexpr int kFixedOne = -2;

  Kind kind = Kind::kSplit;
  int k = 0;
  std::vector<int> left;
  std::vector<int> right;

  // (left byte, right byte) for the given child byte.
  std::pair<std::vector<std::uint8_t>, std::vector<std::uint8_t>> apply(
      std::span<const std::uint8_t> child) const;

  // The child byte if (left, right) is an instance of this pattern.
  std::optional<std::vector<std::uint8_t>> match(std::span<const std::uint8_t> left_byte,
                                                 std::span<const std::uint8_t> right_byte) const;

  std::string name() const;

  bool operator==(const DecompositionPattern&) const = default;
};

// Splits and insertions interleaved by decreasing k:
//   split(n), split(n-1), insertion(n-1), ..., split(1), insertion(1), split(0).
// For n = 3 this is abc.000  ab0.00c  ab1.01c  a00.0bc  a10.1bc  000.abc.
// Throws AlgebraError(kInvalidByteLength) unless n is odd and >= 3.
const std::vector<DecompositionPattern>& enumerate_decompositions(int n);

// Child byte for one byte pair, or nullopt when no pattern matches.
// `pattern_index` receives the first matching pattern.
std::optional<std::vector<std::uint8_t>> combine_byte(std::span<const std::uint8_t> left,
                                                      std::span<const std::uint8_t> right,
                                                      int* pattern_index = nullptr);

// Product of two adjacent codes; bytes combine independently. Throws
// AlgebraError(kInvalidAdjacency) when some byte pair matches no pattern.
CategoryCode combine(const CategoryCode& left, const CategoryCode& right,
                     const AlgebraConfig& config);
std::optional<CategoryCode> try_combine(const CategoryCode& left, const CategoryCode& right);

bool is_identity(const CategoryCode& code);

// "/NP S NP\" -> 010 101 000 (with names S, NP, N).
CategoryCode encode_expression(std::string_view expr, const AlgebraConfig& config);

// Elements are listed left inverses first, then base types, then right
// inverses; within one element position bytes appear in configured order.
// The identity renders as "1".
std::string decode_expression(const CategoryCode& code, const AlgebraConfig& config);

}  // namespace lge

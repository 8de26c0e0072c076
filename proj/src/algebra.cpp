#include "lge/algebra.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>

namespace lge {

namespace {

bool valid_byte_length(int n) { return n >= 3 && n % 2 == 1; }

DecompositionPattern make_split(int n, int k) {
  DecompositionPattern p;
  p.kind = DecompositionPattern::Kind::kSplit;
  p.k = k;
  p.left.assign(n, DecompositionPattern::kFixedZero);
  p.right.assign(n, DecompositionPattern::kFixedZero);
  for (int i = 0; i < k; ++i) p.left[i] = i;
  for (int i = k; i < n; ++i) p.right[i] = i;
  return p;
}

// Inserts the canceling pair e_{k+1} (end of left) . e_k (start of right).
DecompositionPattern make_insertion(int n, int k) {
  DecompositionPattern p;
  p.kind = DecompositionPattern::Kind::kInsertion;
  p.k = k;
  p.left.assign(n, DecompositionPattern::kFixedZero);
  p.right.assign(n, DecompositionPattern::kFixedZero);
  for (int i = 0; i < k; ++i) p.left[i] = i;
  p.left[k] = DecompositionPattern::kFixedOne;
  p.right[k - 1] = DecompositionPattern::kFixedOne;
  for (int i = k; i < n; ++i) p.right[i] = i;
  return p;
}

std::vector<DecompositionPattern> build_patterns(int n) {
  std::vector<DecompositionPattern> out;
  out.reserve(2 * n);
  out.push_back(make_split(n, n));
  for (int k = n - 1; k >= 1; --k) {
    out.push_back(make_split(n, k));
    out.push_back(make_insertion(n, k));
  }
  out.push_back(make_split(n, 0));
  return out;
}

std::uint8_t parent_bit(int slot, std::span<const std::uint8_t> child) {
  if (slot >= 0) return child[slot];
  return slot == DecompositionPattern::kFixedOne ? 1 : 0;
}

// Token for element position `pos` of a byte named `name`.
std::string element_token(const std::string& name, int pos, int n) {
  const int center = (n - 1) / 2;
  if (pos < center) return std::string(center - pos, '/') + name;
  if (pos > center) return name + std::string(pos - center, '\\');
  return name;
}

}  // namespace

void AlgebraConfig::validate() const {
  if (num_bytes < 1) {
    throw AlgebraError(AlgebraErrc::kInvalidConfig, "num_bytes must be positive");
  }
  if (!valid_byte_length(bits_per_byte)) {
    throw AlgebraError(AlgebraErrc::kInvalidConfig,
                       "bits_per_byte must be odd and >= 3, got " + std::to_string(bits_per_byte));
  }
  if (!base_type_names.empty() && static_cast<int>(base_type_names.size()) != num_bytes) {
    throw AlgebraError(AlgebraErrc::kInvalidConfig,
                       "base_type_names must have num_bytes entries");
  }
}

AlgebraConfig AlgebraConfig::with_default_names(int num_bytes, int bits_per_byte) {
  AlgebraConfig c;
  c.num_bytes = num_bytes;
  c.bits_per_byte = bits_per_byte;
  if (num_bytes == 3) {
    c.base_type_names = {"S", "NP", "N"};
  } else {
    c.base_type_names.clear();
    for (int b = 0; b < num_bytes; ++b) c.base_type_names.push_back("B" + std::to_string(b + 1));
  }
  return c;
}

CategoryCode::CategoryCode(int num_bytes, int bits_per_byte)
    : num_bytes_(num_bytes),
      bits_per_byte_(bits_per_byte),
      bits_(static_cast<std::size_t>(num_bytes) * bits_per_byte, 0) {}

CategoryCode::CategoryCode(int num_bytes, int bits_per_byte, std::vector<std::uint8_t> bits)
    : num_bytes_(num_bytes), bits_per_byte_(bits_per_byte), bits_(std::move(bits)) {
  if (static_cast<int>(bits_.size()) != num_bytes * bits_per_byte) {
    throw AlgebraError(AlgebraErrc::kLengthMismatch, "code length does not match layout");
  }
  for (auto& b : bits_) {
    if (b > 1) throw AlgebraError(AlgebraErrc::kParse, "code bits must be 0 or 1");
  }
}

CategoryCode CategoryCode::parse(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string group;
  std::vector<std::uint8_t> bits;
  int width = -1;
  int groups = 0;
  while (in >> group) {
    if (width < 0) width = static_cast<int>(group.size());
    if (static_cast<int>(group.size()) != width) {
      throw AlgebraError(AlgebraErrc::kParse, "ragged byte groups in code '" + std::string(text) + "'");
    }
    for (char ch : group) {
      if (ch != '0' && ch != '1') {
        throw AlgebraError(AlgebraErrc::kParse, "bad character in code '" + std::string(text) + "'");
      }
      bits.push_back(ch == '1' ? 1 : 0);
    }
    ++groups;
  }
  if (groups == 0) throw AlgebraError(AlgebraErrc::kParse, "empty code string");
  return CategoryCode(groups, width, std::move(bits));
}

CategoryCode CategoryCode::parse(std::string_view text, const AlgebraConfig& config) {
  CategoryCode c = parse(text);
  if (!c.matches(config)) {
    throw AlgebraError(AlgebraErrc::kLengthMismatch,
                       "code '" + std::string(text) + "' does not match the algebra layout");
  }
  return c;
}

std::string CategoryCode::to_string() const {
  std::string out;
  out.reserve(bits_.size() + num_bytes_);
  for (int b = 0; b < num_bytes_; ++b) {
    if (b) out.push_back(' ');
    for (int i = 0; i < bits_per_byte_; ++i) out.push_back(bit(b, i) ? '1' : '0');
  }
  return out;
}

std::size_t CategoryCodeHash::operator()(const CategoryCode& code) const noexcept {
  std::size_t h = static_cast<std::size_t>(code.bits_per_byte()) * 1315423911u;
  for (auto b : code.bits()) h = h * 31 + b;
  return h;
}

std::pair<std::vector<std::uint8_t>, std::vector<std::uint8_t>> DecompositionPattern::apply(
    std::span<const std::uint8_t> child) const {
  std::vector<std::uint8_t> l(left.size()), r(right.size());
  for (std::size_t i = 0; i < left.size(); ++i) l[i] = parent_bit(left[i], child);
  for (std::size_t i = 0; i < right.size(); ++i) r[i] = parent_bit(right[i], child);
  return {std::move(l), std::move(r)};
}

std::optional<std::vector<std::uint8_t>> DecompositionPattern::match(
    std::span<const std::uint8_t> left_byte, std::span<const std::uint8_t> right_byte) const {
  const std::size_t n = left.size();
  if (left_byte.size() != n || right_byte.size() != n) return std::nullopt;
  std::vector<std::uint8_t> child(n, 0);
  auto check = [&](const std::vector<int>& slots, std::span<const std::uint8_t> parent) {
    for (std::size_t i = 0; i < n; ++i) {
      const int s = slots[i];
      if (s >= 0) {
        child[s] = parent[i];
      } else if (parent[i] != (s == kFixedOne ? 1 : 0)) {
        return false;
      }
    }
    return true;
  };
  if (!check(left, left_byte) || !check(right, right_byte)) return std::nullopt;
  return child;
}

std::string DecompositionPattern::name() const {
  return (kind == Kind::kSplit ? "split(" : "insertion(") + std::to_string(k) + ")";
}

const std::vector<DecompositionPattern>& enumerate_decompositions(int n) {
  if (!valid_byte_length(n)) {
    throw AlgebraError(AlgebraErrc::kInvalidByteLength,
                       "byte length must be odd and >= 3, got " + std::to_string(n));
  }
  static std::mutex mu;
  static std::map<int, std::unique_ptr<const std::vector<DecompositionPattern>>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<const std::vector<DecompositionPattern>>(build_patterns(n));
  return *slot;
}

std::optional<std::vector<std::uint8_t>> combine_byte(std::span<const std::uint8_t> left,
                                                      std::span<const std::uint8_t> right,
                                                      int* pattern_index) {
  if (left.size() != right.size()) return std::nullopt;
  const auto& patterns = enumerate_decompositions(static_cast<int>(left.size()));
  for (std::size_t i = 0; i < patterns.size(); ++i) {
    if (auto child = patterns[i].match(left, right)) {
      if (pattern_index) *pattern_index = static_cast<int>(i);
      return child;
    }
  }
  return std::nullopt;
}

std::optional<CategoryCode> try_combine(const CategoryCode& left, const CategoryCode& right) {
  if (left.num_bytes() != right.num_bytes() || left.bits_per_byte() != right.bits_per_byte()) {
    return std::nullopt;
  }
  std::vector<std::uint8_t> bits;
  bits.reserve(left.size());
  for (int b = 0; b < left.num_bytes(); ++b) {
    auto child = combine_byte(left.byte(b), right.byte(b));
    if (!child) return std::nullopt;
    bits.insert(bits.end(), child->begin(), child->end());
  }
  return CategoryCode(left.num_bytes(), left.bits_per_byte(), std::move(bits));
}

CategoryCode combine(const CategoryCode& left, const CategoryCode& right,
                     const AlgebraConfig& config) {
  if (!left.matches(config) || !right.matches(config)) {
    throw AlgebraError(AlgebraErrc::kLengthMismatch, "code does not match the algebra layout");
  }
  auto child = try_combine(left, right);
  if (!child) {
    throw AlgebraError(AlgebraErrc::kInvalidAdjacency,
                       "no decomposition pattern matches " + left.to_string() + " . " +
                           right.to_string());
  }
  return *child;
}

bool is_identity(const CategoryCode& code) {
  return std::ranges::all_of(code.bits(), [](std::uint8_t b) { return b == 0; });
}

CategoryCode encode_expression(std::string_view expr, const AlgebraConfig& config) {
  config.validate();
  const int n = config.bits_per_byte;
  const int center = config.central_bit();
  CategoryCode code = CategoryCode::identity(config);
  std::istringstream in{std::string(expr)};
  std::string token;
  while (in >> token) {
    std::size_t lead = 0;
    while (lead < token.size() && token[lead] == '/') ++lead;
    std::size_t trail = 0;
    while (trail < token.size() - lead && token[token.size() - 1 - trail] == '\\') ++trail;
    if (lead > 0 && trail > 0) {
      throw AlgebraError(AlgebraErrc::kParse, "token '" + token + "' has both inverse markers");
    }
    const std::string name = token.substr(lead, token.size() - lead - trail);
    auto it = std::ranges::find(config.base_type_names, name);
    if (it == config.base_type_names.end()) {
      throw AlgebraError(AlgebraErrc::kUnknownBaseType, "unknown base type '" + name + "'");
    }
    const int byte = static_cast<int>(it - config.base_type_names.begin());
    const int order = static_cast<int>(lead) - static_cast<int>(trail);
    const int pos = center - order;
    if (pos < 0 || pos >= n) {
      throw AlgebraError(AlgebraErrc::kUnrepresentableOrder,
                         "'" + token + "' needs more than " + std::to_string(n) + " bits per byte");
    }
    if (code.bit(byte, pos)) {
      throw AlgebraError(AlgebraErrc::kDuplicateElement, "element '" + token + "' repeated");
    }
    code.set_bit(byte, pos, 1);
  }
  return code;
}

std::string decode_expression(const CategoryCode& code, const AlgebraConfig& config) {
  if (!code.matches(config)) {
    throw AlgebraError(AlgebraErrc::kLengthMismatch, "code does not match the algebra layout");
  }
  std::vector<std::string> names = config.base_type_names;
  if (names.empty()) names = AlgebraConfig::with_default_names(config.num_bytes, config.bits_per_byte).base_type_names;
  std::string out;
  for (int pos = 0; pos < config.bits_per_byte; ++pos) {
    for (int b = 0; b < config.num_bytes; ++b) {
      if (!code.bit(b, pos)) continue;
      if (!out.empty()) out.push_back(' ');
      out += element_token(names[b], pos, config.bits_per_byte);
    }
  }
  return out.empty() ? "1" : out;
}

}  // namespace lge

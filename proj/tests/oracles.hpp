#pragma once

// Reference implementations used by the tests. None of them consult the
// library's pattern table.

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace oracle {

using Byte = std::vector<std::uint8_t>;

// Element sequence of a byte: bit i set contributes element i + 1.
inline std::vector<int> elements(const Byte& byte) {
  std::vector<int> seq;
  for (std::size_t i = 0; i < byte.size(); ++i) {
    if (byte[i]) seq.push_back(static_cast<int>(i) + 1);
  }
  return seq;
}

// Concatenates the element sequences and cancels every adjacent pair
// e_{k+1} e_k. Returns the reduced byte, or nullopt when the reduced word
// is not strictly increasing (not a byte).
inline std::optional<Byte> reduce(const Byte& left, const Byte& right) {
  std::vector<int> stack;
  auto push = [&](int e) {
    if (!stack.empty() && stack.back() == e + 1) {
      stack.pop_back();
    } else {
      stack.push_back(e);
    }
  };
  for (int e : elements(left)) push(e);
  for (int e : elements(right)) push(e);
  Byte out(left.size(), 0);
  int last = 0;
  for (int e : stack) {
    if (e <= last) return std::nullopt;
    out[static_cast<std::size_t>(e - 1)] = 1;
    last = e;
  }
  return out;
}

inline Byte byte_of(unsigned value, int n) {
  Byte b(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) b[static_cast<std::size_t>(i)] = (value >> (n - 1 - i)) & 1u;
  return b;
}

// The six n = 3 forms written out by hand: abc.000 ab0.00c ab1.01c a00.0bc
// a10.1bc 000.abc. Letters copy child bits, digits are fixed.
inline const std::vector<std::pair<std::string, std::string>>& literal_patterns_n3() {
  static const std::vector<std::pair<std::string, std::string>> p{
      {"abc", "000"}, {"ab0", "00c"}, {"ab1", "01c"},
      {"a00", "0bc"}, {"a10", "1bc"}, {"000", "abc"}};
  return p;
}

inline Byte instantiate(const std::string& form, const Byte& child) {
  Byte b(form.size());
  for (std::size_t i = 0; i < form.size(); ++i) {
    const char c = form[i];
    b[i] = (c == '0' || c == '1') ? static_cast<std::uint8_t>(c - '0') : child[static_cast<std::size_t>(c - 'a')];
  }
  return b;
}

// Child of (left, right) for n = 3 found by trying all 8 children against
// all six literal forms.
inline std::optional<Byte> brute_combine_n3(const Byte& left, const Byte& right) {
  for (unsigned c = 0; c < 8; ++c) {
    const Byte child = byte_of(c, 3);
    for (const auto& [l, r] : literal_patterns_n3()) {
      if (instantiate(l, child) == left && instantiate(r, child) == right) return child;
    }
  }
  return std::nullopt;
}

inline double sq(double x) { return x * x; }

// Minimal squared distance of continuous (lower, upper) to a binary layer
// pair related by one branching event, found by enumeration. `lower` holds
// `nodes` codes, `upper` nodes + 1; codes are `bytes` x 3 bits. For each
// branch position and byte every binary (child, left, right) triple whose
// reduction holds is tried; copied nodes try both values per bit.
inline double brute_layer_cost(const std::vector<double>& lower, const std::vector<double>& upper,
                               int nodes, int bytes, int* position = nullptr) {
  const int n = 3;
  const int len = bytes * n;
  double best = std::numeric_limits<double>::infinity();
  for (int p = 0; p < nodes; ++p) {
    double cost = 0.0;
    for (int j = 0; j < nodes; ++j) {
      if (j == p) continue;
      const int u = j < p ? j : j + 1;
      for (int b = 0; b < len; ++b) {
        const double x = lower[j * len + b], y = upper[u * len + b];
        cost += std::min(sq(x) + sq(y), sq(x - 1) + sq(y - 1));
      }
    }
    for (int byte = 0; byte < bytes; ++byte) {
      double byte_best = std::numeric_limits<double>::infinity();
      for (unsigned c = 0; c < 8; ++c) {
        for (unsigned l = 0; l < 8; ++l) {
          for (unsigned r = 0; r < 8; ++r) {
            const Byte child = byte_of(c, n), left = byte_of(l, n), right = byte_of(r, n);
            const auto red = reduce(left, right);
            if (!red || *red != child) continue;
            double d = 0.0;
            for (int i = 0; i < n; ++i) {
              d += sq(lower[p * len + byte * n + i] - child[i]);
              d += sq(upper[p * len + byte * n + i] - left[i]);
              d += sq(upper[(p + 1) * len + byte * n + i] - right[i]);
            }
            byte_best = std::min(byte_best, d);
          }
        }
      }
      cost += byte_best;
    }
    if (cost < best) {
      best = cost;
      if (position) *position = p;
    }
  }
  return best;
}

}  // namespace oracle

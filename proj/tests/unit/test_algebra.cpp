#include <set>

#include "doctest.h"
#include "lge/algebra.hpp"
#include "oracles.hpp"

using namespace lge;

namespace {

const AlgebraConfig kTable;  // S NP N, 3 x 3

CategoryCode code(const char* text) { return CategoryCode::parse(text); }

}  // namespace

TEST_CASE("config validation") {
  AlgebraConfig c;
  CHECK_NOTHROW(c.validate());
  c.bits_per_byte = 4;
  CHECK_THROWS_AS(c.validate(), AlgebraError);
  c.bits_per_byte = 3;
  c.base_type_names = {"S"};
  CHECK_THROWS_AS(c.validate(), AlgebraError);
  CHECK(kTable.central_bit() == 1);
  CHECK(AlgebraConfig::with_default_names(4, 5).central_bit() == 2);
}

TEST_CASE("code parsing and printing") {
  const auto c = code("010 101 000");
  CHECK(c.num_bytes() == 3);
  CHECK(c.bits_per_byte() == 3);
  CHECK(c.to_string() == "010 101 000");
  CHECK_THROWS(CategoryCode::parse("010 10 000"));
  CHECK_THROWS(CategoryCode::parse("012 000 000"));
  CHECK_THROWS(CategoryCode::parse("010 000", kTable));
}

TEST_CASE("pattern counts") {
  CHECK(enumerate_decompositions(3).size() == 6);
  CHECK(enumerate_decompositions(5).size() == 10);
  CHECK(enumerate_decompositions(7).size() == 14);
  CHECK_THROWS_AS(enumerate_decompositions(4), AlgebraError);
  CHECK_THROWS_AS(enumerate_decompositions(1), AlgebraError);
}

TEST_CASE("n=3 patterns are the six literal forms, in order") {
  const auto& patterns = enumerate_decompositions(3);
  const auto& literal = oracle::literal_patterns_n3();
  for (std::size_t q = 0; q < patterns.size(); ++q) {
    for (unsigned c = 0; c < 8; ++c) {
      const auto child = oracle::byte_of(c, 3);
      const auto [l, r] = patterns[q].apply(child);
      CHECK(l == oracle::instantiate(literal[q].first, child));
      CHECK(r == oracle::instantiate(literal[q].second, child));
    }
  }
}

TEST_CASE("every pattern reduces back to its child") {
  for (int n : {3, 5, 7}) {
    const auto& patterns = enumerate_decompositions(n);
    std::set<std::pair<oracle::Byte, oracle::Byte>> templates;
    for (const auto& p : patterns) {
      // Distinct as templates: compare the instance on the all-ones child.
      templates.insert(p.apply(oracle::Byte(n, 1)));
      for (unsigned c = 0; c < (1u << n); ++c) {
        const auto child = oracle::byte_of(c, n);
        const auto [l, r] = p.apply(child);
        const auto reduced = oracle::reduce(l, r);
        REQUIRE(reduced.has_value());
        CHECK(*reduced == child);
        CHECK(p.match(l, r) == std::optional<std::vector<std::uint8_t>>(child));
      }
    }
    CHECK(templates.size() == static_cast<std::size_t>(2 * n));
  }
}

TEST_CASE("combine_byte agrees with the brute-force child search on all 64 pairs") {
  for (unsigned l = 0; l < 8; ++l) {
    for (unsigned r = 0; r < 8; ++r) {
      const auto left = oracle::byte_of(l, 3), right = oracle::byte_of(r, 3);
      CHECK(combine_byte(left, right) == oracle::brute_combine_n3(left, right));
      CHECK(combine_byte(left, right) == oracle::reduce(left, right));
    }
  }
}

TEST_CASE("combine on Table I codes") {
  CHECK(combine(code("000 010 001"), code("000 000 010"), kTable) == code("000 010 000"));
  CHECK(combine(code("010 000 000"), code("100 000 000"), kTable) == code("000 000 000"));
  CHECK(combine(code("000 010 000"), code("010 100 000"), kTable) == code("010 000 000"));
  CHECK_THROWS_AS(combine(code("000 000 010"), code("000 000 010"), kTable), AlgebraError);
  CHECK_FALSE(try_combine(code("000 000 010"), code("000 000 010")).has_value());
  CHECK(is_identity(combine(code("010 000 000"), code("100 000 000"), kTable)));
  CHECK_FALSE(is_identity(code("010 000 000")));
}

TEST_CASE("identity is two-sided") {
  const auto zero = CategoryCode::identity(kTable);
  for (unsigned v = 0; v < 512; ++v) {
    std::vector<std::uint8_t> bits(9);
    for (int i = 0; i < 9; ++i) bits[i] = (v >> i) & 1u;
    const CategoryCode c(3, 3, bits);
    CHECK(combine(c, zero, kTable) == c);
    CHECK(combine(zero, c, kTable) == c);
  }
}

TEST_CASE("encode Table I expressions") {
  CHECK(encode_expression("NP N\\", kTable) == code("000 010 001"));
  CHECK(encode_expression("", kTable) == code("000 000 000"));
  CHECK(encode_expression("/NP S NP\\", kTable) == code("010 101 000"));
  CHECK(encode_expression("/S", kTable) == code("100 000 000"));
  CHECK(encode_expression("N", kTable) == code("000 000 010"));
}

TEST_CASE("encode errors") {
  auto errc = [](const char* expr) {
    try {
      encode_expression(expr, kTable);
    } catch (const AlgebraError& e) {
      return e.code();
    }
    return AlgebraErrc::kLengthMismatch;
  };
  CHECK(errc("VP") == AlgebraErrc::kUnknownBaseType);
  CHECK(errc("NP NP") == AlgebraErrc::kDuplicateElement);
  CHECK(errc("//NP") == AlgebraErrc::kUnrepresentableOrder);
}

TEST_CASE("decode Table I codes") {
  CHECK(decode_expression(code("100 000 000"), kTable) == "/S");
  CHECK(decode_expression(code("000 000 000"), kTable) == "1");
  CHECK(decode_expression(code("010 101 000"), kTable) == "/NP S NP\\");
  CHECK(decode_expression(code("000 010 001"), kTable) == "NP N\\");
  CHECK(decode_expression(code("010 001 001"), kTable) == "S NP\\ N\\");
  CHECK_THROWS_AS(decode_expression(CategoryCode::parse("01010 00000"), kTable), AlgebraError);
}

TEST_CASE("encode and decode are inverse") {
  for (unsigned v = 0; v < 512; ++v) {
    std::vector<std::uint8_t> bits(9);
    for (int i = 0; i < 9; ++i) bits[i] = (v >> i) & 1u;
    const CategoryCode c(3, 3, bits);
    const auto text = decode_expression(c, kTable);
    CHECK(encode_expression(text == "1" ? "" : text, kTable) == c);
  }
  const auto five = AlgebraConfig::with_default_names(2, 5);
  const auto c = encode_expression("//B1 B1 B2\\\\", five);
  CHECK(c.to_string() == "10100 00001");
  CHECK(decode_expression(c, five) == "//B1 B1 B2\\\\");
}

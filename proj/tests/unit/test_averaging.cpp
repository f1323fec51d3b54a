#include <cmath>
#include <cstring>
#include <random>

#include "doctest.h"
#include "proofsmith/averaging.hpp"
#include "proofsmith/errors.hpp"
#include "test_support.hpp"

using namespace proofsmith;

namespace {

Checkpoint random_checkpoint(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> d(0.0f, 2.0f);
  Checkpoint c;
  const std::vector<std::pair<std::string, std::vector<std::int64_t>>> layout = {
      {"embed.weight", {7, 5}}, {"layer.0.bias", {5}}, {"head.scale", {}}};
  for (const auto& [name, shape] : layout) {
    Tensor t{name, shape, {}};
    std::int64_t n = 1;
    for (auto s : shape) n *= s;
    for (std::int64_t i = 0; i < n; ++i) t.data.push_back(d(rng));
    c.tensors.push_back(t);
  }
  c.metadata["origin"] = "seed " + std::to_string(seed);
  return c;
}

bool bit_equal(const Tensor& a, const Tensor& b) {
  return a.data.size() == b.data.size() && std::memcmp(a.data.data(), b.data.data(), a.data.size() * 4) == 0;
}

Checkpoint scalar(float v) { return {{{"w", {}, {v}}}, {}}; }

}  // namespace

TEST_SUITE("averaging") {

TEST_CASE("identities at alpha 0 and 1") {
  const auto a = random_checkpoint(1), b = random_checkpoint(2);
  const auto at0 = average(a, b, 0.0), at1 = average(a, b, 1.0);
  for (std::size_t i = 0; i < a.tensors.size(); ++i) {
    CHECK(bit_equal(at0.tensors[i], a.tensors[i]));
    CHECK(bit_equal(at1.tensors[i], b.tensors[i]));
  }
  CHECK(tensor_digest(at1) == tensor_digest(b));
}

TEST_CASE("scalar example") {
  const auto out = average(scalar(2.0f), scalar(4.0f), 0.7);
  CHECK(out.tensors[0].data[0] == doctest::Approx(3.4).epsilon(1e-6));
  CHECK(out.metadata.at("avg.alpha") == "0.7");
  CHECK(out.metadata.at("avg.base_sha256") == tensor_digest(scalar(2.0f)));
  CHECK(out.metadata.at("avg.tuned_sha256") == tensor_digest(scalar(4.0f)));
}

TEST_CASE("mismatches and range") {
  const auto a = random_checkpoint(1);
  auto renamed = a;
  renamed.tensors[1].name = "other";
  try {
    average(a, renamed, 0.5);
    FAIL("expected KeyMismatch");
  } catch (const KeyMismatch& e) {
    CHECK(e.names() == std::vector<std::string>{"layer.0.bias", "other"});
  }
  auto reshaped = a;
  reshaped.tensors[0].shape = {5, 7};
  try {
    average(a, reshaped, 0.5);
    FAIL("expected ShapeMismatch");
  } catch (const ShapeMismatch& e) {
    CHECK(e.names() == std::vector<std::string>{"embed.weight"});
  }
  CHECK_THROWS_AS(average(a, a, 1.5), AlphaOutOfRange);
  CHECK_THROWS_AS(average(a, a, -0.1), AlphaOutOfRange);
  CHECK_THROWS_AS(average(a, a, std::nan("")), AlphaOutOfRange);
}

TEST_CASE("properties: linearity, self-average, commutation") {
  const double alphas[] = {0.0, 0.1, 0.25, 1.0 / 3.0, 0.5, 0.6, 0.7, 0.8, 0.9, 0.99, 1.0};
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto a = random_checkpoint(seed), b = random_checkpoint(seed + 100);
    for (double alpha : alphas) {
      const auto x = average(a, b, alpha), y = average(a, b, 1.0 - alpha);
      const auto swapped = average(b, a, 1.0 - alpha);
      const auto self = average(a, a, alpha);
      for (std::size_t t = 0; t < a.tensors.size(); ++t) {
        CHECK(bit_equal(x.tensors[t], swapped.tensors[t]));
        CHECK(bit_equal(self.tensors[t], a.tensors[t]));
        for (std::size_t i = 0; i < a.tensors[t].data.size(); ++i) {
          const double lhs = double(x.tensors[t].data[i]) + double(y.tensors[t].data[i]);
          const double rhs = double(a.tensors[t].data[i]) + double(b.tensors[t].data[i]);
          CHECK(std::abs(lhs - rhs) <= 1e-6 * std::max({1.0, std::abs(rhs), std::abs(double(a.tensors[t].data[i])),
                                                        std::abs(double(b.tensors[t].data[i]))}));
        }
      }
    }
  }
}

TEST_CASE("sweep") {
  const auto a = random_checkpoint(5), b = random_checkpoint(6);
  CHECK(sweep(a, b, {0.6, 0.7, 0.8, 0.9}).size() == 4);
  CHECK(sweep(a, b, {}).empty());
  const auto half = sweep(a, b, {0.5});
  for (std::size_t t = 0; t < a.tensors.size(); ++t) {
    for (std::size_t i = 0; i < a.tensors[t].data.size(); ++i) {
      const double mean = (double(a.tensors[t].data[i]) + double(b.tensors[t].data[i])) / 2.0;
      CHECK(half[0].tensors[t].data[i] == doctest::Approx(mean).epsilon(1e-6));
    }
  }
}

TEST_CASE("file round-trip is bit exact") {
  testing::TempDir dir;
  const auto a = random_checkpoint(9);
  write_checkpoint(a, dir / "a.gpck");
  const auto bytes = testing::slurp(dir / "a.gpck");
  const auto back = read_checkpoint(dir / "a.gpck");
  CHECK(back == a);
  CHECK(serialize_checkpoint(back) == bytes);
  CHECK(bytes.substr(0, 4) == "GPCK");
  CHECK(to_hex(sha256(std::string_view(bytes).substr(0, bytes.size() - 32))) ==
        to_hex(*reinterpret_cast<const Sha256Digest*>(bytes.data() + bytes.size() - 32)));
}

TEST_CASE("format layout matches the documented header") {
  const auto bytes = serialize_checkpoint(scalar(1.5f));
  std::uint32_t version;
  std::uint64_t header_len;
  std::memcpy(&version, bytes.data() + 4, 4);
  std::memcpy(&header_len, bytes.data() + 8, 8);
  CHECK(version == 1);
  const auto header = Json::parse(bytes.substr(16, header_len));
  CHECK(header["tensors"][0]["name"] == "w");
  CHECK(header["tensors"][0]["offset"] == 0);
  CHECK(header["tensors"][0]["len"] == 1);
  float v;
  std::memcpy(&v, bytes.data() + 16 + header_len, 4);
  CHECK(v == 1.5f);
  CHECK(bytes.size() == 16 + header_len + 4 + 32);
}

TEST_CASE("truncation and corruption") {
  const auto bytes = serialize_checkpoint(random_checkpoint(3));
  for (std::size_t cut : {std::size_t(0), std::size_t(3), std::size_t(10), std::size_t(40), bytes.size() - 33,
                          bytes.size() - 1}) {
    CHECK_THROWS_AS(deserialize_checkpoint(std::string_view(bytes).substr(0, cut)), FormatError);
  }
  auto flipped = bytes;
  flipped[bytes.size() - 40] ^= 0x01;
  CHECK_THROWS_AS(deserialize_checkpoint(flipped), DigestMismatch);
  auto bad_magic = bytes;
  bad_magic[0] = 'X';
  try {
    deserialize_checkpoint(bad_magic);
    FAIL("expected FormatError");
  } catch (const FormatError& e) {
    CHECK(e.offset() == 0);
  }
}

TEST_CASE("validate") {
  Checkpoint bad{{{"a", {2}, {1.0f}}}, {}};
  CHECK_THROWS_AS(validate(bad), PreconditionError);
  Checkpoint dup{{{"a", {1}, {1.0f}}, {"a", {1}, {2.0f}}}, {}};
  CHECK_THROWS_AS(validate(dup), PreconditionError);
}

}

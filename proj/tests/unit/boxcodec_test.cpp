// Copyright 2026 The Artigen Authors
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

#include "artigen/boxcodec.hpp"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "artigen/error.hpp"
#include "test_util.hpp"

namespace artigen {
namespace {

TokenStream stream(std::initializer_list<int> coords) {
  TokenStream t{Token::start()};
  for (int k : coords) t.push_back(Token::coord(k));
  t.push_back(Token::end());
  return t;
}

Errc decode_error(const TokenStream& t) {
  try {
    decode_stream(t);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error";
  return Errc::kIo;
}

TEST(BoxCodec, QuantizeExtremes) {
  const QuantBox full = quantize_box({{-0.5, -0.5, -0.5}, {0.5, 0.5, 0.5}});
  EXPECT_EQ(full.kmin, (std::array<int, 3>{0, 0, 0}));
  EXPECT_EQ(full.kmax, (std::array<int, 3>{63, 63, 63}));
  const QuantBox point = quantize_box({{0, 0, 0}, {0, 0, 0}});
  EXPECT_EQ(point.kmin, (std::array<int, 3>{32, 32, 32}));
  EXPECT_EQ(point.kmax, (std::array<int, 3>{32, 32, 32}));
  const QuantBox edge = quantize_box({{0.49, 0, 0}, {0.5, 0, 0}});
  EXPECT_EQ(edge.kmin[0], 63);
  EXPECT_EQ(edge.kmax[0], 63);
}

TEST(BoxCodec, QuantizeRejectsOutOfCanon) {
  EXPECT_THROW(quantize_box({{-0.6, 0, 0}, {0, 0, 0}}), Error);
}

TEST(BoxCodec, DequantizeBinCenters) {
  const Aabb full = dequantize_box({{0, 0, 0}, {63, 63, 63}});
  for (int a = 0; a < 3; ++a) {
    EXPECT_EQ(full.min[a], -0.4921875);
    EXPECT_EQ(full.max[a], 0.4921875);
  }
  const Aabb point = dequantize_box({{32, 32, 32}, {32, 32, 32}});
  for (int a = 0; a < 3; ++a) {
    EXPECT_EQ(point.min[a], 0.0078125);
    EXPECT_EQ(point.max[a], 0.0078125);
  }
}

TEST(BoxCodec, RoundTripErrorIsHalfABin) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  for (int n = 0; n < 10000; ++n) {
    Aabb b;
    for (int a = 0; a < 3; ++a) {
      const double x = u(rng), y = u(rng);
      b.min[a] = std::min(x, y);
      b.max[a] = std::max(x, y);
    }
    const Aabb r = dequantize_box(quantize_box(b));
    for (int a = 0; a < 3; ++a) {
      ASSERT_LE(std::abs(r.min[a] - b.min[a]), 1.0 / 128) << n;
      ASSERT_LE(std::abs(r.max[a] - b.max[a]), 1.0 / 128) << n;
    }
  }
}

TEST(BoxCodec, EncodeEmptyAndFull) {
  EXPECT_TRUE(encode_stream({}).empty());
  const Aabb full{{-0.5, -0.5, -0.5}, {0.5, 0.5, 0.5}};
  EXPECT_EQ(encode_stream(std::span(&full, 1)), stream({0, 0, 0, 63, 63, 63}));
}

TEST(BoxCodec, ThreeBoxesRoundTripInOrder) {
  const std::vector<Aabb> boxes = {{{-0.5, -0.5, -0.5}, {0, 0, 0}},
                                   {{0, 0, 0}, {0.5, 0.5, 0.5}},
                                   {{-0.1, 0.2, -0.3}, {0.1, 0.3, 0.4}}};
  const TokenStream t = encode_stream(boxes);
  ASSERT_EQ(t.size(), 24u);
  const auto q = decode_stream_quantized(t);
  ASSERT_EQ(q.size(), 3u);
  for (size_t i = 0; i < 3; ++i) EXPECT_EQ(q[i], quantize_box(boxes[i]));
}

TEST(BoxCodec, DecodeErrors) {
  EXPECT_EQ(decode_error(stream({10, 10, 10, 5, 20, 20})), Errc::kInverted);
  EXPECT_EQ(decode_error(stream({0})), Errc::kMalformed);
  EXPECT_EQ(decode_error({Token::start(), Token::coord(1)}), Errc::kMalformed);
  EXPECT_EQ(decode_error({Token::coord(1)}), Errc::kMalformed);
  EXPECT_THROW(Token::from_byte(66), Error);
}

TEST(BoxCodec, CorpusBoxesRoundTrip) {
  for (const DatasetEntry& e : testing::corpus()) {
    std::vector<Aabb> boxes;
    for (const Part& p : e.blueprint.parts) boxes.push_back(p.bbox);
    const auto decoded = decode_stream(encode_stream(boxes));
    ASSERT_EQ(decoded.size(), boxes.size());
    for (size_t i = 0; i < boxes.size(); ++i) {
      EXPECT_EQ(decoded[i], dequantize_box(quantize_box(boxes[i]))) << e.id;
    }
  }
}

TEST(BoxCodec, TextAndBytesRoundTrip) {
  const TokenStream t = stream({1, 2, 3, 40, 50, 60});
  EXPECT_EQ(render_tokens(t), "<boxs> <box1> <box2> <box3> <box40> <box50> <box60> <boxe>");
  EXPECT_EQ(parse_tokens(render_tokens(t)), t);
  EXPECT_EQ(from_bytes(to_bytes(t)), t);
  EXPECT_THROW(parse_tokens("<boxs> <box64>"), Error);
  EXPECT_THROW(parse_tokens("<box>"), Error);
}

}  // namespace
}  // namespace artigen

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

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "artigen/geometry.hpp"

namespace artigen {

inline constexpr int kBoxBins = 64;

// One special token. The wire byte is the token itself: 0 = <boxs>,
// 1 = <boxe>, 2 + k = <boxk> for k in [0, 63].
class Token {
 public:
  static constexpr Token start() { return Token(0); }
  static constexpr Token end() { return Token(1); }
  static constexpr Token coord(int k) { return Token(static_cast<std::uint8_t>(2 + k)); }
  static Token from_byte(std::uint8_t b);  // throws Error(kMalformed) for b > 65

  constexpr std::uint8_t byte() const { return code_; }
  constexpr bool is_start() const { return code_ == 0; }
  constexpr bool is_end() const { return code_ == 1; }
  constexpr bool is_coord() const { return code_ >= 2; }
  constexpr int value() const { return code_ - 2; }

  std::string text() const;

  bool operator==(const Token&) const = default;

 private:
  constexpr explicit Token(std::uint8_t code) : code_(code) {}
  std::uint8_t code_;
};

using TokenStream = std::vector<Token>;

struct QuantBox {
  std::array<int, 3> kmin{0, 0, 0};
  std::array<int, 3> kmax{0, 0, 0};

  bool operator==(const QuantBox&) const = default;
};

// k = clamp(floor((x + 0.5) * 64), 0, 63); degenerate inversions are repaired
// by raising kmax to kmin. Throws Error(kOutOfCanon).
QuantBox quantize_box(const Aabb& box);

// Bin centers: x = (k + 0.5) / 64 - 0.5.
Aabb dequantize_box(const QuantBox& q);

// Throws Error(kOutOfCanon) naming the offending box index.
TokenStream encode_stream(std::span<const Aabb> boxes);

std::vector<QuantBox> decode_stream_quantized(std::span<const Token> tokens);
std::vector<Aabb> decode_stream(std::span<const Token> tokens);

// Whitespace-separated "<boxs> <boxN> ... <boxe>".
std::string render_tokens(std::span<const Token> tokens);
TokenStream parse_tokens(std::string_view text);  // throws Error(kMalformed)

std::vector<std::uint8_t> to_bytes(std::span<const Token> tokens);
TokenStream from_bytes(std::span<const std::uint8_t> bytes);

}  // namespace artigen

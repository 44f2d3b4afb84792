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

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "artigen/error.hpp"

namespace artigen {

namespace {

int quantize_coord(double x) {
  const int k = static_cast<int>(std::floor((x + kCanonHalf) * kBoxBins));
  return std::clamp(k, 0, kBoxBins - 1);
}

double bin_center(int k) { return (k + 0.5) / kBoxBins - kCanonHalf; }

}  // namespace

Token Token::from_byte(std::uint8_t b) {
  if (b > 2 + kBoxBins - 1) {
    throw Error(Errc::kMalformed, "token byte " + std::to_string(b) + " out of range");
  }
  return Token(b);
}

std::string Token::text() const {
  if (is_start()) return "<boxs>";
  if (is_end()) return "<boxe>";
  return "<box" + std::to_string(value()) + ">";
}

QuantBox quantize_box(const Aabb& box) {
  QuantBox q;
  for (int a = 0; a < 3; ++a) {
    for (double c : {box.min[a], box.max[a]}) {
      if (!(c >= -kCanonHalf - 1e-9 && c <= kCanonHalf + 1e-9)) {
        throw Error(Errc::kOutOfCanon, "coordinate " + format_real(c) + " outside [-0.5, 0.5]");
      }
    }
    q.kmin[a] = quantize_coord(box.min[a]);
    q.kmax[a] = std::max(quantize_coord(box.max[a]), q.kmin[a]);
  }
  return q;
}

Aabb dequantize_box(const QuantBox& q) {
  Aabb box;
  for (int a = 0; a < 3; ++a) {
    box.min[a] = bin_center(q.kmin[a]);
    box.max[a] = bin_center(q.kmax[a]);
  }
  return box;
}

TokenStream encode_stream(std::span<const Aabb> boxes) {
  TokenStream out;
  out.reserve(8 * boxes.size());
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    QuantBox q;
    try {
      q = quantize_box(boxes[i]);
    } catch (const Error& e) {
      throw Error(e.code(), "box " + std::to_string(i) + ": " + e.what());
    }
    out.push_back(Token::start());
    for (int k : q.kmin) out.push_back(Token::coord(k));
    for (int k : q.kmax) out.push_back(Token::coord(k));
    out.push_back(Token::end());
  }
  return out;
}

std::vector<QuantBox> decode_stream_quantized(std::span<const Token> tokens) {
  std::vector<QuantBox> out;
  std::size_t i = 0;
  while (i < tokens.size()) {
    const std::size_t group = out.size();
    auto malformed = [&](const std::string& why) {
      return Error(Errc::kMalformed, "group " + std::to_string(group) + ": " + why);
    };
    if (!tokens[i].is_start()) throw malformed("expected <boxs>");
    if (i + 8 > tokens.size()) throw malformed("truncated group");
    QuantBox q;
    for (int slot = 0; slot < 6; ++slot) {
      const Token t = tokens[i + 1 + slot];
      if (!t.is_coord()) throw malformed("expected coordinate token, got " + t.text());
      (slot < 3 ? q.kmin : q.kmax)[slot % 3] = t.value();
    }
    if (!tokens[i + 7].is_end()) throw malformed("expected <boxe>");
    for (int a = 0; a < 3; ++a) {
      if (q.kmin[a] > q.kmax[a]) {
        throw Error(Errc::kInverted, "group " + std::to_string(group) + " axis " +
                                         std::to_string(a) + ": " + std::to_string(q.kmin[a]) +
                                         " > " + std::to_string(q.kmax[a]));
      }
    }
    out.push_back(q);
    i += 8;
  }
  return out;
}

std::vector<Aabb> decode_stream(std::span<const Token> tokens) {
  std::vector<Aabb> out;
  for (const QuantBox& q : decode_stream_quantized(tokens)) out.push_back(dequantize_box(q));
  return out;
}

std::string render_tokens(std::span<const Token> tokens) {
  std::string out;
  for (const Token& t : tokens) {
    if (!out.empty()) out += ' ';
    out += t.text();
  }
  return out;
}

TokenStream parse_tokens(std::string_view text) {
  TokenStream out;
  std::istringstream is{std::string(text)};
  std::string word;
  while (is >> word) {
    if (word == "<boxs>") {
      out.push_back(Token::start());
    } else if (word == "<boxe>") {
      out.push_back(Token::end());
    } else if (word.size() > 5 && word.starts_with("<box") && word.back() == '>') {
      int k = -1;
      const char* first = word.data() + 4;
      const char* last = word.data() + word.size() - 1;
      auto [ptr, ec] = std::from_chars(first, last, k);
      if (ec != std::errc() || ptr != last || k < 0 || k >= kBoxBins ||
          (last - first > 1 && *first == '0')) {
        throw Error(Errc::kMalformed, "bad token '" + word + "'");
      }
      out.push_back(Token::coord(k));
    } else {
      throw Error(Errc::kMalformed, "bad token '" + word + "'");
    }
  }
  return out;
}

std::vector<std::uint8_t> to_bytes(std::span<const Token> tokens) {
  std::vector<std::uint8_t> out;
  out.reserve(tokens.size());
  for (const Token& t : tokens) out.push_back(t.byte());
  return out;
}

TokenStream from_bytes(std::span<const std::uint8_t> bytes) {
  TokenStream out;
  out.reserve(bytes.size());
  for (std::uint8_t b : bytes) out.push_back(Token::from_byte(b));
  return out;
}

}  // namespace artigen

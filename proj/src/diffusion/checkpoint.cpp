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

#include "artigen/diffusion/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "artigen/error.hpp"

namespace artigen::diffusion {

namespace {

constexpr char kMagic[] = "KVIM1";
constexpr std::size_t kMagicSize = 5;

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes little endian");

class Writer {
 public:
  template <typename T>
  void put(T v) {
    const auto* p = reinterpret_cast<const std::uint8_t*>(&v);
    out.insert(out.end(), p, p + sizeof(T));
  }
  std::vector<std::uint8_t> out;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}
  template <typename T>
  T get() {
    if (pos_ + sizeof(T) > bytes_.size()) throw Error(Errc::kSyntax, "checkpoint truncated");
    T v;
    std::memcpy(&v, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> encode_checkpoint(const Denoiser& model) {
  const DenoiserConfig& c = model.config();
  Writer w;
  w.out.assign(kMagic, kMagic + kMagicSize);
  for (int v : {c.resolution, c.patch, c.d_model, c.n_layers, c.n_heads, c.mlp_ratio, c.max_parts}) {
    w.put<std::int32_t>(v);
  }
  w.put<double>(c.lambda_kine);
  w.put<std::int32_t>(c.sampler_steps);
  w.put<std::uint64_t>(c.seed);
  w.put<double>(c.scales.origin);
  w.put<double>(c.scales.axis);
  w.put<double>(c.scales.limits);
  w.put<std::uint64_t>(model.param_count());
  for (double p : model.params()) w.put<float>(static_cast<float>(p));
  return w.out;
}

Denoiser decode_checkpoint(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kMagicSize || std::memcmp(bytes.data(), kMagic, kMagicSize) != 0) {
    throw Error(Errc::kSyntax, "not a KVIM1 checkpoint");
  }
  Reader r(bytes.subspan(kMagicSize));
  DenoiserConfig c;
  c.resolution = r.get<std::int32_t>();
  c.patch = r.get<std::int32_t>();
  c.d_model = r.get<std::int32_t>();
  c.n_layers = r.get<std::int32_t>();
  c.n_heads = r.get<std::int32_t>();
  c.mlp_ratio = r.get<std::int32_t>();
  c.max_parts = r.get<std::int32_t>();
  c.lambda_kine = r.get<double>();
  c.sampler_steps = r.get<std::int32_t>();
  c.seed = r.get<std::uint64_t>();
  c.scales.origin = r.get<double>();
  c.scales.axis = r.get<double>();
  c.scales.limits = r.get<double>();
  try {
    c.validate();
  } catch (const Error& e) {
    throw Error(Errc::kSyntax, std::string("bad checkpoint config: ") + e.what());
  }
  const std::uint64_t n = r.get<std::uint64_t>();
  if (r.remaining() != n * sizeof(float)) {
    throw Error(Errc::kSyntax, "parameter blob size does not match its count");
  }
  std::vector<double> params(n);
  for (auto& p : params) p = static_cast<double>(r.get<float>());
  try {
    return Denoiser(c, std::move(params));
  } catch (const Error& e) {
    throw Error(Errc::kSyntax, std::string("checkpoint does not fit its config: ") + e.what());
  }
}

void save_checkpoint(const std::filesystem::path& path, const Denoiser& model) {
  const auto bytes = encode_checkpoint(model);
  std::ofstream f(path, std::ios::binary);
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw Error(Errc::kIo, "cannot write " + path.string());
}

Denoiser load_checkpoint(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(Errc::kIo, "cannot read " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                                        std::istreambuf_iterator<char>());
  return decode_checkpoint(bytes);
}

std::string loss_trace_csv(std::span<const LossRecord> trace) {
  std::ostringstream out;
  out << "step,loss,l_geo,l_kine\n";
  char buf[128];
  for (const LossRecord& r : trace) {
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g\n", r.step, r.terms.total,
                  r.terms.l_geo, r.terms.l_kine);
    out << buf;
  }
  return out.str();
}

}  // namespace artigen::diffusion

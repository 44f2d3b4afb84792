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

#include "artigen/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iterator>

#include "artigen/error.hpp"
#include "json.hpp"

namespace artigen {

namespace fs = std::filesystem;

std::string read_text(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(Errc::kIo, "cannot read " + path.string());
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

std::vector<std::uint8_t> read_bytes(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(Errc::kIo, "cannot read " + path.string());
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

void write_text(const fs::path& path, std::string_view text) {
  std::ofstream f(path, std::ios::binary);
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!f) throw Error(Errc::kIo, "cannot write " + path.string());
}

void write_bytes(const fs::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream f(path, std::ios::binary);
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw Error(Errc::kIo, "cannot write " + path.string());
}

void write_dataset(const fs::path& dir, const std::vector<AssetSample>& samples,
                   std::string_view spec, std::uint64_t seed, int resolution) {
  std::error_code ec;
  fs::create_directories(dir / "assets", ec);
  if (ec) throw Error(Errc::kIo, "cannot create " + (dir / "assets").string());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    char id[16];
    std::snprintf(id, sizeof(id), "%04zu", i);
    write_text(dir / "assets" / (std::string(id) + ".blueprint.json"),
               serialize_blueprint(samples[i].blueprint));
    write_bytes(dir / "assets" / (std::string(id) + ".kvox"), encode_kvox(samples[i].grid));
  }
  nlohmann::ordered_json manifest;
  manifest["spec"] = std::string(spec);
  manifest["seed"] = seed;
  manifest["R"] = resolution;
  manifest["count"] = samples.size();
  write_text(dir / "manifest.json", manifest.dump(2) + "\n");
}

std::vector<DatasetEntry> load_dataset(const fs::path& dir) {
  const fs::path assets = dir / "assets";
  if (!fs::is_directory(assets)) throw Error(Errc::kIo, "no assets directory in " + dir.string());
  const std::string suffix = ".blueprint.json";
  std::vector<std::string> ids;
  for (const auto& entry : fs::directory_iterator(assets)) {
    const std::string name = entry.path().filename().string();
    if (name.size() > suffix.size() && name.ends_with(suffix)) {
      ids.push_back(name.substr(0, name.size() - suffix.size()));
    }
  }
  std::sort(ids.begin(), ids.end());
  std::vector<DatasetEntry> out;
  for (const std::string& id : ids) {
    DatasetEntry e;
    e.id = id;
    e.blueprint = parse_blueprint(read_text(assets / (id + suffix)));
    e.grid = decode_kvox(read_bytes(assets / (id + ".kvox")));
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace artigen

// Copyright 2026 The gapkg Authors
// SPDX-License-Identifier: Apache-2.0

#include "gap/checkpoint.hpp"

#include <array>
#include <cstring>
#include <fstream>

#include "gap/config_json.hpp"
#include "gap/error.hpp"

namespace gap {

namespace {

constexpr std::array<char, 8> kMagic = {'G', 'A', 'P', 'C', 'K', 'P', 'T', '\0'};

template <typename T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& in, const std::filesystem::path& path) {
  T v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof(T))) {
    throw Error(ErrorCode::ParseError, path.string() + ": truncated checkpoint");
  }
  return v;
}

std::string get_string(std::istream& in, std::size_t n, const std::filesystem::path& path) {
  std::string s(n, '\0');
  if (n && !in.read(s.data(), static_cast<std::streamsize>(n))) {
    throw Error(ErrorCode::ParseError, path.string() + ": truncated checkpoint");
  }
  return s;
}

}  // namespace

void save_checkpoint(const Model& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out.write(kMagic.data(), kMagic.size());
  put<std::uint32_t>(out, kCheckpointVersion);
  const std::string cfg = to_json(model.config()).dump();
  put<std::uint64_t>(out, cfg.size());
  out.write(cfg.data(), static_cast<std::streamsize>(cfg.size()));
  const auto params = model.parameters();
  put<std::uint64_t>(out, params.size());
  for (const Parameter* p : params) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(p->name.size()));
    out.write(p->name.data(), static_cast<std::streamsize>(p->name.size()));
    put<std::uint64_t>(out, p->value.rows());
    put<std::uint64_t>(out, p->value.cols());
    out.write(reinterpret_cast<const char*>(p->value.data()),
              static_cast<std::streamsize>(p->value.size() * sizeof(double)));
  }
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

Model load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path.string());
  std::array<char, 8> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
    throw Error(ErrorCode::ParseError, path.string() + ": not a checkpoint");
  }
  const auto version = get<std::uint32_t>(in, path);
  if (version != kCheckpointVersion) {
    throw Error(ErrorCode::ParseError, path.string() + ": unsupported version " + std::to_string(version));
  }
  const auto cfg_len = get<std::uint64_t>(in, path);
  const ModelConfig cfg = model_config_from_json(nlohmann::json::parse(get_string(in, cfg_len, path)));
  Model model(cfg);
  auto params = model.parameters();
  const auto count = get<std::uint64_t>(in, path);
  if (count != params.size()) throw Error(ErrorCode::ParseError, path.string() + ": tensor count mismatch");
  for (Parameter* p : params) {
    const auto name = get_string(in, get<std::uint32_t>(in, path), path);
    const auto rows = get<std::uint64_t>(in, path);
    const auto cols = get<std::uint64_t>(in, path);
    if (name != p->name || rows != p->value.rows() || cols != p->value.cols()) {
      throw Error(ErrorCode::ParseError, path.string() + ": unexpected tensor '" + name + "'");
    }
    if (!in.read(reinterpret_cast<char*>(p->value.data()),
                 static_cast<std::streamsize>(p->value.size() * sizeof(double)))) {
      throw Error(ErrorCode::ParseError, path.string() + ": truncated tensor '" + name + "'");
    }
  }
  return model;
}

}  // namespace gap

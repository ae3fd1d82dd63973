// SPDX-FileCopyrightText: 2026 sage contributors
// SPDX-License-Identifier: Apache-2.0
#include <sage/error.hpp>
#include <sage/io.hpp>

#include <json.hpp>

#include <cstring>
#include <fstream>

namespace sage::io {

namespace {
constexpr char kAlphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

int decode_char(char c) {
  if (c >= 'A' && c <= 'Z') return c - 'A';
  if (c >= 'a' && c <= 'z') return c - 'a' + 26;
  if (c >= '0' && c <= '9') return c - '0' + 52;
  if (c == '+') return 62;
  if (c == '/') return 63;
  return -1;
}
}  // namespace

std::string base64_encode(const std::uint8_t* data, std::size_t len) {
  std::string out;
  out.reserve((len + 2) / 3 * 4);
  for (std::size_t i = 0; i < len; i += 3) {
    std::uint32_t n = data[i] << 16;
    if (i + 1 < len) n |= data[i + 1] << 8;
    if (i + 2 < len) n |= data[i + 2];
    out.push_back(kAlphabet[(n >> 18) & 63]);
    out.push_back(kAlphabet[(n >> 12) & 63]);
    out.push_back(i + 1 < len ? kAlphabet[(n >> 6) & 63] : '=');
    out.push_back(i + 2 < len ? kAlphabet[n & 63] : '=');
  }
  return out;
}

std::vector<std::uint8_t> base64_decode(const std::string& text) {
  std::vector<std::uint8_t> out;
  out.reserve(text.size() / 4 * 3);
  int acc = 0, bits = 0;
  for (char c : text) {
    if (c == '=' || c == '\n' || c == '\r') continue;
    const int v = decode_char(c);
    if (v < 0) throw ConfigError("invalid base64 character");
    acc = (acc << 6) | v;
    bits += 6;
    if (bits >= 8) {
      bits -= 8;
      out.push_back(static_cast<std::uint8_t>((acc >> bits) & 0xff));
    }
  }
  return out;
}

void GridFile::add(const std::string& name, const GridF& g) {
  Layer l;
  l.name = name;
  l.dtype = "f64";
  l.bytes.resize(sizeof(double) * g.width() * g.height());
  std::memcpy(l.bytes.data(), g.array().data(), l.bytes.size());
  layers.push_back(std::move(l));
}

void GridFile::add(const std::string& name, const GridU8& g) {
  Layer l;
  l.name = name;
  l.dtype = "u8";
  l.bytes.assign(g.array().data(), g.array().data() + g.width() * g.height());
  layers.push_back(std::move(l));
}

const GridFile::Layer& GridFile::find(const std::string& name) const {
  for (const auto& l : layers)
    if (l.name == name) return l;
  throw ConfigError("grid file layer not found: " + name);
}

GridF GridFile::grid_f64(const std::string& name) const {
  const Layer& l = find(name);
  if (l.dtype != "f64" || l.bytes.size() != sizeof(double) * width * height)
    throw ConfigError("grid file layer dtype/size mismatch: " + name);
  GridF g(origin, resolution, width, height);
  std::memcpy(g.array().data(), l.bytes.data(), l.bytes.size());
  return g;
}

GridU8 GridFile::grid_u8(const std::string& name) const {
  const Layer& l = find(name);
  if (l.dtype != "u8" || l.bytes.size() != static_cast<std::size_t>(width) * height)
    throw ConfigError("grid file layer dtype/size mismatch: " + name);
  GridU8 g(origin, resolution, width, height);
  std::memcpy(g.array().data(), l.bytes.data(), l.bytes.size());
  return g;
}

void write_grid_file(const std::string& path, const GridFile& gf) {
  nlohmann::json header;
  header["schema_version"] = 1;
  header["origin"] = {gf.origin.x(), gf.origin.y()};
  header["resolution"] = gf.resolution;
  header["width"] = gf.width;
  header["height"] = gf.height;
  header["stamp"] = gf.stamp;
  nlohmann::json dir = nlohmann::json::array();
  for (const auto& l : gf.layers) dir.push_back({{"name", l.name}, {"dtype", l.dtype}});
  header["layers"] = dir;

  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open for writing: " + path);
  out << header.dump() << "\n";
  for (const auto& l : gf.layers) out << base64_encode(l.bytes.data(), l.bytes.size()) << "\n";
}

GridFile read_grid_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open grid file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("empty grid file: " + path);
  GridFile gf;
  try {
    const nlohmann::json header = nlohmann::json::parse(line);
    gf.origin = {header.at("origin")[0].get<double>(), header.at("origin")[1].get<double>()};
    gf.resolution = header.at("resolution").get<double>();
    gf.width = header.at("width").get<int>();
    gf.height = header.at("height").get<int>();
    gf.stamp = header.value("stamp", 0.0);
    for (const auto& entry : header.at("layers")) {
      if (!std::getline(in, line)) throw ConfigError("missing layer data in " + path);
      GridFile::Layer l;
      l.name = entry.at("name").get<std::string>();
      l.dtype = entry.at("dtype").get<std::string>();
      l.bytes = base64_decode(line);
      gf.layers.push_back(std::move(l));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("bad grid file header in " + path + ": " + e.what());
  }
  return gf;
}

void write_grid_csv(const std::string& path, const GridF& g) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open for writing: " + path);
  char buf[32];
  for (int iy = 0; iy < g.height(); ++iy) {
    for (int ix = 0; ix < g.width(); ++ix) {
      std::snprintf(buf, sizeof(buf), "%.17g", g(ix, iy));
      out << buf << (ix + 1 == g.width() ? '\n' : ',');
    }
  }
}

}  // namespace sage::io

// SPDX-FileCopyrightText: 2026 sage contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <sage/grid.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace sage::io {

std::string base64_encode(const std::uint8_t* data, std::size_t len);
std::vector<std::uint8_t> base64_decode(const std::string& text);

/// Portable grid file: one JSON header line (origin, resolution, dims, stamp,
/// layer directory), then one base64 line per layer holding the row-major
/// little-endian cell array.
struct GridFile {
  Eigen::Vector2d origin{0, 0};
  double resolution{1.0};
  int width{0};
  int height{0};
  double stamp{0.0};

  struct Layer {
    std::string name;
    std::string dtype;  // "f64" | "u8"
    std::vector<std::uint8_t> bytes;
  };
  std::vector<Layer> layers;

  void add(const std::string& name, const GridF& g);
  void add(const std::string& name, const GridU8& g);
  const Layer& find(const std::string& name) const;
  GridF grid_f64(const std::string& name) const;
  GridU8 grid_u8(const std::string& name) const;
};

void write_grid_file(const std::string& path, const GridFile& gf);
GridFile read_grid_file(const std::string& path);

/// Row-major CSV dump of one scalar layer, for debugging.
void write_grid_csv(const std::string& path, const GridF& g);

}  // namespace sage::io

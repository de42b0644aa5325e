// Copyright 2026 The catreverse Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Binary initial images (PBM in) and rendered densities (PGM out).
//
// An N x N image occupies the central phase-space cell -1/2 <= y < 1/2:
// column c is x index i = c and the top row carries the largest y.

#ifndef CATREVERSE_IMAGE_IO_HPP
#define CATREVERSE_IMAGE_IO_HPP

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "lattice.hpp"

namespace catrev {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, size_t offset)
      : std::runtime_error(what + " (at byte " + std::to_string(offset) + ")"), offset_(offset) {}
  size_t offset() const noexcept { return offset_; }

 private:
  size_t offset_;
};

class BinaryImage {
 public:
  // Square, power-of-two side. Throws std::domain_error otherwise.
  explicit BinaryImage(uint64_t side);

  uint64_t width() const noexcept { return side_; }
  uint64_t height() const noexcept { return side_; }
  bool get(uint64_t row, uint64_t col) const { return bits_.at(row * side_ + col) != 0; }
  void set(uint64_t row, uint64_t col, bool v = true) { bits_.at(row * side_ + col) = v ? 1 : 0; }
  uint64_t popcount() const noexcept;

  friend bool operator==(const BinaryImage&, const BinaryImage&) = default;

 private:
  uint64_t side_;
  std::vector<uint8_t> bits_;
};

// P1 (ASCII) or P4 (packed) portable bitmap; '#' comments allowed in the
// header. Throws ParseError with the offending byte offset.
BinaryImage load_portable_bitmap(std::string_view bytes);
std::string write_portable_bitmap(const BinaryImage& img, bool binary);

// Deterministic horned silhouette. Requires N >= 16 and a power of two.
BinaryImage generate_demon_image(uint64_t N);

std::vector<LatticePoint> image_to_points(const BinaryImage& img, const PhaseSpaceConfig& cfg);
// Inverse of image_to_points; every point must lie in the central cell.
BinaryImage points_to_image(std::span<const LatticePoint> points, const PhaseSpaceConfig& cfg);

// Half-open range of lattice cells [i0, i1) x [j0, j1).
struct CellRegion {
  uint64_t i0 = 0, i1 = 0, j0 = 0, j1 = 0;
};

CellRegion central_cell(const PhaseSpaceConfig& cfg);
CellRegion central_two_cells(const PhaseSpaceConfig& cfg);
CellRegion whole_phase_space(const PhaseSpaceConfig& cfg);

struct DensityImage {
  uint64_t width = 0;
  uint64_t height = 0;
  std::vector<uint8_t> levels;  // row-major, top row first
  double max_density = 0.0;     // probability mapped to 255
};

// Gray level round(255 * (p / max)^(1/gamma)); rows run from the largest j
// down. Throws std::domain_error for an empty or out-of-range region.
DensityImage density_to_image(std::span<const double> pxy, const PhaseSpaceConfig& cfg,
                              const CellRegion& region, double gamma = 1.0);

std::string write_portable_graymap(const DensityImage& img, bool binary);

// Probability mass on the initially occupied pixels.
double recovery_overlap(const BinaryImage& initial, std::span<const double> pxy,
                        const PhaseSpaceConfig& cfg);

}  // namespace catrev

#endif  // CATREVERSE_IMAGE_IO_HPP

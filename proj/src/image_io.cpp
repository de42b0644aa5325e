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

#include "image_io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>

namespace catrev {

BinaryImage::BinaryImage(uint64_t side) : side_(side) {
  if (side == 0 || !std::has_single_bit(side)) {
    throw std::domain_error("image side must be a power of two, got " + std::to_string(side));
  }
  bits_.assign(side * side, 0);
}

uint64_t BinaryImage::popcount() const noexcept {
  return static_cast<uint64_t>(std::count(bits_.begin(), bits_.end(), uint8_t{1}));
}

namespace {

class Cursor {
 public:
  explicit Cursor(std::string_view s) : s_(s) {}

  size_t pos() const noexcept { return pos_; }
  bool done() const noexcept { return pos_ >= s_.size(); }
  char peek() const { return s_[pos_]; }
  char take() { return s_[pos_++]; }

  // Whitespace and '#' comments, as allowed between header tokens.
  void skip_header_space() {
    while (!done()) {
      const char c = peek();
      if (c == '#') {
        while (!done() && peek() != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        return;
      }
    }
  }

  uint64_t number(const char* what) {
    skip_header_space();
    const size_t start = pos_;
    uint64_t v = 0;
    while (!done() && std::isdigit(static_cast<unsigned char>(peek()))) {
      v = v * 10 + static_cast<uint64_t>(take() - '0');
      if (v > (uint64_t{1} << 20)) throw ParseError(std::string(what) + " too large", start);
    }
    if (pos_ == start) throw ParseError(std::string("expected ") + what, start);
    return v;
  }

 private:
  std::string_view s_;
  size_t pos_ = 0;
};

}  // namespace

BinaryImage load_portable_bitmap(std::string_view bytes) {
  Cursor in(bytes);
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '1' && bytes[1] != '4')) {
    throw ParseError("not a P1/P4 portable bitmap", 0);
  }
  const bool packed = bytes[1] == '4';
  in.take();
  in.take();
  const size_t dims_at = in.pos();
  const uint64_t w = in.number("width");
  const uint64_t h = in.number("height");
  if (w != h) {
    throw ParseError("image must be square, got " + std::to_string(w) + "x" + std::to_string(h),
                     dims_at);
  }
  if (w == 0 || !std::has_single_bit(w)) {
    throw ParseError("image side must be a power of two, got " + std::to_string(w), dims_at);
  }
  BinaryImage img(w);
  if (packed) {
    if (in.done() || !std::isspace(static_cast<unsigned char>(in.peek()))) {
      throw ParseError("expected a single whitespace byte before raster", in.pos());
    }
    in.take();
    const uint64_t row_bytes = (w + 7) / 8;
    for (uint64_t r = 0; r < h; ++r) {
      for (uint64_t b = 0; b < row_bytes; ++b) {
        if (in.done()) throw ParseError("raster truncated", in.pos());
        const auto byte = static_cast<unsigned char>(in.take());
        for (uint64_t k = 0; k < 8 && 8 * b + k < w; ++k) {
          img.set(r, 8 * b + k, (byte >> (7 - k)) & 1u);
        }
      }
    }
  } else {
    for (uint64_t r = 0; r < h; ++r) {
      for (uint64_t c = 0; c < w; ++c) {
        in.skip_header_space();
        if (in.done()) throw ParseError("raster truncated", in.pos());
        const char ch = in.take();
        if (ch != '0' && ch != '1') {
          throw ParseError(std::string("unexpected raster character '") + ch + "'", in.pos() - 1);
        }
        img.set(r, c, ch == '1');
      }
    }
  }
  return img;
}

std::string write_portable_bitmap(const BinaryImage& img, bool binary) {
  const uint64_t w = img.width();
  std::string out = (binary ? "P4\n" : "P1\n") + std::to_string(w) + " " + std::to_string(w) + "\n";
  for (uint64_t r = 0; r < w; ++r) {
    if (binary) {
      for (uint64_t b = 0; b < (w + 7) / 8; ++b) {
        unsigned byte = 0;
        for (uint64_t k = 0; k < 8 && 8 * b + k < w; ++k) {
          if (img.get(r, 8 * b + k)) byte |= 0x80u >> k;
        }
        out += static_cast<char>(byte);
      }
    } else {
      for (uint64_t c = 0; c < w; ++c) {
        out += img.get(r, c) ? '1' : '0';
        out += c + 1 < w ? ' ' : '\n';
      }
    }
  }
  return out;
}

namespace {

struct Vec2 {
  double u, v;
};

double cross(Vec2 o, Vec2 a, Vec2 b) { return (a.u - o.u) * (b.v - o.v) - (a.v - o.v) * (b.u - o.u); }

bool in_triangle(Vec2 p, Vec2 a, Vec2 b, Vec2 c) {
  const double d1 = cross(a, b, p);
  const double d2 = cross(b, c, p);
  const double d3 = cross(c, a, p);
  const bool neg = d1 < 0 || d2 < 0 || d3 < 0;
  const bool pos = d1 > 0 || d2 > 0 || d3 > 0;
  return !(neg && pos);
}

bool in_ellipse(Vec2 p, Vec2 c, double ru, double rv) {
  const double du = (p.u - c.u) / ru;
  const double dv = (p.v - c.v) / rv;
  return du * du + dv * dv <= 1.0;
}

// Unit square, v pointing down. Only +, -, *, / and comparisons are used so
// the raster is identical on every IEEE-754 platform.
bool demon_covers(Vec2 p) {
  const bool eye = in_ellipse(p, {0.42, 0.40}, 0.04, 0.03) || in_ellipse(p, {0.58, 0.40}, 0.04, 0.03);
  const bool mouth = in_triangle(p, {0.42, 0.49}, {0.58, 0.49}, {0.50, 0.54});
  const bool head = in_ellipse(p, {0.50, 0.43}, 0.19, 0.16) && !eye && !mouth;
  const bool horns = in_triangle(p, {0.33, 0.36}, {0.43, 0.29}, {0.20, 0.07}) ||
                     in_triangle(p, {0.67, 0.36}, {0.57, 0.29}, {0.80, 0.07});
  const bool body = p.v >= 0.58 && p.v <= 0.90 && std::abs(p.u - 0.5) <= 0.09 + 0.25 * (p.v - 0.58);
  const bool tail = in_triangle(p, {0.62, 0.84}, {0.64, 0.88}, {0.86, 0.70}) ||
                    in_triangle(p, {0.82, 0.66}, {0.92, 0.64}, {0.88, 0.76});
  return head || horns || body || tail;
}

}  // namespace

BinaryImage generate_demon_image(uint64_t N) {
  if (N < 16) throw std::domain_error("demon image needs N >= 16, got " + std::to_string(N));
  BinaryImage img(N);
  const double n = static_cast<double>(N);
  for (uint64_t r = 0; r < N; ++r) {
    for (uint64_t c = 0; c < N; ++c) {
      const Vec2 p{(static_cast<double>(c) + 0.5) / n, (static_cast<double>(r) + 0.5) / n};
      if (demon_covers(p)) img.set(r, c);
    }
  }
  return img;
}

namespace {

void check_image_fits(const BinaryImage& img, const PhaseSpaceConfig& cfg) {
  if (img.width() != cfg.N()) {
    throw std::domain_error("image side " + std::to_string(img.width()) + " does not match N=" +
                            std::to_string(cfg.N()));
  }
}

uint64_t central_row_base(const PhaseSpaceConfig& cfg) { return cfg.LN() / 2 - cfg.N() / 2; }

}  // namespace

std::vector<LatticePoint> image_to_points(const BinaryImage& img, const PhaseSpaceConfig& cfg) {
  check_image_fits(img, cfg);
  const uint64_t N = cfg.N();
  const uint64_t base = central_row_base(cfg);
  std::vector<LatticePoint> pts;
  for (uint64_t r = 0; r < N; ++r) {
    for (uint64_t c = 0; c < N; ++c) {
      if (img.get(r, c)) pts.push_back({c, base + (N - 1 - r)});
    }
  }
  return pts;
}

BinaryImage points_to_image(std::span<const LatticePoint> points, const PhaseSpaceConfig& cfg) {
  const uint64_t N = cfg.N();
  const uint64_t base = central_row_base(cfg);
  BinaryImage img(N);
  for (const auto& p : points) {
    check_point(p, cfg);
    if (p.j < base || p.j >= base + N) throw std::domain_error("point outside the central cell");
    img.set(N - 1 - (p.j - base), p.i);
  }
  return img;
}

CellRegion central_cell(const PhaseSpaceConfig& cfg) {
  const uint64_t base = central_row_base(cfg);
  return {0, cfg.N(), base, base + cfg.N()};
}

CellRegion central_two_cells(const PhaseSpaceConfig& cfg) {
  return {0, cfg.N(), cfg.LN() / 2 - cfg.N(), cfg.LN() / 2 + cfg.N()};
}

CellRegion whole_phase_space(const PhaseSpaceConfig& cfg) { return {0, cfg.N(), 0, cfg.LN()}; }

DensityImage density_to_image(std::span<const double> pxy, const PhaseSpaceConfig& cfg,
                              const CellRegion& region, double gamma) {
  if (pxy.size() != cfg.point_count()) throw std::domain_error("density table has wrong size");
  if (region.i0 >= region.i1 || region.j0 >= region.j1) throw std::domain_error("empty region");
  if (region.i1 > cfg.N() || region.j1 > cfg.LN()) throw std::domain_error("region out of range");
  if (!(gamma > 0.0)) throw std::domain_error("gamma must be > 0");
  DensityImage img;
  img.width = region.i1 - region.i0;
  img.height = region.j1 - region.j0;
  img.levels.assign(img.width * img.height, 0);
  const uint64_t N = cfg.N();
  for (uint64_t j = region.j0; j < region.j1; ++j) {
    for (uint64_t i = region.i0; i < region.i1; ++i) {
      img.max_density = std::max(img.max_density, pxy[i + N * j]);
    }
  }
  if (img.max_density <= 0.0) return img;
  for (uint64_t row = 0; row < img.height; ++row) {
    const uint64_t j = region.j1 - 1 - row;
    for (uint64_t col = 0; col < img.width; ++col) {
      double v = pxy[region.i0 + col + N * j] / img.max_density;
      if (gamma != 1.0) v = std::pow(v, 1.0 / gamma);
      img.levels[row * img.width + col] = static_cast<uint8_t>(std::lround(255.0 * std::clamp(v, 0.0, 1.0)));
    }
  }
  return img;
}

std::string write_portable_graymap(const DensityImage& img, bool binary) {
  std::string out = (binary ? "P5\n" : "P2\n") + std::to_string(img.width) + " " +
                    std::to_string(img.height) + "\n255\n";
  for (uint64_t row = 0; row < img.height; ++row) {
    for (uint64_t col = 0; col < img.width; ++col) {
      const uint8_t v = img.levels[row * img.width + col];
      if (binary) {
        out += static_cast<char>(v);
      } else {
        out += std::to_string(v);
        out += col + 1 < img.width ? ' ' : '\n';
      }
    }
  }
  return out;
}

double recovery_overlap(const BinaryImage& initial, std::span<const double> pxy,
                        const PhaseSpaceConfig& cfg) {
  check_image_fits(initial, cfg);
  if (pxy.size() != cfg.point_count()) throw std::domain_error("density table has wrong size");
  double mass = 0.0;
  for (const auto& p : image_to_points(initial, cfg)) mass += pxy[flat_index(p, cfg)];
  return mass;
}

}  // namespace catrev

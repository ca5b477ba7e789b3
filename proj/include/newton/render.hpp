#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "newton/complex.hpp"
#include "newton/dynamics.hpp"
#include "newton/functions.hpp"

namespace newton::render {

struct SceneConfig {
  functions::catalog::MapSpec map;
  Complex center{};
  double width = 4.0;
  int px_w = 256;
  int px_h = 256;
  dynamics::IterationConfig iter{.max_iter = 200};
  std::uint32_t palette_seed = 0;
};

enum class PixelClass : std::uint8_t {
  Root = 0,
  EscapedFToZero,
  EscapedOther,
  Pole,
  Cycle,
  Undetermined,
};

struct BasinImage {
  int w = 0, h = 0;
  std::vector<PixelClass> outcome;     // w*h
  std::vector<std::int32_t> root_index;  // w*h, -1 when not a root pixel
  std::vector<std::uint16_t> iterations;
  std::vector<std::uint8_t> rgb;       // w*h*3, row-major, top row first
  std::vector<Complex> roots;          // sorted by (Re, Im)
};

// Deterministic tile-parallel rasterization of per-pixel orbit outcomes.
// Pixel (i, j) maps to center + ((i+0.5)/w - 0.5)*width horizontally and
// (0.5 - (j+0.5)/h)*width*h/w vertically; every pixel depends only on its
// own orbit, so the output is bit-identical for any worker count.
BasinImage render(const SceneConfig& scene, int workers);

// Binary PPM: "P6\n<w> <h>\n255\n" + w*h*3 bytes.
void write_ppm(const BasinImage& img, std::ostream& out);
void write_ppm(const BasinImage& img, const std::string& path);

std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes);

}  // namespace newton::render

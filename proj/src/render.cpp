#include "newton/render.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <thread>

namespace newton::render {

namespace {

constexpr int kTile = 64;

struct Hsv {
  double h, s, v;
};

std::array<std::uint8_t, 3> hsv_to_rgb(Hsv c) {
  double h = c.h - std::floor(c.h);
  double i = std::floor(h * 6.0);
  double f = h * 6.0 - i;
  double p = c.v * (1.0 - c.s);
  double q = c.v * (1.0 - c.s * f);
  double t = c.v * (1.0 - c.s * (1.0 - f));
  double r, g, b;
  switch (static_cast<int>(i) % 6) {
    case 0: r = c.v; g = t; b = p; break;
    case 1: r = q; g = c.v; b = p; break;
    case 2: r = p; g = c.v; b = t; break;
    case 3: r = p; g = q; b = c.v; break;
    case 4: r = t; g = p; b = c.v; break;
    default: r = c.v; g = p; b = q; break;
  }
  auto to_byte = [](double x) {
    return static_cast<std::uint8_t>(std::clamp(std::lround(255.0 * x), 0L, 255L));
  };
  return {to_byte(r), to_byte(g), to_byte(b)};
}

// value dimmed by log(1+iterations); pure in (iters, seed, index)
double brightness(std::uint16_t iters) {
  return 1.0 - std::min(0.65, 0.10 * std::log1p(static_cast<double>(iters)));
}

std::array<std::uint8_t, 3> color_pixel(PixelClass cls, std::int32_t root_idx,
                                        std::uint16_t iters, std::uint32_t seed) {
  double v = brightness(iters);
  switch (cls) {
    case PixelClass::Root: {
      double hue = 0.12 + 0.38196601125010515 * static_cast<double>(root_idx + 1) +
                   static_cast<double>(seed) * 2.3283064365386963e-10;
      return hsv_to_rgb({hue, 0.85, v});
    }
    case PixelClass::EscapedFToZero:
      return hsv_to_rgb({0.55, 0.55, v});
    case PixelClass::EscapedOther:
      return hsv_to_rgb({0.0, 0.0, 0.55 * v + 0.2});
    case PixelClass::Pole:
      return hsv_to_rgb({0.02, 0.85, 0.55});
    case PixelClass::Cycle:
      return hsv_to_rgb({0.09, 0.9, v});
    case PixelClass::Undetermined:
    default:
      return {0, 0, 0};
  }
}

}  // namespace

BasinImage render(const SceneConfig& scene, int workers) {
  if (scene.px_w < 1 || scene.px_h < 1 || scene.px_w > 8192 || scene.px_h > 8192) {
    throw std::invalid_argument("pixel dimensions must lie in [1, 8192]");
  }
  if (!(scene.width > 0.0)) throw std::invalid_argument("viewport width must be positive");
  workers = std::clamp(workers, 1, 256);

  functions::NewtonMap map = functions::catalog::newton_map(scene.map);
  if (!map.function()) {
    throw std::invalid_argument("map has no associated function to classify against");
  }
  const functions::EntireFunction f = *map.function();

  const int W = scene.px_w, H = scene.px_h;
  const double height = scene.width * static_cast<double>(H) / static_cast<double>(W);

  BasinImage img;
  img.w = W;
  img.h = H;
  img.outcome.assign(static_cast<std::size_t>(W) * H, PixelClass::Undetermined);
  img.root_index.assign(static_cast<std::size_t>(W) * H, -1);
  img.iterations.assign(static_cast<std::size_t>(W) * H, 0);
  img.rgb.assign(static_cast<std::size_t>(W) * H * 3, 0);
  std::vector<Complex> pixel_root(static_cast<std::size_t>(W) * H);

  const int tiles_x = (W + kTile - 1) / kTile;
  const int tiles_y = (H + kTile - 1) / kTile;
  const int n_tiles = tiles_x * tiles_y;
  std::atomic<int> next_tile{0};

  auto worker = [&]() {
    for (;;) {
      int t = next_tile.fetch_add(1);
      if (t >= n_tiles) return;
      int tx = t % tiles_x, ty = t / tiles_x;
      int x1 = std::min(W, (tx + 1) * kTile);
      int y1 = std::min(H, (ty + 1) * kTile);
      for (int j = ty * kTile; j < y1; ++j) {
        for (int i = tx * kTile; i < x1; ++i) {
          Complex z0(scene.center.real() +
                         ((i + 0.5) / static_cast<double>(W) - 0.5) * scene.width,
                     scene.center.imag() +
                         (0.5 - (j + 0.5) / static_cast<double>(H)) * height);
          dynamics::OrbitRecord rec = dynamics::iterate_orbit(map, z0, scene.iter);
          dynamics::OrbitOutcome o = dynamics::classify_orbit(rec, f, scene.iter);
          std::size_t idx = static_cast<std::size_t>(j) * W + i;
          img.iterations[idx] = static_cast<std::uint16_t>(
              std::min<std::size_t>(rec.points.size() - 1, 65535));
          switch (o.kind) {
            case dynamics::OrbitOutcome::Kind::ConvergedToRoot:
              img.outcome[idx] = PixelClass::Root;
              pixel_root[idx] = o.xi;
              break;
            case dynamics::OrbitOutcome::Kind::EscapedFToZero:
              img.outcome[idx] = PixelClass::EscapedFToZero;
              break;
            case dynamics::OrbitOutcome::Kind::EscapedOther:
              img.outcome[idx] = PixelClass::EscapedOther;
              break;
            case dynamics::OrbitOutcome::Kind::PoleHit:
              img.outcome[idx] = PixelClass::Pole;
              break;
            case dynamics::OrbitOutcome::Kind::CycleDetected:
              img.outcome[idx] = PixelClass::Cycle;
              break;
            case dynamics::OrbitOutcome::Kind::Undetermined:
              img.outcome[idx] = PixelClass::Undetermined;
              break;
          }
        }
      }
    }
  };

  {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int k = 0; k < workers; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  // Root indices by sorted discovery: cluster representatives are collected
  // in pixel order (schedule-independent), then sorted by (Re, Im).
  const double cluster = 1e-6;
  std::vector<Complex> reps;
  for (std::size_t idx = 0; idx < img.outcome.size(); ++idx) {
    if (img.outcome[idx] != PixelClass::Root) continue;
    bool known = false;
    for (const Complex& r : reps) {
      if (std::abs(r - pixel_root[idx]) <= cluster) {
        known = true;
        break;
      }
    }
    if (!known) reps.push_back(pixel_root[idx]);
  }
  std::sort(reps.begin(), reps.end(), [](Complex a, Complex b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  img.roots = reps;
  for (std::size_t idx = 0; idx < img.outcome.size(); ++idx) {
    if (img.outcome[idx] != PixelClass::Root) continue;
    std::int32_t best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < reps.size(); ++r) {
      double d = std::abs(reps[r] - pixel_root[idx]);
      if (d < best_d) {
        best_d = d;
        best = static_cast<std::int32_t>(r);
      }
    }
    img.root_index[idx] = best;
  }

  for (std::size_t idx = 0; idx < img.outcome.size(); ++idx) {
    auto rgb = color_pixel(img.outcome[idx], img.root_index[idx], img.iterations[idx],
                           scene.palette_seed);
    img.rgb[3 * idx + 0] = rgb[0];
    img.rgb[3 * idx + 1] = rgb[1];
    img.rgb[3 * idx + 2] = rgb[2];
  }
  return img;
}

void write_ppm(const BasinImage& img, std::ostream& out) {
  out << "P6\n" << img.w << " " << img.h << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.rgb.data()),
            static_cast<std::streamsize>(img.rgb.size()));
  if (!out) throw std::runtime_error("PPM write failed");
}

void write_ppm(const BasinImage& img, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_ppm(img, out);
}

std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (std::uint8_t b : bytes) {
    h ^= b;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace newton::render

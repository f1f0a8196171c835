#pragma once

// Procedural handwritten-digit lookalikes in MNIST geometry (28x28, ink on
// black). Each class is a fixed stroke skeleton; samples jitter the control
// points and apply a random similarity transform plus pixel noise, so the
// classes overlap enough to make the classification task non-trivial while
// keeping generation fully deterministic per seed.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "difl/image.hpp"

namespace synth {

struct Vec2 {
  double x, y;
};
using Stroke = std::vector<Vec2>;
using Glyph = std::vector<Stroke>;

namespace detail {

inline Stroke ellipse(double cx, double cy, double rx, double ry, int segments = 14) {
  Stroke s;
  for (int i = 0; i <= segments; ++i) {
    const double a = 2.0 * M_PI * i / segments;
    s.push_back({cx + rx * std::sin(a), cy - ry * std::cos(a)});
  }
  return s;
}

inline const std::vector<Glyph>& glyphs() {
  static const std::vector<Glyph> g = [] {
    std::vector<Glyph> v(10);
    v[0] = {ellipse(0.5, 0.5, 0.22, 0.32)};
    v[1] = {{{0.40, 0.28}, {0.52, 0.14}, {0.52, 0.86}}};
    v[2] = {{{0.30, 0.30},
             {0.34, 0.17},
             {0.50, 0.12},
             {0.66, 0.18},
             {0.70, 0.32},
             {0.30, 0.82},
             {0.72, 0.82}}};
    v[3] = {{{0.32, 0.18},
             {0.50, 0.12},
             {0.66, 0.20},
             {0.66, 0.38},
             {0.50, 0.47},
             {0.68, 0.56},
             {0.68, 0.74},
             {0.50, 0.86},
             {0.32, 0.78}}};
    v[4] = {{{0.60, 0.12}, {0.30, 0.58}, {0.74, 0.58}}, {{0.60, 0.30}, {0.60, 0.88}}};
    v[5] = {{{0.68, 0.14},
             {0.34, 0.14},
             {0.32, 0.45},
             {0.55, 0.42},
             {0.68, 0.52},
             {0.68, 0.68},
             {0.55, 0.84},
             {0.33, 0.80}}};
    v[6] = {{{0.62, 0.12},
             {0.42, 0.30},
             {0.33, 0.52},
             {0.33, 0.70},
             {0.45, 0.85},
             {0.60, 0.80},
             {0.66, 0.65},
             {0.55, 0.52},
             {0.40, 0.56},
             {0.33, 0.70}}};
    v[7] = {{{0.30, 0.15}, {0.70, 0.15}, {0.44, 0.85}}};
    v[8] = {ellipse(0.5, 0.30, 0.16, 0.16, 12), ellipse(0.5, 0.66, 0.19, 0.20, 12)};
    v[9] = {ellipse(0.5, 0.32, 0.17, 0.18, 12), {{0.67, 0.36}, {0.62, 0.60}, {0.52, 0.85}}};
    return v;
  }();
  return g;
}

inline double segment_distance(double px, double py, const Vec2& a, const Vec2& b) {
  const double dx = b.x - a.x, dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  double t = len2 > 0.0 ? ((px - a.x) * dx + (py - a.y) * dy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const double ex = px - (a.x + t * dx), ey = py - (a.y + t * dy);
  return std::sqrt(ex * ex + ey * ey);
}

}  // namespace detail

struct SynthParams {
  double jitter_px = 0.8;   // per control point, Gaussian
  double rot_deg = 10.0;    // uniform +-
  double scale_lo = 0.90;
  double scale_hi = 1.10;
  double shift_px = 2.5;    // uniform +- per axis
  double width_lo = 1.00;   // stroke Gaussian radius in px
  double width_hi = 1.35;
  double ink_lo = 0.80;     // stroke brightness factor
  double ink_hi = 1.00;
  double noise_std = 8.0;   // additive pixel noise
};

/// per_class samples of every digit 0..9, interleaved so any prefix stays
/// class-balanced. One RNG drives everything, so (per_class, seed, params)
/// fully determine the output.
inline difl::LabeledImageSet synth_digits(std::size_t per_class, std::uint64_t seed,
                                          const SynthParams& params = {}) {
  const int side = 28;
  difl::LabeledImageSet set;
  set.images = difl::ImageStack(side, side, per_class * 10);
  set.labels.resize(per_class * 10);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::size_t index = 0;
  for (std::size_t s = 0; s < per_class; ++s) {
    for (int cls = 0; cls < 10; ++cls, ++index) {
      const double angle = (2.0 * unit(rng) - 1.0) * params.rot_deg * M_PI / 180.0;
      const double scale = params.scale_lo + (params.scale_hi - params.scale_lo) * unit(rng);
      const double ca = std::cos(angle) * scale, sa = std::sin(angle) * scale;
      const double shift_x = (2.0 * unit(rng) - 1.0) * params.shift_px;
      const double shift_y = (2.0 * unit(rng) - 1.0) * params.shift_px;
      const double width = params.width_lo + (params.width_hi - params.width_lo) * unit(rng);
      const double ink = 255.0 * (params.ink_lo + (params.ink_hi - params.ink_lo) * unit(rng));

      // unit-box skeleton -> jittered pixel-space strokes
      std::vector<Stroke> strokes;
      for (const Stroke& stroke : detail::glyphs()[static_cast<std::size_t>(cls)]) {
        Stroke mapped;
        mapped.reserve(stroke.size());
        for (const Vec2& p : stroke) {
          const double ux = p.x - 0.5, uy = p.y - 0.5;
          mapped.push_back({14.0 + 22.0 * (ca * ux - sa * uy) + shift_x + params.jitter_px * gauss(rng),
                            14.0 + 22.0 * (sa * ux + ca * uy) + shift_y + params.jitter_px * gauss(rng)});
        }
        strokes.push_back(std::move(mapped));
      }

      const double inv2w2 = 1.0 / (2.0 * width * width);
      for (int r = 0; r < side; ++r) {
        for (int c = 0; c < side; ++c) {
          double d2min = 1e18;
          for (const Stroke& stroke : strokes)
            for (std::size_t k = 0; k + 1 < stroke.size(); ++k) {
              const double d = detail::segment_distance(c, r, stroke[k], stroke[k + 1]);
              d2min = std::min(d2min, d * d);
            }
          double value = ink * std::exp(-d2min * inv2w2);
          if (params.noise_std > 0.0) value += params.noise_std * gauss(rng);
          set.images.at(index, r, c) = std::clamp(value, 0.0, 255.0);
        }
      }
      set.labels[index] = cls;
    }
  }
  return set;
}

}  // namespace synth

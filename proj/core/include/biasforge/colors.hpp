#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace biasforge {

struct Rgb {
  int r = 0;
  int g = 0;
  int b = 0;

  friend bool operator==(const Rgb&, const Rgb&) = default;
};

struct NamedColor {
  std::string_view name;
  Rgb rgb;
};

/// All CSS named-color keywords in alphabetical order, including the
/// grey/gray spelling pairs and the aqua/cyan, fuchsia/magenta RGB twins.
const std::vector<NamedColor>& css_named_colors();

enum class AliasPolicy {
  kSpelling,  // drop the "grey" spellings; aqua/cyan and fuchsia/magenta stay
  kRgb,       // additionally drop later names whose RGB repeats an earlier one
};

struct ColorTableOptions {
  AliasPolicy aliases = AliasPolicy::kSpelling;
  /// 0 keeps the whole deduplicated table. Otherwise `limit` entries are
  /// picked at evenly spaced indices, preserving alphabetical order.
  std::size_t limit = 0;
};

std::vector<NamedColor> color_table(const ColorTableOptions& options = {});

struct Hsl {
  double h = 0.0;  // degrees [0, 360)
  double s = 0.0;  // [0, 1]
  double l = 0.0;  // [0, 1]
};

Hsl to_hsl(const Rgb& rgb);

/// Default color-family classifier over HSL.
///
///   l >= 0.90                      -> white
///   l <= 0.12                      -> black
///   s <  0.15                      -> gray (white/black checked first)
///   hue in red band, l < 0.42, s < 0.65 -> brown
///   hue in [15,45), l < 0.42        -> brown
///   hue in red band, l > 0.75       -> pink
///   otherwise by hue: red [345,15) orange [15,45) yellow [45,70)
///   green [70,160) cyan [160,200) blue [200,255) purple [255,290)
///   pink [290,345)
std::string categorize_color(const Rgb& rgb);

}  // namespace biasforge

#pragma once

#include "steklame/geometry.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace steklame {

// Boundary files:
//   {"type": "fourier", "order": P,
//    "coeffs": {"x_a0": .., "x_a": [P], "x_b": [P],
//               "y_a0": .., "y_a": [P], "y_b": [P]}}
//   {"type": "support", "order": P,
//    "coeffs": {"a0": .., "a": [P], "b": [P]}}
// Numbers are written with 17 significant digits so a write/read cycle is
// bit-exact. Unknown keys are rejected with ErrorKind::config.

std::string boundary_to_json(const Boundary& boundary);
Boundary boundary_from_json(std::string_view text);

Boundary load_boundary(const std::filesystem::path& path);
void save_boundary(const Boundary& boundary, const std::filesystem::path& path);

}  // namespace steklame

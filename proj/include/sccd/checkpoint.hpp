#pragma once

#include <string>
#include <utility>
#include <vector>

#include "sccd/tensor.hpp"

namespace sccd {

/// Flat binary parameter checkpoint: 8-byte magic "SCCDCKP1", entry count,
/// a shape table (name, rows, cols per entry), then row-major 64-bit floats
/// for every entry in table order.
void save_checkpoint(const std::string& path,
                     const std::vector<std::pair<std::string, TensorPtr>>& entries);

/// Loads all entries. Throws parse_error on a bad file.
std::vector<std::pair<std::string, TensorPtr>> load_checkpoint(
    const std::string& path);

/// Loads into existing tensors, matching by name and validating shapes.
void load_checkpoint_into(
    const std::string& path,
    const std::vector<std::pair<std::string, TensorPtr>>& entries);

}  // namespace sccd

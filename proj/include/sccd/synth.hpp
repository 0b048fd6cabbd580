#pragma once

#include <cstdint>

#include "sccd/graph.hpp"

namespace sccd {

/// Planted-partition generator: `blocks` communities of `block_size` nodes,
/// edge probability p_in within a block and p_out across blocks. Labels are
/// block ids; attributes are one-hot block indicators. Deterministic in seed.
DataGraph make_sbm(Index blocks, Index block_size, double p_in, double p_out,
                   std::uint64_t seed);

}  // namespace sccd

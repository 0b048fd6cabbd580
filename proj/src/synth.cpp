#include "sccd/synth.hpp"

#include "sccd/errors.hpp"
#include "sccd/rng.hpp"

namespace sccd {

DataGraph make_sbm(Index blocks, Index block_size, double p_in, double p_out,
                   std::uint64_t seed) {
  if (blocks < 1 || block_size < 1)
    throw config_error("sbm: blocks and block size must be positive");
  if (!(0.0 <= p_out && p_out < p_in && p_in <= 1.0))
    throw config_error("sbm: probabilities must satisfy 0 <= p_out < p_in <= 1");

  const Index n = blocks * block_size;
  Rng rng = named_stream(seed, "synth");
  std::vector<std::pair<Index, Index>> pairs;
  for (Index i = 0; i < n; ++i) {
    const Index bi = i / block_size;
    for (Index j = i + 1; j < n; ++j) {
      const double p = (bi == j / block_size) ? p_in : p_out;
      if (rng.bernoulli(p)) pairs.emplace_back(i, j);
    }
  }

  DataGraph g = build_graph(n, std::move(pairs));
  g.labels.resize(n);
  g.n_communities = blocks;
  g.n_attrs = blocks;
  g.attrs.assign(static_cast<std::size_t>(n) * blocks, 0.0);
  for (Index i = 0; i < n; ++i) {
    const int b = static_cast<int>(i / block_size);
    g.labels[i] = b;
    g.attrs[i * blocks + b] = 1.0;
  }
  return g;
}

}  // namespace sccd

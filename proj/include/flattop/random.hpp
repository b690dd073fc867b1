#pragma once

#include <cstdint>
#include <random>

namespace flattop {

//! Independent engine for replication `index` of stream `stream` under a
//! root seed. Streams never share state, so results do not depend on how
//! replications are spread over threads.
inline std::mt19937_64
make_engine(std::uint64_t root, std::uint64_t stream, std::uint64_t index)
{
  std::seed_seq seq{ static_cast<std::uint32_t>(root),
                     static_cast<std::uint32_t>(root >> 32),
                     static_cast<std::uint32_t>(stream),
                     static_cast<std::uint32_t>(stream >> 32),
                     static_cast<std::uint32_t>(index),
                     static_cast<std::uint32_t>(index >> 32) };
  return std::mt19937_64(seq);
}

} // namespace flattop

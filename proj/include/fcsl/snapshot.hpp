// Binary state snapshots: magic "FCSL", version, grid size, time, seed,
// step index, little-endian f64 payload, trailing CRC32.
#pragma once

#include <cstdint>
#include <string>

#include "fcsl/torus.hpp"

namespace fcsl {

struct Snapshot {
    std::uint16_t version = 1;
    std::uint32_t grid_n = 0;
    double time = 0.0;
    std::uint64_t seed = 0;
    std::uint64_t step_index = 0;
    std::vector<double> values;
};

std::uint32_t crc32(const unsigned char* data, std::size_t len);

std::vector<unsigned char> encode_snapshot(const Snapshot& s);
Snapshot decode_snapshot(const std::vector<unsigned char>& bytes);

void write_snapshot(const Snapshot& s, const std::string& path);
Snapshot read_snapshot(const std::string& path);

Snapshot make_snapshot(const Field& f, double time, std::uint64_t seed, std::uint64_t step_index);

} // namespace fcsl

#include "fcsl/snapshot.hpp"

#include <cstring>
#include <fstream>

namespace fcsl {

namespace {

const char kMagic[4] = {'F', 'C', 'S', 'L'};

// IEEE CRC32 (reflected, poly 0xEDB88320), table built on first use.
const std::uint32_t* crc_table() {
    static std::uint32_t table[256];
    static bool built = false;
    if (!built) {
        for (std::uint32_t i = 0; i < 256; ++i) {
            std::uint32_t c = i;
            for (int k = 0; k < 8; ++k) c = (c & 1u) ? (0xEDB88320u ^ (c >> 1)) : (c >> 1);
            table[i] = c;
        }
        built = true;
    }
    return table;
}

template <typename T>
void put(std::vector<unsigned char>& out, T v) {
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    out.insert(out.end(), b, b + sizeof(T));
}

template <typename T>
T take(const std::vector<unsigned char>& in, std::size_t& off) {
    if (off + sizeof(T) > in.size()) throw CorruptionError("snapshot: truncated file");
    T v;
    std::memcpy(&v, in.data() + off, sizeof(T));
    off += sizeof(T);
    return v;
}

} // namespace

std::uint32_t crc32(const unsigned char* data, std::size_t len) {
    const std::uint32_t* table = crc_table();
    std::uint32_t c = 0xFFFFFFFFu;
    for (std::size_t i = 0; i < len; ++i) c = table[(c ^ data[i]) & 0xFFu] ^ (c >> 8);
    return c ^ 0xFFFFFFFFu;
}

std::vector<unsigned char> encode_snapshot(const Snapshot& s) {
    std::vector<unsigned char> out;
    out.reserve(30 + 8 * s.values.size() + 4);
    out.insert(out.end(), kMagic, kMagic + 4);
    put(out, s.version);
    put(out, s.grid_n);
    put(out, s.time);
    put(out, s.seed);
    put(out, s.step_index);
    for (double v : s.values) put(out, v);
    put(out, crc32(out.data(), out.size()));
    return out;
}

Snapshot decode_snapshot(const std::vector<unsigned char>& bytes) {
    if (bytes.size() < 4 + 2 + 4 + 8 + 8 + 8 + 4) throw CorruptionError("snapshot: truncated file");
    if (std::memcmp(bytes.data(), kMagic, 4) != 0) throw CorruptionError("snapshot: bad magic");

    const std::uint32_t stored = [&] {
        std::uint32_t v;
        std::memcpy(&v, bytes.data() + bytes.size() - 4, 4);
        return v;
    }();
    if (crc32(bytes.data(), bytes.size() - 4) != stored)
        throw CorruptionError("snapshot: CRC mismatch");

    std::size_t off = 4;
    Snapshot s;
    s.version = take<std::uint16_t>(bytes, off);
    if (s.version != 1) throw VersionError("snapshot: unknown format version");
    s.grid_n = take<std::uint32_t>(bytes, off);
    s.time = take<double>(bytes, off);
    s.seed = take<std::uint64_t>(bytes, off);
    s.step_index = take<std::uint64_t>(bytes, off);
    const std::size_t payload = bytes.size() - 4 - off;
    if (payload != static_cast<std::size_t>(s.grid_n) * 8)
        throw CorruptionError("snapshot: payload size does not match grid");
    s.values.resize(s.grid_n);
    for (std::uint32_t i = 0; i < s.grid_n; ++i) s.values[i] = take<double>(bytes, off);
    return s;
}

void write_snapshot(const Snapshot& s, const std::string& path) {
    const auto bytes = encode_snapshot(s);
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw ConfigError("write_snapshot: cannot open " + path);
    os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!os) throw ConfigError("write_snapshot: short write to " + path);
}

Snapshot read_snapshot(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("read_snapshot: cannot open " + path);
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(is)),
                                     std::istreambuf_iterator<char>());
    return decode_snapshot(bytes);
}

Snapshot make_snapshot(const Field& f, double time, std::uint64_t seed, std::uint64_t step_index) {
    Snapshot s;
    s.grid_n = static_cast<std::uint32_t>(f.size());
    s.time = time;
    s.seed = seed;
    s.step_index = step_index;
    s.values = f.values;
    return s;
}

} // namespace fcsl

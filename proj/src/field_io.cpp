#include "vkd/field_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <limits>
#include <ostream>

namespace vkd {

namespace {

constexpr std::size_t kHeaderBytes = 4 + 2 + 4 + 4 + 7 * 8 + 1 + 8;
constexpr std::size_t kCellBytes = 3 * 8;

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xff));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int k = 0; k < 4; ++k) out.push_back(static_cast<std::uint8_t>(v >> (8 * k)));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
    for (int k = 0; k < 8; ++k) out.push_back(static_cast<std::uint8_t>(v >> (8 * k)));
}

void put_f64(std::vector<std::uint8_t>& out, double v) {
    put_u64(out, std::bit_cast<std::uint64_t>(v));
}

class Reader {
  public:
    explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    std::size_t remaining() const { return bytes_.size() - pos_; }

    void need(std::size_t n, const char* what) {
        if (remaining() < n)
            throw DecodeError(std::string("truncated payload: expected ") + what);
    }

    std::uint16_t u16() {
        need(2, "u16");
        std::uint16_t v = std::uint16_t(bytes_[pos_]) | std::uint16_t(bytes_[pos_ + 1]) << 8;
        pos_ += 2;
        return v;
    }

    std::uint32_t u32() {
        need(4, "u32");
        std::uint32_t v = 0;
        for (int k = 0; k < 4; ++k) v |= std::uint32_t(bytes_[pos_ + k]) << (8 * k);
        pos_ += 4;
        return v;
    }

    std::uint64_t u64() {
        need(8, "u64");
        std::uint64_t v = 0;
        for (int k = 0; k < 8; ++k) v |= std::uint64_t(bytes_[pos_ + k]) << (8 * k);
        pos_ += 8;
        return v;
    }

    double f64() { return std::bit_cast<double>(u64()); }

    std::uint8_t u8() {
        need(1, "u8");
        return bytes_[pos_++];
    }

    void magic() {
        need(4, "magic");
        if (std::memcmp(bytes_.data() + pos_, kSliceMagic, 4) != 0)
            throw DecodeError("magic mismatch: expected \"VKDF\"");
        pos_ += 4;
    }

  private:
    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

FieldSlice read_slice_record(Reader& r, std::size_t slot_index) {
    r.magic();
    std::uint16_t version = r.u16();
    if (version != kFormatVersion)
        throw DecodeError("unsupported format version " + std::to_string(version));

    FieldSlice s;
    s.grid.cols = r.u32();
    s.grid.rows = r.u32();
    if (s.grid.cols == 0 || s.grid.rows == 0)
        throw DecodeError("dimension overflow: zero-sized grid");
    std::uint64_t cell_count = std::uint64_t(s.grid.cols) * s.grid.rows;
    if (cell_count > std::numeric_limits<std::size_t>::max() / kCellBytes)
        throw DecodeError("dimension overflow: cell count too large");

    s.grid.min_x = r.f64();
    s.grid.min_y = r.f64();
    s.grid.cell_size = r.f64();
    s.slot.index = slot_index;
    s.slot.start_t = r.f64();
    s.slot.end_t = r.f64();
    s.kernel.bandwidth = r.f64();
    s.kernel.constant = r.f64();
    std::uint8_t mode = r.u8();
    if (mode > 1) throw DecodeError("unknown weighting mode " + std::to_string(mode));
    s.weighting = static_cast<WeightingMode>(mode);
    s.contributing_vector_count = r.u64();

    r.need(static_cast<std::size_t>(cell_count) * kCellBytes, "cell payload");
    s.cells.resize(static_cast<std::size_t>(cell_count));
    for (CellDensity& c : s.cells) {
        c.density = r.f64();
        c.vx = r.f64();
        c.vy = r.f64();
    }
    return s;
}

}  // namespace

std::vector<std::uint8_t> serialize_slice(const FieldSlice& slice) {
    std::vector<std::uint8_t> out;
    out.reserve(kHeaderBytes + slice.cells.size() * kCellBytes);
    out.insert(out.end(), kSliceMagic, kSliceMagic + 4);
    put_u16(out, kFormatVersion);
    put_u32(out, slice.grid.cols);
    put_u32(out, slice.grid.rows);
    put_f64(out, slice.grid.min_x);
    put_f64(out, slice.grid.min_y);
    put_f64(out, slice.grid.cell_size);
    put_f64(out, slice.slot.start_t);
    put_f64(out, slice.slot.end_t);
    put_f64(out, slice.kernel.bandwidth);
    put_f64(out, slice.kernel.constant);
    out.push_back(static_cast<std::uint8_t>(slice.weighting));
    put_u64(out, slice.contributing_vector_count);
    for (const CellDensity& c : slice.cells) {
        put_f64(out, c.density);
        put_f64(out, c.vx);
        put_f64(out, c.vy);
    }
    return out;
}

FieldSlice deserialize_slice(std::span<const std::uint8_t> bytes,
                             std::size_t slot_index) {
    Reader r(bytes);
    FieldSlice s = read_slice_record(r, slot_index);
    if (r.remaining() != 0)
        throw DecodeError("trailing bytes after slice record");
    return s;
}

void write_field(std::ostream& out, std::span<const FieldSlice> slices) {
    std::vector<std::uint8_t> head;
    put_u32(head, static_cast<std::uint32_t>(slices.size()));
    out.write(reinterpret_cast<const char*>(head.data()),
              static_cast<std::streamsize>(head.size()));
    for (const FieldSlice& s : slices) {
        std::vector<std::uint8_t> rec = serialize_slice(s);
        out.write(reinterpret_cast<const char*>(rec.data()),
                  static_cast<std::streamsize>(rec.size()));
    }
    if (!out) throw std::runtime_error("write_field: output stream failed");
}

std::vector<FieldSlice> read_field(std::istream& in) {
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    Reader r(bytes);
    r.need(4, "slice count");
    std::uint32_t count = r.u32();
    std::vector<FieldSlice> slices;
    slices.reserve(count);
    for (std::uint32_t k = 0; k < count; ++k)
        slices.push_back(read_slice_record(r, k));
    if (r.remaining() != 0) throw DecodeError("trailing bytes after field payload");
    return slices;
}

void write_field_file(const std::string& path, std::span<const FieldSlice> slices) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    write_field(out, slices);
}

std::vector<FieldSlice> read_field_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DecodeError("cannot open field file: " + path);
    return read_field(in);
}

}  // namespace vkd

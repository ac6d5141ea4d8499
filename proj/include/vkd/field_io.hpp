#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "vkd/field.hpp"

namespace vkd {

/// Structured failure while decoding a slice or field file.
class DecodeError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Slice record layout (all little-endian):
///   magic "VKDF", u16 version (=1), u32 cols, u32 rows,
///   f64 min_x, min_y, cell_size, slot_start_t, slot_end_t,
///   f64 bandwidth, f64 kernel_constant, u8 weighting_mode,
///   u64 contributing_vector_count,
///   then rows*cols cells row-major as (f64 density, f64 vx, f64 vy).
/// A field file is a u32 slice count followed by that many records.
inline constexpr char kSliceMagic[4] = {'V', 'K', 'D', 'F'};
inline constexpr std::uint16_t kFormatVersion = 1;

std::vector<std::uint8_t> serialize_slice(const FieldSlice& slice);

/// Decodes exactly one slice record; bytes must contain the record and
/// nothing else. The record does not carry the slot index, so the caller
/// supplies it (a field file reader assigns positions).
FieldSlice deserialize_slice(std::span<const std::uint8_t> bytes,
                             std::size_t slot_index = 0);

void write_field(std::ostream& out, std::span<const FieldSlice> slices);
std::vector<FieldSlice> read_field(std::istream& in);

void write_field_file(const std::string& path, std::span<const FieldSlice> slices);
std::vector<FieldSlice> read_field_file(const std::string& path);

}  // namespace vkd

#pragma once

// OMGT binary tensor files.
//
// Bare tensor (version 1):
//   'O' 'M' 'G' 'T' | u8 version = 1 | u32 rank | rank x u32 dims |
//   prod(dims) x f32 values
// Named container (version 2):
//   'O' 'M' 'G' 'T' | u8 version = 2 | u32 section count | per section:
//   u32 name length | UTF-8 name | u32 rank | dims | values
// All integers and floats are little-endian.

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "omg/raster.hpp"

namespace omg {

struct Tensor {
  std::vector<uint32_t> dims;
  std::vector<float> values;

  std::size_t element_count() const;
  bool operator==(const Tensor&) const = default;
};

using NamedTensors = std::vector<std::pair<std::string, Tensor>>;

std::string encode_tensor(const Tensor& t);
Tensor decode_tensor(const std::string& bytes);

std::string encode_container(const NamedTensors& sections);
NamedTensors decode_container(const std::string& bytes);

const Tensor* find_section(const NamedTensors& sections, const std::string& name);

Tensor raster_to_tensor(const Raster& r);
Raster tensor_to_raster(const Tensor& t);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& bytes);

// 64-bit FNV-1a, rendered as 16 lowercase hex digits.
std::string content_hash(const std::string& bytes);

}  // namespace omg

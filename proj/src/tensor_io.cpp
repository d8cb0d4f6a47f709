#include "omg/tensor_io.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "omg/types.hpp"

namespace omg {

namespace {

constexpr char kMagic[4] = {'O', 'M', 'G', 'T'};
constexpr uint8_t kVersionTensor = 1;
constexpr uint8_t kVersionContainer = 2;

void put_u32(std::string& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_f32(std::string& out, float f) { put_u32(out, std::bit_cast<uint32_t>(f)); }

class Reader {
 public:
  explicit Reader(const std::string& bytes) : bytes_(bytes) {}

  uint8_t u8() {
    need(1);
    return static_cast<uint8_t>(bytes_[pos_++]);
  }
  uint32_t u32() {
    need(4);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
      v |= static_cast<uint32_t>(static_cast<uint8_t>(bytes_[pos_++])) << (8 * i);
    return v;
  }
  float f32() { return std::bit_cast<float>(u32()); }
  std::string str(std::size_t n) {
    need(n);
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw DataError("OMGT: truncated file");
  }
  const std::string& bytes_;
  std::size_t pos_ = 0;
};

void put_body(std::string& out, const Tensor& t) {
  if (t.values.size() != t.element_count())
    throw DataError("OMGT: value count does not match dims");
  put_u32(out, static_cast<uint32_t>(t.dims.size()));
  for (uint32_t d : t.dims) put_u32(out, d);
  for (float v : t.values) put_f32(out, v);
}

Tensor get_body(Reader& in) {
  Tensor t;
  const uint32_t rank = in.u32();
  if (rank > 16) throw DataError("OMGT: implausible rank " + std::to_string(rank));
  for (uint32_t i = 0; i < rank; ++i) t.dims.push_back(in.u32());
  const std::size_t n = t.element_count();
  t.values.reserve(n);
  for (std::size_t i = 0; i < n; ++i) t.values.push_back(in.f32());
  return t;
}

void put_header(std::string& out, uint8_t version) {
  out.append(kMagic, 4);
  out.push_back(static_cast<char>(version));
}

void check_header(Reader& in, uint8_t version) {
  if (in.str(4) != std::string(kMagic, 4)) throw DataError("OMGT: bad magic");
  const uint8_t v = in.u8();
  if (v != version)
    throw DataError("OMGT: expected version " + std::to_string(version) + ", got " +
                    std::to_string(v));
}

}  // namespace

std::size_t Tensor::element_count() const {
  std::size_t n = 1;
  for (uint32_t d : dims) n *= d;
  return n;
}

std::string encode_tensor(const Tensor& t) {
  std::string out;
  put_header(out, kVersionTensor);
  put_body(out, t);
  return out;
}

Tensor decode_tensor(const std::string& bytes) {
  Reader in(bytes);
  check_header(in, kVersionTensor);
  Tensor t = get_body(in);
  if (!in.done()) throw DataError("OMGT: trailing bytes");
  return t;
}

std::string encode_container(const NamedTensors& sections) {
  std::string out;
  put_header(out, kVersionContainer);
  put_u32(out, static_cast<uint32_t>(sections.size()));
  for (const auto& [name, t] : sections) {
    put_u32(out, static_cast<uint32_t>(name.size()));
    out += name;
    put_body(out, t);
  }
  return out;
}

NamedTensors decode_container(const std::string& bytes) {
  Reader in(bytes);
  check_header(in, kVersionContainer);
  NamedTensors out;
  const uint32_t count = in.u32();
  for (uint32_t i = 0; i < count; ++i) {
    std::string name = in.str(in.u32());
    out.emplace_back(std::move(name), get_body(in));
  }
  if (!in.done()) throw DataError("OMGT: trailing bytes");
  return out;
}

const Tensor* find_section(const NamedTensors& sections, const std::string& name) {
  for (const auto& [n, t] : sections)
    if (n == name) return &t;
  return nullptr;
}

Tensor raster_to_tensor(const Raster& r) {
  return {{static_cast<uint32_t>(r.channels()), static_cast<uint32_t>(r.height()),
           static_cast<uint32_t>(r.width())},
          r.data()};
}

Raster tensor_to_raster(const Tensor& t) {
  if (t.dims.size() != 3) throw DataError("raster tensors must have rank 3");
  Raster r(static_cast<int>(t.dims[0]), static_cast<int>(t.dims[1]),
           static_cast<int>(t.dims[2]));
  if (t.values.size() != r.data().size()) throw DataError("raster tensor size mismatch");
  r.data() = t.values;
  return r;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("write failed for " + path.string());
}

std::string content_hash(const std::string& bytes) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace omg

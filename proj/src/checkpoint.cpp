#include "arganno/checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

#include "arganno/errors.hpp"

namespace arganno {

namespace {

constexpr char kMagic[8] = {'A', 'R', 'G', 'A', 'N', 'N', 'O', '1'};

void write_u32(std::ostream& out, uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xFF);
  out.write(reinterpret_cast<const char*>(b), 4);
}

void write_i64(std::ostream& out, int64_t v) {
  unsigned char b[8];
  uint64_t u = static_cast<uint64_t>(v);
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((u >> (8 * i)) & 0xFF);
  out.write(reinterpret_cast<const char*>(b), 8);
}

void write_f64(std::ostream& out, double v) {
  uint64_t u;
  std::memcpy(&u, &v, 8);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((u >> (8 * i)) & 0xFF);
  out.write(reinterpret_cast<const char*>(b), 8);
}

uint32_t read_u32(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(b[i]) << (8 * i);
  return v;
}

int64_t read_i64(std::istream& in) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(b[i]) << (8 * i);
  return static_cast<int64_t>(v);
}

double read_f64(std::istream& in) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  uint64_t u = 0;
  for (int i = 0; i < 8; ++i) u |= static_cast<uint64_t>(b[i]) << (8 * i);
  double v;
  std::memcpy(&v, &u, 8);
  return v;
}

}  // namespace

void save_checkpoint(const Params& params, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write checkpoint " + path);
  out.write(kMagic, 8);
  const ModelConfig& c = params.config;
  for (int64_t v : {static_cast<int64_t>(c.layers), static_cast<int64_t>(c.heads),
                    static_cast<int64_t>(c.width), static_cast<int64_t>(c.segment_len),
                    static_cast<int64_t>(c.vocab_size), static_cast<int64_t>(c.num_labels),
                    static_cast<int64_t>(c.mem_len)})
    write_i64(out, v);
  auto sections = params.entries();
  write_u32(out, static_cast<uint32_t>(sections.size()));
  for (const auto& [name, tensor] : sections) {
    write_u32(out, static_cast<uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    write_u32(out, static_cast<uint32_t>(tensor->rows));
    write_u32(out, static_cast<uint32_t>(tensor->cols));
    for (double v : tensor->data) write_f64(out, v);
  }
  if (!out) throw DataError("write failure on checkpoint " + path);
}

Params load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read checkpoint " + path);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kMagic, 8) != 0)
    throw ParseError("checkpoint " + path + ": bad magic");
  ModelConfig c;
  c.layers = static_cast<int>(read_i64(in));
  c.heads = static_cast<int>(read_i64(in));
  c.width = static_cast<int>(read_i64(in));
  c.segment_len = static_cast<int>(read_i64(in));
  c.vocab_size = static_cast<int>(read_i64(in));
  c.num_labels = static_cast<int>(read_i64(in));
  c.mem_len = static_cast<int>(read_i64(in));
  c.validate();

  Params params = Params::init(c, 0);  // shapes only; values overwritten below
  auto sections = params.entries();
  uint32_t count = read_u32(in);
  if (count != sections.size())
    throw ParseError("checkpoint " + path + ": expected " +
                     std::to_string(sections.size()) + " sections, found " +
                     std::to_string(count));
  for (auto& [name, tensor] : sections) {
    uint32_t name_len = read_u32(in);
    std::string file_name(name_len, '\0');
    in.read(file_name.data(), name_len);
    if (file_name != name)
      throw ParseError("checkpoint " + path + ": section '" + file_name +
                       "' does not match expected '" + name + "'");
    uint32_t rows = read_u32(in);
    uint32_t cols = read_u32(in);
    if (static_cast<int>(rows) != tensor->rows || static_cast<int>(cols) != tensor->cols)
      throw ParseError("checkpoint " + path + ": shape mismatch in section " + name);
    for (double& v : tensor->data) v = read_f64(in);
  }
  if (!in) throw ParseError("checkpoint " + path + ": truncated");
  return params;
}

}  // namespace arganno

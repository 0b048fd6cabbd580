#include "sccd/checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

#include "sccd/errors.hpp"

namespace sccd {
namespace {

constexpr char kMagic[8] = {'S', 'C', 'C', 'D', 'C', 'K', 'P', '1'};

template <typename T>
void write_pod(std::ofstream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T read_pod(std::ifstream& in, const std::string& path) {
  T v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof v))
    throw parse_error("truncated checkpoint: " + path);
  return v;
}

}  // namespace

void save_checkpoint(
    const std::string& path,
    const std::vector<std::pair<std::string, TensorPtr>>& entries) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw parse_error("cannot write checkpoint: " + path);
  out.write(kMagic, sizeof kMagic);
  write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(entries.size()));
  for (const auto& [name, t] : entries) {
    write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    write_pod<std::uint64_t>(out, static_cast<std::uint64_t>(t->rows));
    write_pod<std::uint64_t>(out, static_cast<std::uint64_t>(t->cols));
  }
  for (const auto& [name, t] : entries)
    out.write(reinterpret_cast<const char*>(t->data.data()),
              static_cast<std::streamsize>(t->data.size() * sizeof(double)));
  if (!out) throw parse_error("write failed: " + path);
}

std::vector<std::pair<std::string, TensorPtr>> load_checkpoint(
    const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw parse_error("cannot open checkpoint: " + path);
  char magic[8];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kMagic, 8) != 0)
    throw parse_error("bad checkpoint magic: " + path);
  const auto count = read_pod<std::uint32_t>(in, path);
  std::vector<std::pair<std::string, TensorPtr>> entries;
  entries.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto name_len = read_pod<std::uint32_t>(in, path);
    std::string name(name_len, '\0');
    if (!in.read(name.data(), name_len))
      throw parse_error("truncated checkpoint: " + path);
    const auto rows = read_pod<std::uint64_t>(in, path);
    const auto cols = read_pod<std::uint64_t>(in, path);
    entries.emplace_back(std::move(name),
                         make_tensor(static_cast<Index>(rows),
                                     static_cast<Index>(cols)));
  }
  for (auto& [name, t] : entries)
    if (!in.read(reinterpret_cast<char*>(t->data.data()),
                 static_cast<std::streamsize>(t->data.size() * sizeof(double))))
      throw parse_error("truncated checkpoint data: " + path);
  return entries;
}

void load_checkpoint_into(
    const std::string& path,
    const std::vector<std::pair<std::string, TensorPtr>>& entries) {
  auto loaded = load_checkpoint(path);
  for (const auto& [name, dst] : entries) {
    bool found = false;
    for (const auto& [lname, src] : loaded) {
      if (lname != name) continue;
      if (src->rows != dst->rows || src->cols != dst->cols)
        throw dimension_error("checkpoint entry '" + name + "' is " +
                              std::to_string(src->rows) + "x" +
                              std::to_string(src->cols) + ", expected " +
                              std::to_string(dst->rows) + "x" +
                              std::to_string(dst->cols));
      dst->data = src->data;
      found = true;
      break;
    }
    if (!found)
      throw parse_error("checkpoint entry '" + name + "' missing in " + path);
  }
}

}  // namespace sccd

#include "aenet/aent_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "json.hpp"

namespace aenet {

namespace {

static_assert(std::endian::native == std::endian::little,
              "aent writer assumes a little-endian host");

constexpr char kMagic[4] = {'A', 'E', 'N', 'T'};
constexpr std::uint16_t kVersion = 1;

void put_u16(std::ofstream& os, std::uint16_t v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

void put_u64(std::ofstream& os, std::uint64_t v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

}  // namespace

void write_aent(const std::filesystem::path& path, const Tensor& t) {
  std::ofstream os(path, std::ios::binary);
  if (!os) {
    throw std::runtime_error("aent: cannot open " + path.string() + " for writing");
  }
  os.write(kMagic, 4);
  put_u16(os, kVersion);
  put_u16(os, static_cast<std::uint16_t>(t.rank()));
  for (std::size_t e : t.shape()) {
    put_u64(os, static_cast<std::uint64_t>(e));
  }
  std::vector<float> payload(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    payload[i] = static_cast<float>(t[i]);
  }
  os.write(reinterpret_cast<const char*>(payload.data()),
           static_cast<std::streamsize>(payload.size() * sizeof(float)));
  if (!os) {
    throw std::runtime_error("aent: write failed for " + path.string());
  }
}

Tensor read_aent(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) {
    throw std::runtime_error("aent: cannot open " + path.string());
  }
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0) {
    throw std::runtime_error("aent: bad magic in " + path.string());
  }
  std::uint16_t version = 0, ndim = 0;
  is.read(reinterpret_cast<char*>(&version), sizeof(version));
  is.read(reinterpret_cast<char*>(&ndim), sizeof(ndim));
  if (!is || version != kVersion) {
    throw std::runtime_error("aent: unsupported version in " + path.string());
  }
  if (ndim == 0) {
    throw std::runtime_error("aent: zero-rank tensor in " + path.string());
  }
  std::vector<std::size_t> shape(ndim);
  std::size_t count = 1;
  for (std::uint16_t i = 0; i < ndim; ++i) {
    std::uint64_t e = 0;
    is.read(reinterpret_cast<char*>(&e), sizeof(e));
    shape[i] = static_cast<std::size_t>(e);
    count *= shape[i];
  }
  std::vector<float> payload(count);
  is.read(reinterpret_cast<char*>(payload.data()),
          static_cast<std::streamsize>(count * sizeof(float)));
  if (!is || is.gcount() != static_cast<std::streamsize>(count * sizeof(float))) {
    throw std::runtime_error("aent: truncated payload in " + path.string());
  }
  is.peek();
  if (!is.eof()) {
    throw std::runtime_error("aent: trailing bytes in " + path.string());
  }
  std::vector<double> data(count);
  for (std::size_t i = 0; i < count; ++i) {
    data[i] = static_cast<double>(payload[i]);
  }
  return Tensor::from(std::move(shape), std::move(data));
}

void write_manifest(const std::filesystem::path& dir,
                    const std::vector<ManifestEntry>& entries) {
  nlohmann::ordered_json j;
  j["tensors"] = nlohmann::ordered_json::array();
  for (const auto& e : entries) {
    nlohmann::ordered_json item;
    item["name"] = e.name;
    item["file"] = e.file;
    item["shape"] = e.shape;
    item["role"] = e.role;
    j["tensors"].push_back(std::move(item));
  }
  std::ofstream os(dir / "manifest.json");
  if (!os) {
    throw std::runtime_error("manifest: cannot write in " + dir.string());
  }
  os << j.dump(2) << "\n";
}

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& dir) {
  std::ifstream is(dir / "manifest.json");
  if (!is) {
    throw std::runtime_error("manifest: cannot open " + (dir / "manifest.json").string());
  }
  nlohmann::json j = nlohmann::json::parse(is);
  std::vector<ManifestEntry> entries;
  for (const auto& item : j.at("tensors")) {
    ManifestEntry e;
    e.name = item.at("name").get<std::string>();
    e.file = item.at("file").get<std::string>();
    e.shape = item.at("shape").get<std::vector<std::size_t>>();
    e.role = item.value("role", "");
    entries.push_back(std::move(e));
  }
  return entries;
}

}  // namespace aenet

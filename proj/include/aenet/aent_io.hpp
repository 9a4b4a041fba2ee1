#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "aenet/tensor.hpp"

namespace aenet {

// ".aent" tensor file: magic "AENT", u16 version = 1, u16 ndim,
// ndim x u64 little-endian extents, then the row-major payload as
// little-endian IEEE-754 f32 (values round-tripped from f64).
void write_aent(const std::filesystem::path& path, const Tensor& t);
Tensor read_aent(const std::filesystem::path& path);

// Named-tensor manifest: JSON list of {name, file, shape, role} entries
// next to the .aent files in one directory.
struct ManifestEntry {
  std::string name;
  std::string file;
  std::vector<std::size_t> shape;
  std::string role;
};

void write_manifest(const std::filesystem::path& dir,
                    const std::vector<ManifestEntry>& entries);
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& dir);

}  // namespace aenet

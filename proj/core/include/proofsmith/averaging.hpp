#pragma once

// Checkpoint interpolation (1 - alpha) * base + alpha * tuned and the GPCK
// file format:
//
//   "GPCK" | u32 version=1 | u64 header_len | header (UTF-8 JSON)
//   | little-endian float32 payloads | SHA-256 of all preceding bytes
//
// header = {"tensors": [{"name", "shape", "offset", "len"}], "metadata": {}}
// with offset in bytes from the start of the payload section and len in
// elements.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "proofsmith/digest.hpp"

namespace proofsmith {

struct Tensor {
  std::string name;
  std::vector<std::int64_t> shape;
  std::vector<float> data;  // row-major

  bool operator==(const Tensor&) const = default;
};

struct Checkpoint {
  std::vector<Tensor> tensors;
  std::map<std::string, std::string> metadata;

  const Tensor* find(std::string_view name) const;
  bool operator==(const Checkpoint&) const = default;
};

// Throws PreconditionError on duplicate names or shape/data size mismatch.
void validate(const Checkpoint& ckpt);

// Per-element interpolation, accumulated in double. alpha 0 and 1 copy the
// inputs exactly. Output keeps base's tensor order and records avg.alpha,
// avg.base_sha256 and avg.tuned_sha256 in its metadata.
// Throws KeyMismatch, ShapeMismatch, AlphaOutOfRange.
Checkpoint average(const Checkpoint& base, const Checkpoint& tuned, double alpha);

std::vector<Checkpoint> sweep(const Checkpoint& base, const Checkpoint& tuned, const std::vector<double>& alphas);

std::string serialize_checkpoint(const Checkpoint& ckpt);
// Throws FormatError (with byte offset) or DigestMismatch.
Checkpoint deserialize_checkpoint(std::string_view bytes);

void write_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint read_checkpoint(const std::filesystem::path& path);

// SHA-256 of the serialized checkpoint with its metadata dropped, so two
// checkpoints with equal tensors share it.
std::string tensor_digest(const Checkpoint& ckpt);

// Shortest text that reads back as the same double.
std::string format_double(double v);

}  // namespace proofsmith

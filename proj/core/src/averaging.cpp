#include "proofsmith/averaging.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <set>

#include "proofsmith/errors.hpp"
#include "proofsmith/io.hpp"

namespace proofsmith {

namespace {

static_assert(std::endian::native == std::endian::little, "GPCK payload I/O assumes a little-endian host");

std::string join_names(const std::vector<std::string>& names) {
  std::string out;
  for (const auto& n : names) {
    if (!out.empty()) out += ", ";
    out += n;
  }
  return out;
}

}  // namespace

ShapeMismatch::ShapeMismatch(std::vector<std::string> names)
    : Error("tensor shapes differ: " + join_names(names)), names_(std::move(names)) {}

KeyMismatch::KeyMismatch(std::vector<std::string> names)
    : Error("tensor names present in only one checkpoint: " + join_names(names)), names_(std::move(names)) {}

const Tensor* Checkpoint::find(std::string_view name) const {
  for (const auto& t : tensors) {
    if (t.name == name) return &t;
  }
  return nullptr;
}

void validate(const Checkpoint& ckpt) {
  std::set<std::string_view> names;
  for (const auto& t : ckpt.tensors) {
    if (!names.insert(t.name).second) throw PreconditionError("duplicate tensor name '" + t.name + "'");
    std::int64_t count = 1;
    for (auto d : t.shape) {
      if (d < 0) throw PreconditionError("negative dimension in tensor '" + t.name + "'");
      count *= d;
    }
    if (count != static_cast<std::int64_t>(t.data.size())) {
      throw PreconditionError("tensor '" + t.name + "' has " + std::to_string(t.data.size()) +
                              " elements but its shape holds " + std::to_string(count));
    }
  }
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

Checkpoint average(const Checkpoint& base, const Checkpoint& tuned, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw AlphaOutOfRange(alpha);
  validate(base);
  validate(tuned);

  std::vector<std::string> missing;
  for (const auto& t : base.tensors) {
    if (!tuned.find(t.name)) missing.push_back(t.name);
  }
  for (const auto& t : tuned.tensors) {
    if (!base.find(t.name)) missing.push_back(t.name);
  }
  if (!missing.empty()) throw KeyMismatch(std::move(missing));
  std::vector<std::string> misshapen;
  for (const auto& t : base.tensors) {
    if (tuned.find(t.name)->shape != t.shape) misshapen.push_back(t.name);
  }
  if (!misshapen.empty()) throw ShapeMismatch(std::move(misshapen));

  // Snap alpha so 1 - alpha is exact; then average(a, b, x) and
  // average(b, a, 1 - x) use swapped weights and agree bit for bit.
  const double w_tuned = 1.0 - (1.0 - alpha);
  const double w_base = 1.0 - w_tuned;

  Checkpoint out;
  out.tensors.reserve(base.tensors.size());
  for (const auto& b : base.tensors) {
    const Tensor& t = *tuned.find(b.name);
    Tensor o{b.name, b.shape, {}};
    if (alpha == 0.0) {
      o.data = b.data;
    } else if (alpha == 1.0) {
      o.data = t.data;
    } else {
      o.data.resize(b.data.size());
      for (std::size_t i = 0; i < b.data.size(); ++i) {
        o.data[i] = static_cast<float>(w_base * static_cast<double>(b.data[i]) +
                                       w_tuned * static_cast<double>(t.data[i]));
      }
    }
    out.tensors.push_back(std::move(o));
  }
  out.metadata["avg.alpha"] = format_double(alpha);
  out.metadata["avg.base_sha256"] = tensor_digest(base);
  out.metadata["avg.tuned_sha256"] = tensor_digest(tuned);
  return out;
}

std::vector<Checkpoint> sweep(const Checkpoint& base, const Checkpoint& tuned, const std::vector<double>& alphas) {
  std::vector<Checkpoint> out;
  out.reserve(alphas.size());
  for (double a : alphas) out.push_back(average(base, tuned, a));
  return out;
}

namespace {

template <typename T>
void put_le(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

template <typename T>
T get_le(std::string_view bytes, std::size_t at) {
  T v;
  std::memcpy(&v, bytes.data() + at, sizeof(T));
  return v;
}

constexpr std::size_t kPreamble = 4 + 4 + 8;
constexpr std::size_t kDigestSize = 32;

}  // namespace

std::string serialize_checkpoint(const Checkpoint& ckpt) {
  validate(ckpt);
  OrderedJson header;
  OrderedJson tensors = OrderedJson::array();
  std::uint64_t offset = 0;
  for (const auto& t : ckpt.tensors) {
    tensors.push_back({{"name", t.name}, {"shape", t.shape}, {"offset", offset}, {"len", t.data.size()}});
    offset += t.data.size() * sizeof(float);
  }
  header["tensors"] = tensors;
  header["metadata"] = OrderedJson::object();
  for (const auto& [k, v] : ckpt.metadata) header["metadata"][k] = v;
  const std::string header_text = header.dump();

  std::string out = "GPCK";
  put_le<std::uint32_t>(out, 1);
  put_le<std::uint64_t>(out, header_text.size());
  out += header_text;
  for (const auto& t : ckpt.tensors) {
    out.append(reinterpret_cast<const char*>(t.data.data()), t.data.size() * sizeof(float));
  }
  const Sha256Digest digest = sha256(out);
  out.append(reinterpret_cast<const char*>(digest.data()), digest.size());
  return out;
}

Checkpoint deserialize_checkpoint(std::string_view bytes) {
  if (bytes.size() < kPreamble) throw FormatError(bytes.size(), "file shorter than the preamble");
  if (bytes.substr(0, 4) != "GPCK") throw FormatError(0, "bad magic");
  const auto version = get_le<std::uint32_t>(bytes, 4);
  if (version != 1) throw FormatError(4, "unsupported version " + std::to_string(version));
  const auto header_len = get_le<std::uint64_t>(bytes, 8);
  if (header_len > bytes.size() - kPreamble) throw FormatError(8, "header length runs past end of file");
  const std::size_t payload_start = kPreamble + header_len;
  if (bytes.size() - payload_start < kDigestSize) throw FormatError(bytes.size(), "missing digest");
  const std::size_t payload_size = bytes.size() - payload_start - kDigestSize;

  Json header;
  try {
    header = Json::parse(bytes.substr(kPreamble, header_len));
  } catch (const Json::parse_error& e) {
    throw FormatError(kPreamble + e.byte, "header is not valid JSON");
  }

  Checkpoint ckpt;
  std::size_t payload_end = 0;
  try {
    for (const Json& t : header.at("tensors")) {
      Tensor tensor;
      tensor.name = t.at("name").get<std::string>();
      tensor.shape = t.at("shape").get<std::vector<std::int64_t>>();
      const auto offset = t.at("offset").get<std::uint64_t>();
      const auto len = t.at("len").get<std::uint64_t>();
      if (offset > payload_size || len > (payload_size - offset) / sizeof(float)) {
        throw FormatError(payload_start + std::min<std::uint64_t>(offset, payload_size),
                          "tensor '" + tensor.name + "' runs past the payload");
      }
      tensor.data.resize(len);
      std::memcpy(tensor.data.data(), bytes.data() + payload_start + offset, len * sizeof(float));
      payload_end = std::max<std::size_t>(payload_end, offset + len * sizeof(float));
      ckpt.tensors.push_back(std::move(tensor));
    }
    if (header.contains("metadata")) {
      for (const auto& [k, v] : header.at("metadata").items()) ckpt.metadata[k] = v.get<std::string>();
    }
  } catch (const Json::exception& e) {
    throw FormatError(kPreamble, std::string("malformed header: ") + e.what());
  }
  if (payload_end != payload_size) {
    throw FormatError(payload_start + payload_end, "payload size does not match the tensor table");
  }
  try {
    validate(ckpt);
  } catch (const PreconditionError& e) {
    throw FormatError(kPreamble, e.what());
  }

  const Sha256Digest expected = sha256(bytes.substr(0, bytes.size() - kDigestSize));
  if (std::memcmp(expected.data(), bytes.data() + bytes.size() - kDigestSize, kDigestSize) != 0) {
    throw DigestMismatch("checkpoint digest does not match its contents");
  }
  return ckpt;
}

void write_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  write_text_file_atomic(path, serialize_checkpoint(ckpt));
}

Checkpoint read_checkpoint(const std::filesystem::path& path) { return deserialize_checkpoint(read_text_file(path)); }

std::string tensor_digest(const Checkpoint& ckpt) {
  Checkpoint bare;
  bare.tensors = ckpt.tensors;
  const std::string bytes = serialize_checkpoint(bare);
  return to_hex(sha256(bytes));
}

}  // namespace proofsmith

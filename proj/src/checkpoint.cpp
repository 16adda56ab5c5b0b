#include "bfpp/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <map>

#include "bfpp/errors.hpp"

namespace bfpp {

namespace {

constexpr char kMagic[8] = {'B', 'F', 'P', 'P', 'C', 'K', 'P', 'T'};
constexpr uint32_t kVersion = 1;

enum class Dtype : uint16_t { kF64 = 0, kU64 = 1, kU8 = 2 };

struct Tensor {
  Dtype dtype = Dtype::kF64;
  std::vector<uint64_t> dims;
  std::vector<uint8_t> bytes;

  size_t count() const {
    size_t n = 1;
    for (uint64_t d : dims) n *= d;
    return n;
  }
};

void put_u32(std::ostream& os, uint32_t v) { os.write(reinterpret_cast<const char*>(&v), 4); }
void put_u64(std::ostream& os, uint64_t v) { os.write(reinterpret_cast<const char*>(&v), 8); }
void put_u16(std::ostream& os, uint16_t v) { os.write(reinterpret_cast<const char*>(&v), 2); }

uint32_t get_u32(std::istream& is) {
  uint32_t v;
  is.read(reinterpret_cast<char*>(&v), 4);
  return v;
}
uint64_t get_u64(std::istream& is) {
  uint64_t v;
  is.read(reinterpret_cast<char*>(&v), 8);
  return v;
}
uint16_t get_u16(std::istream& is) {
  uint16_t v;
  is.read(reinterpret_cast<char*>(&v), 2);
  return v;
}

Tensor f64_tensor(std::span<const double> data, std::vector<uint64_t> dims) {
  Tensor t;
  t.dtype = Dtype::kF64;
  t.dims = std::move(dims);
  t.bytes.resize(data.size() * 8);
  std::memcpy(t.bytes.data(), data.data(), t.bytes.size());
  return t;
}

Tensor scalar(double v) { return f64_tensor(std::span(&v, 1), {1}); }

Tensor u64_tensor(std::span<const uint64_t> data) {
  Tensor t;
  t.dtype = Dtype::kU64;
  t.dims = {data.size()};
  t.bytes.resize(data.size() * 8);
  std::memcpy(t.bytes.data(), data.data(), t.bytes.size());
  return t;
}

Tensor text_tensor(const std::string& s) {
  Tensor t;
  t.dtype = Dtype::kU8;
  t.dims = {s.size()};
  t.bytes.assign(s.begin(), s.end());
  return t;
}

double as_scalar(const Tensor& t, const std::string& name) {
  if (t.dtype != Dtype::kF64 || t.count() != 1)
    throw CheckpointError("tensor '" + name + "' is not a scalar");
  double v;
  std::memcpy(&v, t.bytes.data(), 8);
  return v;
}

std::vector<double> as_f64(const Tensor& t, const std::string& name) {
  if (t.dtype != Dtype::kF64) throw CheckpointError("tensor '" + name + "' is not f64");
  std::vector<double> v(t.count());
  std::memcpy(v.data(), t.bytes.data(), t.bytes.size());
  return v;
}

}  // namespace

void save_checkpoint(const std::string& path, const ModelState& m,
                     const std::array<uint64_t, 5>& rng_state, const std::string& config_text) {
  std::map<std::string, Tensor> tensors;
  tensors["meta/num_marks"] = scalar(m.num_marks);
  tensors["meta/dim"] = scalar(m.cfg.dim);
  tensors["meta/layers"] = scalar(m.cfg.layers);
  tensors["meta/sigma1"] = scalar(m.cfg.sigma1);
  tensors["meta/beta1"] = scalar(m.cfg.beta1);
  tensors["meta/k_steps"] = scalar(m.cfg.k_steps);
  tensors["meta/joint_noise"] = scalar(m.cfg.joint_noise ? 1.0 : 0.0);
  tensors["meta/flow_variance"] =
      scalar(m.cfg.flow_variance == FlowVariance::kPaperForm ? 1.0 : 0.0);
  tensors["meta/epochs"] = scalar(m.cfg.epochs);
  tensors["meta/lr"] = scalar(m.cfg.lr);
  tensors["meta/mc_samples"] = scalar(m.cfg.mc_samples);
  tensors["meta/batch_size"] = scalar(m.cfg.batch_size);
  tensors["meta/optimizer"] = scalar(m.cfg.optimizer == Optimizer::kAdam ? 1.0 : 0.0);
  tensors["meta/seed"] = u64_tensor(std::array<uint64_t, 1>{m.cfg.seed});
  tensors["norm/mean_log_tau"] = scalar(m.norm.mean_log_tau);
  tensors["norm/std_log_tau"] = scalar(m.norm.std_log_tau);
  tensors["encoder/w"] = f64_tensor(m.encoder.w, {m.encoder.w.size()});
  tensors["psi/w"] = f64_tensor(m.psi.w, {m.psi.w.size()});
  tensors["cross_cov/raw"] = f64_tensor(m.cross_cov.raw, {m.cross_cov.raw.size()});
  tensors["rng/state"] = u64_tensor(rng_state);
  tensors["config/text"] = text_tensor(config_text);

  std::ofstream os(path, std::ios::binary);
  if (!os) throw CheckpointError("cannot open for writing: " + path);
  os.write(kMagic, 8);
  put_u32(os, kVersion);
  put_u64(os, tensors.size());
  for (const auto& [name, t] : tensors) {
    put_u16(os, static_cast<uint16_t>(t.dtype));
    put_u32(os, static_cast<uint32_t>(name.size()));
    os.write(name.data(), static_cast<std::streamsize>(name.size()));
    put_u64(os, t.dims.size());
    for (uint64_t d : t.dims) put_u64(os, d);
    os.write(reinterpret_cast<const char*>(t.bytes.data()),
             static_cast<std::streamsize>(t.bytes.size()));
  }
  if (!os) throw CheckpointError("write failed: " + path);
}

LoadedCheckpoint load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw CheckpointError("cannot open checkpoint: " + path);
  char magic[8];
  is.read(magic, 8);
  if (!is || std::memcmp(magic, kMagic, 8) != 0)
    throw CheckpointError(path + ": bad magic bytes");
  const uint32_t version = get_u32(is);
  if (version != kVersion)
    throw CheckpointError(path + ": unsupported version " + std::to_string(version));
  const uint64_t count = get_u64(is);
  std::map<std::string, Tensor> tensors;
  for (uint64_t i = 0; i < count; ++i) {
    Tensor t;
    t.dtype = static_cast<Dtype>(get_u16(is));
    const uint32_t name_len = get_u32(is);
    std::string name(name_len, '\0');
    is.read(name.data(), name_len);
    const uint64_t ndim = get_u64(is);
    t.dims.resize(ndim);
    for (uint64_t d = 0; d < ndim; ++d) t.dims[d] = get_u64(is);
    const size_t elem = t.dtype == Dtype::kU8 ? 1 : 8;
    t.bytes.resize(t.count() * elem);
    is.read(reinterpret_cast<char*>(t.bytes.data()),
            static_cast<std::streamsize>(t.bytes.size()));
    if (!is) throw CheckpointError(path + ": truncated tensor '" + name + "'");
    tensors[name] = std::move(t);
  }

  auto need = [&tensors, &path](const std::string& name) -> const Tensor& {
    const auto it = tensors.find(name);
    if (it == tensors.end()) throw CheckpointError(path + ": missing tensor '" + name + "'");
    return it->second;
  };

  LoadedCheckpoint out;
  TrainConfig cfg;
  const int num_marks = static_cast<int>(as_scalar(need("meta/num_marks"), "meta/num_marks"));
  cfg.dim = static_cast<int>(as_scalar(need("meta/dim"), "meta/dim"));
  cfg.layers = static_cast<int>(as_scalar(need("meta/layers"), "meta/layers"));
  cfg.sigma1 = as_scalar(need("meta/sigma1"), "meta/sigma1");
  cfg.beta1 = as_scalar(need("meta/beta1"), "meta/beta1");
  cfg.k_steps = static_cast<int>(as_scalar(need("meta/k_steps"), "meta/k_steps"));
  cfg.joint_noise = as_scalar(need("meta/joint_noise"), "meta/joint_noise") != 0.0;
  cfg.flow_variance = as_scalar(need("meta/flow_variance"), "meta/flow_variance") != 0.0
                          ? FlowVariance::kPaperForm
                          : FlowVariance::kStandard;
  cfg.epochs = static_cast<int>(as_scalar(need("meta/epochs"), "meta/epochs"));
  cfg.lr = as_scalar(need("meta/lr"), "meta/lr");
  cfg.mc_samples = static_cast<int>(as_scalar(need("meta/mc_samples"), "meta/mc_samples"));
  cfg.batch_size = static_cast<int>(as_scalar(need("meta/batch_size"), "meta/batch_size"));
  cfg.optimizer = as_scalar(need("meta/optimizer"), "meta/optimizer") != 0.0 ? Optimizer::kAdam
                                                                             : Optimizer::kSgd;
  {
    const Tensor& t = need("meta/seed");
    if (t.dtype != Dtype::kU64 || t.count() != 1)
      throw CheckpointError(path + ": meta/seed must be one u64");
    std::memcpy(&cfg.seed, t.bytes.data(), 8);
  }

  ModelState m{.num_marks = num_marks,
               .encoder = EncoderParams::layout(num_marks, cfg.dim, cfg.layers),
               .psi = PsiParams::layout(num_marks, cfg.dim),
               .cross_cov = CrossCovariance(num_marks),
               .norm = {},
               .cfg = cfg};
  m.norm.mean_log_tau = as_scalar(need("norm/mean_log_tau"), "norm/mean_log_tau");
  m.norm.std_log_tau = as_scalar(need("norm/std_log_tau"), "norm/std_log_tau");

  std::vector<double> enc = as_f64(need("encoder/w"), "encoder/w");
  if (enc.size() != m.encoder.w.size())
    throw CheckpointError(path + ": encoder/w size mismatch");
  m.encoder.w = std::move(enc);
  std::vector<double> psi = as_f64(need("psi/w"), "psi/w");
  if (psi.size() != m.psi.w.size()) throw CheckpointError(path + ": psi/w size mismatch");
  m.psi.w = std::move(psi);
  std::vector<double> craw = as_f64(need("cross_cov/raw"), "cross_cov/raw");
  if (craw.size() != m.cross_cov.raw.size())
    throw CheckpointError(path + ": cross_cov/raw size mismatch");
  m.cross_cov.raw = std::move(craw);

  {
    const Tensor& t = need("rng/state");
    if (t.dtype != Dtype::kU64 || t.count() != 5)
      throw CheckpointError(path + ": rng/state must be five u64");
    std::memcpy(out.rng_state.data(), t.bytes.data(), 40);
  }
  {
    const Tensor& t = need("config/text");
    out.config_text.assign(t.bytes.begin(), t.bytes.end());
  }
  out.model = std::move(m);
  return out;
}

}  // namespace bfpp

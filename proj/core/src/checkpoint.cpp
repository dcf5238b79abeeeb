#include "embclf/checkpoint.hpp"

#include <cmath>
#include <cstring>

#include "binary_io.hpp"
#include "embclf/error.hpp"

namespace embclf {

namespace {

constexpr char kMagic[4] = {'R', 'H', 'E', 'D'};

// Matrices go to disk row-major regardless of Eigen's storage order.
void put_tensors(detail::ByteWriter& w, const HeadParams& p) {
  auto put_matrix = [&](const Eigen::MatrixXd& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) w.f32(static_cast<float>(m(r, c)));
    }
  };
  auto put_vector = [&](const Eigen::VectorXd& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) w.f32(static_cast<float>(v(i)));
  };
  put_matrix(p.proj.w1);
  put_vector(p.proj.b1);
  put_matrix(p.proj.w2);
  put_vector(p.proj.b2);
  put_vector(p.lrc.w);
  w.f32(static_cast<float>(p.lrc.b));
}

void get_tensors(detail::ByteReader& r, HeadParams& p, const char* what) {
  auto get = [&]() {
    const float v = r.f32(what);
    if (!std::isfinite(v)) throw FormatError(std::string("non-finite value in ") + what);
    return static_cast<double>(v);
  };
  auto get_matrix = [&](Eigen::MatrixXd& m) {
    for (Eigen::Index row = 0; row < m.rows(); ++row) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) m(row, c) = get();
    }
  };
  auto get_vector = [&](Eigen::VectorXd& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = get();
  };
  get_matrix(p.proj.w1);
  get_vector(p.proj.b1);
  get_matrix(p.proj.w2);
  get_vector(p.proj.b2);
  get_vector(p.lrc.w);
  p.lrc.b = get();
}

}  // namespace

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& ckpt) {
  const auto& h = ckpt.heads;
  if (!h.same_shape(ckpt.optim.first_moment) || !h.same_shape(ckpt.optim.second_moment)) {
    throw DimensionError("checkpoint: optimizer moments do not match parameter shapes");
  }
  if (static_cast<std::size_t>(h.lrc.w.size()) != h.proj.output_dim()) {
    throw DimensionError("checkpoint: logistic head does not match projection output");
  }
  detail::ByteWriter w;
  w.bytes(std::string_view(kMagic, 4));
  w.u32(kCheckpointFormatVersion);
  w.u32(static_cast<std::uint32_t>(h.proj.input_dim()));
  w.u32(static_cast<std::uint32_t>(h.proj.hidden_dim()));
  w.u32(static_cast<std::uint32_t>(h.proj.output_dim()));
  put_tensors(w, h);
  const auto& c = ckpt.optim.config;
  w.u64(ckpt.optim.step);
  for (double v : {c.learning_rate, c.weight_decay, c.beta1, c.beta2, c.epsilon}) w.f64(v);
  put_tensors(w, ckpt.optim.first_moment);
  put_tensors(w, ckpt.optim.second_moment);
  return w.data();
}

Checkpoint decode_checkpoint(std::span<const std::uint8_t> bytes) {
  detail::ByteReader r(bytes);
  if (r.remaining() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw FormatError("corrupt checkpoint header: missing RHED magic");
  }
  r.bytes(4, "magic");
  const auto version = r.u32("checkpoint version");
  if (version != kCheckpointFormatVersion) {
    throw FormatError("unsupported checkpoint version " + std::to_string(version));
  }
  const auto input = r.u32("input dimension");
  const auto hidden = r.u32("hidden dimension");
  const auto output = r.u32("output dimension");
  if (input == 0 || hidden == 0 || output == 0) throw FormatError("checkpoint declares a zero dimension");
  const std::uint64_t per_set = 4ull * (static_cast<std::uint64_t>(hidden) * input + hidden +
                                        static_cast<std::uint64_t>(output) * hidden + 2ull * output + 1);
  const std::uint64_t expected = 3 * per_set + 8 + 5 * 8;
  if (r.remaining() != expected) {
    throw FormatError("checkpoint payload has " + std::to_string(r.remaining()) + " bytes, header implies " +
                      std::to_string(expected));
  }
  Checkpoint ckpt;
  ckpt.heads.proj = ProjectionHead::zeros(input, hidden, output);
  ckpt.heads.lrc = LogisticHead::zeros(output);
  get_tensors(r, ckpt.heads, "parameters");
  ckpt.optim = OptimState::init(ckpt.heads);
  ckpt.optim.step = r.u64("optimizer step");
  auto& c = ckpt.optim.config;
  c.learning_rate = r.f64("learning rate");
  c.weight_decay = r.f64("weight decay");
  c.beta1 = r.f64("beta1");
  c.beta2 = r.f64("beta2");
  c.epsilon = r.f64("epsilon");
  get_tensors(r, ckpt.optim.first_moment, "first moments");
  get_tensors(r, ckpt.optim.second_moment, "second moments");
  return ckpt;
}

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
  detail::write_file(path, encode_checkpoint(ckpt));
}

Checkpoint load_checkpoint(const std::string& path) { return decode_checkpoint(detail::read_file(path)); }

}  // namespace embclf

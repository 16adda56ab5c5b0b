#include "bfpp/tape.hpp"

namespace bfpp::ad {

Vec Tape::leaves(std::span<const double> v) {
  Vec out{this, static_cast<int32_t>(val_.size()), static_cast<int32_t>(v.size())};
  for (double x : v) leaf(x);
  return out;
}

Vec Tape::constants(std::span<const double> v) {
  Vec out{this, static_cast<int32_t>(val_.size()), static_cast<int32_t>(v.size())};
  for (double x : v) constant(x);
  return out;
}

Var Tape::dot(Vec a, Vec b) {
  double s = 0.0;
  for (int i = 0; i < a.n; ++i) s += val_[a.first + i] * val_[b.first + i];
  return push(Op::Dot, a.first, b.first, static_cast<double>(a.n), s);
}

Var Tape::dot_gather(std::span<const Var> a, std::span<const Var> b) {
  const int n = static_cast<int>(a.size());
  const int32_t off = static_cast<int32_t>(args_.size());
  double s = 0.0;
  for (int i = 0; i < n; ++i) args_.push_back(a[i].idx);
  for (int i = 0; i < n; ++i) args_.push_back(b[i].idx);
  for (int i = 0; i < n; ++i) s += val_[args_[off + i]] * val_[args_[off + n + i]];
  return push(Op::DotG, off, n, 0.0, s);
}

Var Tape::sum(Vec x) {
  double s = 0.0;
  for (int i = 0; i < x.n; ++i) s += val_[x.first + i];
  return push(Op::Sum, x.first, x.n, 0.0, s);
}

Vec Tape::pack(std::span<const Var> xs) {
  Vec out{this, static_cast<int32_t>(val_.size()), static_cast<int32_t>(xs.size())};
  for (Var v : xs) copy(v);
  return out;
}

void Tape::backward(Var root) {
  adj_.assign(val_.size(), 0.0);
  adj_[root.idx] = 1.0;
  for (int32_t i = static_cast<int32_t>(rec_.size()) - 1; i >= 0; --i) {
    const double g = adj_[i];
    if (g == 0.0) continue;
    const Rec& r = rec_[i];
    switch (r.op) {
      case Op::Leaf:
      case Op::Const:
        break;
      case Op::Add:
        adj_[r.a] += g;
        adj_[r.b] += g;
        break;
      case Op::Sub:
        adj_[r.a] += g;
        adj_[r.b] -= g;
        break;
      case Op::Mul:
        adj_[r.a] += g * val_[r.b];
        adj_[r.b] += g * val_[r.a];
        break;
      case Op::Div:
        adj_[r.a] += g / val_[r.b];
        adj_[r.b] -= g * val_[i] / val_[r.b];
        break;
      case Op::Neg:
        adj_[r.a] -= g;
        break;
      case Op::Exp:
        adj_[r.a] += g * val_[i];
        break;
      case Op::Log:
        adj_[r.a] += g / val_[r.a];
        break;
      case Op::Tanh:
        adj_[r.a] += g * (1.0 - val_[i] * val_[i]);
        break;
      case Op::Sqrt:
        adj_[r.a] += g * 0.5 / val_[i];
        break;
      case Op::AddC:
      case Op::Copy:
        adj_[r.a] += g;
        break;
      case Op::MulC:
        adj_[r.a] += g * r.aux;
        break;
      case Op::ClipAbs: {
        const double v = val_[r.a];
        if (v >= -r.aux && v <= r.aux) adj_[r.a] += g;
        break;
      }
      case Op::Dot: {
        const int n = static_cast<int>(r.aux);
        for (int k = 0; k < n; ++k) {
          adj_[r.a + k] += g * val_[r.b + k];
          adj_[r.b + k] += g * val_[r.a + k];
        }
        break;
      }
      case Op::DotG: {
        const int n = r.b;
        for (int k = 0; k < n; ++k) {
          const int32_t ia = args_[r.a + k];
          const int32_t ib = args_[r.a + n + k];
          adj_[ia] += g * val_[ib];
          adj_[ib] += g * val_[ia];
        }
        break;
      }
      case Op::Sum: {
        for (int k = 0; k < r.b; ++k) adj_[r.a + k] += g;
        break;
      }
    }
  }
}

}  // namespace bfpp::ad

#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace bfpp::ad {

class Tape;

// Handle to one tape node. Values are computed eagerly on push; backward()
// replays the records in reverse for exact adjoints.
struct Var {
  Tape* tape = nullptr;
  int32_t idx = -1;
  double value() const;
};

inline double value_of(Var v) { return v.value(); }

// Contiguous run of nodes (vector values live in consecutive slots).
struct Vec {
  Tape* tape = nullptr;
  int32_t first = 0;
  int32_t n = 0;
  Var operator[](int i) const { return Var{tape, first + i}; }
  int size() const { return n; }
};

class Tape {
 public:
  enum class Op : uint8_t {
    Leaf,
    Const,
    Add,
    Sub,
    Mul,
    Div,
    Neg,
    Exp,
    Log,
    Tanh,
    Sqrt,
    AddC,
    MulC,
    ClipAbs,
    Copy,
    Dot,   // a = first of lhs run, b = first of rhs run, aux = length
    DotG,  // a = offset into args_, b = length; args holds lhs then rhs indices
    Sum    // a = first of run, b = length
  };
  struct Rec {
    Op op;
    int32_t a;
    int32_t b;
    double aux;
  };
  struct Mark {
    size_t nodes;
    size_t args;
  };

  Var leaf(double v) { return push(Op::Leaf, -1, -1, 0.0, v); }
  Var constant(double v) { return push(Op::Const, -1, -1, 0.0, v); }
  Vec leaves(std::span<const double> v);
  Vec constants(std::span<const double> v);

  Var add(Var a, Var b) { return push(Op::Add, a.idx, b.idx, 0.0, val_[a.idx] + val_[b.idx]); }
  Var sub(Var a, Var b) { return push(Op::Sub, a.idx, b.idx, 0.0, val_[a.idx] - val_[b.idx]); }
  Var mul(Var a, Var b) { return push(Op::Mul, a.idx, b.idx, 0.0, val_[a.idx] * val_[b.idx]); }
  Var div(Var a, Var b) { return push(Op::Div, a.idx, b.idx, 0.0, val_[a.idx] / val_[b.idx]); }
  Var neg(Var a) { return push(Op::Neg, a.idx, -1, 0.0, -val_[a.idx]); }
  Var exp_(Var a) { return push(Op::Exp, a.idx, -1, 0.0, std::exp(val_[a.idx])); }
  Var log_(Var a) { return push(Op::Log, a.idx, -1, 0.0, std::log(val_[a.idx])); }
  Var tanh_(Var a) { return push(Op::Tanh, a.idx, -1, 0.0, std::tanh(val_[a.idx])); }
  Var sqrt_(Var a) { return push(Op::Sqrt, a.idx, -1, 0.0, std::sqrt(val_[a.idx])); }
  Var add_const(Var a, double c) { return push(Op::AddC, a.idx, -1, c, val_[a.idx] + c); }
  Var mul_const(Var a, double c) { return push(Op::MulC, a.idx, -1, c, val_[a.idx] * c); }
  Var copy(Var a) { return push(Op::Copy, a.idx, -1, 0.0, val_[a.idx]); }

  // Clamp to [-bound, bound]; subgradient 0 outside the closed interval.
  Var clip_abs(Var a, double bound) {
    double v = val_[a.idx];
    v = v > bound ? bound : (v < -bound ? -bound : v);
    return push(Op::ClipAbs, a.idx, -1, bound, v);
  }

  Var dot(Vec a, Vec b);
  Var dot_gather(std::span<const Var> a, std::span<const Var> b);
  Var sum(Vec x);
  Vec pack(std::span<const Var> xs);

  void backward(Var root);

  double grad(Var v) const { return adj_[v.idx]; }
  double grad_at(int32_t i) const { return adj_[i]; }
  double value_at(int32_t i) const { return val_[i]; }
  void set_value(int32_t i, double v) { val_[i] = v; }

  size_t num_nodes() const { return val_.size(); }
  Mark mark() const { return {val_.size(), args_.size()}; }
  void rewind(Mark m) {
    val_.resize(m.nodes);
    rec_.resize(m.nodes);
    args_.resize(m.args);
  }
  void clear() { rewind({0, 0}); }

 private:
  friend struct Var;
  Var push(Op op, int32_t a, int32_t b, double aux, double value) {
    rec_.push_back(Rec{op, a, b, aux});
    val_.push_back(value);
    return Var{this, static_cast<int32_t>(val_.size()) - 1};
  }

  std::vector<double> val_;
  std::vector<double> adj_;
  std::vector<Rec> rec_;
  std::vector<int32_t> args_;
};

inline double Var::value() const { return tape->value_at(idx); }

inline Var operator+(Var a, Var b) { return a.tape->add(a, b); }
inline Var operator-(Var a, Var b) { return a.tape->sub(a, b); }
inline Var operator*(Var a, Var b) { return a.tape->mul(a, b); }
inline Var operator/(Var a, Var b) { return a.tape->div(a, b); }
inline Var operator-(Var a) { return a.tape->neg(a); }
inline Var operator+(Var a, double c) { return a.tape->add_const(a, c); }
inline Var operator+(double c, Var a) { return a.tape->add_const(a, c); }
inline Var operator-(Var a, double c) { return a.tape->add_const(a, -c); }
inline Var operator-(double c, Var a) { return a.tape->add_const(a.tape->neg(a), c); }
inline Var operator*(Var a, double c) { return a.tape->mul_const(a, c); }
inline Var operator*(double c, Var a) { return a.tape->mul_const(a, c); }
inline Var operator/(Var a, double c) { return a.tape->mul_const(a, 1.0 / c); }
inline Var operator/(double c, Var a) { return a.tape->div(a.tape->constant(c), a); }
inline Var exp(Var a) { return a.tape->exp_(a); }
inline Var log(Var a) { return a.tape->log_(a); }
inline Var tanh(Var a) { return a.tape->tanh_(a); }
inline Var sqrt(Var a) { return a.tape->sqrt_(a); }

}  // namespace bfpp::ad

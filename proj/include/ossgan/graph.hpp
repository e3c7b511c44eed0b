#pragma once

// Reverse-mode autodiff on a flat tape of tensor ops. A Tape is built fresh
// for every training step: ops append nodes, backward() sweeps them in
// reverse creation order. Parameters are external (graph::Param) and receive
// accumulated gradients through leaf nodes bound with Tape::param().

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ossgan/kernels.hpp"
#include "ossgan/tensor.hpp"

namespace ossgan::graph {

struct Param {
    std::string name;
    Tensor value;
    Tensor grad;
    Tensor m;  // Adam first moment
    Tensor v;  // Adam second moment

    Param() = default;
    Param(std::string n, Tensor val)
        : name(std::move(n)),
          value(std::move(val)),
          grad(Tensor::zeros(value.shape())),
          m(Tensor::zeros(value.shape())),
          v(Tensor::zeros(value.shape())) {}

    void zero_grad() { grad.fill(0.0); }
};

class Tape;

struct Var {
    Tape* tape = nullptr;
    int32_t id = -1;

    const Tensor& value() const;
    const Tensor& grad() const;
    bool valid() const { return tape != nullptr && id >= 0; }
};

class Tape {
public:
    Tape() = default;
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    // leaves
    Var constant(Tensor t);
    Var param(Param& p);

    // elementwise / scalar
    Var add(Var a, Var b);
    Var sub(Var a, Var b);
    Var mul(Var a, Var b);
    Var scale(Var a, double s);
    Var add_scalar(Var a, double s);
    Var neg(Var a) { return scale(a, -1.0); }
    Var lrelu(Var x, double alpha);
    Var tanh(Var x);
    Var hinge(Var x);  // max(0, 1 + x), subgradient 0 at the kink
    Var log_clamped(Var x, double eps = 1e-12);

    // linear algebra
    Var matmul(Var a, Var b);           // [m,k] x [k,n]
    Var bias_add(Var x, Var b);         // [n,k] + [k]
    Var rows_dot(Var a, Var b);         // [n,k],[n,k] -> [n]
    Var concat_cols(Var a, Var b);      // [n,p],[n,q] -> [n,p+q]

    // conv net ops, all on [n,c,h,w]
    Var conv2d(Var x, Var w, Var b, int64_t stride, int64_t pad);
    Var upsample2(Var x);
    Var sum_pool(Var x);                // -> [n,c]
    Var shift2d(Var x, std::vector<int> dy, std::vector<int> dx);

    // rows and reductions
    Var softmax_rows(Var x);
    Var mean_vec(Var x);                // mean of all elements -> [1]
    Var sum_vec(Var x);                 // sum of all elements -> [1]
    // sum(x*mask)/count on a [n] vector; count == 0 yields a constant 0
    Var masked_mean(Var x, std::vector<double> mask, int64_t count);

    Var reshape(Var x, std::vector<int64_t> shape);
    Var stop_gradient(Var x);

    // seeds d(loss)/d(loss) = 1 and sweeps the tape in reverse; loss must be
    // a single element. Param gradients accumulate into their Param::grad.
    void backward(Var loss);

    size_t size() const { return nodes_.size(); }
    void clear();

    // node storage access, used by backward closures and Var
    const Tensor& val(int32_t id) const { return nodes_[id].value; }
    Tensor& grad_buf(int32_t id) { return nodes_[id].grad; }
    const Tensor& grad_of(int32_t id) const { return nodes_[id].grad; }

private:
    struct Node {
        Tensor value;
        Tensor grad;
        std::function<void(Tape&)> backward;
        Param* sink = nullptr;
    };

    Var push(Tensor value, std::function<void(Tape&)> backward,
             Param* sink = nullptr);

    std::vector<Node> nodes_;
};

}  // namespace ossgan::graph

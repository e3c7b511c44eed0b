#include "ossgan/graph.hpp"

#include <cmath>
#include <utility>

#include "ossgan/errors.hpp"

namespace ossgan::graph {

namespace {

void require(bool ok, const std::string& msg) {
    if (!ok) throw ValidationError(msg);
}

void require_same_tape(Var a, Var b) {
    require(a.valid() && b.valid() && a.tape == b.tape,
            "graph: operands must live on the same tape");
}

}  // namespace

const Tensor& Var::value() const { return tape->val(id); }
const Tensor& Var::grad() const { return tape->grad_of(id); }

Var Tape::push(Tensor value, std::function<void(Tape&)> backward, Param* sink) {
    Node n;
    n.grad = Tensor::zeros(value.shape());
    n.value = std::move(value);
    n.backward = std::move(backward);
    n.sink = sink;
    nodes_.push_back(std::move(n));
    return Var{this, static_cast<int32_t>(nodes_.size() - 1)};
}

void Tape::clear() { nodes_.clear(); }

Var Tape::constant(Tensor t) { return push(std::move(t), nullptr); }

Var Tape::param(Param& p) {
    Var out;
    out = push(p.value, nullptr, &p);
    const int32_t id = out.id;
    Param* pp = &p;
    nodes_[id].backward = [id, pp](Tape& t) {
        const Tensor& g = t.grad_of(id);
        auto& dst = pp->grad.vec();
        const auto& src = g.vec();
        for (size_t i = 0; i < src.size(); ++i) dst[i] += src[i];
    };
    return out;
}

Var Tape::add(Var a, Var b) {
    require_same_tape(a, b);
    require(a.value().same_shape(b.value()),
            "add: shape mismatch " + a.value().shape_str() + " vs " +
                b.value().shape_str());
    Tensor out = a.value();
    const auto& bv = b.value().vec();
    auto& ov = out.vec();
    for (size_t i = 0; i < ov.size(); ++i) ov[i] += bv[i];
    Var r = push(std::move(out), nullptr);
    const int32_t self = r.id, ia = a.id, ib = b.id;
    nodes_[self].backward = [self, ia, ib](Tape& t) {
        const auto& g = t.grad_of(self).vec();
        auto& ga = t.grad_buf(ia).vec();
        auto& gb = t.grad_buf(ib).vec();
        for (size_t i = 0; i < g.size(); ++i) {
            ga[i] += g[i];
            gb[i] += g[i];
        }
    };
    return r;
}

Var Tape::sub(Var a, Var b) {
    require_same_tape(a, b);
    require(a.value().same_shape(b.value()),
            "sub: shape mismatch " + a.value().shape_str() + " vs " +
                b.value().shape_str());
    Tensor out = a.value();
    const auto& bv = b.value().vec();
    auto& ov = out.vec();
    for (size_t i = 0; i < ov.size(); ++i) ov[i] -= bv[i];
    const int32_t ia = a.id, ib = b.id;
    Var r = push(std::move(out), nullptr);
    const int32_t self = r.id;
    nodes_[self].backward = [self, ia, ib](Tape& t) {
        const auto& g = t.grad_of(self).vec();
        auto& ga = t.grad_buf(ia).vec();
        auto& gb = t.grad_buf(ib).vec();
        for (size_t i = 0; i < g.size(); ++i) {
            ga[i] += g[i];
            gb[i] -= g[i];
        }
    };
    return r;
}

Var Tape::mul(Var a, Var b) {
    require_same_tape(a, b);
    require(a.value().same_shape(b.value()),
            "mul: shape mismatch " + a.value().shape_str() + " vs " +
                b.value().shape_str());
    Tensor out = a.value();
    const auto& bv = b.value().vec();
    auto& ov = out.vec();
    for (size_t i = 0; i < ov.size(); ++i) ov[i] *= bv[i];
    Var r = push(std::move(out), nullptr);
    const int32_t self = r.id, ia = a.id, ib = b.id;
    nodes_[self].backward = [self, ia, ib](Tape& t) {
        const auto& g = t.grad_of(self).vec();
        const auto& av = t.val(ia).vec();
        const auto& bv2 = t.val(ib).vec();
        auto& ga = t.grad_buf(ia).vec();
        auto& gb = t.grad_buf(ib).vec();
        for (size_t i = 0; i < g.size(); ++i) {
            ga[i] += g[i] * bv2[i];
            gb[i] += g[i] * av[i];
        }
    };
    return r;
}

Var Tape::scale(Var a, double s) {
    Tensor out = a.value();
    for (auto& x : out.vec()) x *= s;
    Var r = push(std::move(out), nullptr);
    const int32_t self = r.id, ia = a.id;
    nodes_[self].backward = [self, ia, s](Tape& t) {
        const auto& g = t.grad_of(self).vec();
        auto& ga = t.grad_buf(ia).vec();
        for (size_t i = 0; i < g.size(); ++i) ga[i] += s * g[i];
    };
    return r;
}

Var Tape::add_scalar(Var a, double s) {
    Tensor out = a.value();
    for (auto& x : out.vec()) x += s;
    Var r = push(std::move(out), nullptr);
    const int32_t self = r.id, ia = a.id;
    nodes_[self].backward = [self, ia](Tape& t) {
        const auto& g = t.grad_of(self).vec();
        auto& ga = t.grad_buf(ia).vec();
        for (size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
    };
    return r;
}

Var Tape::lrelu(Var x, double alpha) {
    Tensor out(x.value().shape());
    kernels::lrelu_fwd(x.value().data(), out.data(), out.numel(), alpha);
    Var r = push(std::move(out), nullptr);
    const int32_t self = r.id, ix = x.id;
    nodes_[self].backward = [self, ix, alpha](Tape& t) {
        kernels::lrelu_bwd(t.val(ix).data(), t.grad_of(self).data(),
                           t.grad_buf(ix).data(), t.val(ix).numel(), alpha);
    };
    return r;
}

Var Tape::tanh(Var x) {
    Tensor out(x.value().shape());
    kernels::tanh_fwd(x.value().data(), out.data(), out.numel());
    Var r = push(std::move(out), nullptr);
    const int32_t self = r.id, ix = x.id;
    nodes_[self].backward = [self, ix](Tape& t) {
        kernels::tanh_bwd(t.val(self).data(), t.grad_of(self).data(),
                          t.grad_buf(ix).data(), t.val(self).numel());
    };
    return r;
}

Var Tape::hinge(Var x) {
    Tensor out(x.value().shape());
    kernels::hinge_fwd(x.value().data(), out.data(), out.numel());
    Var r = push(std::move(out), nullptr);
    const int32_t self = r.id, ix = x.id;
    nodes_[self].backward = [self, ix](Tape& t) {
        kernels::hinge_bwd(t.val(ix).data(), t.grad_of(self).data(),
                           t.grad_buf(ix).data(), t.val(ix).numel());
    };
    return r;
}

Var Tape::log_clamped(Var x, double eps) {
    require(eps > 0.0, "log_clamped: eps must be positive");
    Tensor out = x.value();
    for (auto& v : out.vec()) v = std::log(v < eps ? eps : v);
    Var r = push(std::move(out), nullptr);
    const int32_t self = r.id, ix = x.id;
    nodes_[self].backward = [self, ix, eps](Tape& t) {
        const auto& g = t.grad_of(self).vec();
        const auto& xv = t.val(ix).vec();
        auto& gx = t.grad_buf(ix).vec();
        for (size_t i = 0; i < g.size(); ++i)
            if (xv[i] > eps) gx[i] += g[i] / xv[i];
    };
    return r;
}

Var Tape::matmul(Var a, Var b) {
    require_same_tape(a, b);
    const Tensor& av = a.value();
    const Tensor& bv = b.value();
    require(av.rank() == 2 && bv.rank() == 2 && av.dim(1) == bv.dim(0),
            "matmul: incompatible shapes " + av.shape_str() + " x " +
                bv.shape_str());
    const int64_t m = av.dim(0), k = av.dim(1), n = bv.dim(1);
    Tensor out({m, n});
    kernels::matmul_nn(av.data(), bv.data(), out.data(), m, n, k, false);
    Var r = push(std::move(out), nullptr);
    const int32_t self = r.id, ia = a.id, ib = b.id;
    nodes_[self].backward = [self, ia, ib, m, n, k](Tape& t) {
        const double* g = t.grad_of(self).data();
        kernels::matmul_nt(g, t.val(ib).data(), t.grad_buf(ia).data(),
                           m, k, n, true);
        kernels::matmul_tn(t.val(ia).data(), g, t.grad_buf(ib).data(),
                           k, n, m, true);
    };
    return r;
}

Var Tape::bias_add(Var x, Var b) {
    require_same_tape(x, b);
    const Tensor& xv = x.value();
    const Tensor& bv = b.value();
    require(xv.rank() == 2 && bv.rank() == 1 && xv.dim(1) == bv.dim(0),
            "bias_add: need [n,k] + [k], got " + xv.shape_str() + " + " +
                bv.shape_str());
    const int64_t n = xv.dim(0), k = xv.dim(1);
    Tensor out = xv;
    for (int64_t i = 0; i < n; ++i)
        for (int64_t j = 0; j < k; ++j) out[i * k + j] += bv[j];
    Var r = push(std::move(out), nullptr);
    const int32_t self = r.id, ix = x.id, ib = b.id;
    nodes_[self].backward = [self, ix, ib, n, k](Tape& t) {
        const auto& g = t.grad_of(self).vec();
        auto& gx = t.grad_buf(ix).vec();
        auto& gb = t.grad_buf(ib).vec();
        for (int64_t i = 0; i < n; ++i)
            for (int64_t j = 0; j < k; ++j) {
                gx[i * k + j] += g[i * k + j];
                gb[j] += g[i * k + j];
            }
    };
    return r;
}

Var Tape::rows_dot(Var a, Var b) {
    require_same_tape(a, b);
    const Tensor& av = a.value();
    require(av.rank() == 2 && av.same_shape(b.value()),
            "rows_dot: need matching [n,k] operands, got " + av.shape_str() +
                " and " + b.value().shape_str());
    const int64_t n = av.dim(0), k = av.dim(1);
    Tensor out({n});
    kernels::rows_dot_fwd(av.data(), b.value().data(), out.data(), n, k);
    Var r = push(std::move(out), nullptr);
    const int32_t self = r.id, ia = a.id, ib = b.id;
    nodes_[self].backward = [self, ia, ib, n, k](Tape& t) {
        const auto& g = t.grad_of(self).vec();
        const auto& avv = t.val(ia).vec();
        const auto& bvv = t.val(ib).vec();
        auto& ga = t.grad_buf(ia).vec();
        auto& gb = t.grad_buf(ib).vec();
        for (int64_t i = 0; i < n; ++i)
            for (int64_t j = 0; j < k; ++j) {
                ga[i * k + j] += g[i] * bvv[i * k + j];
                gb[i * k + j] += g[i] * avv[i * k + j];
            }
    };
    return r;
}

Var Tape::concat_cols(Var a, Var b) {
    require_same_tape(a, b);
    const Tensor& av = a.value();
    const Tensor& bv = b.value();
    require(av.rank() == 2 && bv.rank() == 2 && av.dim(0) == bv.dim(0),
            "concat_cols: row counts differ, " + av.shape_str() + " vs " +
                bv.shape_str());
    const int64_t n = av.dim(0), p = av.dim(1), q = bv.dim(1);
    Tensor out({n, p + q});
    for (int64_t i = 0; i < n; ++i) {
        for (int64_t j = 0; j < p; ++j) out[i * (p + q) + j] = av[i * p + j];
        for (int64_t j = 0; j < q; ++j) out[i * (p + q) + p + j] = bv[i * q + j];
    }
    Var r = push(std::move(out), nullptr);
    const int32_t self = r.id, ia = a.id, ib = b.id;
    nodes_[self].backward = [self, ia, ib, n, p, q](Tape& t) {
        const auto& g = t.grad_of(self).vec();
        auto& ga = t.grad_buf(ia).vec();
        auto& gb = t.grad_buf(ib).vec();
        for (int64_t i = 0; i < n; ++i) {
            for (int64_t j = 0; j < p; ++j)
                ga[i * p + j] += g[i * (p + q) + j];
            for (int64_t j = 0; j < q; ++j)
                gb[i * q + j] += g[i * (p + q) + p + j];
        }
    };
    return r;
}

Var Tape::conv2d(Var x, Var w, Var b, int64_t stride, int64_t pad) {
    require_same_tape(x, w);
    require_same_tape(x, b);
    const Tensor& xv = x.value();
    const Tensor& wv = w.value();
    const Tensor& bv = b.value();
    require(xv.rank() == 4 && wv.rank() == 4,
            "conv2d: need [n,ci,h,w] input and [co,ci,kh,kw] weight, got " +
                xv.shape_str() + " and " + wv.shape_str());
    require(xv.dim(1) == wv.dim(1), "conv2d: channel mismatch");
    require(bv.rank() == 1 && bv.dim(0) == wv.dim(0),
            "conv2d: bias must be [co]");
    require(stride >= 1 && pad >= 0, "conv2d: bad stride/pad");
    kernels::Conv2dDims d{xv.dim(0), xv.dim(1), xv.dim(2), xv.dim(3),
                          wv.dim(0), wv.dim(2), wv.dim(3), stride, pad};
    require(d.ho() >= 1 && d.wo() >= 1, "conv2d: empty output");
    Tensor out({d.n, d.co, d.ho(), d.wo()});
    kernels::conv2d_fwd(xv.data(), wv.data(), bv.data(), out.data(), d);
    Var r = push(std::move(out), nullptr);
    const int32_t self = r.id, ix = x.id, iw = w.id, ib = b.id;
    nodes_[self].backward = [self, ix, iw, ib, d](Tape& t) {
        const double* g = t.grad_of(self).data();
        kernels::conv2d_bwd_input(g, t.val(iw).data(), t.grad_buf(ix).data(), d);
        kernels::conv2d_bwd_weight(t.val(ix).data(), g, t.grad_buf(iw).data(), d);
        kernels::conv2d_bwd_bias(g, t.grad_buf(ib).data(), d);
    };
    return r;
}

Var Tape::upsample2(Var x) {
    const Tensor& xv = x.value();
    require(xv.rank() == 4, "upsample2: need [n,c,h,w], got " + xv.shape_str());
    const int64_t n = xv.dim(0), c = xv.dim(1), h = xv.dim(2), w = xv.dim(3);
    Tensor out({n, c, 2 * h, 2 * w});
    kernels::upsample2_fwd(xv.data(), out.data(), n, c, h, w);
    Var r = push(std::move(out), nullptr);
    const int32_t self = r.id, ix = x.id;
    nodes_[self].backward = [self, ix, n, c, h, w](Tape& t) {
        kernels::upsample2_bwd(t.grad_of(self).data(), t.grad_buf(ix).data(),
                               n, c, h, w);
    };
    return r;
}

Var Tape::sum_pool(Var x) {
    const Tensor& xv = x.value();
    require(xv.rank() == 4, "sum_pool: need [n,c,h,w], got " + xv.shape_str());
    const int64_t n = xv.dim(0), c = xv.dim(1), hw = xv.dim(2) * xv.dim(3);
    Tensor out({n, c});
    kernels::sum_pool_fwd(xv.data(), out.data(), n, c, hw);
    Var r = push(std::move(out), nullptr);
    const int32_t self = r.id, ix = x.id;
    nodes_[self].backward = [self, ix, n, c, hw](Tape& t) {
        kernels::sum_pool_bwd(t.grad_of(self).data(), t.grad_buf(ix).data(),
                              n, c, hw);
    };
    return r;
}

Var Tape::shift2d(Var x, std::vector<int> dy, std::vector<int> dx) {
    const Tensor& xv = x.value();
    require(xv.rank() == 4, "shift2d: need [n,c,h,w], got " + xv.shape_str());
    const int64_t n = xv.dim(0), c = xv.dim(1), h = xv.dim(2), w = xv.dim(3);
    require(static_cast<int64_t>(dy.size()) == n &&
                static_cast<int64_t>(dx.size()) == n,
            "shift2d: need one (dy,dx) per sample");
    Tensor out(xv.shape());
    kernels::shift2d_fwd(xv.data(), out.data(), dy.data(), dx.data(), n, c, h, w);
    Var r = push(std::move(out), nullptr);
    const int32_t self = r.id, ix = x.id;
    nodes_[self].backward = [self, ix, n, c, h, w, dy = std::move(dy),
                             dx = std::move(dx)](Tape& t) {
        kernels::shift2d_bwd(t.grad_of(self).data(), t.grad_buf(ix).data(),
                             dy.data(), dx.data(), n, c, h, w);
    };
    return r;
}

Var Tape::softmax_rows(Var x) {
    const Tensor& xv = x.value();
    require(xv.rank() == 2, "softmax_rows: need [n,k], got " + xv.shape_str());
    const int64_t n = xv.dim(0), k = xv.dim(1);
    Tensor out(xv.shape());
    kernels::softmax_rows_fwd(xv.data(), out.data(), n, k);
    Var r = push(std::move(out), nullptr);
    const int32_t self = r.id, ix = x.id;
    nodes_[self].backward = [self, ix, n, k](Tape& t) {
        kernels::softmax_rows_bwd(t.val(self).data(), t.grad_of(self).data(),
                                  t.grad_buf(ix).data(), n, k);
    };
    return r;
}

Var Tape::mean_vec(Var x) {
    const Tensor& xv = x.value();
    require(xv.numel() > 0, "mean_vec: empty input");
    const int64_t n = xv.numel();
    double s = 0.0;
    for (double v : xv.vec()) s += v;
    Var r = push(Tensor::scalar(s / static_cast<double>(n)), nullptr);
    const int32_t self = r.id, ix = x.id;
    nodes_[self].backward = [self, ix, n](Tape& t) {
        const double g = t.grad_of(self)[0] / static_cast<double>(n);
        for (auto& v : t.grad_buf(ix).vec()) v += g;
    };
    return r;
}

Var Tape::sum_vec(Var x) {
    double s = 0.0;
    for (double v : x.value().vec()) s += v;
    Var r = push(Tensor::scalar(s), nullptr);
    const int32_t self = r.id, ix = x.id;
    nodes_[self].backward = [self, ix](Tape& t) {
        const double g = t.grad_of(self)[0];
        for (auto& v : t.grad_buf(ix).vec()) v += g;
    };
    return r;
}

Var Tape::masked_mean(Var x, std::vector<double> mask, int64_t count) {
    const Tensor& xv = x.value();
    require(xv.rank() == 1, "masked_mean: need a [n] vector, got " +
                                xv.shape_str());
    require(static_cast<int64_t>(mask.size()) == xv.dim(0),
            "masked_mean: mask length mismatch");
    if (count <= 0) return constant(Tensor::scalar(0.0));
    double s = 0.0;
    for (size_t i = 0; i < mask.size(); ++i) s += xv[int64_t(i)] * mask[i];
    Var r = push(Tensor::scalar(s / static_cast<double>(count)), nullptr);
    const int32_t self = r.id, ix = x.id;
    nodes_[self].backward = [self, ix, count,
                             mask = std::move(mask)](Tape& t) {
        const double g = t.grad_of(self)[0] / static_cast<double>(count);
        auto& gx = t.grad_buf(ix).vec();
        for (size_t i = 0; i < mask.size(); ++i) gx[i] += g * mask[i];
    };
    return r;
}

Var Tape::reshape(Var x, std::vector<int64_t> shape) {
    Tensor out = x.value().reshaped(std::move(shape));
    Var r = push(std::move(out), nullptr);
    const int32_t self = r.id, ix = x.id;
    nodes_[self].backward = [self, ix](Tape& t) {
        const auto& g = t.grad_of(self).vec();
        auto& gx = t.grad_buf(ix).vec();
        for (size_t i = 0; i < g.size(); ++i) gx[i] += g[i];
    };
    return r;
}

Var Tape::stop_gradient(Var x) { return constant(x.value()); }

void Tape::backward(Var loss) {
    require(loss.valid() && loss.tape == this,
            "backward: loss is not on this tape");
    require(loss.value().numel() == 1, "backward: loss must be scalar");
    grad_buf(loss.id)[0] += 1.0;
    for (int32_t i = loss.id; i >= 0; --i)
        if (nodes_[i].backward) nodes_[i].backward(*this);
}

}  // namespace ossgan::graph

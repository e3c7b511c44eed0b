#pragma once

// Numeric kernels behind the tensor graph, in two interchangeable flavours:
//
//   kernels::ref  — serial reference implementations, the correctness anchor
//   kernels::par  — OpenMP versions parallelized over independent output
//                   elements; every per-element reduction runs in the same
//                   order as ref, so outputs are bitwise identical
//
// The unqualified kernels:: entry points dispatch on the configured thread
// count (<= 1 selects ref). Gradient kernels accumulate (+=) into their
// output buffer; callers zero it first.

#include <cstdint>

namespace ossgan::kernels {

void set_threads(int n);  // clamps to >= 1
int threads();

struct Conv2dDims {
    int64_t n, ci, h, w;       // input
    int64_t co, kh, kw;        // filters
    int64_t stride, pad;
    int64_t ho() const { return (h + 2 * pad - kh) / stride + 1; }
    int64_t wo() const { return (w + 2 * pad - kw) / stride + 1; }
};

namespace ref {

// C[m,n] = A[m,k] * B[k,n]          (accumulate: +=)
void matmul_nn(const double* a, const double* b, double* c,
               int64_t m, int64_t n, int64_t k, bool accumulate);
// C[m,n] = A[m,k] * B[n,k]^T
void matmul_nt(const double* a, const double* b, double* c,
               int64_t m, int64_t n, int64_t k, bool accumulate);
// C[m,n] = A[k,m]^T * B[k,n]
void matmul_tn(const double* a, const double* b, double* c,
               int64_t m, int64_t n, int64_t k, bool accumulate);

void conv2d_fwd(const double* x, const double* w, const double* bias,
                double* out, const Conv2dDims& d);
void conv2d_bwd_input(const double* gout, const double* w, double* gx,
                      const Conv2dDims& d);
void conv2d_bwd_weight(const double* x, const double* gout, double* gw,
                       const Conv2dDims& d);
void conv2d_bwd_bias(const double* gout, double* gb, const Conv2dDims& d);

// nearest-neighbour 2x upsampling on [n,c,h,w]
void upsample2_fwd(const double* x, double* out, int64_t n, int64_t c,
                   int64_t h, int64_t w);
void upsample2_bwd(const double* gout, double* gx, int64_t n, int64_t c,
                   int64_t h, int64_t w);

void sum_pool_fwd(const double* x, double* out, int64_t n, int64_t c, int64_t hw);
void sum_pool_bwd(const double* gout, double* gx, int64_t n, int64_t c, int64_t hw);

void lrelu_fwd(const double* x, double* out, int64_t size, double alpha);
void lrelu_bwd(const double* x, const double* gout, double* gx, int64_t size,
               double alpha);
void tanh_fwd(const double* x, double* out, int64_t size);
void tanh_bwd(const double* y, const double* gout, double* gx, int64_t size);
// hinge(t) = max(0, 1 + t); subgradient 0 at the kink
void hinge_fwd(const double* x, double* out, int64_t size);
void hinge_bwd(const double* x, const double* gout, double* gx, int64_t size);

void softmax_rows_fwd(const double* x, double* out, int64_t n, int64_t k);
/// gx from softmax output y: gx = y * (g - <g, y>)  per row
void softmax_rows_bwd(const double* y, const double* gout, double* gx,
                      int64_t n, int64_t k);

void rows_dot_fwd(const double* a, const double* b, double* out, int64_t n, int64_t k);

// per-sample integer shift with zero fill on [n,c,h,w]
void shift2d_fwd(const double* x, double* out, const int* dy, const int* dx,
                 int64_t n, int64_t c, int64_t h, int64_t w);
void shift2d_bwd(const double* gout, double* gx, const int* dy, const int* dx,
                 int64_t n, int64_t c, int64_t h, int64_t w);

}  // namespace ref

namespace par {

void matmul_nn(const double* a, const double* b, double* c,
               int64_t m, int64_t n, int64_t k, bool accumulate);
void matmul_nt(const double* a, const double* b, double* c,
               int64_t m, int64_t n, int64_t k, bool accumulate);
void matmul_tn(const double* a, const double* b, double* c,
               int64_t m, int64_t n, int64_t k, bool accumulate);

void conv2d_fwd(const double* x, const double* w, const double* bias,
                double* out, const Conv2dDims& d);
void conv2d_bwd_input(const double* gout, const double* w, double* gx,
                      const Conv2dDims& d);
void conv2d_bwd_weight(const double* x, const double* gout, double* gw,
                       const Conv2dDims& d);
void conv2d_bwd_bias(const double* gout, double* gb, const Conv2dDims& d);

void upsample2_fwd(const double* x, double* out, int64_t n, int64_t c,
                   int64_t h, int64_t w);
void upsample2_bwd(const double* gout, double* gx, int64_t n, int64_t c,
                   int64_t h, int64_t w);

void sum_pool_fwd(const double* x, double* out, int64_t n, int64_t c, int64_t hw);
void sum_pool_bwd(const double* gout, double* gx, int64_t n, int64_t c, int64_t hw);

void lrelu_fwd(const double* x, double* out, int64_t size, double alpha);
void lrelu_bwd(const double* x, const double* gout, double* gx, int64_t size,
               double alpha);
void tanh_fwd(const double* x, double* out, int64_t size);
void tanh_bwd(const double* y, const double* gout, double* gx, int64_t size);
void hinge_fwd(const double* x, double* out, int64_t size);
void hinge_bwd(const double* x, const double* gout, double* gx, int64_t size);

void softmax_rows_fwd(const double* x, double* out, int64_t n, int64_t k);
void softmax_rows_bwd(const double* y, const double* gout, double* gx,
                      int64_t n, int64_t k);

void rows_dot_fwd(const double* a, const double* b, double* out, int64_t n, int64_t k);

void shift2d_fwd(const double* x, double* out, const int* dy, const int* dx,
                 int64_t n, int64_t c, int64_t h, int64_t w);
void shift2d_bwd(const double* gout, double* gx, const int* dy, const int* dx,
                 int64_t n, int64_t c, int64_t h, int64_t w);

}  // namespace par

// dispatching entry points
void matmul_nn(const double* a, const double* b, double* c,
               int64_t m, int64_t n, int64_t k, bool accumulate);
void matmul_nt(const double* a, const double* b, double* c,
               int64_t m, int64_t n, int64_t k, bool accumulate);
void matmul_tn(const double* a, const double* b, double* c,
               int64_t m, int64_t n, int64_t k, bool accumulate);
void conv2d_fwd(const double* x, const double* w, const double* bias,
                double* out, const Conv2dDims& d);
void conv2d_bwd_input(const double* gout, const double* w, double* gx,
                      const Conv2dDims& d);
void conv2d_bwd_weight(const double* x, const double* gout, double* gw,
                       const Conv2dDims& d);
void conv2d_bwd_bias(const double* gout, double* gb, const Conv2dDims& d);
void upsample2_fwd(const double* x, double* out, int64_t n, int64_t c,
                   int64_t h, int64_t w);
void upsample2_bwd(const double* gout, double* gx, int64_t n, int64_t c,
                   int64_t h, int64_t w);
void sum_pool_fwd(const double* x, double* out, int64_t n, int64_t c, int64_t hw);
void sum_pool_bwd(const double* gout, double* gx, int64_t n, int64_t c, int64_t hw);
void lrelu_fwd(const double* x, double* out, int64_t size, double alpha);
void lrelu_bwd(const double* x, const double* gout, double* gx, int64_t size,
               double alpha);
void tanh_fwd(const double* x, double* out, int64_t size);
void tanh_bwd(const double* y, const double* gout, double* gx, int64_t size);
void hinge_fwd(const double* x, double* out, int64_t size);
void hinge_bwd(const double* x, const double* gout, double* gx, int64_t size);
void softmax_rows_fwd(const double* x, double* out, int64_t n, int64_t k);
void softmax_rows_bwd(const double* y, const double* gout, double* gx,
                      int64_t n, int64_t k);
void rows_dot_fwd(const double* a, const double* b, double* out, int64_t n, int64_t k);
void shift2d_fwd(const double* x, double* out, const int* dy, const int* dx,
                 int64_t n, int64_t c, int64_t h, int64_t w);
void shift2d_bwd(const double* gout, double* gx, const int* dy, const int* dx,
                 int64_t n, int64_t c, int64_t h, int64_t w);

}  // namespace ossgan::kernels

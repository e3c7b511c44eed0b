#include "ossgan/kernels.hpp"

#include <algorithm>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ossgan::kernels {

namespace {
int g_threads = 1;
}

void set_threads(int n) {
    g_threads = std::max(1, n);
#ifdef _OPENMP
    omp_set_num_threads(g_threads);
#endif
}

int threads() { return g_threads; }

// ---------------------------------------------------------------------------
// serial reference
// ---------------------------------------------------------------------------

namespace ref {

void matmul_nn(const double* a, const double* b, double* c,
               int64_t m, int64_t n, int64_t k, bool accumulate) {
    for (int64_t i = 0; i < m; ++i) {
        double* crow = c + i * n;
        if (!accumulate)
            for (int64_t j = 0; j < n; ++j) crow[j] = 0.0;
        const double* arow = a + i * k;
        for (int64_t p = 0; p < k; ++p) {
            const double av = arow[p];
            const double* brow = b + p * n;
            for (int64_t j = 0; j < n; ++j) crow[j] += av * brow[j];
        }
    }
}

void matmul_nt(const double* a, const double* b, double* c,
               int64_t m, int64_t n, int64_t k, bool accumulate) {
    for (int64_t i = 0; i < m; ++i) {
        const double* arow = a + i * k;
        double* crow = c + i * n;
        for (int64_t j = 0; j < n; ++j) {
            const double* brow = b + j * k;
            double acc = 0.0;
            for (int64_t p = 0; p < k; ++p) acc += arow[p] * brow[p];
            if (accumulate)
                crow[j] += acc;
            else
                crow[j] = acc;
        }
    }
}

void matmul_tn(const double* a, const double* b, double* c,
               int64_t m, int64_t n, int64_t k, bool accumulate) {
    // a is [k,m], b is [k,n]; row i of C gathers a[:,i]
    for (int64_t i = 0; i < m; ++i) {
        double* crow = c + i * n;
        if (!accumulate)
            for (int64_t j = 0; j < n; ++j) crow[j] = 0.0;
        for (int64_t p = 0; p < k; ++p) {
            const double av = a[p * m + i];
            const double* brow = b + p * n;
            for (int64_t j = 0; j < n; ++j) crow[j] += av * brow[j];
        }
    }
}

namespace detail {

// one output pixel of the convolution; reduction order (ci, ky, kx) is fixed
inline double conv_pixel(const double* x, const double* w, const Conv2dDims& d,
                         int64_t img, int64_t co, int64_t oy, int64_t ox) {
    double acc = 0.0;
    const int64_t y0 = oy * d.stride - d.pad;
    const int64_t x0 = ox * d.stride - d.pad;
    for (int64_t ci = 0; ci < d.ci; ++ci) {
        const double* xc = x + ((img * d.ci + ci) * d.h) * d.w;
        const double* wc = w + ((co * d.ci + ci) * d.kh) * d.kw;
        for (int64_t ky = 0; ky < d.kh; ++ky) {
            const int64_t yy = y0 + ky;
            if (yy < 0 || yy >= d.h) continue;
            const double* xrow = xc + yy * d.w;
            const double* wrow = wc + ky * d.kw;
            for (int64_t kx = 0; kx < d.kw; ++kx) {
                const int64_t xx = x0 + kx;
                if (xx < 0 || xx >= d.w) continue;
                acc += xrow[xx] * wrow[kx];
            }
        }
    }
    return acc;
}

inline double conv_grad_input_pixel(const double* gout, const double* w,
                                    const Conv2dDims& d, int64_t img,
                                    int64_t ci, int64_t y, int64_t x) {
    const int64_t ho = d.ho(), wo = d.wo();
    double acc = 0.0;
    for (int64_t co = 0; co < d.co; ++co) {
        const double* gc = gout + ((img * d.co + co) * ho) * wo;
        const double* wc = w + ((co * d.ci + ci) * d.kh) * d.kw;
        for (int64_t ky = 0; ky < d.kh; ++ky) {
            const int64_t num_y = y + d.pad - ky;
            if (num_y < 0 || num_y % d.stride != 0) continue;
            const int64_t oy = num_y / d.stride;
            if (oy >= ho) continue;
            for (int64_t kx = 0; kx < d.kw; ++kx) {
                const int64_t num_x = x + d.pad - kx;
                if (num_x < 0 || num_x % d.stride != 0) continue;
                const int64_t ox = num_x / d.stride;
                if (ox >= wo) continue;
                acc += wc[ky * d.kw + kx] * gc[oy * wo + ox];
            }
        }
    }
    return acc;
}

inline double conv_grad_weight_elem(const double* x, const double* gout,
                                    const Conv2dDims& d, int64_t co, int64_t ci,
                                    int64_t ky, int64_t kx) {
    const int64_t ho = d.ho(), wo = d.wo();
    double acc = 0.0;
    for (int64_t img = 0; img < d.n; ++img) {
        const double* xc = x + ((img * d.ci + ci) * d.h) * d.w;
        const double* gc = gout + ((img * d.co + co) * ho) * wo;
        for (int64_t oy = 0; oy < ho; ++oy) {
            const int64_t yy = oy * d.stride - d.pad + ky;
            if (yy < 0 || yy >= d.h) continue;
            const double* xrow = xc + yy * d.w;
            const double* grow = gc + oy * wo;
            for (int64_t ox = 0; ox < wo; ++ox) {
                const int64_t xx = ox * d.stride - d.pad + kx;
                if (xx < 0 || xx >= d.w) continue;
                acc += xrow[xx] * grow[ox];
            }
        }
    }
    return acc;
}

}  // namespace detail

void conv2d_fwd(const double* x, const double* w, const double* bias,
                double* out, const Conv2dDims& d) {
    const int64_t ho = d.ho(), wo = d.wo();
    for (int64_t img = 0; img < d.n; ++img)
        for (int64_t co = 0; co < d.co; ++co) {
            const double b = bias ? bias[co] : 0.0;
            double* orow = out + ((img * d.co + co) * ho) * wo;
            for (int64_t oy = 0; oy < ho; ++oy)
                for (int64_t ox = 0; ox < wo; ++ox)
                    orow[oy * wo + ox] =
                        b + detail::conv_pixel(x, w, d, img, co, oy, ox);
        }
}

void conv2d_bwd_input(const double* gout, const double* w, double* gx,
                      const Conv2dDims& d) {
    for (int64_t img = 0; img < d.n; ++img)
        for (int64_t ci = 0; ci < d.ci; ++ci) {
            double* gc = gx + ((img * d.ci + ci) * d.h) * d.w;
            for (int64_t y = 0; y < d.h; ++y)
                for (int64_t x = 0; x < d.w; ++x)
                    gc[y * d.w + x] +=
                        detail::conv_grad_input_pixel(gout, w, d, img, ci, y, x);
        }
}

void conv2d_bwd_weight(const double* x, const double* gout, double* gw,
                       const Conv2dDims& d) {
    for (int64_t co = 0; co < d.co; ++co)
        for (int64_t ci = 0; ci < d.ci; ++ci)
            for (int64_t ky = 0; ky < d.kh; ++ky)
                for (int64_t kx = 0; kx < d.kw; ++kx)
                    gw[((co * d.ci + ci) * d.kh + ky) * d.kw + kx] +=
                        detail::conv_grad_weight_elem(x, gout, d, co, ci, ky, kx);
}

void conv2d_bwd_bias(const double* gout, double* gb, const Conv2dDims& d) {
    const int64_t hw = d.ho() * d.wo();
    for (int64_t co = 0; co < d.co; ++co) {
        double acc = 0.0;
        for (int64_t img = 0; img < d.n; ++img) {
            const double* gc = gout + (img * d.co + co) * hw;
            for (int64_t i = 0; i < hw; ++i) acc += gc[i];
        }
        gb[co] += acc;
    }
}

void upsample2_fwd(const double* x, double* out, int64_t n, int64_t c,
                   int64_t h, int64_t w) {
    const int64_t planes = n * c;
    for (int64_t p = 0; p < planes; ++p) {
        const double* xi = x + p * h * w;
        double* oi = out + p * 4 * h * w;
        for (int64_t y = 0; y < 2 * h; ++y)
            for (int64_t xx = 0; xx < 2 * w; ++xx)
                oi[y * 2 * w + xx] = xi[(y / 2) * w + (xx / 2)];
    }
}

void upsample2_bwd(const double* gout, double* gx, int64_t n, int64_t c,
                   int64_t h, int64_t w) {
    const int64_t planes = n * c;
    for (int64_t p = 0; p < planes; ++p) {
        const double* gi = gout + p * 4 * h * w;
        double* go = gx + p * h * w;
        for (int64_t y = 0; y < h; ++y)
            for (int64_t xx = 0; xx < w; ++xx)
                go[y * w + xx] += gi[(2 * y) * 2 * w + 2 * xx] +
                                  gi[(2 * y) * 2 * w + 2 * xx + 1] +
                                  gi[(2 * y + 1) * 2 * w + 2 * xx] +
                                  gi[(2 * y + 1) * 2 * w + 2 * xx + 1];
    }
}

void sum_pool_fwd(const double* x, double* out, int64_t n, int64_t c, int64_t hw) {
    const int64_t planes = n * c;
    for (int64_t p = 0; p < planes; ++p) {
        const double* xi = x + p * hw;
        double acc = 0.0;
        for (int64_t i = 0; i < hw; ++i) acc += xi[i];
        out[p] = acc;
    }
}

void sum_pool_bwd(const double* gout, double* gx, int64_t n, int64_t c, int64_t hw) {
    const int64_t planes = n * c;
    for (int64_t p = 0; p < planes; ++p) {
        const double g = gout[p];
        double* gi = gx + p * hw;
        for (int64_t i = 0; i < hw; ++i) gi[i] += g;
    }
}

void lrelu_fwd(const double* x, double* out, int64_t size, double alpha) {
    for (int64_t i = 0; i < size; ++i) out[i] = x[i] > 0.0 ? x[i] : alpha * x[i];
}

void lrelu_bwd(const double* x, const double* gout, double* gx, int64_t size,
               double alpha) {
    for (int64_t i = 0; i < size; ++i)
        gx[i] += x[i] > 0.0 ? gout[i] : alpha * gout[i];
}

void tanh_fwd(const double* x, double* out, int64_t size) {
    for (int64_t i = 0; i < size; ++i) out[i] = std::tanh(x[i]);
}

void tanh_bwd(const double* y, const double* gout, double* gx, int64_t size) {
    for (int64_t i = 0; i < size; ++i) gx[i] += gout[i] * (1.0 - y[i] * y[i]);
}

void hinge_fwd(const double* x, double* out, int64_t size) {
    for (int64_t i = 0; i < size; ++i) out[i] = std::max(0.0, 1.0 + x[i]);
}

void hinge_bwd(const double* x, const double* gout, double* gx, int64_t size) {
    for (int64_t i = 0; i < size; ++i)
        if (1.0 + x[i] > 0.0) gx[i] += gout[i];
}

void softmax_rows_fwd(const double* x, double* out, int64_t n, int64_t k) {
    for (int64_t i = 0; i < n; ++i) {
        const double* xr = x + i * k;
        double* yr = out + i * k;
        double mx = xr[0];
        for (int64_t j = 1; j < k; ++j) mx = std::max(mx, xr[j]);
        double z = 0.0;
        for (int64_t j = 0; j < k; ++j) {
            yr[j] = std::exp(xr[j] - mx);
            z += yr[j];
        }
        const double inv = 1.0 / z;
        for (int64_t j = 0; j < k; ++j) yr[j] *= inv;
    }
}

void softmax_rows_bwd(const double* y, const double* gout, double* gx,
                      int64_t n, int64_t k) {
    for (int64_t i = 0; i < n; ++i) {
        const double* yr = y + i * k;
        const double* gr = gout + i * k;
        double dot = 0.0;
        for (int64_t j = 0; j < k; ++j) dot += gr[j] * yr[j];
        double* gxr = gx + i * k;
        for (int64_t j = 0; j < k; ++j) gxr[j] += yr[j] * (gr[j] - dot);
    }
}

void rows_dot_fwd(const double* a, const double* b, double* out, int64_t n, int64_t k) {
    for (int64_t i = 0; i < n; ++i) {
        const double* ar = a + i * k;
        const double* br = b + i * k;
        double acc = 0.0;
        for (int64_t j = 0; j < k; ++j) acc += ar[j] * br[j];
        out[i] = acc;
    }
}

void shift2d_fwd(const double* x, double* out, const int* dy, const int* dx,
                 int64_t n, int64_t c, int64_t h, int64_t w) {
    for (int64_t img = 0; img < n; ++img)
        for (int64_t ch = 0; ch < c; ++ch) {
            const double* xi = x + (img * c + ch) * h * w;
            double* oi = out + (img * c + ch) * h * w;
            for (int64_t y = 0; y < h; ++y)
                for (int64_t xx = 0; xx < w; ++xx) {
                    const int64_t sy = y - dy[img];
                    const int64_t sx = xx - dx[img];
                    oi[y * w + xx] = (sy >= 0 && sy < h && sx >= 0 && sx < w)
                                         ? xi[sy * w + sx]
                                         : 0.0;
                }
        }
}

void shift2d_bwd(const double* gout, double* gx, const int* dy, const int* dx,
                 int64_t n, int64_t c, int64_t h, int64_t w) {
    for (int64_t img = 0; img < n; ++img)
        for (int64_t ch = 0; ch < c; ++ch) {
            const double* gi = gout + (img * c + ch) * h * w;
            double* go = gx + (img * c + ch) * h * w;
            for (int64_t y = 0; y < h; ++y)
                for (int64_t xx = 0; xx < w; ++xx) {
                    const int64_t ty = y + dy[img];
                    const int64_t tx = xx + dx[img];
                    if (ty >= 0 && ty < h && tx >= 0 && tx < w)
                        go[y * w + xx] += gi[ty * w + tx];
                }
        }
}

}  // namespace ref

// ---------------------------------------------------------------------------
// OpenMP variants. Parallelism is always over disjoint output elements and
// the per-element accumulation order matches ref exactly, so par == ref
// bit for bit regardless of thread count.
// ---------------------------------------------------------------------------

namespace par {

void matmul_nn(const double* a, const double* b, double* c,
               int64_t m, int64_t n, int64_t k, bool accumulate) {
#pragma omp parallel for schedule(static)
    for (int64_t i = 0; i < m; ++i)
        ref::matmul_nn(a + i * k, b, c + i * n, 1, n, k, accumulate);
}

void matmul_nt(const double* a, const double* b, double* c,
               int64_t m, int64_t n, int64_t k, bool accumulate) {
#pragma omp parallel for schedule(static)
    for (int64_t i = 0; i < m; ++i)
        ref::matmul_nt(a + i * k, b, c + i * n, 1, n, k, accumulate);
}

void matmul_tn(const double* a, const double* b, double* c,
               int64_t m, int64_t n, int64_t k, bool accumulate) {
#pragma omp parallel for schedule(static)
    for (int64_t i = 0; i < m; ++i) {
        double* crow = c + i * n;
        if (!accumulate)
            for (int64_t j = 0; j < n; ++j) crow[j] = 0.0;
        for (int64_t p = 0; p < k; ++p) {
            const double av = a[p * m + i];
            const double* brow = b + p * n;
            for (int64_t j = 0; j < n; ++j) crow[j] += av * brow[j];
        }
    }
}

void conv2d_fwd(const double* x, const double* w, const double* bias,
                double* out, const Conv2dDims& d) {
    const int64_t ho = d.ho(), wo = d.wo();
    const int64_t total = d.n * d.co;
#pragma omp parallel for schedule(static)
    for (int64_t t = 0; t < total; ++t) {
        const int64_t img = t / d.co;
        const int64_t co = t % d.co;
        const double b = bias ? bias[co] : 0.0;
        double* orow = out + ((img * d.co + co) * ho) * wo;
        for (int64_t oy = 0; oy < ho; ++oy)
            for (int64_t ox = 0; ox < wo; ++ox)
                orow[oy * wo + ox] =
                    b + ref::detail::conv_pixel(x, w, d, img, co, oy, ox);
    }
}

void conv2d_bwd_input(const double* gout, const double* w, double* gx,
                      const Conv2dDims& d) {
    const int64_t total = d.n * d.ci;
#pragma omp parallel for schedule(static)
    for (int64_t t = 0; t < total; ++t) {
        const int64_t img = t / d.ci;
        const int64_t ci = t % d.ci;
        double* gc = gx + ((img * d.ci + ci) * d.h) * d.w;
        for (int64_t y = 0; y < d.h; ++y)
            for (int64_t x = 0; x < d.w; ++x)
                gc[y * d.w + x] +=
                    ref::detail::conv_grad_input_pixel(gout, w, d, img, ci, y, x);
    }
}

void conv2d_bwd_weight(const double* x, const double* gout, double* gw,
                       const Conv2dDims& d) {
    const int64_t total = d.co * d.ci;
#pragma omp parallel for schedule(static)
    for (int64_t t = 0; t < total; ++t) {
        const int64_t co = t / d.ci;
        const int64_t ci = t % d.ci;
        for (int64_t ky = 0; ky < d.kh; ++ky)
            for (int64_t kx = 0; kx < d.kw; ++kx)
                gw[((co * d.ci + ci) * d.kh + ky) * d.kw + kx] +=
                    ref::detail::conv_grad_weight_elem(x, gout, d, co, ci, ky, kx);
    }
}

void conv2d_bwd_bias(const double* gout, double* gb, const Conv2dDims& d) {
    const int64_t hw = d.ho() * d.wo();
#pragma omp parallel for schedule(static)
    for (int64_t co = 0; co < d.co; ++co) {
        double acc = 0.0;
        for (int64_t img = 0; img < d.n; ++img) {
            const double* gc = gout + (img * d.co + co) * hw;
            for (int64_t i = 0; i < hw; ++i) acc += gc[i];
        }
        gb[co] += acc;
    }
}

void upsample2_fwd(const double* x, double* out, int64_t n, int64_t c,
                   int64_t h, int64_t w) {
    const int64_t planes = n * c;
#pragma omp parallel for schedule(static)
    for (int64_t p = 0; p < planes; ++p)
        ref::upsample2_fwd(x + p * h * w, out + p * 4 * h * w, 1, 1, h, w);
}

void upsample2_bwd(const double* gout, double* gx, int64_t n, int64_t c,
                   int64_t h, int64_t w) {
    const int64_t planes = n * c;
#pragma omp parallel for schedule(static)
    for (int64_t p = 0; p < planes; ++p)
        ref::upsample2_bwd(gout + p * 4 * h * w, gx + p * h * w, 1, 1, h, w);
}

void sum_pool_fwd(const double* x, double* out, int64_t n, int64_t c, int64_t hw) {
    const int64_t planes = n * c;
#pragma omp parallel for schedule(static)
    for (int64_t p = 0; p < planes; ++p)
        ref::sum_pool_fwd(x + p * hw, out + p, 1, 1, hw);
}

void sum_pool_bwd(const double* gout, double* gx, int64_t n, int64_t c, int64_t hw) {
    const int64_t planes = n * c;
#pragma omp parallel for schedule(static)
    for (int64_t p = 0; p < planes; ++p)
        ref::sum_pool_bwd(gout + p, gx + p * hw, 1, 1, hw);
}

void lrelu_fwd(const double* x, double* out, int64_t size, double alpha) {
#pragma omp parallel for schedule(static)
    for (int64_t i = 0; i < size; ++i) out[i] = x[i] > 0.0 ? x[i] : alpha * x[i];
}

void lrelu_bwd(const double* x, const double* gout, double* gx, int64_t size,
               double alpha) {
#pragma omp parallel for schedule(static)
    for (int64_t i = 0; i < size; ++i)
        gx[i] += x[i] > 0.0 ? gout[i] : alpha * gout[i];
}

void tanh_fwd(const double* x, double* out, int64_t size) {
#pragma omp parallel for schedule(static)
    for (int64_t i = 0; i < size; ++i) out[i] = std::tanh(x[i]);
}

void tanh_bwd(const double* y, const double* gout, double* gx, int64_t size) {
#pragma omp parallel for schedule(static)
    for (int64_t i = 0; i < size; ++i) gx[i] += gout[i] * (1.0 - y[i] * y[i]);
}

void hinge_fwd(const double* x, double* out, int64_t size) {
#pragma omp parallel for schedule(static)
    for (int64_t i = 0; i < size; ++i) out[i] = std::max(0.0, 1.0 + x[i]);
}

void hinge_bwd(const double* x, const double* gout, double* gx, int64_t size) {
#pragma omp parallel for schedule(static)
    for (int64_t i = 0; i < size; ++i)
        if (1.0 + x[i] > 0.0) gx[i] += gout[i];
}

void softmax_rows_fwd(const double* x, double* out, int64_t n, int64_t k) {
#pragma omp parallel for schedule(static)
    for (int64_t i = 0; i < n; ++i)
        ref::softmax_rows_fwd(x + i * k, out + i * k, 1, k);
}

void softmax_rows_bwd(const double* y, const double* gout, double* gx,
                      int64_t n, int64_t k) {
#pragma omp parallel for schedule(static)
    for (int64_t i = 0; i < n; ++i)
        ref::softmax_rows_bwd(y + i * k, gout + i * k, gx + i * k, 1, k);
}

void rows_dot_fwd(const double* a, const double* b, double* out, int64_t n, int64_t k) {
#pragma omp parallel for schedule(static)
    for (int64_t i = 0; i < n; ++i)
        ref::rows_dot_fwd(a + i * k, b + i * k, out + i, 1, k);
}

void shift2d_fwd(const double* x, double* out, const int* dy, const int* dx,
                 int64_t n, int64_t c, int64_t h, int64_t w) {
#pragma omp parallel for schedule(static)
    for (int64_t img = 0; img < n; ++img)
        ref::shift2d_fwd(x + img * c * h * w, out + img * c * h * w,
                         dy + img, dx + img, 1, c, h, w);
}

void shift2d_bwd(const double* gout, double* gx, const int* dy, const int* dx,
                 int64_t n, int64_t c, int64_t h, int64_t w) {
#pragma omp parallel for schedule(static)
    for (int64_t img = 0; img < n; ++img)
        ref::shift2d_bwd(gout + img * c * h * w, gx + img * c * h * w,
                         dy + img, dx + img, 1, c, h, w);
}

}  // namespace par

// ---------------------------------------------------------------------------
// dispatch
// ---------------------------------------------------------------------------

#define OSSGAN_DISPATCH(fn, ...)      \
    do {                              \
        if (g_threads > 1)            \
            par::fn(__VA_ARGS__);     \
        else                          \
            ref::fn(__VA_ARGS__);     \
    } while (0)

void matmul_nn(const double* a, const double* b, double* c, int64_t m,
               int64_t n, int64_t k, bool acc) {
    OSSGAN_DISPATCH(matmul_nn, a, b, c, m, n, k, acc);
}
void matmul_nt(const double* a, const double* b, double* c, int64_t m,
               int64_t n, int64_t k, bool acc) {
    OSSGAN_DISPATCH(matmul_nt, a, b, c, m, n, k, acc);
}
void matmul_tn(const double* a, const double* b, double* c, int64_t m,
               int64_t n, int64_t k, bool acc) {
    OSSGAN_DISPATCH(matmul_tn, a, b, c, m, n, k, acc);
}
void conv2d_fwd(const double* x, const double* w, const double* bias,
                double* out, const Conv2dDims& d) {
    OSSGAN_DISPATCH(conv2d_fwd, x, w, bias, out, d);
}
void conv2d_bwd_input(const double* gout, const double* w, double* gx,
                      const Conv2dDims& d) {
    OSSGAN_DISPATCH(conv2d_bwd_input, gout, w, gx, d);
}
void conv2d_bwd_weight(const double* x, const double* gout, double* gw,
                       const Conv2dDims& d) {
    OSSGAN_DISPATCH(conv2d_bwd_weight, x, gout, gw, d);
}
void conv2d_bwd_bias(const double* gout, double* gb, const Conv2dDims& d) {
    OSSGAN_DISPATCH(conv2d_bwd_bias, gout, gb, d);
}
void upsample2_fwd(const double* x, double* out, int64_t n, int64_t c,
                   int64_t h, int64_t w) {
    OSSGAN_DISPATCH(upsample2_fwd, x, out, n, c, h, w);
}
void upsample2_bwd(const double* gout, double* gx, int64_t n, int64_t c,
                   int64_t h, int64_t w) {
    OSSGAN_DISPATCH(upsample2_bwd, gout, gx, n, c, h, w);
}
void sum_pool_fwd(const double* x, double* out, int64_t n, int64_t c, int64_t hw) {
    OSSGAN_DISPATCH(sum_pool_fwd, x, out, n, c, hw);
}
void sum_pool_bwd(const double* gout, double* gx, int64_t n, int64_t c, int64_t hw) {
    OSSGAN_DISPATCH(sum_pool_bwd, gout, gx, n, c, hw);
}
void lrelu_fwd(const double* x, double* out, int64_t size, double alpha) {
    OSSGAN_DISPATCH(lrelu_fwd, x, out, size, alpha);
}
void lrelu_bwd(const double* x, const double* gout, double* gx, int64_t size,
               double alpha) {
    OSSGAN_DISPATCH(lrelu_bwd, x, gout, gx, size, alpha);
}
void tanh_fwd(const double* x, double* out, int64_t size) {
    OSSGAN_DISPATCH(tanh_fwd, x, out, size);
}
void tanh_bwd(const double* y, const double* gout, double* gx, int64_t size) {
    OSSGAN_DISPATCH(tanh_bwd, y, gout, gx, size);
}
void hinge_fwd(const double* x, double* out, int64_t size) {
    OSSGAN_DISPATCH(hinge_fwd, x, out, size);
}
void hinge_bwd(const double* x, const double* gout, double* gx, int64_t size) {
    OSSGAN_DISPATCH(hinge_bwd, x, gout, gx, size);
}
void softmax_rows_fwd(const double* x, double* out, int64_t n, int64_t k) {
    OSSGAN_DISPATCH(softmax_rows_fwd, x, out, n, k);
}
void softmax_rows_bwd(const double* y, const double* gout, double* gx,
                      int64_t n, int64_t k) {
    OSSGAN_DISPATCH(softmax_rows_bwd, y, gout, gx, n, k);
}
void rows_dot_fwd(const double* a, const double* b, double* out, int64_t n,
                  int64_t k) {
    OSSGAN_DISPATCH(rows_dot_fwd, a, b, out, n, k);
}
void shift2d_fwd(const double* x, double* out, const int* dy, const int* dx,
                 int64_t n, int64_t c, int64_t h, int64_t w) {
    OSSGAN_DISPATCH(shift2d_fwd, x, out, dy, dx, n, c, h, w);
}
void shift2d_bwd(const double* gout, double* gx, const int* dy, const int* dx,
                 int64_t n, int64_t c, int64_t h, int64_t w) {
    OSSGAN_DISPATCH(shift2d_bwd, gout, gx, dy, dx, n, c, h, w);
}

#undef OSSGAN_DISPATCH

}  // namespace ossgan::kernels

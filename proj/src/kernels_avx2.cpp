#include "rdf/kernels.hpp"

#if defined(RDF_HAVE_AVX2_KERNELS)

#include <immintrin.h>

namespace rdf::kern::avx2 {

static inline float hsum8(__m256 v) {
    __m128 lo = _mm256_castps256_ps128(v);
    __m128 hi = _mm256_extractf128_ps(v, 1);
    __m128 s = _mm_add_ps(lo, hi);
    s = _mm_add_ps(s, _mm_movehl_ps(s, s));
    s = _mm_add_ss(s, _mm_movehdup_ps(s));
    return _mm_cvtss_f32(s);
}

float dot(const float* a, const float* b, int n) {
    __m256 acc0 = _mm256_setzero_ps();
    __m256 acc1 = _mm256_setzero_ps();
    int i = 0;
    for (; i + 16 <= n; i += 16) {
        acc0 = _mm256_fmadd_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i), acc0);
        acc1 = _mm256_fmadd_ps(_mm256_loadu_ps(a + i + 8), _mm256_loadu_ps(b + i + 8), acc1);
    }
    for (; i + 8 <= n; i += 8)
        acc0 = _mm256_fmadd_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i), acc0);
    float s = hsum8(_mm256_add_ps(acc0, acc1));
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

void matvec(const float* W, const float* x, const float* b, float* y, int rows, int cols) {
    for (int r = 0; r < rows; ++r) {
        float acc = dot(W + static_cast<std::size_t>(r) * cols, x, cols);
        y[r] = b ? acc + b[r] : acc;
    }
}

void axpy(float a, const float* x, float* y, int n) {
    __m256 va = _mm256_set1_ps(a);
    int i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256 vy = _mm256_loadu_ps(y + i);
        vy = _mm256_fmadd_ps(va, _mm256_loadu_ps(x + i), vy);
        _mm256_storeu_ps(y + i, vy);
    }
    for (; i < n; ++i) y[i] += a * x[i];
}

void matvec_t(const float* W, const float* dy, float* dx, int rows, int cols) {
    int c = 0;
    for (; c + 8 <= cols; c += 8) _mm256_storeu_ps(dx + c, _mm256_setzero_ps());
    for (; c < cols; ++c) dx[c] = 0.0f;
    for (int r = 0; r < rows; ++r)
        axpy(dy[r], W + static_cast<std::size_t>(r) * cols, dx, cols);
}

void ger(float* G, const float* dy, const float* x, int rows, int cols) {
    for (int r = 0; r < rows; ++r)
        axpy(dy[r], x, G + static_cast<std::size_t>(r) * cols, cols);
}

void relu(float* x, int n) {
    __m256 zero = _mm256_setzero_ps();
    int i = 0;
    for (; i + 8 <= n; i += 8)
        _mm256_storeu_ps(x + i, _mm256_max_ps(_mm256_loadu_ps(x + i), zero));
    for (; i < n; ++i)
        if (x[i] < 0.0f) x[i] = 0.0f;
}

void relu_backward(const float* pre, float* grad, int n) {
    __m256 zero = _mm256_setzero_ps();
    int i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256 mask = _mm256_cmp_ps(_mm256_loadu_ps(pre + i), zero, _CMP_GT_OQ);
        _mm256_storeu_ps(grad + i, _mm256_and_ps(_mm256_loadu_ps(grad + i), mask));
    }
    for (; i < n; ++i)
        if (pre[i] <= 0.0f) grad[i] = 0.0f;
}

}  // namespace rdf::kern::avx2

#endif  // RDF_HAVE_AVX2_KERNELS

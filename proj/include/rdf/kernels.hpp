#pragma once

#include <cstddef>

// Dense inner loops of the field MLP. Every kernel has a scalar reference
// implementation and an AVX2 variant selected once at startup; the two are
// equivalence-tested. Matrices are row-major.
namespace rdf::kern {

enum class Isa { Scalar, Avx2 };

Isa active_isa();
void force_isa(Isa isa);  // tests only; overrides the cpuid probe
const char* isa_name(Isa isa);

// y = W x + b with W of shape rows x cols (b may be null).
void matvec(const float* W, const float* x, const float* b, float* y, int rows, int cols);
// dx = W^T dy.
void matvec_t(const float* W, const float* dy, float* dx, int rows, int cols);
// G += dy x^T (gradient outer product).
void ger(float* G, const float* dy, const float* x, int rows, int cols);
void relu(float* x, int n);
// grad[i] = pre[i] > 0 ? grad[i] : 0.
void relu_backward(const float* pre, float* grad, int n);
float dot(const float* a, const float* b, int n);
void axpy(float a, const float* x, float* y, int n);

namespace scalar {
void matvec(const float* W, const float* x, const float* b, float* y, int rows, int cols);
void matvec_t(const float* W, const float* dy, float* dx, int rows, int cols);
void ger(float* G, const float* dy, const float* x, int rows, int cols);
void relu(float* x, int n);
void relu_backward(const float* pre, float* grad, int n);
float dot(const float* a, const float* b, int n);
void axpy(float a, const float* x, float* y, int n);

// Double-precision reference used by the gradient-check build of the MLP.
void matvec(const double* W, const double* x, const double* b, double* y, int rows, int cols);
void matvec_t(const double* W, const double* dy, double* dx, int rows, int cols);
void ger(double* G, const double* dy, const double* x, int rows, int cols);
void relu(double* x, int n);
void relu_backward(const double* pre, double* grad, int n);
double dot(const double* a, const double* b, int n);
void axpy(double a, const double* x, double* y, int n);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
#define RDF_HAVE_AVX2_KERNELS 1
namespace avx2 {
void matvec(const float* W, const float* x, const float* b, float* y, int rows, int cols);
void matvec_t(const float* W, const float* dy, float* dx, int rows, int cols);
void ger(float* G, const float* dy, const float* x, int rows, int cols);
void relu(float* x, int n);
void relu_backward(const float* pre, float* grad, int n);
float dot(const float* a, const float* b, int n);
void axpy(float a, const float* x, float* y, int n);
}  // namespace avx2
#endif

// Typed entry points so templated callers pick the dispatched float path and
// the scalar double path uniformly.
inline void matvec(const double* W, const double* x, const double* b, double* y, int rows, int cols) {
    scalar::matvec(W, x, b, y, rows, cols);
}
inline void matvec_t(const double* W, const double* dy, double* dx, int rows, int cols) {
    scalar::matvec_t(W, dy, dx, rows, cols);
}
inline void ger(double* G, const double* dy, const double* x, int rows, int cols) {
    scalar::ger(G, dy, x, rows, cols);
}
inline void relu(double* x, int n) { scalar::relu(x, n); }
inline void relu_backward(const double* pre, double* grad, int n) {
    scalar::relu_backward(pre, grad, n);
}
inline double dot(const double* a, const double* b, int n) { return scalar::dot(a, b, n); }
inline void axpy(double a, const double* x, double* y, int n) { scalar::axpy(a, x, y, n); }

}  // namespace rdf::kern

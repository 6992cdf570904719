#include "rdf/kernels.hpp"

namespace rdf::kern::scalar {

template <typename T>
static void matvec_impl(const T* W, const T* x, const T* b, T* y, int rows, int cols) {
    for (int r = 0; r < rows; ++r) {
        T acc = b ? b[r] : T(0);
        const T* row = W + static_cast<std::size_t>(r) * cols;
        for (int c = 0; c < cols; ++c) acc += row[c] * x[c];
        y[r] = acc;
    }
}

template <typename T>
static void matvec_t_impl(const T* W, const T* dy, T* dx, int rows, int cols) {
    for (int c = 0; c < cols; ++c) dx[c] = T(0);
    for (int r = 0; r < rows; ++r) {
        const T* row = W + static_cast<std::size_t>(r) * cols;
        T g = dy[r];
        for (int c = 0; c < cols; ++c) dx[c] += row[c] * g;
    }
}

template <typename T>
static void ger_impl(T* G, const T* dy, const T* x, int rows, int cols) {
    for (int r = 0; r < rows; ++r) {
        T* row = G + static_cast<std::size_t>(r) * cols;
        T g = dy[r];
        for (int c = 0; c < cols; ++c) row[c] += g * x[c];
    }
}

template <typename T>
static void relu_impl(T* x, int n) {
    for (int i = 0; i < n; ++i)
        if (x[i] < T(0)) x[i] = T(0);
}

template <typename T>
static void relu_backward_impl(const T* pre, T* grad, int n) {
    for (int i = 0; i < n; ++i)
        if (pre[i] <= T(0)) grad[i] = T(0);
}

template <typename T>
static T dot_impl(const T* a, const T* b, int n) {
    T acc(0);
    for (int i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

template <typename T>
static void axpy_impl(T a, const T* x, T* y, int n) {
    for (int i = 0; i < n; ++i) y[i] += a * x[i];
}

void matvec(const float* W, const float* x, const float* b, float* y, int rows, int cols) {
    matvec_impl(W, x, b, y, rows, cols);
}
void matvec_t(const float* W, const float* dy, float* dx, int rows, int cols) {
    matvec_t_impl(W, dy, dx, rows, cols);
}
void ger(float* G, const float* dy, const float* x, int rows, int cols) {
    ger_impl(G, dy, x, rows, cols);
}
void relu(float* x, int n) { relu_impl(x, n); }
void relu_backward(const float* pre, float* grad, int n) { relu_backward_impl(pre, grad, n); }
float dot(const float* a, const float* b, int n) { return dot_impl(a, b, n); }
void axpy(float a, const float* x, float* y, int n) { axpy_impl(a, x, y, n); }

void matvec(const double* W, const double* x, const double* b, double* y, int rows, int cols) {
    matvec_impl(W, x, b, y, rows, cols);
}
void matvec_t(const double* W, const double* dy, double* dx, int rows, int cols) {
    matvec_t_impl(W, dy, dx, rows, cols);
}
void ger(double* G, const double* dy, const double* x, int rows, int cols) {
    ger_impl(G, dy, x, rows, cols);
}
void relu(double* x, int n) { relu_impl(x, n); }
void relu_backward(const double* pre, double* grad, int n) { relu_backward_impl(pre, grad, n); }
double dot(const double* a, const double* b, int n) { return dot_impl(a, b, n); }
void axpy(double a, const double* x, double* y, int n) { axpy_impl(a, x, y, n); }

}  // namespace rdf::kern::scalar

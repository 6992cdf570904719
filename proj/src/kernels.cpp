#include "rdf/kernels.hpp"

#include <cstdlib>

namespace rdf::kern {

namespace {

Isa probe() {
#if defined(RDF_HAVE_AVX2_KERNELS)
    if (const char* env = std::getenv("RDF_FORCE_SCALAR"); env && env[0] == '1')
        return Isa::Scalar;
    if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) return Isa::Avx2;
#endif
    return Isa::Scalar;
}

Isa g_isa = probe();

}  // namespace

Isa active_isa() { return g_isa; }
void force_isa(Isa isa) { g_isa = isa; }
const char* isa_name(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

#if defined(RDF_HAVE_AVX2_KERNELS)
#define RDF_DISPATCH(fn, ...) \
    return g_isa == Isa::Avx2 ? avx2::fn(__VA_ARGS__) : scalar::fn(__VA_ARGS__)
#else
#define RDF_DISPATCH(fn, ...) return scalar::fn(__VA_ARGS__)
#endif

void matvec(const float* W, const float* x, const float* b, float* y, int rows, int cols) {
    RDF_DISPATCH(matvec, W, x, b, y, rows, cols);
}
void matvec_t(const float* W, const float* dy, float* dx, int rows, int cols) {
    RDF_DISPATCH(matvec_t, W, dy, dx, rows, cols);
}
void ger(float* G, const float* dy, const float* x, int rows, int cols) {
    RDF_DISPATCH(ger, G, dy, x, rows, cols);
}
void relu(float* x, int n) { RDF_DISPATCH(relu, x, n); }
void relu_backward(const float* pre, float* grad, int n) {
    RDF_DISPATCH(relu_backward, pre, grad, n);
}
float dot(const float* a, const float* b, int n) { RDF_DISPATCH(dot, a, b, n); }
void axpy(float a, const float* x, float* y, int n) { RDF_DISPATCH(axpy, a, x, y, n); }

}  // namespace rdf::kern

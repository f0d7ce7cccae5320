#pragma once

#include <fftw3.h>

#include <array>
#include <map>
#include <mutex>
#include <stdexcept>
#include <vector>

#include "nls6/field.hpp"

namespace nls6 {
namespace detail {

// Shared FFTW plan cache. Plans are created once per (shape, kind) under a lock
// with FFTW_UNALIGNED so the thread-safe new-array execute works on any buffer.
class FftPlans {
  public:
    static FftPlans& instance() {
        static FftPlans p;
        return p;
    }

    fftw_plan complex_plan(int rank, int m, int sign) {
        const std::array<long, 3> key{rank, m, sign};
        std::lock_guard<std::mutex> lock(mu_);
        auto it = cplans_.find(key);
        if (it != cplans_.end()) return it->second;
        std::vector<int> dims(static_cast<std::size_t>(rank), m);
        std::size_t total = 1;
        for (int a = 0; a < rank; ++a) total *= static_cast<std::size_t>(m);
        std::vector<Complex> buf(total);
        auto* raw = reinterpret_cast<fftw_complex*>(buf.data());
        fftw_plan p = fftw_plan_dft(rank, dims.data(), raw, raw, sign,
                                    FFTW_ESTIMATE | FFTW_UNALIGNED);
        if (!p) throw std::runtime_error("fftw_plan_dft failed");
        cplans_.emplace(key, p);
        return p;
    }

    fftw_plan dst2_plan(int n) {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = rplans_.find(n);
        if (it != rplans_.end()) return it->second;
        std::vector<double> buf(static_cast<std::size_t>(n));
        fftw_plan p = fftw_plan_r2r_1d(n, buf.data(), buf.data(), FFTW_RODFT10,
                                       FFTW_ESTIMATE | FFTW_UNALIGNED);
        if (!p) throw std::runtime_error("fftw_plan_r2r_1d failed");
        rplans_.emplace(n, p);
        return p;
    }

  private:
    FftPlans() = default;
    std::mutex mu_;
    std::map<std::array<long, 3>, fftw_plan> cplans_;
    std::map<int, fftw_plan> rplans_;
};

}  // namespace detail

// In-place unnormalized forward transform, exponent e^{-i xi . x}.
inline void fft_forward(CField& a, const TensorGrid& g) {
    if (a.size() != g.size()) throw std::invalid_argument("fft_forward: size mismatch");
    fftw_plan p = detail::FftPlans::instance().complex_plan(g.d, static_cast<int>(g.m),
                                                            FFTW_FORWARD);
    auto* raw = reinterpret_cast<fftw_complex*>(a.data());
    fftw_execute_dft(p, raw, raw);
}

// In-place inverse transform, normalized so fft_inverse(fft_forward(a)) == a.
inline void fft_inverse(CField& a, const TensorGrid& g) {
    if (a.size() != g.size()) throw std::invalid_argument("fft_inverse: size mismatch");
    fftw_plan p = detail::FftPlans::instance().complex_plan(g.d, static_cast<int>(g.m),
                                                            FFTW_BACKWARD);
    auto* raw = reinterpret_cast<fftw_complex*>(a.data());
    fftw_execute_dft(p, raw, raw);
    const double inv = 1.0 / static_cast<double>(g.size());
    for (auto& z : a) z *= inv;
}

// DST-II of a real sequence sampled at cell centers (j + 1/2) h:
// out_k = 2 sum_j in_j sin(pi (k+1) (j+1/2) / n), k = 0..n-1.
inline void dst2(const RField& in, RField& out) {
    if (in.empty()) throw std::invalid_argument("dst2: empty input");
    out = in;
    fftw_plan p = detail::FftPlans::instance().dst2_plan(static_cast<int>(in.size()));
    fftw_execute_r2r(p, out.data(), out.data());
}

}  // namespace nls6

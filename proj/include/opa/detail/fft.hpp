#pragma once

#include <complex>
#include <cstddef>
#include <map>
#include <mutex>
#include <utility>
#include <vector>

#include <fftw3.h>

namespace opa::detail {

using cplx = std::complex<double>;

// Unnormalized in-place DFT. sign = -1: X_k = sum_j x_j e^{-2 pi i jk/G};
// sign = +1 evaluates a coefficient vector on the uniform circle grid.
class FftPlans {
public:
    static FftPlans& instance() {
        static FftPlans p;
        return p;
    }

    void run(std::vector<cplx>& x, int sign) {
        if (x.size() <= 1) return;
        fftw_plan plan = get(x.size(), sign);
        auto* data = reinterpret_cast<fftw_complex*>(x.data());
        fftw_execute_dft(plan, data, data);
    }

    FftPlans(const FftPlans&) = delete;
    FftPlans& operator=(const FftPlans&) = delete;

private:
    FftPlans() = default;
    ~FftPlans() {
        for (auto& kv : plans_) fftw_destroy_plan(kv.second);
    }

    fftw_plan get(std::size_t n, int sign) {
        std::lock_guard<std::mutex> lock(mu_);
        auto key = std::make_pair(n, sign);
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;
        std::vector<cplx> scratch(n);
        auto* data = reinterpret_cast<fftw_complex*>(scratch.data());
        fftw_plan p = fftw_plan_dft_1d(static_cast<int>(n), data, data,
                                       sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD,
                                       FFTW_ESTIMATE | FFTW_UNALIGNED);
        plans_.emplace(key, p);
        return p;
    }

    std::mutex mu_;
    std::map<std::pair<std::size_t, int>, fftw_plan> plans_;
};

inline void dft(std::vector<cplx>& x, int sign) { FftPlans::instance().run(x, sign); }

inline std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

}  // namespace opa::detail

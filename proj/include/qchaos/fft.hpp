// fft.hpp — thin RAII wrapper around FFTW complex-to-complex transforms.
#pragma once

#include <fftw3.h>

#include <complex>
#include <mutex>
#include <vector>

namespace qchaos {

inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

/** In-place 1D complex FFT pair on a caller-owned buffer of fixed length.
 *  Plan creation is serialized (FFTW planning is not thread-safe); execution
 *  on the owned buffer is private to this object.  Unnormalized transforms;
 *  callers account for 1/n where needed. */
class Fft1d {
public:
    explicit Fft1d(int n) : n_(n), buf_(static_cast<std::size_t>(n)) {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        auto* p = reinterpret_cast<fftw_complex*>(buf_.data());
        fwd_ = fftw_plan_dft_1d(n, p, p, FFTW_FORWARD, FFTW_MEASURE);
        bwd_ = fftw_plan_dft_1d(n, p, p, FFTW_BACKWARD, FFTW_MEASURE);
    }
    ~Fft1d() {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(bwd_);
    }
    Fft1d(const Fft1d&) = delete;
    Fft1d& operator=(const Fft1d&) = delete;

    int size() const { return n_; }
    std::complex<double>* data() { return buf_.data(); }
    const std::complex<double>* data() const { return buf_.data(); }

    void forward() { fftw_execute(fwd_); }   // sum_m f_m e^{-2*pi*i*j*m/n}
    void backward() { fftw_execute(bwd_); }  // unnormalized inverse

private:
    int n_;
    std::vector<std::complex<double>> buf_;
    fftw_plan fwd_, bwd_;
};

}  // namespace qchaos

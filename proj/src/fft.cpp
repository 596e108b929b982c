#include "fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <mutex>

namespace qwalk::detail {

namespace {
// FFTW planning touches global state.
std::mutex planner_mutex;
} // namespace

std::vector<std::complex<double>> dft_positive(std::span<const std::complex<double>> in)
{
    const auto n = in.size();
    std::vector<std::complex<double>> out(n);
    if (n == 0)
        return out;
    auto *buf = fftw_alloc_complex(n);
    fftw_plan plan;
    {
        std::lock_guard lock(planner_mutex);
        plan = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    std::copy(in.begin(), in.end(), reinterpret_cast<std::complex<double> *>(buf));
    fftw_execute(plan);
    std::copy_n(reinterpret_cast<std::complex<double> *>(buf), n, out.begin());
    {
        std::lock_guard lock(planner_mutex);
        fftw_destroy_plan(plan);
    }
    fftw_free(buf);
    return out;
}

} // namespace qwalk::detail

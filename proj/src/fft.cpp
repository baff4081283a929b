#include "fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cstring>
#include <map>
#include <memory>
#include <mutex>

#include "hsat/errors.hpp"

namespace hsat::detail {
namespace {

struct FftwBuffer {
    explicit FftwBuffer(std::size_t n)
        : ptr(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n))) {
        if (ptr == nullptr) throw ConfigError("FFT buffer allocation failed");
    }
    ~FftwBuffer() { fftw_free(ptr); }
    FftwBuffer(const FftwBuffer&) = delete;
    FftwBuffer& operator=(const FftwBuffer&) = delete;
    fftw_complex* ptr;
};

// Plans are created once per (size, direction) with FFTW_ESTIMATE, which is
// deterministic. Execution always goes through an fftw_malloc'd buffer so the
// alignment (and therefore the codelet choice) never varies between calls.
class PlanCache {
public:
    static PlanCache& instance() {
        static PlanCache cache;
        return cache;
    }

    fftw_plan get(std::size_t n, int sign) {
        std::lock_guard lock(mutex_);
        auto key = std::make_pair(n, sign);
        if (auto it = plans_.find(key); it != plans_.end()) return it->second;
        FftwBuffer scratch(n);
        fftw_plan p = fftw_plan_dft_1d(static_cast<int>(n), scratch.ptr, scratch.ptr, sign,
                                       FFTW_ESTIMATE);
        if (p == nullptr) throw ConfigError("FFTW plan creation failed");
        plans_.emplace(key, p);
        return p;
    }

    ~PlanCache() {
        for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
    }

private:
    std::mutex mutex_;
    std::map<std::pair<std::size_t, int>, fftw_plan> plans_;
};

void run(std::span<std::complex<double>> data, int sign) {
    const std::size_t n = data.size();
    if (n == 0) return;
    fftw_plan plan = PlanCache::instance().get(n, sign);
    FftwBuffer buf(n);
    std::memcpy(buf.ptr, data.data(), sizeof(fftw_complex) * n);
    fftw_execute_dft(plan, buf.ptr, buf.ptr);
    std::memcpy(static_cast<void*>(data.data()), buf.ptr, sizeof(fftw_complex) * n);
}

}  // namespace

void fft_forward(std::span<std::complex<double>> data) { run(data, FFTW_FORWARD); }
void fft_backward(std::span<std::complex<double>> data) { run(data, FFTW_BACKWARD); }

}  // namespace hsat::detail

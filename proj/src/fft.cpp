#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>

namespace otfsisac::fft {

namespace {

enum class Kind { Columns, Rows, Both };

using Key = std::tuple<Kind, int, int, int>;

// fftw_plan creation is not thread-safe; execution with new-array
// interfaces is. Plans are created once under the lock and never freed.
std::mutex& plan_mutex() {
    static std::mutex m;
    return m;
}

std::map<Key, fftw_plan>& plan_cache() {
    static std::map<Key, fftw_plan> cache;
    return cache;
}

fftw_plan make_plan(Kind kind, int M, int N, int sign) {
    fftw_complex* buf = fftw_alloc_complex(static_cast<size_t>(M) * N);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fftw_plan p = nullptr;
    switch (kind) {
        case Kind::Columns: {
            int n[] = {M};
            p = fftw_plan_many_dft(1, n, N, buf, nullptr, 1, M, buf, nullptr, 1, M, sign, flags);
            break;
        }
        case Kind::Rows: {
            int n[] = {N};
            p = fftw_plan_many_dft(1, n, M, buf, nullptr, M, 1, buf, nullptr, M, 1, sign, flags);
            break;
        }
        case Kind::Both:
            // column-major M x N is row-major N x M
            p = fftw_plan_dft_2d(N, M, buf, buf, sign, flags);
            break;
    }
    fftw_free(buf);
    return p;
}

fftw_plan get_plan(Kind kind, int M, int N, int sign) {
    std::lock_guard<std::mutex> lock(plan_mutex());
    auto& cache = plan_cache();
    const Key key{kind, M, N, sign};
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    fftw_plan p = make_plan(kind, M, N, sign);
    cache.emplace(key, p);
    return p;
}

void run(Kind kind, cd* data, int M, int N, int sign) {
    fftw_plan p = get_plan(kind, M, N, sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD);
    auto* ptr = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(p, ptr, ptr);
}

}  // namespace

void columns(CMatrix& a, int sign) {
    run(Kind::Columns, a.data(), static_cast<int>(a.rows()), static_cast<int>(a.cols()), sign);
}

void rows(CMatrix& a, int sign) {
    run(Kind::Rows, a.data(), static_cast<int>(a.rows()), static_cast<int>(a.cols()), sign);
}

void both(CMatrix& a, int sign) {
    run(Kind::Both, a.data(), static_cast<int>(a.rows()), static_cast<int>(a.cols()), sign);
}

void vector(CVector& v, int sign) {
    run(Kind::Columns, v.data(), static_cast<int>(v.size()), 1, sign);
}

}  // namespace otfsisac::fft

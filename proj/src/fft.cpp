#include "wkbgo/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <mutex>
#include <new>
#include <numeric>
#include <stdexcept>
#include <utility>

namespace wkbgo {

namespace {

// The FFTW planner is not re-entrant; execution of existing plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

constexpr int kBlock = 16;

fftw_complex* as_fftw(Complex* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace

void* fftw_aligned_alloc(std::size_t bytes) {
  void* p = fftw_malloc(bytes == 0 ? 1 : bytes);
  if (p == nullptr) throw std::bad_alloc();
  return p;
}

void fftw_aligned_free(void* p) noexcept { fftw_free(p); }

bool is_power_of_two(long long n) { return n > 0 && (n & (n - 1)) == 0; }

long long next_power_of_two(long long n) {
  long long p = 1;
  while (p < n) p <<= 1;
  return p;
}

struct FftPlan::Impl {
  // rows_*: all contiguous rows of the last axis at once (in place).
  // block_*: kBlock gathered columns of length n (in place, scratch buffer).
  fftw_plan rows_fwd = nullptr;
  fftw_plan rows_bwd = nullptr;
  fftw_plan block_fwd = nullptr;
  fftw_plan block_bwd = nullptr;
  int block = 1;
  std::size_t rows = 1;
};

FftPlan::FftPlan(int dim, int n) : dim_(dim), n_(n), impl_(std::make_unique<Impl>()) {
  if (dim < 1 || n < 1) throw std::invalid_argument("FftPlan: dim and n must be positive");
  size_ = 1;
  for (int a = 0; a < dim; ++a) size_ *= static_cast<std::size_t>(n);
  impl_->rows = size_ / static_cast<std::size_t>(n);
  impl_->block = dim > 1 ? std::gcd(kBlock, n) : 1;

  std::lock_guard lock(planner_mutex());
  ComplexVec probe(size_);
  int len = n;
  const int rows = static_cast<int>(impl_->rows);
  impl_->rows_fwd = fftw_plan_many_dft(1, &len, rows, as_fftw(probe.data()), nullptr, 1, n,
                                       as_fftw(probe.data()), nullptr, 1, n, FFTW_FORWARD,
                                       FFTW_ESTIMATE);
  impl_->rows_bwd = fftw_plan_many_dft(1, &len, rows, as_fftw(probe.data()), nullptr, 1, n,
                                       as_fftw(probe.data()), nullptr, 1, n, FFTW_BACKWARD,
                                       FFTW_ESTIMATE);
  if (dim > 1) {
    const int b = impl_->block;
    impl_->block_fwd = fftw_plan_many_dft(1, &len, b, as_fftw(probe.data()), nullptr, 1, n,
                                          as_fftw(probe.data()), nullptr, 1, n, FFTW_FORWARD,
                                          FFTW_ESTIMATE);
    impl_->block_bwd = fftw_plan_many_dft(1, &len, b, as_fftw(probe.data()), nullptr, 1, n,
                                          as_fftw(probe.data()), nullptr, 1, n, FFTW_BACKWARD,
                                          FFTW_ESTIMATE);
  }
  if (!impl_->rows_fwd || !impl_->rows_bwd || (dim > 1 && (!impl_->block_fwd || !impl_->block_bwd)))
    throw std::runtime_error("FftPlan: FFTW planning failed");
}

FftPlan::~FftPlan() {
  std::lock_guard lock(planner_mutex());
  for (fftw_plan p : {impl_->rows_fwd, impl_->rows_bwd, impl_->block_fwd, impl_->block_bwd})
    if (p) fftw_destroy_plan(p);
}

void FftPlan::forward(std::span<Complex> data) const { transform(data, true); }
void FftPlan::backward(std::span<Complex> data) const { transform(data, false); }

void FftPlan::transform(std::span<Complex> data, bool forward) const {
  if (data.size() != size_) throw std::invalid_argument("FftPlan: buffer size mismatch");
  thread_local ComplexVec scratch;
  const std::size_t n = static_cast<std::size_t>(n_);

  // Last axis: contiguous rows, one batched call. FFTW needs the buffer to
  // share the planning alignment, otherwise go through scratch.
  fftw_plan rows = forward ? impl_->rows_fwd : impl_->rows_bwd;
  if (fftw_alignment_of(reinterpret_cast<double*>(data.data())) == 0) {
    fftw_execute_dft(rows, as_fftw(data.data()), as_fftw(data.data()));
  } else {
    scratch.assign(data.begin(), data.end());
    fftw_execute_dft(rows, as_fftw(scratch.data()), as_fftw(scratch.data()));
    std::copy(scratch.begin(), scratch.end(), data.begin());
  }
  if (dim_ == 1) return;

  fftw_plan block = forward ? impl_->block_fwd : impl_->block_bwd;
  const std::size_t b = static_cast<std::size_t>(impl_->block);
  if (scratch.size() < b * n) scratch.resize(b * n);
  std::size_t inner = n;
  for (int axis = dim_ - 2; axis >= 0; --axis) {
    const std::size_t outer = size_ / (inner * n);
    for (std::size_t o = 0; o < outer; ++o) {
      Complex* base = data.data() + o * n * inner;
      for (std::size_t i0 = 0; i0 < inner; i0 += b) {
        for (std::size_t k = 0; k < n; ++k) {
          const Complex* src = base + k * inner + i0;
          for (std::size_t c = 0; c < b; ++c) scratch[c * n + k] = src[c];
        }
        fftw_execute_dft(block, as_fftw(scratch.data()), as_fftw(scratch.data()));
        for (std::size_t k = 0; k < n; ++k) {
          Complex* dst = base + k * inner + i0;
          for (std::size_t c = 0; c < b; ++c) dst[c] = scratch[c * n + k];
        }
      }
    }
    inner *= n;
  }
}

std::shared_ptr<const FftPlan> fft_plan(int dim, int n) {
  static std::mutex cache_mutex;
  static std::map<std::pair<int, int>, std::shared_ptr<const FftPlan>> cache;
  std::lock_guard lock(cache_mutex);
  auto& slot = cache[{dim, n}];
  if (!slot) slot = std::make_shared<const FftPlan>(dim, n);
  return slot;
}

}  // namespace wkbgo

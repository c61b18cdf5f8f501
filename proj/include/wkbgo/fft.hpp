#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace wkbgo {

using Complex = std::complex<double>;

/// Allocator returning FFTW-aligned storage so every buffer can be fed to a
/// shared plan.
template <class T>
struct FftwAllocator {
  using value_type = T;
  FftwAllocator() = default;
  template <class U>
  FftwAllocator(const FftwAllocator<U>&) noexcept {}
  T* allocate(std::size_t count);
  void deallocate(T* p, std::size_t) noexcept;
  template <class U>
  bool operator==(const FftwAllocator<U>&) const noexcept { return true; }
};

void* fftw_aligned_alloc(std::size_t bytes);
void fftw_aligned_free(void* p) noexcept;

template <class T>
T* FftwAllocator<T>::allocate(std::size_t count) {
  return static_cast<T*>(fftw_aligned_alloc(count * sizeof(T)));
}
template <class T>
void FftwAllocator<T>::deallocate(T* p, std::size_t) noexcept {
  fftw_aligned_free(p);
}

using ComplexVec = std::vector<Complex, FftwAllocator<Complex>>;

bool is_power_of_two(long long n);
long long next_power_of_two(long long n);

/// Signed integer frequency of DFT bin `index` on an n-point axis
/// (0..n/2-1, then -n/2..-1).
inline long long bin_frequency(long long index, long long n) {
  return index < n / 2 ? index : index - n;
}
/// Inverse of bin_frequency; frequency must satisfy -n/2 <= f < n/2.
inline long long frequency_bin(long long freq, long long n) {
  return freq >= 0 ? freq : freq + n;
}

/// Unnormalized d-dimensional complex DFT over n^d points stored row-major
/// (last axis fastest). Forward uses e^{-ikx}. Transforms run axis by axis
/// with fixed 1D plans so results are bitwise reproducible run to run.
class FftPlan {
public:
  FftPlan(int dim, int n);
  ~FftPlan();
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  int dim() const { return dim_; }
  int n() const { return n_; }
  std::size_t size() const { return size_; }

  void forward(std::span<Complex> data) const;
  void backward(std::span<Complex> data) const;

private:
  void transform(std::span<Complex> data, bool forward) const;

  int dim_;
  int n_;
  std::size_t size_;
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Process-wide plan cache keyed by (dim, n). Thread-safe.
std::shared_ptr<const FftPlan> fft_plan(int dim, int n);

}  // namespace wkbgo

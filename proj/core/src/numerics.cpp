#include "lrr/numerics.hpp"

#include <dlfcn.h>

#include <algorithm>
#include <cstdlib>
#include <stdexcept>
#include <vector>

#include "lrr/errors.hpp"

namespace lrr {

namespace {

void require_finite(const Matrix& x, const char* who) {
  if (!x.allFinite()) {
    throw std::invalid_argument(std::string(who) + ": matrix has NaN or Inf entries");
  }
}

using GesddFn = void (*)(const char* jobz, const int* m, const int* n, double* a,
                         const int* lda, double* s, double* u, const int* ldu,
                         double* vt, const int* ldvt, double* work, const int* lwork,
                         int* iwork, int* info);

// LAPACK divide-and-conquer backend, loaded lazily so the environment can be
// prepared first: OpenBLAS picks its kernel in a load-time constructor from
// CPU model numbers, which virtualized CPUs often mask even though the
// feature bits are visible. Loading after setenv lets the feature-bit guard
// take effect; a missing library just means the Eigen path below is used.
struct SvdBackend {
  GesddFn dgesdd = nullptr;

  static const SvdBackend& instance() {
    static const SvdBackend backend = [] {
      SvdBackend found;
#if defined(__x86_64__) || defined(__i386__)
      if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) {
        setenv("OPENBLAS_CORETYPE", "HASWELL", /*overwrite=*/0);
      }
#endif
      for (const char* name : {"libopenblas.so.0", "libopenblas.so",
                               "liblapack.so.3", "liblapack.so"}) {
        void* handle = dlopen(name, RTLD_NOW | RTLD_LOCAL);
        if (handle == nullptr) continue;
        // Threaded BLAS would make results depend on the ambient thread count.
        if (auto set_threads = reinterpret_cast<void (*)(int)>(
                dlsym(handle, "openblas_set_num_threads"))) {
          set_threads(1);
        }
        found.dgesdd = reinterpret_cast<GesddFn>(dlsym(handle, "dgesdd_"));
        if (found.dgesdd != nullptr) break;
        dlclose(handle);
      }
      return found;
    }();
    return backend;
  }
};

struct RawFactors {
  Matrix u;
  Vector sigma;
  Matrix vt;
};

// jobz: 'A' square factors, 'S' economy factors, 'N' values only.
bool gesdd_lapack(const Matrix& x, char jobz, RawFactors& out) {
  const GesddFn dgesdd = SvdBackend::instance().dgesdd;
  if (dgesdd == nullptr) return false;
  const int m = static_cast<int>(x.rows());
  const int n = static_cast<int>(x.cols());
  const int k = std::min(m, n);

  int ldu = 1, ldvt = 1;
  if (jobz == 'A') {
    out.u.resize(m, m);
    out.vt.resize(n, n);
    ldu = m;
    ldvt = n;
  } else if (jobz == 'S') {
    out.u.resize(m, k);
    out.vt.resize(k, n);
    ldu = m;
    ldvt = k;
  } else {
    out.u.resize(1, 1);
    out.vt.resize(1, 1);
  }
  out.sigma.resize(k);

  // Reused scratch: solver loops decompose thousands of same-sized matrices.
  thread_local std::vector<double> work;
  thread_local std::vector<int> iwork;

  Matrix a = x;  // dgesdd destroys its input
  iwork.resize(8 * static_cast<std::size_t>(k));
  int info = 0;
  int lwork = -1;
  double work_query = 0.0;
  dgesdd(&jobz, &m, &n, a.data(), &m, out.sigma.data(), out.u.data(), &ldu,
         out.vt.data(), &ldvt, &work_query, &lwork, iwork.data(), &info);
  if (info != 0) return false;
  lwork = static_cast<int>(work_query);
  if (work.size() < static_cast<std::size_t>(lwork)) {
    work.resize(static_cast<std::size_t>(lwork));
  }
  dgesdd(&jobz, &m, &n, a.data(), &m, out.sigma.data(), out.u.data(), &ldu,
         out.vt.data(), &ldvt, work.data(), &lwork, iwork.data(), &info);
  return info == 0;
}

RawFactors gesdd(const Matrix& x, char jobz) {
  RawFactors out;
  if (gesdd_lapack(x, jobz, out)) {
    return out;
  }
  const unsigned options =
      jobz == 'N' ? 0u
      : jobz == 'A'
          ? static_cast<unsigned>(Eigen::ComputeFullU | Eigen::ComputeFullV)
          : static_cast<unsigned>(Eigen::ComputeThinU | Eigen::ComputeThinV);
  Eigen::BDCSVD<Matrix> dec(x, options);
  if (dec.info() != Eigen::Success) {
    Eigen::JacobiSVD<Matrix> robust(x, options);
    if (robust.info() != Eigen::Success) {
      throw NumericalError("svd: decomposition did not converge");
    }
    out.sigma = robust.singularValues();
    if (jobz != 'N') {
      out.u = robust.matrixU();
      out.vt = robust.matrixV().transpose();
    }
    return out;
  }
  out.sigma = dec.singularValues();
  if (jobz != 'N') {
    out.u = dec.matrixU();
    out.vt = dec.matrixV().transpose();
  }
  return out;
}

}  // namespace

Matrix SvdFactors::reconstruct() const {
  const auto k = sigma.size();
  return u.leftCols(k) * sigma.asDiagonal() * v.leftCols(k).transpose();
}

SvdFactors svd(const Matrix& x) {
  require_finite(x, "svd");
  RawFactors factors = gesdd(x, 'A');
  return SvdFactors{std::move(factors.u), std::move(factors.sigma),
                    factors.vt.transpose()};
}

Vector singular_values(const Matrix& x) {
  require_finite(x, "singular_values");
  return gesdd(x, 'N').sigma;
}

namespace detail {

ThinSvd thin_svd(const Matrix& x) {
  require_finite(x, "thin_svd");
  RawFactors factors = gesdd(x, 'S');
  return ThinSvd{std::move(factors.u), std::move(factors.sigma),
                 factors.vt.transpose()};
}

}  // namespace detail

Matrix truncate_rank(const Matrix& x, int r) {
  const int k = static_cast<int>(std::min(x.rows(), x.cols()));
  if (r < 1 || r > k) {
    throw std::invalid_argument("truncate_rank: r must be in [1, min(rows, cols)]");
  }
  const detail::ThinSvd dec = detail::thin_svd(x);
  return dec.u.leftCols(r) * dec.sigma.head(r).asDiagonal() *
         dec.v.leftCols(r).transpose();
}

double frobenius_norm(const Matrix& x) {
  require_finite(x, "frobenius_norm");
  return x.norm();
}

double nuclear_norm(const Matrix& x) { return singular_values(x).sum(); }

int numerical_rank(const Vector& sigma, int rows, int cols) {
  if (sigma.size() == 0) return 0;
  const double cutoff = sigma(0) * std::max(rows, cols) * 1e-12;
  int rank = 0;
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    if (sigma(i) > cutoff) ++rank;
  }
  return rank;
}

int numerical_rank(const Matrix& x) {
  return numerical_rank(singular_values(x), static_cast<int>(x.rows()),
                        static_cast<int>(x.cols()));
}

}  // namespace lrr

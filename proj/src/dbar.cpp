#include "mso/dbar.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <vector>

namespace mso {

namespace {

// int_0^1 (A + Bt)/(C + Dt) dt with a branch of log valid for segments that
// do not pass through the pole (a straight edge subtends less than pi).
cdouble segment_integral(cdouble A, cdouble B, cdouble C, cdouble D) {
  return B / D + (A - B * C / D) * std::log((C + D) / C) / D;
}

std::mutex fftw_mutex;

struct Fft2 {
  int n0, n1;
  fftw_plan fwd, bwd;
  std::vector<cdouble> buf;

  Fft2(int a, int b) : n0(a), n1(b), buf(static_cast<size_t>(a) * b) {
    std::lock_guard<std::mutex> lock(fftw_mutex);
    auto* p = reinterpret_cast<fftw_complex*>(buf.data());
    fwd = fftw_plan_dft_2d(n0, n1, p, p, FFTW_FORWARD, FFTW_ESTIMATE);
    bwd = fftw_plan_dft_2d(n0, n1, p, p, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  ~Fft2() {
    std::lock_guard<std::mutex> lock(fftw_mutex);
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);
  }
};

}  // namespace

cdouble cell_kernel_integral(cdouble z, double h) {
  const double s = 0.5 * h;
  const cdouble corner[4] = {{-s, -s}, {s, -s}, {s, s}, {-s, s}};
  cdouble sum = 0.0;
  for (int e = 0; e < 4; ++e) {
    cdouble w1 = corner[e], w2 = corner[(e + 1) % 4];
    cdouble d = w2 - w1;
    sum += d * segment_integral(std::conj(w1), std::conj(d), w1 - z, d);
  }
  cdouble out = sum / (2.0 * kI);
  if (std::abs(z.real()) < s && std::abs(z.imag()) < s)
    out -= kPi * std::conj(z);
  return out;
}

MatXc cauchy_transform(const SliceSpec& slice, const MatXc& f,
                       bool whole_grid) {
  const int nt = slice.nt, nr = slice.nr;
  if (f.rows() != nt || f.cols() != nr)
    throw GeometryError("cauchy_transform: field does not match the slice grid");
  const double h = slice.grid_step;
  const int Lt = 2 * nt, Lr = 2 * nr;
  Fft2 fft(Lt, Lr);

  // Kernel of exact cell integrals on the offset lattice, wrapped circularly.
  std::vector<cdouble> kern(static_cast<size_t>(Lt) * Lr, 0.0);
  for (int mt = -(nt - 1); mt <= nt - 1; ++mt)
    for (int mr = -(nr - 1); mr <= nr - 1; ++mr) {
      int a = (mt + Lt) % Lt, b = (mr + Lr) % Lr;
      kern[static_cast<size_t>(a) * Lr + b] =
          cell_kernel_integral(cdouble(mt * h, mr * h), h);
    }
  std::copy(kern.begin(), kern.end(), fft.buf.begin());
  fftw_execute(fft.fwd);
  std::vector<cdouble> khat = fft.buf;

  std::fill(fft.buf.begin(), fft.buf.end(), cdouble(0.0));
  for (int i = 0; i < nt; ++i)
    for (int j = 0; j < nr; ++j)
      fft.buf[static_cast<size_t>(i) * Lr + j] =
          whole_grid ? f(i, j) : f(i, j) * slice.cell_fraction(i, j);
  fftw_execute(fft.fwd);
  for (size_t n = 0; n < fft.buf.size(); ++n) fft.buf[n] *= khat[n];
  fftw_execute(fft.bwd);

  MatXc out(nt, nr);
  const double scale = -1.0 / (kPi * Lt * Lr);
  for (int i = 0; i < nt; ++i)
    for (int j = 0; j < nr; ++j)
      out(i, j) = scale * fft.buf[static_cast<size_t>(i) * Lr + j];
  return out;
}

MatXc dbar_apply(const SliceSpec& slice, const MatXc& u) {
  const int nt = slice.nt, nr = slice.nr;
  const double h = slice.grid_step;
  MatXc out(nt, nr);
  for (int i = 0; i < nt; ++i)
    for (int j = 0; j < nr; ++j) {
      cdouble dt, dr;
      if (i == 0) dt = (u(1, j) - u(0, j)) / h;
      else if (i == nt - 1) dt = (u(i, j) - u(i - 1, j)) / h;
      else dt = (u(i + 1, j) - u(i - 1, j)) / (2.0 * h);
      if (j == 0) dr = (u(i, 1) - u(i, 0)) / h;
      else if (j == nr - 1) dr = (u(i, j) - u(i, j - 1)) / h;
      else dr = (u(i, j + 1) - u(i, j - 1)) / (2.0 * h);
      out(i, j) = 0.5 * (dt + kI * dr);
    }
  return out;
}

}  // namespace mso

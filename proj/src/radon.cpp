#include "mso/radon.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace mso {

namespace {

std::mutex fftw_mutex;

// bilinear on an m x m grid over [-radius, radius]^2, zero outside
double bilin(const MatX& g, double radius, double a, double b) {
  const int m = static_cast<int>(g.rows());
  const double step = 2.0 * radius / (m - 1);
  const double fi = (a + radius) / step, fj = (b + radius) / step;
  if (fi < 0.0 || fj < 0.0 || fi > m - 1 || fj > m - 1) return 0.0;
  int i = std::min(static_cast<int>(fi), m - 2);
  int j = std::min(static_cast<int>(fj), m - 2);
  double wi = fi - i, wj = fj - j;
  return (1 - wi) * ((1 - wj) * g(i, j) + wj * g(i, j + 1)) +
         wi * ((1 - wj) * g(i + 1, j) + wj * g(i + 1, j + 1));
}

// filtered row: (1/M) ifft(|sigma| taper . fft(p)), sigma relative to step ds
VecX filter_row(const VecX& p, double ds) {
  const int ns = static_cast<int>(p.size());
  int M = 1;
  while (M < 2 * ns) M *= 2;
  std::vector<cdouble> buf(M, 0.0);
  for (int k = 0; k < ns; ++k) buf[k] = p[k];
  fftw_plan fwd, bwd;
  {
    std::lock_guard<std::mutex> lock(fftw_mutex);
    auto* q = reinterpret_cast<fftw_complex*>(buf.data());
    fwd = fftw_plan_dft_1d(M, q, q, FFTW_FORWARD, FFTW_ESTIMATE);
    bwd = fftw_plan_dft_1d(M, q, q, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  fftw_execute(fwd);
  const double sig_max = kPi / ds;
  for (int j = 0; j < M; ++j) {
    int jj = j <= M / 2 ? j : j - M;
    double sig = 2.0 * kPi * jj / (M * ds);
    double w = std::abs(sig) * std::cos(0.5 * kPi * std::abs(sig) / sig_max);
    buf[j] *= w;
  }
  fftw_execute(bwd);
  VecX out(ns);
  for (int k = 0; k < ns; ++k) out[k] = buf[k].real() / M;
  {
    std::lock_guard<std::mutex> lock(fftw_mutex);
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);
  }
  return out;
}

}  // namespace

PlaneSinogram make_plane_sinogram(const std::function<double(const Vec3&)>& f,
                                  const Vec3& center, const Mat3& axes,
                                  int n_beta, int n_theta, int n_s,
                                  double radius, int quad_pts) {
  PlaneSinogram out;
  out.center = center;
  out.axes = axes;
  out.n_beta = n_beta;
  out.n_theta = n_theta;
  out.n_s = n_s;
  out.radius = radius;
  out.data.assign(static_cast<size_t>(n_beta) * n_theta * n_s, 0.0);
  const Vec3 u = axes.row(0), v = axes.row(1), a = axes.row(2);
  const double dq = 2.0 * radius / quad_pts;

  for (int b = 0; b < n_beta; ++b) {
    double beta = kPi * b / n_beta;
    Vec3 omega = std::cos(beta) * u + std::sin(beta) * v;
    Vec3 m = omega.cross(a), p = a;
    // projection of f along omega on the (m, p) plane, then in-plane line
    // integrals; a plane integral is a line integral of the projection
    const int nq = 2 * n_s;
    MatX proj(nq, nq);
    for (int i = 0; i < nq; ++i)
      for (int j = 0; j < nq; ++j) {
        double ym = -radius + 2.0 * radius * i / (nq - 1);
        double yp = -radius + 2.0 * radius * j / (nq - 1);
        Vec3 base = center + ym * m + yp * p;
        double acc = 0.0;
        for (int k = 0; k < quad_pts; ++k)
          acc += f(base + (-radius + (k + 0.5) * dq) * omega);
        proj(i, j) = acc * dq;
      }
    for (int t = 0; t < n_theta; ++t) {
      double th = kPi * t / n_theta;
      double nm = std::cos(th), np = std::sin(th);
      for (int s = 0; s < n_s; ++s) {
        double sv = out.s_value(s);
        double acc = 0.0;
        for (int k = 0; k < quad_pts; ++k) {
          double tau = -radius + (k + 0.5) * dq;
          acc += bilin(proj, radius, sv * nm - tau * np, sv * np + tau * nm);
        }
        out.at(b, t, s) = acc * dq;
      }
    }
  }
  return out;
}

MatX fbp2d(const MatX& sino, double radius, int n,
           const std::vector<double>& angles) {
  const int n_ang = static_cast<int>(sino.rows());
  const int n_s = static_cast<int>(sino.cols());
  const double ds = 2.0 * radius / (n_s - 1);
  MatX filt(n_ang, n_s);
  for (int r = 0; r < n_ang; ++r)
    filt.row(r) = filter_row(sino.row(r), ds).transpose();

  MatX img = MatX::Zero(n, n);
  const double dth = kPi / n_ang;
  for (int r = 0; r < n_ang; ++r) {
    double ang = angles.empty() ? kPi * r / n_ang : angles[r];
    double cn = std::cos(ang), sn = std::sin(ang);
    for (int i = 0; i < n; ++i) {
      double x = -radius + 2.0 * radius * i / (n - 1);
      for (int j = 0; j < n; ++j) {
        double y = -radius + 2.0 * radius * j / (n - 1);
        double s = x * cn + y * sn;
        double fi = (s + radius) / ds;
        if (fi < 0.0 || fi > n_s - 1) continue;
        int k = std::min(static_cast<int>(fi), n_s - 2);
        double w = fi - k;
        img(i, j) += (1 - w) * filt(r, k) + w * filt(r, k + 1);
      }
    }
  }
  return img * (dth / (2.0 * kPi));
}

double ScalarField3::sample(const Vec3& x) const {
  Vec3 y = axes * (x - center);
  const double step = 2.0 * radius / (n - 1);
  double f[3];
  int idx[3];
  for (int c = 0; c < 3; ++c) {
    double fi = (y[c] + radius) / step;
    if (fi < 0.0 || fi > n - 1) return 0.0;
    idx[c] = std::min(static_cast<int>(fi), n - 2);
    f[c] = fi - idx[c];
  }
  double acc = 0.0;
  for (int di = 0; di < 2; ++di)
    for (int dj = 0; dj < 2; ++dj)
      for (int dk = 0; dk < 2; ++dk)
        acc += (di ? f[0] : 1 - f[0]) * (dj ? f[1] : 1 - f[1]) *
               (dk ? f[2] : 1 - f[2]) *
               at(idx[0] + di, idx[1] + dj, idx[2] + dk);
  return acc;
}

ScalarField3 radon_invert_scalar(const PlaneSinogram& sino, int n) {
  if (sino.n_beta < 16)
    throw std::runtime_error(
        "radon_invert_scalar: need at least 16 directions");
  ScalarField3 out;
  out.center = sino.center;
  out.axes = sino.axes;
  out.radius = sino.radius;
  out.n = n;
  out.values.assign(static_cast<size_t>(n) * n * n, 0.0);

  // stage 1: per beta, the plane integrals are the 2D Radon transform of the
  // omega projection on the (m, p) = (omega x a, a) plane
  std::vector<MatX> proj(sino.n_beta);
  for (int b = 0; b < sino.n_beta; ++b) {
    MatX rows(sino.n_theta, sino.n_s);
    for (int t = 0; t < sino.n_theta; ++t)
      for (int s = 0; s < sino.n_s; ++s) rows(t, s) = sino.at(b, t, s);
    proj[b] = fbp2d(rows, sino.radius, n);
  }

  // stage 2: fixed axis slab; projections give parallel-beam data in the
  // (u, v) plane with offset direction m(beta) at angle beta - pi/2
  std::vector<double> angles(sino.n_beta);
  for (int b = 0; b < sino.n_beta; ++b)
    angles[b] = kPi * b / sino.n_beta - 0.5 * kPi;
  for (int k = 0; k < n; ++k) {
    MatX slab(sino.n_beta, n);
    for (int b = 0; b < sino.n_beta; ++b)
      for (int i = 0; i < n; ++i) slab(b, i) = proj[b](i, k);
    MatX img = fbp2d(slab, sino.radius, n, angles);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) out.at(i, j, k) = img(i, j);
  }
  return out;
}

Vec3 RaySinogram::omega(int b, int t) const {
  double beta = kPi * b / n_beta;
  Vec3 u = axes.row(0), v = axes.row(1), a = axes.row(2);
  return std::cos(tilts[t]) * (std::cos(beta) * u + std::sin(beta) * v) +
         std::sin(tilts[t]) * a;
}

void RaySinogram::basis(int b, int t, Vec3* m, Vec3* p) const {
  Vec3 a = axes.row(2);
  Vec3 w = omega(b, t);
  *p = (a - a.dot(w) * w).normalized();
  *m = p->cross(w);
}

RaySinogram make_ray_sinogram(const std::function<Vec3(const Vec3&)>& field,
                              const Vec3& center, const Mat3& axes, int n_beta,
                              const std::vector<double>& tilts, int ny,
                              double radius, int quad_pts) {
  RaySinogram out;
  out.center = center;
  out.axes = axes;
  out.n_beta = n_beta;
  out.tilts = tilts;
  out.ny = ny;
  out.radius = radius;
  out.data.assign(static_cast<size_t>(n_beta) * tilts.size() * ny * ny, 0.0);
  const double dq = 2.0 * radius / quad_pts;
  for (int b = 0; b < n_beta; ++b)
    for (size_t t = 0; t < tilts.size(); ++t) {
      Vec3 w = out.omega(b, static_cast<int>(t));
      Vec3 m, p;
      out.basis(b, static_cast<int>(t), &m, &p);
      for (int i = 0; i < ny; ++i)
        for (int j = 0; j < ny; ++j) {
          double y1 = -radius + 2.0 * radius * i / (ny - 1);
          double y2 = -radius + 2.0 * radius * j / (ny - 1);
          Vec3 base = center + y1 * m + y2 * p;
          double acc = 0.0;
          for (int k = 0; k < quad_pts; ++k)
            acc += field(base + (-radius + (k + 0.5) * dq) * w).dot(w);
          out.at(b, static_cast<int>(t), i, j) = acc * dq;
        }
    }
  return out;
}

VectorField3 radon_invert_curl(const RaySinogram& sino, int n) {
  if (sino.n_beta < 16)
    throw std::runtime_error("radon_invert_curl: need at least 16 directions");
  const double R = sino.radius;
  const int ny = sino.ny;
  const double dy = 2.0 * R / (ny - 1);
  const double dx = 2.0 * R / (n - 1);
  const double dk = 2.0 * kPi / (n * dx);
  const double kmax = dk * (n / 2 - 1);

  // per-cell normal equations for Bhat(k), accumulated from all directions;
  // each ray image contributes Bhat . (omega x k) = -i |k|^2 Ahat(k).omega
  std::vector<Mat3> gram(static_cast<size_t>(n) * n * n, Mat3::Zero());
  std::vector<CVec3> rhs(static_cast<size_t>(n) * n * n, CVec3::Zero());
  auto cell = [&](int i, int j, int k) {
    return (static_cast<size_t>(i) * n + j) * n + k;
  };

  std::vector<cdouble> buf(static_cast<size_t>(ny) * ny);
  fftw_plan fwd;
  {
    std::lock_guard<std::mutex> lock(fftw_mutex);
    auto* q = reinterpret_cast<fftw_complex*>(buf.data());
    fwd = fftw_plan_dft_2d(ny, ny, q, q, FFTW_FORWARD, FFTW_ESTIMATE);
  }

  for (int b = 0; b < sino.n_beta; ++b)
    for (int t = 0; t < static_cast<int>(sino.tilts.size()); ++t) {
      Vec3 w = sino.omega(b, t);
      Vec3 m, p;
      sino.basis(b, t, &m, &p);
      for (int i = 0; i < ny; ++i)
        for (int j = 0; j < ny; ++j)
          buf[static_cast<size_t>(i) * ny + j] = sino.at(b, t, i, j);
      fftw_execute(fwd);
      for (int i = 0; i < ny; ++i)
        for (int j = 0; j < ny; ++j) {
          int ii = i <= ny / 2 ? i : i - ny;
          int jj = j <= ny / 2 ? j : j - ny;
          double k1 = 2.0 * kPi * ii / (ny * dy);
          double k2 = 2.0 * kPi * jj / (ny * dy);
          Vec3 kv = k1 * m + k2 * p;  // scenario frame, exactly normal to w
          Vec3 kl = sino.axes * kv;   // reconstruction frame
          if (std::abs(kl[0]) >= kmax || std::abs(kl[1]) >= kmax ||
              std::abs(kl[2]) >= kmax)
            continue;
          double k2n = kv.squaredNorm();
          if (k2n < 1e-12) continue;
          // continuous transform with the y grid offset put back
          cdouble ahat = buf[static_cast<size_t>(i) * ny + j] * dy * dy *
                         std::exp(kI * ((k1 + k2) * R));
          Vec3 d = sino.axes * w.cross(kv);
          CVec3 meas = (-kI * k2n * ahat) * d.cast<cdouble>();
          // trilinear spread onto the k grid
          double fi[3];
          int base[3];
          for (int c = 0; c < 3; ++c) {
            double f = kl[c] / dk + n / 2;
            base[c] = static_cast<int>(std::floor(f));
            fi[c] = f - base[c];
          }
          for (int di = 0; di < 2; ++di)
            for (int dj = 0; dj < 2; ++dj)
              for (int dl = 0; dl < 2; ++dl) {
                int ci = base[0] + di, cj = base[1] + dj, cl = base[2] + dl;
                if (ci < 1 || cj < 1 || cl < 1 || ci >= n || cj >= n || cl >= n)
                  continue;
                double wt = (di ? fi[0] : 1 - fi[0]) *
                            (dj ? fi[1] : 1 - fi[1]) * (dl ? fi[2] : 1 - fi[2]);
                gram[cell(ci, cj, cl)] += wt * d * d.transpose();
                rhs[cell(ci, cj, cl)] += wt * meas;
              }
        }
    }
  {
    std::lock_guard<std::mutex> lock(fftw_mutex);
    fftw_destroy_plan(fwd);
  }

  // solve the 3x3 systems with the divergence constraint folded in, then
  // transform back with explicit grid phases
  std::vector<cdouble> comp[3];
  for (auto& c : comp) c.assign(static_cast<size_t>(n) * n * n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        Vec3 kl((i - n / 2) * dk, (j - n / 2) * dk, (k - n / 2) * dk);
        double kn = kl.norm();
        Mat3 G = gram[cell(i, j, k)];
        double tr = G.trace();
        if (kn < 0.5 * dk || tr <= 0.0) continue;
        Vec3 kh = kl / kn;
        Mat3 M = G + (1e-4 * tr) * Mat3::Identity() + tr * (kh * kh.transpose());
        CVec3 sol = M.ldlt().solve(rhs[cell(i, j, k)].eval());
        // FFT index order with the x grid offset as a phase
        int wi = (i - n / 2 + n) % n, wj = (j - n / 2 + n) % n,
            wk = (k - n / 2 + n) % n;
        cdouble ph = std::exp(-kI * ((kl[0] + kl[1] + kl[2]) * R));
        for (int c = 0; c < 3; ++c)
          comp[c][(static_cast<size_t>(wi) * n + wj) * n + wk] = sol[c] * ph;
      }

  VectorField3 out;
  for (int c = 0; c < 3; ++c) {
    out.comp[c].center = sino.center;
    out.comp[c].axes = sino.axes;
    out.comp[c].radius = R;
    out.comp[c].n = n;
    out.comp[c].values.assign(static_cast<size_t>(n) * n * n, 0.0);
  }
  const double scale = std::pow(dk / (2.0 * kPi), 3);
  for (int c = 0; c < 3; ++c) {
    fftw_plan bwd;
    {
      std::lock_guard<std::mutex> lock(fftw_mutex);
      auto* q = reinterpret_cast<fftw_complex*>(comp[c].data());
      bwd = fftw_plan_dft_3d(n, n, n, q, q, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    fftw_execute(bwd);
    {
      std::lock_guard<std::mutex> lock(fftw_mutex);
      fftw_destroy_plan(bwd);
    }
  }
  // solved components are in the reconstruction frame; rotate to scenario
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        size_t id = (static_cast<size_t>(i) * n + j) * n + k;
        Vec3 local(comp[0][id].real() * scale, comp[1][id].real() * scale,
                   comp[2][id].real() * scale);
        Vec3 scen = sino.axes.transpose() * local;
        for (int c = 0; c < 3; ++c) out.comp[c].at(i, j, k) = scen[c];
      }
  return out;
}

}  // namespace mso

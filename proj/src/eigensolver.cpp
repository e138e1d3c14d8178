#include "ptlat/eigensolver.hpp"

#include "ptlat/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace ptlat {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kSafeMin = std::numeric_limits<double>::min();

// Active blocks at least this large get an early-deflation window.
constexpr Eigen::Index kAedMinBlock = 48;
constexpr int kExceptionalPeriod = 10;
constexpr double kExceptionalScale = 0.75;

inline double cabs1(Complex z) { return std::abs(z.real()) + std::abs(z.imag()); }

// Plane rotation G = [c s; -conj(s) c] with G * [a; b] = [r; 0].
struct Rotation {
  double c = 1.0;
  Complex s{0.0, 0.0};
  Complex r{0.0, 0.0};
};

Rotation make_rotation(Complex a, Complex b) {
  Rotation g;
  const double abs_a = std::abs(a);
  const double abs_b = std::abs(b);
  if (abs_b == 0.0) {
    g.r = a;
    return g;
  }
  if (abs_a == 0.0) {
    g.c = 0.0;
    g.s = Complex(1.0, 0.0);
    g.r = b;
    return g;
  }
  const double norm = std::hypot(abs_a, abs_b);
  const Complex phase = a / abs_a;
  g.c = abs_a / norm;
  g.s = phase * std::conj(b) / norm;
  g.r = phase * norm;
  return g;
}

// Column-major view shared by the kernels below.
struct View {
  Complex* data;
  Eigen::Index ld;
  Complex& operator()(Eigen::Index i, Eigen::Index j) const { return data[i + j * ld]; }
  Complex* col(Eigen::Index j) const { return data + j * ld; }
};

// Rows k, k+1 <- G * rows, columns [j0, j1].
void rotate_rows(const View& h, const Rotation& g, Eigen::Index k, Eigen::Index j0, Eigen::Index j1) {
  const Complex sc = std::conj(g.s);
  for (Eigen::Index j = j0; j <= j1; ++j) {
    Complex* col = h.col(j);
    const Complex x = col[k];
    const Complex y = col[k + 1];
    col[k] = g.c * x + g.s * y;
    col[k + 1] = g.c * y - sc * x;
  }
}

// Columns k, k+1 <- columns * G^H, rows [i0, i1].
void rotate_cols(const View& h, const Rotation& g, Eigen::Index k, Eigen::Index i0, Eigen::Index i1) {
  Complex* x = h.col(k);
  Complex* y = h.col(k + 1);
  const Complex sc = std::conj(g.s);
  for (Eigen::Index i = i0; i <= i1; ++i) {
    const Complex xi = x[i];
    const Complex yi = y[i];
    x[i] = g.c * xi + sc * yi;
    y[i] = g.c * yi - g.s * xi;
  }
}

// Householder vector v (unit norm) with (I - 2 v v^H) x = beta e1. Returns
// false when x is already a multiple of e1.
bool make_householder(const Complex* x, Eigen::Index len, std::vector<Complex>& v) {
  v.assign(x, x + len);
  double tail = 0.0;
  for (Eigen::Index i = 1; i < len; ++i) tail += std::norm(x[i]);
  if (tail == 0.0) return false;
  const double norm_x = std::sqrt(std::norm(x[0]) + tail);
  const double abs0 = std::abs(x[0]);
  const Complex phase = abs0 == 0.0 ? Complex(1.0, 0.0) : x[0] / abs0;
  v[0] += phase * norm_x;
  double vn = 0.0;
  for (const auto& e : v) vn += std::norm(e);
  vn = std::sqrt(vn);
  for (auto& e : v) e /= vn;
  return true;
}

// Rows [r0, r0+len) <- (I - 2vv^H) rows, columns [j0, j1].
void reflect_rows(const View& h, const std::vector<Complex>& v, Eigen::Index r0, Eigen::Index j0,
                  Eigen::Index j1) {
  const auto len = static_cast<Eigen::Index>(v.size());
  for (Eigen::Index j = j0; j <= j1; ++j) {
    Complex* col = h.col(j) + r0;
    Complex dot(0.0, 0.0);
    for (Eigen::Index i = 0; i < len; ++i) dot += std::conj(v[static_cast<std::size_t>(i)]) * col[i];
    dot *= 2.0;
    for (Eigen::Index i = 0; i < len; ++i) col[i] -= v[static_cast<std::size_t>(i)] * dot;
  }
}

// Columns [c0, c0+len) <- columns (I - 2vv^H), rows [i0, i1].
void reflect_cols(const View& h, const std::vector<Complex>& v, Eigen::Index c0, Eigen::Index i0,
                  Eigen::Index i1, std::vector<Complex>& work) {
  const auto len = static_cast<Eigen::Index>(v.size());
  const Eigen::Index rows = i1 - i0 + 1;
  if (rows <= 0) return;
  work.assign(static_cast<std::size_t>(rows), Complex(0.0, 0.0));
  for (Eigen::Index j = 0; j < len; ++j) {
    const Complex vj = v[static_cast<std::size_t>(j)];
    const Complex* col = h.col(c0 + j) + i0;
    for (Eigen::Index i = 0; i < rows; ++i) work[static_cast<std::size_t>(i)] += col[i] * vj;
  }
  for (Eigen::Index j = 0; j < len; ++j) {
    const Complex vj = 2.0 * std::conj(v[static_cast<std::size_t>(j)]);
    Complex* col = h.col(c0 + j) + i0;
    for (Eigen::Index i = 0; i < rows; ++i) col[i] -= work[static_cast<std::size_t>(i)] * vj;
  }
}

// Negligible subdiagonal test: conventional relative criterion (on the full
// complex entry; subdiagonals are not kept real here) refined by
// the Ahues-Tisseur test.
bool negligible_subdiagonal(const View& h, Eigen::Index k, Eigen::Index l) {
  const Complex sub = h(k, k - 1);
  if (cabs1(sub) <= kSafeMin) return true;
  double tst = cabs1(h(k - 1, k - 1)) + cabs1(h(k, k));
  if (tst == 0.0) {
    if (k - 2 >= l) tst += cabs1(h(k - 1, k - 2));
    if (k + 1 < h.ld) tst += cabs1(h(k + 1, k));
  }
  if (cabs1(sub) > kEps * tst) return false;
  const double ab = std::max(cabs1(sub), cabs1(h(k - 1, k)));
  const double ba = std::min(cabs1(sub), cabs1(h(k - 1, k)));
  const double aa = std::max(cabs1(h(k, k)), cabs1(h(k - 1, k - 1) - h(k, k)));
  const double bb = std::min(cabs1(h(k, k)), cabs1(h(k - 1, k - 1) - h(k, k)));
  const double s = aa + ab;
  return ba * (ab / s) <= std::max(kSafeMin, kEps * (bb * (aa / s)));
}

// Eigenvalue of the trailing 2x2 block [[a b] [c d]] closer to d.
Complex wilkinson_shift(const View& h, Eigen::Index i) {
  Complex t = h(i, i);
  const Complex u = std::sqrt(h(i - 1, i)) * std::sqrt(h(i, i - 1));
  double s = cabs1(u);
  if (s == 0.0) return t;
  const Complex x = 0.5 * (h(i - 1, i - 1) - t);
  const double sx = cabs1(x);
  s = std::max(s, sx);
  Complex y = s * std::sqrt((x / s) * (x / s) + (u / s) * (u / s));
  if (sx > 0.0) {
    const Complex xs = x / sx;
    if (xs.real() * y.real() + xs.imag() * y.imag() < 0.0) y = -y;
  }
  const Complex denom = x + y;
  if (cabs1(denom) == 0.0) return t;
  return t - u * (u / denom);
}

struct QrState {
  View h;
  Eigen::Index n;
  Eigen::MatrixXcd* z;  // Schur vectors, or null for eigenvalues only
  double deflated_mass = 0.0;
  std::vector<Complex> v, work;

  Eigen::Index row_lo(Eigen::Index l) const { return z ? 0 : l; }
  Eigen::Index col_hi(Eigen::Index ihi) const { return z ? n - 1 : ihi; }
};

void qr_sweep(QrState& st, Eigen::Index l, Eigen::Index ihi, Complex shift) {
  const View& h = st.h;
  const Eigen::Index top = st.row_lo(l);
  const Eigen::Index right = st.col_hi(ihi);
  View zv{st.z ? st.z->data() : nullptr, st.n};
  for (Eigen::Index k = l; k < ihi; ++k) {
    Rotation g;
    if (k == l) {
      g = make_rotation(h(l, l) - shift, h(l + 1, l));
      rotate_rows(h, g, k, k, right);
    } else {
      g = make_rotation(h(k, k - 1), h(k + 1, k - 1));
      h(k, k - 1) = g.r;
      h(k + 1, k - 1) = Complex(0.0, 0.0);
      rotate_rows(h, g, k, k, right);
    }
    rotate_cols(h, g, k, top, std::min(k + 2, ihi));
    if (st.z) rotate_cols(zv, g, k, 0, st.n - 1);
  }
}

// Early deflation on the trailing window of the active block [l, ihi]. Returns
// the number of eigenvalues split off.
Eigen::Index aggressive_deflation(QrState& st, Eigen::Index l, Eigen::Index ihi) {
  const View& h = st.h;
  const Eigen::Index nh = ihi - l + 1;
  const Eigen::Index w = std::min<Eigen::Index>(nh - 1, std::max<Eigen::Index>(8, nh / 12));
  const Eigen::Index kw = ihi - w + 1;
  const Complex spike_source = h(kw, kw - 1);

  Eigen::MatrixXcd window(w, w);
  for (Eigen::Index j = 0; j < w; ++j)
    for (Eigen::Index i = 0; i < w; ++i) window(i, j) = h(kw + i, kw + j);
  for (Eigen::Index j = 0; j < w; ++j)
    for (Eigen::Index i = j + 2; i < w; ++i) window(i, j) = Complex(0.0, 0.0);

  Eigen::MatrixXcd schur_vectors = Eigen::MatrixXcd::Identity(w, w);
  std::vector<Complex> window_values;
  const auto stats = detail::hessenberg_qr(window, window_values, static_cast<int>(40 * w),
                                           &schur_vectors);
  if (!stats.converged) return 0;

  std::vector<Complex> spike(static_cast<std::size_t>(w));
  for (Eigen::Index j = 0; j < w; ++j)
    spike[static_cast<std::size_t>(j)] = spike_source * std::conj(schur_vectors(0, j));

  Eigen::Index deflated = 0;
  for (Eigen::Index j = w - 1; j >= 0; --j) {
    const double scale = std::max(cabs1(window(j, j)), kSafeMin / kEps);
    if (cabs1(spike[static_cast<std::size_t>(j)]) > kEps * scale) break;
    ++deflated;
  }
  if (deflated == 0) return 0;

  // Commit the window similarity V^H H V.
  const Eigen::Index top = st.row_lo(l);
  const Eigen::Index right = st.col_hi(ihi);
  for (Eigen::Index j = 0; j < w; ++j)
    for (Eigen::Index i = 0; i < w; ++i)
      h(kw + i, kw + j) = i <= j ? window(i, j) : Complex(0.0, 0.0);
  for (Eigen::Index i = 0; i < w; ++i) {
    const auto& s = spike[static_cast<std::size_t>(i)];
    if (i >= w - deflated) {
      st.deflated_mass += std::abs(s);
      h(kw + i, kw - 1) = Complex(0.0, 0.0);
    } else {
      h(kw + i, kw - 1) = s;
    }
  }
  if (kw - 1 >= top) {
    Eigen::MatrixXcd above(kw - top, w);
    for (Eigen::Index j = 0; j < w; ++j)
      for (Eigen::Index i = top; i < kw; ++i) above(i - top, j) = h(i, kw + j);
    above = above * schur_vectors;
    for (Eigen::Index j = 0; j < w; ++j)
      for (Eigen::Index i = top; i < kw; ++i) h(i, kw + j) = above(i - top, j);
  }
  if (right > ihi) {
    Eigen::MatrixXcd beside(w, right - ihi);
    for (Eigen::Index j = ihi + 1; j <= right; ++j)
      for (Eigen::Index i = 0; i < w; ++i) beside(i, j - ihi - 1) = h(kw + i, j);
    beside = schur_vectors.adjoint() * beside;
    for (Eigen::Index j = ihi + 1; j <= right; ++j)
      for (Eigen::Index i = 0; i < w; ++i) h(kw + i, j) = beside(i, j - ihi - 1);
  }
  if (st.z) st.z->middleCols(kw, w) = st.z->middleCols(kw, w) * schur_vectors;

  // Fold the surviving spike back into one subdiagonal entry and restore
  // Hessenberg form on the undeflated part of the window.
  const Eigen::Index m = w - deflated;
  View zv{st.z ? st.z->data() : nullptr, st.n};
  if (m > 1) {
    std::vector<Complex> x(static_cast<std::size_t>(m));
    for (Eigen::Index i = 0; i < m; ++i) x[static_cast<std::size_t>(i)] = h(kw + i, kw - 1);
    if (make_householder(x.data(), m, st.v)) {
      reflect_rows(h, st.v, kw, kw - 1, right);
      reflect_cols(h, st.v, kw, top, ihi, st.work);
      if (st.z) reflect_cols(zv, st.v, kw, 0, st.n - 1, st.work);
      for (Eigen::Index i = 1; i < m; ++i) h(kw + i, kw - 1) = Complex(0.0, 0.0);
    }
    for (Eigen::Index k = 0; k + 2 < m; ++k) {
      const Eigen::Index col = kw + k;
      const Eigen::Index r0 = col + 1;
      const Eigen::Index len = m - k - 1;
      if (!make_householder(h.col(col) + r0, len, st.v)) continue;
      reflect_rows(h, st.v, r0, col, right);
      reflect_cols(h, st.v, r0, top, ihi, st.work);
      if (st.z) reflect_cols(zv, st.v, r0, 0, st.n - 1, st.work);
      for (Eigen::Index i = r0 + 1; i < r0 + len; ++i) h(i, col) = Complex(0.0, 0.0);
    }
  }
  return deflated;
}

}  // namespace

int EigOptions::sweep_limit(Eigen::Index dim) const {
  return max_sweeps > 0 ? max_sweeps : static_cast<int>(40 * std::max<Eigen::Index>(dim, 1));
}

void EigOptions::validate(Eigen::Index dim) const {
  if (!(residual_tol > 0.0)) throw Error(ErrorKind::InvalidSpec, "residual_tol must be positive");
  if (max_sweeps != 0 && max_sweeps < dim)
    throw Error(ErrorKind::InvalidSpec, "max_sweeps must be >= matrix dimension");
}

namespace detail {

Eigen::VectorXd balance(Eigen::MatrixXcd& a) {
  const Eigen::Index n = a.rows();
  Eigen::VectorXd scale = Eigen::VectorXd::Ones(n);
  constexpr double radix = 2.0;
  bool changed = true;
  while (changed) {
    changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      double c = 0.0;
      double r = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i) continue;
        c += cabs1(a(j, i));
        r += cabs1(a(i, j));
      }
      if (c == 0.0 || r == 0.0) continue;
      double g = r / radix;
      double f = 1.0;
      const double s = c + r;
      while (c < g) {
        f *= radix;
        c *= radix * radix;
      }
      g = r * radix;
      while (c >= g) {
        f /= radix;
        c /= radix * radix;
      }
      if ((c + r) / f < 0.95 * s) {
        changed = true;
        scale(i) *= f;
        a.row(i) /= f;
        a.col(i) *= f;
      }
    }
  }
  return scale;
}

void reduce_to_hessenberg(Eigen::MatrixXcd& a) {
  const Eigen::Index n = a.rows();
  View h{a.data(), n};
  std::vector<Complex> v, work;
  for (Eigen::Index k = 0; k + 2 < n; ++k) {
    const Eigen::Index r0 = k + 1;
    const Eigen::Index len = n - r0;
    if (!make_householder(h.col(k) + r0, len, v)) continue;
    reflect_rows(h, v, r0, k, n - 1);
    reflect_cols(h, v, r0, 0, n - 1, work);
    for (Eigen::Index i = r0 + 1; i < n; ++i) h(i, k) = Complex(0.0, 0.0);
  }
}

HessenbergQrStats hessenberg_qr(Eigen::MatrixXcd& a, std::vector<Complex>& values, int max_sweeps,
                                Eigen::MatrixXcd* z) {
  const Eigen::Index n = a.rows();
  QrState st{View{a.data(), n}, n, z, 0.0, {}, {}};
  const View& h = st.h;
  HessenbergQrStats stats;
  values.assign(static_cast<std::size_t>(n), Complex(0.0, 0.0));

  Eigen::Index ihi = n - 1;
  int stalled = 0;
  while (ihi >= 0) {
    Eigen::Index l = ihi;
    while (l > 0 && !negligible_subdiagonal(h, l, 0)) --l;
    if (l > 0) {
      st.deflated_mass += std::abs(h(l, l - 1));
      h(l, l - 1) = Complex(0.0, 0.0);
    }
    if (l == ihi) {
      values[static_cast<std::size_t>(ihi)] = h(ihi, ihi);
      --ihi;
      stalled = 0;
      continue;
    }
    if (!z && ihi - l + 1 >= kAedMinBlock && aggressive_deflation(st, l, ihi) > 0) {
      stalled = 0;
      continue;
    }
    if (stats.sweeps >= max_sweeps) {
      for (Eigen::Index i = 0; i <= ihi; ++i) values[static_cast<std::size_t>(i)] = h(i, i);
      stats.deflated_mass = st.deflated_mass;
      return stats;
    }
    ++stalled;
    ++stats.sweeps;
    Complex shift;
    if (stalled % kExceptionalPeriod == 0) {
      // Fixed exceptional shift to break cycles; alternates between the two
      // ends of the active block.
      if ((stalled / kExceptionalPeriod) % 2 == 1)
        shift = h(l, l) + kExceptionalScale * std::abs(h(l + 1, l).real());
      else
        shift = h(ihi, ihi) + kExceptionalScale * std::abs(h(ihi, ihi - 1).real());
    } else {
      shift = wilkinson_shift(h, ihi);
    }
    qr_sweep(st, l, ihi, shift);
  }
  stats.converged = true;
  stats.deflated_mass = st.deflated_mass;
  return stats;
}

}  // namespace detail

namespace {

bool lex_less(const Complex& a, const Complex& b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

// Inverse iteration against the original matrix; eigenvalues within a
// cluster are orthogonalized against each other (classical Gram-Schmidt with
// one re-orthogonalization pass).
Eigen::MatrixXcd inverse_iteration(const Eigen::MatrixXcd& a, const std::vector<Complex>& values,
                                   double norm) {
  const Eigen::Index n = a.rows();
  Eigen::MatrixXcd vectors(n, n);
  const double perturb = std::max(norm, 1.0) * kEps * 16.0;
  const double cluster_radius = std::max(norm, 1.0) * 1e-8;
  for (Eigen::Index k = 0; k < n; ++k) {
    const Complex lambda = values[static_cast<std::size_t>(k)];
    Eigen::MatrixXcd shifted = a;
    shifted.diagonal().array() -= lambda + Complex(perturb, 0.5 * perturb);
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(shifted);

    std::vector<Eigen::Index> cluster;
    for (Eigen::Index j = 0; j < k; ++j)
      if (std::abs(values[static_cast<std::size_t>(j)] - lambda) <= cluster_radius) cluster.push_back(j);

    Eigen::VectorXcd x(n);
    for (Eigen::Index i = 0; i < n; ++i)
      x(i) = Complex(1.0 + 0.1 * static_cast<double>((i * 7 + k * 3) % 11), 0.05 * static_cast<double>(i % 5));
    x.normalize();
    for (int iter = 0; iter < 3; ++iter) {
      x = lu.solve(x);
      for (int pass = 0; pass < 2; ++pass)
        for (Eigen::Index j : cluster) x -= vectors.col(j) * vectors.col(j).dot(x);
      const double xn = x.norm();
      if (!(xn > 0.0) || !std::isfinite(xn)) break;
      x /= xn;
    }
    vectors.col(k) = x;
  }
  return vectors;
}

}  // namespace

SpectrumResult eigenvalues(const Eigen::MatrixXcd& a, const EigOptions& opts) {
  if (a.rows() != a.cols()) throw Error(ErrorKind::InvalidSpec, "matrix must be square");
  const Eigen::Index n = a.rows();
  opts.validate(n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i)
      if (!std::isfinite(a(i, j).real()) || !std::isfinite(a(i, j).imag()))
        throw Error(ErrorKind::NonFinite, "non-finite entry at (" + std::to_string(i) + ", " +
                                              std::to_string(j) + ")");

  SpectrumResult result;
  result.frobenius_norm = a.norm();
  if (n == 0) {
    result.converged = true;
    return result;
  }

  Eigen::MatrixXcd work = a;
  detail::balance(work);
  detail::reduce_to_hessenberg(work);
  const auto stats = detail::hessenberg_qr(work, result.eigenvalues, opts.sweep_limit(n));
  result.iterations = stats.sweeps;
  std::sort(result.eigenvalues.begin(), result.eigenvalues.end(), lex_less);

  const double norm = result.frobenius_norm;
  const double denom = norm > 0.0 ? norm : 1.0;
  result.max_residual = (stats.deflated_mass + static_cast<double>(n) * kEps * norm) / denom;

  if (opts.compute_vectors && stats.converged) {
    result.eigenvectors = inverse_iteration(a, result.eigenvalues, norm);
    double worst = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
      const auto& v = result.eigenvectors->col(k);
      const double r = (a * v - result.eigenvalues[static_cast<std::size_t>(k)] * v).norm();
      worst = std::max(worst, r / denom);
    }
    result.max_residual = worst;
  }
  result.converged = stats.converged && result.max_residual <= opts.residual_tol;
  return result;
}

SpectrumResult eigenvalues(const HamiltonianMatrix& h, const EigOptions& opts) {
  return eigenvalues(h.entries, opts);
}

namespace {

double directed_hausdorff(const std::vector<Complex>& from, const std::vector<Complex>& to) {
  double worst = 0.0;
  for (const auto& x : from) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& y : to) best = std::min(best, std::abs(x - y));
    worst = std::max(worst, best);
  }
  return worst;
}

double hausdorff(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  return std::max(directed_hausdorff(a, b), directed_hausdorff(b, a));
}

}  // namespace

SymmetryDefect spectrum_symmetry_defect(const SpectrumResult& s) {
  std::vector<Complex> conj_image, neg_image;
  conj_image.reserve(s.eigenvalues.size());
  neg_image.reserve(s.eigenvalues.size());
  for (const auto& lambda : s.eigenvalues) {
    conj_image.push_back(std::conj(lambda));
    neg_image.push_back(-lambda);
  }
  return {hausdorff(s.eigenvalues, conj_image), hausdorff(s.eigenvalues, neg_image)};
}

}  // namespace ptlat

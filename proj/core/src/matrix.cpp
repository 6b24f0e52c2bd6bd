#include "eann/matrix.hpp"

#include <algorithm>
#include <cmath>

namespace eann {

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(std::span<const double> v) { return std::sqrt(dot(v, v)); }

double norm_inf(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

bool all_finite(std::span<const double> v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

Matrix gram(const Matrix& a) {
    const std::size_t n = a.cols();
    Matrix g(n, n, 0.0);
    // Accumulate the lower triangle row by row, then mirror.
    for (std::size_t p = 0; p < a.rows(); ++p) {
        const auto r = a.row(p);
        for (std::size_t i = 0; i < n; ++i) {
            const double ri = r[i];
            if (ri == 0.0) continue;
            double* gi = &g(i, 0);
            for (std::size_t j = 0; j <= i; ++j) gi[j] += ri * r[j];
        }
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) g(i, j) = g(j, i);
    return g;
}

std::vector<double> transpose_times(const Matrix& a, std::span<const double> v) {
    std::vector<double> out(a.cols(), 0.0);
    for (std::size_t p = 0; p < a.rows(); ++p) {
        const auto r = a.row(p);
        const double vp = v[p];
        if (vp == 0.0) continue;
        for (std::size_t j = 0; j < a.cols(); ++j) out[j] += r[j] * vp;
    }
    return out;
}

namespace {

// In-place lower Cholesky; returns false on a non-positive pivot.
bool cholesky(Matrix& a) {
    const std::size_t n = a.rows();
    for (std::size_t j = 0; j < n; ++j) {
        double d = a(j, j);
        for (std::size_t k = 0; k < j; ++k) d -= a(j, k) * a(j, k);
        if (!(d > 0.0) || !std::isfinite(d)) return false;
        const double l = std::sqrt(d);
        a(j, j) = l;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = a(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= a(i, k) * a(j, k);
            a(i, j) = s / l;
        }
    }
    return true;
}

void cholesky_solve(const Matrix& l, std::span<const double> b, std::vector<double>& x) {
    const std::size_t n = l.rows();
    x.assign(b.begin(), b.end());
    for (std::size_t i = 0; i < n; ++i) {
        double s = x[i];
        for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * x[k];
        x[i] = s / l(i, i);
    }
    for (std::size_t ii = n; ii-- > 0;) {
        double s = x[ii];
        for (std::size_t k = ii + 1; k < n; ++k) s -= l(k, ii) * x[k];
        x[ii] = s / l(ii, ii);
    }
}

}  // namespace

bool solve_spd(Matrix a, std::span<const double> b, std::vector<double>& x) {
    const std::size_t n = a.rows();
    if (n == 0 || a.cols() != n || b.size() != n) return false;
    if (!all_finite(a.data()) || !all_finite(b)) return false;

    double max_diag = 0.0;
    for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, std::abs(a(i, i)));

    Matrix work = a;
    double boost = 0.0;
    for (int attempt = 0; attempt < 12; ++attempt) {
        if (attempt > 0) {
            boost = (boost == 0.0) ? std::max(1e-12 * max_diag, 1e-300) : boost * 100.0;
            if (boost > std::max(1.0, max_diag)) return false;
            work = a;
            for (std::size_t i = 0; i < n; ++i) work(i, i) += boost;
        }
        if (cholesky(work)) {
            cholesky_solve(work, b, x);
            return all_finite(x);
        }
    }
    return false;
}

}  // namespace eann

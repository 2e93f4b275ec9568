#pragma once

#include <cmath>
#include <vector>

#include "heatlab/errors.hpp"

namespace heatlab {

/// Full eigendecomposition of a dense symmetric matrix: Householder
/// tridiagonalization followed by implicit-shift QL (the classic
/// EISPACK/JAMA tred2 + tql2 pair). Eigenvalues ascending; vectors[k] is the
/// eigenvector for values[k], unit Euclidean norm.
struct SymmetricEigen {
    std::vector<double> values;
    std::vector<std::vector<double>> vectors;
};

inline SymmetricEigen dense_symmetric_eigen(std::vector<std::vector<double>> V) {
    const int n = static_cast<int>(V.size());
    std::vector<double> d(n, 0.0), e(n, 0.0);

    // tred2: Householder reduction, transformations accumulated in V.
    for (int j = 0; j < n; ++j) d[j] = V[n - 1][j];
    for (int i = n - 1; i > 0; --i) {
        double scale = 0.0, h = 0.0;
        for (int k = 0; k < i; ++k) scale += std::abs(d[k]);
        if (scale == 0.0) {
            e[i] = d[i - 1];
            for (int j = 0; j < i; ++j) {
                d[j] = V[i - 1][j];
                V[i][j] = 0.0;
                V[j][i] = 0.0;
            }
        } else {
            for (int k = 0; k < i; ++k) {
                d[k] /= scale;
                h += d[k] * d[k];
            }
            double f = d[i - 1];
            double g = std::sqrt(h);
            if (f > 0) g = -g;
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for (int j = 0; j < i; ++j) e[j] = 0.0;
            for (int j = 0; j < i; ++j) {
                f = d[j];
                V[j][i] = f;
                g = e[j] + V[j][j] * f;
                for (int k = j + 1; k <= i - 1; ++k) {
                    g += V[k][j] * d[k];
                    e[k] += V[k][j] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for (int j = 0; j < i; ++j) {
                e[j] /= h;
                f += e[j] * d[j];
            }
            double hh = f / (h + h);
            for (int j = 0; j < i; ++j) e[j] -= hh * d[j];
            for (int j = 0; j < i; ++j) {
                f = d[j];
                g = e[j];
                for (int k = j; k <= i - 1; ++k) V[k][j] -= (f * e[k] + g * d[k]);
                d[j] = V[i - 1][j];
                V[i][j] = 0.0;
            }
        }
        d[i] = h;
    }
    for (int i = 0; i < n - 1; ++i) {
        V[n - 1][i] = V[i][i];
        V[i][i] = 1.0;
        double h = d[i + 1];
        if (h != 0.0) {
            for (int k = 0; k <= i; ++k) d[k] = V[k][i + 1] / h;
            for (int j = 0; j <= i; ++j) {
                double g = 0.0;
                for (int k = 0; k <= i; ++k) g += V[k][i + 1] * V[k][j];
                for (int k = 0; k <= i; ++k) V[k][j] -= g * d[k];
            }
        }
        for (int k = 0; k <= i; ++k) V[k][i + 1] = 0.0;
    }
    for (int j = 0; j < n; ++j) {
        d[j] = V[n - 1][j];
        V[n - 1][j] = 0.0;
    }
    V[n - 1][n - 1] = 1.0;
    e[0] = 0.0;

    // tql2: implicit-shift QL on the tridiagonal (d, e).
    for (int i = 1; i < n; ++i) e[i - 1] = e[i];
    e[n - 1] = 0.0;
    double f = 0.0, tst1 = 0.0;
    const double eps = std::ldexp(1.0, -52);
    for (int l = 0; l < n; ++l) {
        tst1 = std::max(tst1, std::abs(d[l]) + std::abs(e[l]));
        int m = l;
        while (m < n && std::abs(e[m]) > eps * tst1) ++m;
        if (m > l) {
            int iter = 0;
            do {
                if (++iter > 60)
                    raise(ErrorKind::convergence_failure, "QL iteration stalled");
                double g = d[l];
                double p = (d[l + 1] - g) / (2.0 * e[l]);
                double r = std::hypot(p, 1.0);
                if (p < 0) r = -r;
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                double dl1 = d[l + 1];
                double h = g - d[l];
                for (int i2 = l + 2; i2 < n; ++i2) d[i2] -= h;
                f += h;
                p = d[m];
                double c = 1.0, c2 = c, c3 = c;
                double el1 = e[l + 1], s = 0.0, s2 = 0.0;
                for (int i2 = m - 1; i2 >= l; --i2) {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i2];
                    h = c * p;
                    r = std::hypot(p, e[i2]);
                    e[i2 + 1] = s * r;
                    s = e[i2] / r;
                    c = p / r;
                    p = c * d[i2] - s * g;
                    d[i2 + 1] = h + s * (c * g + s * d[i2]);
                    for (int k = 0; k < n; ++k) {
                        h = V[k][i2 + 1];
                        V[k][i2 + 1] = s * V[k][i2] + c * h;
                        V[k][i2] = c * V[k][i2] - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
            } while (std::abs(e[l]) > eps * tst1);
        }
        d[l] += f;
        e[l] = 0.0;
    }

    // sort ascending, carrying columns
    for (int i = 0; i < n - 1; ++i) {
        int k = i;
        double p = d[i];
        for (int j = i + 1; j < n; ++j)
            if (d[j] < p) {
                k = j;
                p = d[j];
            }
        if (k != i) {
            d[k] = d[i];
            d[i] = p;
            for (int j = 0; j < n; ++j) std::swap(V[j][i], V[j][k]);
        }
    }

    SymmetricEigen out;
    out.values = std::move(d);
    out.vectors.assign(n, std::vector<double>(n, 0.0));
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j) out.vectors[k][j] = V[j][k];
    return out;
}

} // namespace heatlab

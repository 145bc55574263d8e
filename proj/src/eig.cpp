#include "asymspec/eig.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace asymspec::eig {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Parlett-Reinsch balancing: diagonal similarity scaling by powers of the
// radix, so eigenvalues are preserved exactly while row/column norms are
// equalized.
void balance(Matrix& a) {
    const std::size_t n = a.rows();
    const double radix = 2.0, sqrdx = radix * radix;
    for (int pass = 0; pass < 100; ++pass) {
        bool done = true;
        for (std::size_t i = 0; i < n; ++i) {
            double c = 0.0, r = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) continue;
                c += std::abs(a(j, i));
                r += std::abs(a(i, j));
            }
            if (c == 0.0 || r == 0.0) continue;
            double g = r / radix, f = 1.0, s = c + r;
            while (c < g) {
                f *= radix;
                c *= sqrdx;
            }
            g = r * radix;
            while (c > g) {
                f /= radix;
                c /= sqrdx;
            }
            if ((c + r) / f < 0.95 * s) {
                done = false;
                g = 1.0 / f;
                for (std::size_t j = 0; j < n; ++j) a(i, j) *= g;
                for (std::size_t j = 0; j < n; ++j) a(j, i) *= f;
            }
        }
        if (done) return;
    }
}

// Householder reduction to upper Hessenberg form (similarity transform,
// transforms not accumulated). Entries below the subdiagonal are zeroed.
void hessenberg(Matrix& h) {
    const std::size_t n = h.rows();
    if (n < 3) return;
    std::vector<double> ort(n, 0.0);
    for (std::size_t m = 1; m + 1 < n; ++m) {
        double scale = 0.0;
        for (std::size_t i = m; i < n; ++i) scale += std::abs(h(i, m - 1));
        if (scale == 0.0) continue;
        double hh = 0.0;
        for (std::size_t i = n; i-- > m;) {
            ort[i] = h(i, m - 1) / scale;
            hh += ort[i] * ort[i];
        }
        double g = std::sqrt(hh);
        if (ort[m] > 0) g = -g;
        hh -= ort[m] * g;
        ort[m] -= g;
        // apply (I - u u^T / hh) from the left, then from the right
        for (std::size_t j = m; j < n; ++j) {
            double f = 0.0;
            for (std::size_t i = n; i-- > m;) f += ort[i] * h(i, j);
            f /= hh;
            for (std::size_t i = m; i < n; ++i) h(i, j) -= f * ort[i];
        }
        for (std::size_t i = 0; i < n; ++i) {
            double f = 0.0;
            for (std::size_t j = n; j-- > m;) f += ort[j] * h(i, j);
            f /= hh;
            for (std::size_t j = m; j < n; ++j) h(i, j) -= f * ort[j];
        }
        h(m, m - 1) = scale * g;
    }
    for (std::size_t i = 2; i < n; ++i)
        for (std::size_t j = 0; j + 2 <= i; ++j) h(i, j) = 0.0;
}

// Francis double-shift QR on a Hessenberg matrix; eigenvalues only.
// Complex pairs are emitted as exact conjugates. Total sweep budget is
// 30*n; exhausting it raises with diagnostics.
std::vector<cplx> hqr(Matrix& h) {
    const int nn = static_cast<int>(h.rows());
    std::vector<cplx> w(nn);
    double anorm = 0.0;
    for (int i = 0; i < nn; ++i)
        for (int j = std::max(i - 1, 0); j < nn; ++j) anorm += std::abs(h(i, j));

    const long sweep_budget = 30L * nn;
    long sweeps = 0;
    double exshift = 0.0;
    int n = nn - 1;
    int iter = 0;
    double p = 0, q = 0, r = 0;

    while (n >= 0) {
        // Find the smallest l with a negligible subdiagonal below it.
        int l = n;
        while (l > 0) {
            double s = std::abs(h(l - 1, l - 1)) + std::abs(h(l, l));
            if (s == 0.0) s = anorm;
            if (std::abs(h(l, l - 1)) <= kEps * s) {
                h(l, l - 1) = 0.0;
                break;
            }
            --l;
        }

        if (l == n) {
            w[n] = cplx(h(n, n) + exshift, 0.0);
            --n;
            iter = 0;
        } else if (l == n - 1) {
            double ww = h(n, n - 1) * h(n - 1, n);
            double pp = (h(n - 1, n - 1) - h(n, n)) / 2.0;
            double qq = pp * pp + ww;
            double zz = std::sqrt(std::abs(qq));
            double xx = h(n, n) + exshift;
            if (qq >= 0.0) {
                zz = (pp >= 0.0) ? pp + zz : pp - zz;
                w[n - 1] = cplx(xx + zz, 0.0);
                w[n] = (zz != 0.0) ? cplx(xx - ww / zz, 0.0) : w[n - 1];
            } else {
                w[n - 1] = cplx(xx + pp, zz);
                w[n] = cplx(xx + pp, -zz);
            }
            n -= 2;
            iter = 0;
        } else {
            double xx = h(n, n);
            double yy = h(n - 1, n - 1);
            double ww = h(n, n - 1) * h(n - 1, n);
            if (iter == 10 || iter == 20) {
                // exceptional shift to break symmetric stalls
                exshift += xx;
                for (int i = l; i <= n; ++i) h(i, i) -= xx;
                double s = std::abs(h(n, n - 1)) + std::abs(h(n - 1, n - 2));
                xx = yy = 0.75 * s;
                ww = -0.4375 * s * s;
            }
            ++iter;
            if (++sweeps > sweep_budget) {
                std::ostringstream msg;
                msg << "eig_general: QR failed to converge within " << sweep_budget
                    << " sweeps (n=" << nn << ", matrix norm=" << anorm
                    << ", unresolved block rows " << l << ".." << n << ")";
                throw std::runtime_error(msg.str());
            }

            // Look for two consecutive small subdiagonals.
            int m = n - 2;
            while (m >= l) {
                double zz = h(m, m);
                double rr = xx - zz;
                double ss = yy - zz;
                p = (rr * ss - ww) / h(m + 1, m) + h(m, m + 1);
                q = h(m + 1, m + 1) - zz - rr - ss;
                r = h(m + 2, m + 1);
                double scale = std::abs(p) + std::abs(q) + std::abs(r);
                p /= scale;
                q /= scale;
                r /= scale;
                if (m == l) break;
                if (std::abs(h(m, m - 1)) * (std::abs(q) + std::abs(r)) <
                    kEps * std::abs(p) *
                        (std::abs(h(m - 1, m - 1)) + std::abs(zz) + std::abs(h(m + 1, m + 1))))
                    break;
                --m;
            }
            for (int i = m + 2; i <= n; ++i) {
                h(i, i - 2) = 0.0;
                if (i > m + 2) h(i, i - 3) = 0.0;
            }

            // One implicit double-shift sweep over rows l..n.
            for (int k = m; k <= n - 1; ++k) {
                bool notlast = (k != n - 1);
                double scale = 0.0;
                if (k != m) {
                    p = h(k, k - 1);
                    q = h(k + 1, k - 1);
                    r = notlast ? h(k + 2, k - 1) : 0.0;
                    scale = std::abs(p) + std::abs(q) + std::abs(r);
                    if (scale != 0.0) {
                        p /= scale;
                        q /= scale;
                        r /= scale;
                    }
                }
                double s = std::sqrt(p * p + q * q + r * r);
                if (p < 0.0) s = -s;
                if (s == 0.0) continue;
                if (k != m)
                    h(k, k - 1) = -s * scale;
                else if (l != m)
                    h(k, k - 1) = -h(k, k - 1);
                p += s;
                double px = p / s, py = q / s, pz = r / s;
                q /= p;
                r /= p;
                for (int j = k; j <= n; ++j) {
                    double pp = h(k, j) + q * h(k + 1, j);
                    if (notlast) {
                        pp += r * h(k + 2, j);
                        h(k + 2, j) -= pp * pz;
                    }
                    h(k + 1, j) -= pp * py;
                    h(k, j) -= pp * px;
                }
                int upper = std::min(n, k + 3);
                for (int i = l; i <= upper; ++i) {
                    double pp = px * h(i, k) + py * h(i, k + 1);
                    if (notlast) {
                        pp += pz * h(i, k + 2);
                        h(i, k + 2) -= pp * r;
                    }
                    h(i, k + 1) -= pp * q;
                    h(i, k) -= pp;
                }
            }
        }
    }
    return w;
}

// Householder tridiagonalization with accumulated transformations
// (EISPACK tred2 lineage).
void tred2(Matrix& v, std::vector<double>& d, std::vector<double>& e) {
    const int n = static_cast<int>(v.rows());
    for (int j = 0; j < n; ++j) d[j] = v(n - 1, j);

    for (int i = n - 1; i > 0; --i) {
        double scale = 0.0, hh = 0.0;
        for (int k = 0; k < i; ++k) scale += std::abs(d[k]);
        if (scale == 0.0) {
            e[i] = d[i - 1];
            for (int j = 0; j < i; ++j) {
                d[j] = v(i - 1, j);
                v(i, j) = 0.0;
                v(j, i) = 0.0;
            }
        } else {
            for (int k = 0; k < i; ++k) {
                d[k] /= scale;
                hh += d[k] * d[k];
            }
            double f = d[i - 1];
            double g = std::sqrt(hh);
            if (f > 0) g = -g;
            e[i] = scale * g;
            hh -= f * g;
            d[i - 1] = f - g;
            for (int j = 0; j < i; ++j) e[j] = 0.0;
            for (int j = 0; j < i; ++j) {
                f = d[j];
                v(j, i) = f;
                g = e[j] + v(j, j) * f;
                for (int k = j + 1; k <= i - 1; ++k) {
                    g += v(k, j) * d[k];
                    e[k] += v(k, j) * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for (int j = 0; j < i; ++j) {
                e[j] /= hh;
                f += e[j] * d[j];
            }
            double corr = f / (hh + hh);
            for (int j = 0; j < i; ++j) e[j] -= corr * d[j];
            for (int j = 0; j < i; ++j) {
                f = d[j];
                g = e[j];
                for (int k = j; k <= i - 1; ++k) v(k, j) -= (f * e[k] + g * d[k]);
                d[j] = v(i - 1, j);
                v(i, j) = 0.0;
            }
        }
        d[i] = hh;
    }

    for (int i = 0; i < n - 1; ++i) {
        v(n - 1, i) = v(i, i);
        v(i, i) = 1.0;
        double hh = d[i + 1];
        if (hh != 0.0) {
            for (int k = 0; k <= i; ++k) d[k] = v(k, i + 1) / hh;
            for (int j = 0; j <= i; ++j) {
                double g = 0.0;
                for (int k = 0; k <= i; ++k) g += v(k, i + 1) * v(k, j);
                for (int k = 0; k <= i; ++k) v(k, j) -= g * d[k];
            }
        }
        for (int k = 0; k <= i; ++k) v(k, i + 1) = 0.0;
    }
    for (int j = 0; j < n; ++j) {
        d[j] = v(n - 1, j);
        v(n - 1, j) = 0.0;
    }
    v(n - 1, n - 1) = 1.0;
    e[0] = 0.0;
}

// Implicit QL with Wilkinson shifts on the tridiagonal form, rotating the
// accumulated vectors along (EISPACK tql2 lineage).
void tql2(Matrix& v, std::vector<double>& d, std::vector<double>& e) {
    const int n = static_cast<int>(v.rows());
    for (int i = 1; i < n; ++i) e[i - 1] = e[i];
    e[n - 1] = 0.0;

    double f = 0.0, tst1 = 0.0;
    for (int l = 0; l < n; ++l) {
        tst1 = std::max(tst1, std::abs(d[l]) + std::abs(e[l]));
        int m = l;
        while (m < n && std::abs(e[m]) > kEps * tst1) ++m;
        if (m > l) {
            int iter = 0;
            do {
                if (++iter > 50)
                    throw std::runtime_error("eig_symmetric: QL failed to converge");
                double g = d[l];
                double p = (d[l + 1] - g) / (2.0 * e[l]);
                double r = std::hypot(p, 1.0);
                if (p < 0) r = -r;
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                double dl1 = d[l + 1];
                double h = g - d[l];
                for (int i = l + 2; i < n; ++i) d[i] -= h;
                f += h;
                p = d[m];
                double c = 1.0, c2 = c, c3 = c;
                double el1 = e[l + 1], s = 0.0, s2 = 0.0;
                for (int i = m - 1; i >= l; --i) {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = std::hypot(p, e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for (int k = 0; k < n; ++k) {
                        h = v(k, i + 1);
                        v(k, i + 1) = s * v(k, i) + c * h;
                        v(k, i) = c * v(k, i) - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
            } while (std::abs(e[l]) > kEps * tst1);
        }
        d[l] += f;
        e[l] = 0.0;
    }
}

}  // namespace

bool modulus_order(const cplx& a, const cplx& b) {
    double ma = std::abs(a), mb = std::abs(b);
    if (ma != mb) return ma > mb;
    if (a.real() != b.real()) return a.real() > b.real();
    return a.imag() > b.imag();
}

cplx ComplexSpectrum::max_modulus() const {
    if (eigenvalues.empty()) throw std::invalid_argument("max_modulus: empty spectrum");
    return eigenvalues.front();
}

cplx ComplexSpectrum::sum() const {
    cplx s(0.0, 0.0);
    for (const cplx& v : eigenvalues) s += v;
    return s;
}

double ComplexSpectrum::spectral_radius() const {
    return eigenvalues.empty() ? 0.0 : std::abs(eigenvalues.front());
}

ComplexSpectrum eig_general(Matrix a) {
    if (a.rows() == 0 || a.rows() != a.cols())
        throw std::invalid_argument("eig_general: matrix must be square and non-empty");
    ComplexSpectrum s;
    if (a.rows() == 1) {
        s.eigenvalues = {cplx(a(0, 0), 0.0)};
        return s;
    }
    balance(a);
    hessenberg(a);
    s.eigenvalues = hqr(a);
    std::sort(s.eigenvalues.begin(), s.eigenvalues.end(), modulus_order);
    return s;
}

SymEigen eig_symmetric(const Matrix& a) {
    const std::size_t n = a.rows();
    if (n == 0 || n != a.cols())
        throw std::invalid_argument("eig_symmetric: matrix must be square and non-empty");
    double asym = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            asym = std::max(asym, std::abs(a(i, j) - a(j, i)));
    if (asym > 1e-10) {
        std::ostringstream msg;
        msg << "eig_symmetric: input is not symmetric (max |a_ij - a_ji| = " << asym << ")";
        throw std::invalid_argument(msg.str());
    }

    SymEigen out;
    out.vectors = a;
    out.eigenvalues.assign(n, 0.0);
    std::vector<double> e(n, 0.0);
    tred2(out.vectors, out.eigenvalues, e);
    tql2(out.vectors, out.eigenvalues, e);

    // descending eigenvalue order
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) {
        return out.eigenvalues[i] > out.eigenvalues[j];
    });
    Matrix sorted(n, n);
    std::vector<double> lam(n);
    for (std::size_t c = 0; c < n; ++c) {
        lam[c] = out.eigenvalues[idx[c]];
        for (std::size_t r = 0; r < n; ++r) sorted(r, c) = out.vectors(r, idx[c]);
    }

    // orient each vector so its largest-magnitude entry is positive
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t arg = 0;
        double best = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            if (std::abs(sorted(r, c)) > best) {
                best = std::abs(sorted(r, c));
                arg = r;
            }
        }
        if (sorted(arg, c) < 0.0)
            for (std::size_t r = 0; r < n; ++r) sorted(r, c) = -sorted(r, c);
    }

    out.eigenvalues = std::move(lam);
    out.vectors = std::move(sorted);
    return out;
}

std::size_t real_axis_count(const ComplexSpectrum& s, double eps) {
    std::size_t count = 0;
    for (const cplx& v : s.eigenvalues)
        if (std::abs(v.imag()) <= eps) ++count;
    return count;
}

double default_real_axis_eps(const ComplexSpectrum& s) {
    return 1e-8 * s.spectral_radius();
}

}  // namespace asymspec::eig

#pragma once

#include <functional>
#include <random>
#include <vector>

#include "locc/linalg.hpp"

namespace locc {

using Rng = std::mt19937_64;

inline Matrix random_unitary(Rng& rng, int d) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix g(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) g(i, j) = Complex(gauss(rng), gauss(rng));
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ();
    Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int k = 0; k < d; ++k) {
        Complex diag = r(k, k);
        q.col(k) *= diag / std::abs(diag);
    }
    return q;
}

inline Vector random_state(Rng& rng, long d) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vector v(d);
    for (long i = 0; i < d; ++i) v(i) = Complex(gauss(rng), gauss(rng));
    return v;
}

// Unitary from a Hermitian generator parameterized by d*d real numbers:
// U = exp(iH) with H = sum of the standard Hermitian basis elements.
inline Matrix unitary_from_params(const std::vector<double>& params, int d) {
    Matrix h = Matrix::Zero(d, d);
    std::size_t idx = 0;
    for (int i = 0; i < d; ++i) h(i, i) = params[idx++];
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j) {
            Complex off(params[idx], params[idx + 1]);
            idx += 2;
            h(i, j) = off;
            h(j, i) = std::conj(off);
        }
    Eigen::SelfAdjointEigenSolver<Matrix> eig(h);
    Matrix phases = Matrix::Zero(d, d);
    for (int k = 0; k < d; ++k) phases(k, k) = std::polar(1.0, eig.eigenvalues()(k));
    return eig.eigenvectors() * phases * eig.eigenvectors().adjoint();
}

// Plain Nelder-Mead over R^n; derivative-free, good enough for the small
// search spaces (<= 25 parameters) this project ever optimizes.
inline std::pair<std::vector<double>, double> nelder_mead(
    const std::function<double(const std::vector<double>&)>& f, std::vector<double> x0,
    int max_iters, double initial_step = 0.5, double f_target = 0.0) {
    const double alpha = 1.0, gamma = 2.0, rho = 0.5, sigma = 0.5;
    std::size_t n = x0.size();
    std::vector<std::vector<double>> simplex{x0};
    for (std::size_t k = 0; k < n; ++k) {
        auto p = x0;
        p[k] += initial_step;
        simplex.push_back(p);
    }
    std::vector<double> values;
    for (auto& p : simplex) values.push_back(f(p));

    auto order = [&] {
        std::vector<std::size_t> idx(simplex.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return values[a] < values[b]; });
        std::vector<std::vector<double>> sp;
        std::vector<double> sv;
        for (auto i : idx) {
            sp.push_back(simplex[i]);
            sv.push_back(values[i]);
        }
        simplex = sp;
        values = sv;
    };

    for (int iter = 0; iter < max_iters; ++iter) {
        order();
        if (values[0] <= f_target) break;
        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < n; ++k) centroid[k] += simplex[i][k] / n;

        auto blend = [&](double t) {
            std::vector<double> p(n);
            for (std::size_t k = 0; k < n; ++k)
                p[k] = centroid[k] + t * (simplex[n][k] - centroid[k]);
            return p;
        };
        auto reflected = blend(-alpha);
        double fr = f(reflected);
        if (fr < values[0]) {
            auto expanded = blend(-gamma);
            double fe = f(expanded);
            if (fe < fr) {
                simplex[n] = expanded;
                values[n] = fe;
            } else {
                simplex[n] = reflected;
                values[n] = fr;
            }
        } else if (fr < values[n - 1]) {
            simplex[n] = reflected;
            values[n] = fr;
        } else {
            auto contracted = blend(fr < values[n] ? -rho : rho);
            double fc = f(contracted);
            if (fc < std::min(fr, values[n])) {
                simplex[n] = contracted;
                values[n] = fc;
            } else {
                for (std::size_t i = 1; i <= n; ++i) {
                    for (std::size_t k = 0; k < n; ++k)
                        simplex[i][k] = simplex[0][k] + sigma * (simplex[i][k] - simplex[0][k]);
                    values[i] = f(simplex[i]);
                }
            }
        }
    }
    order();
    return {simplex[0], values[0]};
}

namespace detail {

// Unit vector x with x^dag B x = 0 for a trace-zero 2x2 matrix B (such a
// vector always exists; closed form via one phase and one rotation angle).
inline Eigen::Vector2cd zero_quadratic_form_2x2(const Eigen::Matrix2cd& b) {
    Complex b00 = b(0, 0);
    if (std::abs(b00) == 0.0) return Eigen::Vector2cd(1.0, 0.0);
    Complex p = b(0, 1) * std::conj(b00);
    Complex q = b(1, 0) * std::conj(b00);
    double a = p.imag() + q.imag();
    double c = p.real() - q.real();
    double phi = std::atan2(-a, c);  // makes c(phi) a real multiple of b00
    Complex cphi = b(0, 1) * std::polar(1.0, phi) + b(1, 0) * std::polar(1.0, -phi);
    double r = (cphi * std::conj(b00)).real() / std::norm(b00);
    double two_theta = std::atan2(-2.0, r);
    double theta = two_theta / 2.0;
    return Eigen::Vector2cd(std::cos(theta), std::polar(std::sin(theta), phi));
}

}  // namespace detail

// Returns a unitary U whose columns u_k satisfy u_k^dag C u_k ~ 0 for a
// trace-zero matrix C. Pairwise rotations average the diagonal of U^dag C U
// toward zero; each sweep strictly contracts the diagonal norm.
inline Matrix zero_diagonal_basis(const Matrix& c, Rng& rng, double threshold = 1e-14,
                                  int max_sweeps = 200) {
    int d = static_cast<int>(c.rows());
    Matrix u = random_unitary(rng, d);
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double obj = 0.0;
        for (int k = 0; k < d; ++k) obj += std::norm(Complex(u.col(k).adjoint() * c * u.col(k)));
        if (obj < threshold) return u;
        for (int i = 0; i < d; ++i)
            for (int j = i + 1; j < d; ++j) {
                Eigen::Matrix2cd b;
                b(0, 0) = Complex(u.col(i).adjoint() * c * u.col(i));
                b(0, 1) = Complex(u.col(i).adjoint() * c * u.col(j));
                b(1, 0) = Complex(u.col(j).adjoint() * c * u.col(i));
                b(1, 1) = Complex(u.col(j).adjoint() * c * u.col(j));
                Complex half_trace = (b(0, 0) + b(1, 1)) / 2.0;
                Eigen::Matrix2cd b0 = b;
                b0(0, 0) -= half_trace;
                b0(1, 1) -= half_trace;
                Eigen::Vector2cd x = detail::zero_quadratic_form_2x2(b0);
                Eigen::Vector2cd y(-std::conj(x(1)), std::conj(x(0)));
                Vector ui = u.col(i), uj = u.col(j);
                u.col(i) = x(0) * ui + x(1) * uj;
                u.col(j) = y(0) * ui + y(1) * uj;
            }
    }
    return u;
}

}  // namespace locc

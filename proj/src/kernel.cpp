#include "dcp/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "dcp/errors.hpp"

namespace dcp {

namespace {

constexpr double kPi = 3.14159265358979323846;

// zeta(2n) for the Clausen series coefficients.
double zeta_even(int n) {
    // closed forms for the slowly converging low orders
    static const double low[] = {
        0.0,
        1.6449340668482264365,   // pi^2/6
        1.0823232337111381916,   // pi^4/90
        1.0173430619844491397,   // pi^6/945
        1.0040773561979443394,   // pi^8/9450
    };
    if (n <= 4) return low[n];
    double s = 1.0;
    for (int k = 2; k <= 200; ++k) {
        double t = std::pow(double(k), -2.0 * n);
        s += t;
        if (t < 1e-18) break;
    }
    return s;
}

// Clausen's integral Cl2(theta) = -∫₀^θ log|2 sin(t/2)| dt on [0, pi].
double clausen2(double theta) {
    if (theta <= 0.0) return 0.0;
    static const std::vector<double> coeff = [] {
        std::vector<double> c(31, 0.0);
        for (int n = 1; n <= 30; ++n) {
            c[n] = zeta_even(n) /
                   (n * (2.0 * n + 1.0) * std::pow(2.0 * kPi, 2.0 * n));
        }
        return c;
    }();
    double sum = theta * (1.0 - std::log(theta));
    const double t2 = theta * theta;
    double p = theta;  // theta^(2n+1) running power
    for (int n = 1; n <= 30; ++n) {
        p *= t2;
        double term = coeff[n] * p;
        sum += term;
        if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    }
    return sum;
}

// Euclidean angles of a triangle given in logarithmic side lengths, with
// the broken extension. Scale-invariant, safe for arbitrary finite input.
TriangleAngles angles_from_log_sides(double x, double y, double z) {
    TriangleAngles r;
    const double m = std::max({x, y, z});
    const double s[3] = {std::exp(x - m), std::exp(y - m), std::exp(z - m)};
    int im = 0;
    if (s[1] > s[im]) im = 1;
    if (s[2] > s[im]) im = 2;
    const int j = (im + 1) % 3, k = (im + 2) % 3;
    if (s[im] >= s[j] + s[k]) {
        r.broken = true;
        r.broken_index = im;
        r.alpha = {0.0, 0.0, 0.0};
        r.alpha[im] = kPi;
        return r;
    }
    // half-angle formula for the two angles opposite the shorter sides
    auto half_angle = [&](int i) {
        const int a = (i + 1) % 3, b = (i + 2) % 3;
        double num = (s[i] - s[a] + s[b]) * (s[i] + s[a] - s[b]);
        double den = (-s[i] + s[a] + s[b]) * (s[i] + s[a] + s[b]);
        return 2.0 * std::atan(std::sqrt(num / den));
    };
    r.alpha[j] = half_angle(j);
    r.alpha[k] = half_angle(k);
    r.alpha[im] = kPi - r.alpha[j] - r.alpha[k];
    return r;
}

// log(sinh t) for t > 0 without overflow.
double log_sinh(double t) {
    if (t > 20.0) return t - std::log(2.0) + std::log1p(-std::exp(-2.0 * t));
    return std::log(std::sinh(t));
}

// 2 arsinh(e^s) without overflow.
double two_asinh_exp(double s) {
    if (s > 30.0) return 2.0 * (s + std::log(2.0));
    return 2.0 * std::asinh(std::exp(s));
}

}  // namespace

double lobachevsky(double x) {
    // reduce to [0, pi) using periodicity, then to [0, pi/2] using oddness
    double r = x - kPi * std::floor(x / kPi);
    if (r == 0.0) return 0.0;
    double val;
    if (r > 0.5 * kPi) {
        val = -0.5 * clausen2(2.0 * (kPi - r));
    } else {
        val = 0.5 * clausen2(2.0 * r);
    }
    return val;
}

TriangleAngles euclidean_angles(double a, double b, double c) {
    if (!(a > 0.0) || !(b > 0.0) || !(c > 0.0))
        throw NonPositiveLengthError("euclidean_angles: sides must be positive");
    return angles_from_log_sides(std::log(a), std::log(b), std::log(c));
}

TriangleAngles hyperbolic_angles(double a, double b, double c) {
    if (!(a > 0.0) || !(b > 0.0) || !(c > 0.0))
        throw NonPositiveLengthError("hyperbolic_angles: sides must be positive");
    TriangleAngles r;
    const double s[3] = {a, b, c};
    int im = 0;
    if (s[1] > s[im]) im = 1;
    if (s[2] > s[im]) im = 2;
    const int j = (im + 1) % 3, k = (im + 2) % 3;
    if (s[im] >= s[j] + s[k]) {
        r.broken = true;
        r.broken_index = im;
        r.alpha = {0.0, 0.0, 0.0};
        r.alpha[im] = kPi;
        return r;
    }
    auto half_angle = [&](int i) {
        const int p = (i + 1) % 3, q = (i + 2) % 3;
        double lnum = log_sinh(0.5 * (s[i] - s[p] + s[q])) +
                      log_sinh(0.5 * (s[i] + s[p] - s[q]));
        double lden = log_sinh(0.5 * (-s[i] + s[p] + s[q])) +
                      log_sinh(0.5 * (s[i] + s[p] + s[q]));
        return 2.0 * std::atan(std::exp(0.5 * (lnum - lden)));
    };
    r.alpha[0] = half_angle(0);
    r.alpha[1] = half_angle(1);
    r.alpha[2] = half_angle(2);
    return r;
}

double f_value_grad_hess(double x, double y, double z, TriangleDerivatives& d) {
    const TriangleAngles ang = angles_from_log_sides(x, y, z);
    const double a = ang.alpha[0], b = ang.alpha[1], g = ang.alpha[2];
    d.broken = ang.broken;
    d.grad = Eigen::Vector3d(a, b, g);
    double value = a * x + b * y + g * z;
    if (ang.broken) {
        d.cot.setZero();
        d.hess.setZero();
        return value;
    }
    value += lobachevsky(a) + lobachevsky(b) + lobachevsky(g);
    d.cot = Eigen::Vector3d(std::cos(a) / std::sin(a), std::cos(b) / std::sin(b),
                            std::cos(g) / std::sin(g));
    // cot a (dy-dz)^2 + cot b (dz-dx)^2 + cot g (dx-dy)^2
    d.hess.setZero();
    for (int i = 0; i < 3; ++i) {
        const int p = (i + 1) % 3, q = (i + 2) % 3;
        const double w = d.cot[i];
        d.hess(p, p) += w;
        d.hess(q, q) += w;
        d.hess(p, q) -= w;
        d.hess(q, p) -= w;
    }
    // the cotangent terms are *2 relative to the Hessian: the quadratic form
    // v^T H v expands each cross pair twice already, so H above is correct.
    return value;
}

Eigen::Matrix3d euclidean_angle_log_derivatives(const TriangleAngles& ang) {
    Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
    if (ang.broken) return m;
    const double cot[3] = {std::cos(ang.alpha[0]) / std::sin(ang.alpha[0]),
                           std::cos(ang.alpha[1]) / std::sin(ang.alpha[1]),
                           std::cos(ang.alpha[2]) / std::sin(ang.alpha[2])};
    for (int i = 0; i < 3; ++i) {
        const int j = (i + 1) % 3, k = (i + 2) % 3;
        m(i, i) = cot[j] + cot[k];
        m(i, j) = -cot[k];
        m(i, k) = -cot[j];
    }
    return m;
}

PrismData prism_data(double l12, double l23, double l31, double l1, double l2,
                     double l3) {
    PrismData p;
    p.ell[0] = two_asinh_exp(0.5 * (l12 - l1 - l2));
    p.ell[1] = two_asinh_exp(0.5 * (l23 - l2 - l3));
    p.ell[2] = two_asinh_exp(0.5 * (l31 - l3 - l1));
    // alpha[i] at base vertex i+1, opposite the side not touching it
    const TriangleAngles ang =
        hyperbolic_angles(p.ell[1], p.ell[2], p.ell[0]);  // a1 opp l23, ...
    p.broken = ang.broken;
    p.broken_index = ang.broken_index;
    const double a1 = ang.alpha[0], a2 = ang.alpha[1], a3 = ang.alpha[2];
    p.alpha = {a1, a2, a3};
    p.alpha_edge = {0.5 * (kPi - a1 - a2 + a3),   // at edge v1v2
                    0.5 * (kPi + a1 - a2 - a3),   // at edge v2v3
                    0.5 * (kPi - a1 + a2 - a3)};  // at edge v3v1
    p.value = a1 * l1 + a2 * l2 + a3 * l3 + p.alpha_edge[0] * l12 +
              p.alpha_edge[1] * l23 + p.alpha_edge[2] * l31;
    if (!p.broken) {
        p.value += lobachevsky(a1) + lobachevsky(a2) + lobachevsky(a3) +
                   lobachevsky(p.alpha_edge[0]) + lobachevsky(p.alpha_edge[1]) +
                   lobachevsky(p.alpha_edge[2]) +
                   lobachevsky(0.5 * (kPi - a1 - a2 - a3));
    }
    return p;
}

IdealTetData ideal_tet_vhat(double l12, double l23, double l31, double l14,
                            double l24, double l34) {
    IdealTetData t;
    const double s12 = 0.5 * (l12 - l14 - l24);
    const double s23 = 0.5 * (l23 - l24 - l34);
    const double s31 = 0.5 * (l31 - l34 - l14);
    t.horo_sides = {std::exp(s12), std::exp(s23), std::exp(s31)};
    const TriangleAngles ang = angles_from_log_sides(s12, s23, s31);
    t.broken = ang.broken;
    t.angle = {ang.alpha[0], ang.alpha[1], ang.alpha[2]};
    t.volume = t.broken ? 0.0
                        : lobachevsky(ang.alpha[0]) + lobachevsky(ang.alpha[1]) +
                              lobachevsky(ang.alpha[2]);
    t.value = 0.5 * (ang.alpha[0] * (l12 + l34) + ang.alpha[1] * (l23 + l14) +
                     ang.alpha[2] * (l31 + l24)) +
              t.volume;
    return t;
}

IdealTetDerivatives ideal_tet_vhat2_grad_hess(double l12, double l23,
                                              double l31, double l14,
                                              double l24, double l34) {
    IdealTetDerivatives d;
    const double s12 = 0.5 * (l12 - l14 - l24);
    const double s23 = 0.5 * (l23 - l24 - l34);
    const double s31 = 0.5 * (l31 - l34 - l14);
    const TriangleAngles ang = angles_from_log_sides(s12, s23, s31);
    d.broken = ang.broken;
    d.angle = {ang.alpha[0], ang.alpha[1], ang.alpha[2]};
    const double b0 = ang.alpha[0], b1 = ang.alpha[1], b2 = ang.alpha[2];
    d.grad << b0, b1, b2, b1, b2, b0;
    d.value2 = b0 * l12 + b1 * l23 + b2 * l31 + b1 * l14 + b2 * l24 + b0 * l34;
    if (!ang.broken) {
        d.value2 +=
            2.0 * (lobachevsky(b0) + lobachevsky(b1) + lobachevsky(b2));
    }
    const Eigen::Matrix3d m = euclidean_angle_log_derivatives(ang);
    Eigen::Matrix<double, 3, 6> p;
    p << 0.5, 0, 0, -0.5, -0.5, 0,     // d s12
         0, 0.5, 0, 0, -0.5, -0.5,     // d s23
         0, 0, 0.5, -0.5, 0, -0.5;     // d s31
    Eigen::Matrix<double, 6, 3> q;
    q << 1, 0, 0,
         0, 1, 0,
         0, 0, 1,
         0, 1, 0,
         0, 0, 1,
         1, 0, 0;
    const Eigen::Matrix<double, 6, 6> h = q * m * p;
    d.hess = 0.5 * (h + h.transpose());
    return d;
}

Eigen::Matrix3d hyperbolic_angle_derivatives(double a, double b, double c,
                                             const TriangleAngles& ang) {
    Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
    if (ang.broken) return m;
    const double s[3] = {a, b, c};
    double sh[3], cs[3];
    for (int i = 0; i < 3; ++i) {
        sh[i] = std::sinh(s[i]);
        cs[i] = std::cos(ang.alpha[i]);
    }
    for (int i = 0; i < 3; ++i) {
        const int j = (i + 1) % 3, k = (i + 2) % 3;
        const double f = sh[i] / (std::sin(ang.alpha[i]) * sh[j] * sh[k]);
        m(i, i) = f;
        m(i, j) = -cs[k] * f;
        m(i, k) = -cs[j] * f;
    }
    return m;
}

}  // namespace dcp

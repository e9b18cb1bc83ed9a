#pragma once

#include <Eigen/Core>

namespace tlsctl {

/// Classical fourth-order step for the affine ODE y' = A(t) y + r(t), with
/// A, r given at the left end, the midpoint and the right end of the step.
template <class Mat, class Vec>
Vec rk4_affine_step(const Vec& y, const Mat& a0, const Mat& am, const Mat& a1, const Vec& r0,
                    const Vec& rm, const Vec& r1, double h) {
    const Vec k1 = a0 * y + r0;
    const Vec k2 = am * (y + (0.5 * h) * k1) + rm;
    const Vec k3 = am * (y + (0.5 * h) * k2) + rm;
    const Vec k4 = a1 * (y + h * k3) + r1;
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

/// Cotangents of every input of rk4_affine_step.
template <class Mat, class Vec>
struct Rk4Adjoint {
    Vec y;
    Mat a0, am, a1;
    Vec r0, rm, r1;
};

/// Reverse sweep of rk4_affine_step. For complex data the cotangent of z is
/// dL/dRe z + i dL/dIm z, so a product y = A x pulls back as A^H ybar and
/// ybar x^H.
template <class Mat, class Vec>
Rk4Adjoint<Mat, Vec> rk4_affine_step_adjoint(const Vec& y, const Mat& a0, const Mat& am,
                                             const Mat& a1, const Vec& r0, const Vec& rm,
                                             const Vec& r1, double h, const Vec& y_next_bar) {
    // replay
    const Vec k1 = a0 * y + r0;
    const Vec y2 = y + (0.5 * h) * k1;
    const Vec k2 = am * y2 + rm;
    const Vec y3 = y + (0.5 * h) * k2;
    const Vec k3 = am * y3 + rm;
    const Vec y4 = y + h * k3;

    Rk4Adjoint<Mat, Vec> adj;
    adj.y = y_next_bar;
    const Vec k4_bar = (h / 6.0) * y_next_bar;
    Vec k3_bar = (h / 3.0) * y_next_bar;
    Vec k2_bar = (h / 3.0) * y_next_bar;
    Vec k1_bar = (h / 6.0) * y_next_bar;

    adj.a1 = k4_bar * y4.adjoint();
    adj.r1 = k4_bar;
    const Vec y4_bar = a1.adjoint() * k4_bar;
    adj.y += y4_bar;
    k3_bar += h * y4_bar;

    adj.am = k3_bar * y3.adjoint();
    adj.rm = k3_bar;
    const Vec y3_bar = am.adjoint() * k3_bar;
    adj.y += y3_bar;
    k2_bar += (0.5 * h) * y3_bar;

    adj.am += k2_bar * y2.adjoint();
    adj.rm += k2_bar;
    const Vec y2_bar = am.adjoint() * k2_bar;
    adj.y += y2_bar;
    k1_bar += (0.5 * h) * y2_bar;

    adj.a0 = k1_bar * y.adjoint();
    adj.r0 = k1_bar;
    adj.y += a0.adjoint() * k1_bar;
    return adj;
}

} // namespace tlsctl

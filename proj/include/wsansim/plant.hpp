#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "wsansim/error.hpp"

namespace wsansim {

namespace detail {

inline bool all_finite(const std::vector<double>& v) {
    for (double x : v) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
    return m.allFinite();
}

} // namespace detail

/**
 * @brief Strictly proper continuous-time SISO transfer function num(s)/den(s).
 *
 * Coefficients are stored highest degree first. The denominator is normalized
 * to monic at construction (numerator scaled accordingly), so den[0] == 1
 * always holds afterwards.
 */
struct ContinuousTransferFunction {
    std::vector<double> num; ///< numerator, highest degree first
    std::vector<double> den; ///< denominator, highest degree first, monic

    ContinuousTransferFunction(std::vector<double> numerator, std::vector<double> denominator)
        : num(std::move(numerator)), den(std::move(denominator)) {
        if (den.empty()) {
            throw ValidationError("transfer function: denominator is empty");
        }
        if (num.empty()) {
            throw ValidationError("transfer function: numerator is empty");
        }
        if (!detail::all_finite(num) || !detail::all_finite(den)) {
            throw ValidationError("transfer function: non-finite coefficient");
        }
        if (den.front() == 0.0) {
            throw ValidationError("transfer function: leading denominator coefficient is zero");
        }
        // Leading zeros carry no degree information.
        while (num.size() > 1 && num.front() == 0.0) {
            num.erase(num.begin());
        }
        if (num.empty()) {
            num.assign(1, 0.0);
        }
        if (num.size() >= den.size()) {
            throw ValidationError("transfer function must be strictly proper (deg num < deg den)");
        }
        const double lead = den.front();
        for (double& c : den) c /= lead;
        for (double& c : num) c /= lead;
    }

    /// Denominator degree; the state dimension of any minimal realization.
    [[nodiscard]] int order() const { return static_cast<int>(den.size()) - 1; }
};

/**
 * @brief Continuous-time state-space model dx/dt = A x + B u, y = C x + D u (SISO).
 */
struct ContinuousStateSpace {
    Eigen::MatrixXd A;
    Eigen::VectorXd B;
    Eigen::RowVectorXd C;
    double D = 0.0;

    ContinuousStateSpace(Eigen::MatrixXd a, Eigen::VectorXd b, Eigen::RowVectorXd c, double d)
        : A(std::move(a)), B(std::move(b)), C(std::move(c)), D(d) {
        const auto n = A.rows();
        if (n < 1 || A.cols() != n) {
            throw ValidationError("state space: A must be square with n >= 1");
        }
        if (B.size() != n || C.size() != n) {
            throw ValidationError("state space: B and C dimensions must match A");
        }
        if (!detail::all_finite(A) || !detail::all_finite(B) || !detail::all_finite(C) ||
            !std::isfinite(D)) {
            throw ValidationError("state space: non-finite matrix entry");
        }
    }

    [[nodiscard]] Eigen::Index order() const { return A.rows(); }
};

/**
 * @brief Zero-order-hold image of a continuous state-space model at step h.
 *
 * x_{k+1} = Ad x_k + Bd u_k, y_k = C x_k + D u_k, with the command held
 * constant over each period.
 */
struct DiscretePlant {
    Eigen::MatrixXd Ad;
    Eigen::VectorXd Bd;
    Eigen::RowVectorXd C;
    double D = 0.0;
    double h = 0.0; ///< sampling period, seconds

    DiscretePlant(Eigen::MatrixXd ad, Eigen::VectorXd bd, Eigen::RowVectorXd c, double d,
                  double period)
        : Ad(std::move(ad)), Bd(std::move(bd)), C(std::move(c)), D(d), h(period) {
        const auto n = Ad.rows();
        if (n < 1 || Ad.cols() != n || Bd.size() != n || C.size() != n) {
            throw ValidationError("discrete plant: inconsistent dimensions");
        }
        if (!(h > 0.0) || !std::isfinite(h)) {
            throw ValidationError("discrete plant: sampling period must be positive");
        }
        if (!detail::all_finite(Ad) || !detail::all_finite(Bd) || !detail::all_finite(C) ||
            !std::isfinite(D)) {
            throw ValidationError("discrete plant: non-finite matrix entry");
        }
    }

    [[nodiscard]] Eigen::Index order() const { return Ad.rows(); }
};

/// Plant state: internal vector plus the output it implies.
struct PlantState {
    Eigen::VectorXd x;
    double y = 0.0;
};

/**
 * @brief Controllable canonical realization of a strictly proper transfer function.
 *
 * A is the companion matrix whose bottom row holds the negated monic
 * denominator coefficients (ascending), B is the last unit vector, C holds the
 * numerator coefficients (ascending, zero padded), D = 0.
 */
inline ContinuousStateSpace tf_to_state_space(const ContinuousTransferFunction& tf) {
    const int n = tf.order();
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i + 1 < n; ++i) {
        a(i, i + 1) = 1.0;
    }
    // den (monic) = s^n + a_{n-1} s^{n-1} + ... + a_0, with den[n - j] = a_j.
    for (int j = 0; j < n; ++j) {
        a(n - 1, j) = -tf.den[static_cast<std::size_t>(n - j)];
    }
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
    b(n - 1) = 1.0;
    Eigen::RowVectorXd c = Eigen::RowVectorXd::Zero(n);
    const int num_degree = static_cast<int>(tf.num.size()) - 1;
    for (int j = 0; j <= num_degree; ++j) {
        c(j) = tf.num[static_cast<std::size_t>(num_degree - j)];
    }
    return {std::move(a), std::move(b), std::move(c), 0.0};
}

/**
 * @brief Exact zero-order-hold discretization at step h.
 *
 * Ad = exp(A h) and Bd = ∫₀ʰ exp(A τ) dτ · B, obtained in one call from the
 * augmented-matrix exponential exp([[A, B], [0, 0]] h). Exact for LTI systems
 * under piecewise-constant input, up to the accuracy of the matrix
 * exponential (scaling-and-squaring Padé).
 */
inline DiscretePlant discretize_zoh(const ContinuousStateSpace& css, double h) {
    if (!(h > 0.0) || !std::isfinite(h)) {
        throw ValidationError("discretize_zoh: step h must be positive");
    }
    const auto n = css.order();
    Eigen::MatrixXd aug = Eigen::MatrixXd::Zero(n + 1, n + 1);
    aug.topLeftCorner(n, n) = css.A * h;
    aug.topRightCorner(n, 1) = css.B * h;
    const Eigen::MatrixXd e = aug.exp();
    if (!detail::all_finite(e)) {
        throw ValidationError("discretize_zoh: matrix exponential produced non-finite entries");
    }
    return {e.topLeftCorner(n, n), e.topRightCorner(n, 1), css.C, css.D, h};
}

/// Advance one sampling period under command u. Value semantics; the input
/// state is untouched.
inline PlantState plant_step(const DiscretePlant& plant, const PlantState& state, double u) {
    if (state.x.size() != plant.order()) {
        throw ValidationError("plant_step: state dimension mismatch");
    }
    PlantState next;
    next.x = plant.Ad * state.x + plant.Bd * u;
    next.y = plant.C * next.x + plant.D * u;
    return next;
}

/// Quiescent state: x = 0, y = 0.
inline PlantState plant_reset(const DiscretePlant& plant) {
    return {Eigen::VectorXd::Zero(plant.order()), 0.0};
}

} // namespace wsansim

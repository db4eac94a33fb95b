#pragma once

#include <Eigen/Core>

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace fbns {

using Eigen::VectorXd;

// ---------------------------------------------------------------------------
// Error types
// ---------------------------------------------------------------------------

struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidInputError : SolverError {
    using SolverError::SolverError;
};

struct UnsupportedOperationError : SolverError {
    using SolverError::SolverError;
};

struct InvalidProfileError : SolverError {
    using SolverError::SolverError;
};

struct ConstraintViolationError : SolverError {
    using SolverError::SolverError;
};

struct DegenerateGeometryError : SolverError {
    using SolverError::SolverError;
};

// Raised when the log argument in the upper free-boundary formula becomes
// nonpositive; signals that the requested horizon is too large.
struct HorizonExceededError : SolverError {
    using SolverError::SolverError;
};

struct NoConvergenceError : SolverError {
    NoConvergenceError(const std::string& msg, std::vector<double> ratios)
        : SolverError(msg), ratio_history(std::move(ratios)) {}
    std::vector<double> ratio_history;
};

struct OutOfDomainError : SolverError {
    using SolverError::SolverError;
};

struct InversionSingularityError : SolverError {
    using SolverError::SolverError;
};

struct InsufficientDataError : SolverError {
    using SolverError::SolverError;
};

struct BlowUpError : SolverError {
    BlowUpError(const std::string& msg, double t) : SolverError(msg), last_valid_time(t) {}
    double last_valid_time;
};

// ---------------------------------------------------------------------------
// Tabulated piecewise-linear function
// ---------------------------------------------------------------------------

/// A sampled function with strictly increasing abscissae, evaluated by linear
/// interpolation and clamped outside its support.
class Tabulated {
  public:
    Tabulated() = default;

    Tabulated(VectorXd abscissae, VectorXd values)
        : x_(std::move(abscissae)), v_(std::move(values)) {
        if (x_.size() != v_.size() || x_.size() < 2)
            throw InvalidInputError("Tabulated: need >= 2 matching samples");
        for (Eigen::Index i = 0; i + 1 < x_.size(); ++i)
            if (!(x_[i] < x_[i + 1]))
                throw InvalidInputError("Tabulated: abscissae must be strictly increasing");
        if (!x_.allFinite() || !v_.allFinite())
            throw InvalidInputError("Tabulated: non-finite sample");
    }

    const VectorXd& abscissae() const { return x_; }
    const VectorXd& values() const { return v_; }
    Eigen::Index size() const { return x_.size(); }
    double xmin() const { return x_[0]; }
    double xmax() const { return x_[x_.size() - 1]; }

    double operator()(double x) const {
        const Eigen::Index n = x_.size();
        if (x <= x_[0]) return v_[0];
        if (x >= x_[n - 1]) return v_[n - 1];
        const Eigen::Index i = cell(x);
        const double w = (x - x_[i]) / (x_[i + 1] - x_[i]);
        return (1.0 - w) * v_[i] + w * v_[i + 1];
    }

    /// Interval slope containing x (one-sided at the ends).
    double slope(double x) const {
        Eigen::Index i = cell(std::min(std::max(x, x_[0]), x_[x_.size() - 1]));
        return (v_[i + 1] - v_[i]) / (x_[i + 1] - x_[i]);
    }

    double sup_norm() const { return v_.cwiseAbs().maxCoeff(); }

    double min_value() const { return v_.minCoeff(); }

    /// Sup of the interval slopes, a sup-norm estimate for the derivative.
    double slope_sup_norm() const {
        double m = 0.0;
        for (Eigen::Index i = 0; i + 1 < x_.size(); ++i)
            m = std::max(m, std::abs((v_[i + 1] - v_[i]) / (x_[i + 1] - x_[i])));
        return m;
    }

    /// Fourth-order one-sided derivative at the left end (exact on cubics,
    /// requires a uniform leading stencil).
    double left_derivative() const {
        const Eigen::Index n = x_.size();
        if (n >= 5) {
            const double h = x_[1] - x_[0];
            bool uniform = true;
            for (int i = 1; i < 4; ++i)
                if (std::abs((x_[i + 1] - x_[i]) - h) > 1e-12 * h) uniform = false;
            if (uniform)
                return (-25.0 * v_[0] + 48.0 * v_[1] - 36.0 * v_[2] + 16.0 * v_[3] -
                        3.0 * v_[4]) /
                       (12.0 * h);
        }
        return (v_[1] - v_[0]) / (x_[1] - x_[0]);
    }

    /// Trapezoid integral over the full support; exact for the interpolant.
    double integral() const {
        double s = 0.0;
        for (Eigen::Index i = 0; i + 1 < x_.size(); ++i)
            s += 0.5 * (v_[i] + v_[i + 1]) * (x_[i + 1] - x_[i]);
        return s;
    }

    /// Trapezoid integral of the interpolant over [a, b] within the support.
    double integral(double a, double b) const {
        if (a > b) return -integral(b, a);
        a = std::max(a, xmin());
        b = std::min(b, xmax());
        if (a >= b) return 0.0;
        double s = 0.0;
        Eigen::Index i = cell(a);
        while (x_[i + 1] <= a) ++i;
        for (; i + 1 < x_.size() && x_[i] < b; ++i) {
            const double lo = std::max(a, x_[i]);
            const double hi = std::min(b, x_[i + 1]);
            if (hi <= lo) continue;
            s += 0.5 * ((*this)(lo) + (*this)(hi)) * (hi - lo);
        }
        return s;
    }

  private:
    Eigen::Index cell(double x) const {
        // binary search for i with x_[i] <= x < x_[i+1]
        Eigen::Index lo = 0, hi = x_.size() - 2;
        while (lo < hi) {
            const Eigen::Index mid = (lo + hi + 1) / 2;
            if (x_[mid] <= x)
                lo = mid;
            else
                hi = mid - 1;
        }
        return lo;
    }

    VectorXd x_;
    VectorXd v_;
};

inline VectorXd linspace(double a, double b, Eigen::Index n) {
    return VectorXd::LinSpaced(n, a, b);
}

}  // namespace fbns

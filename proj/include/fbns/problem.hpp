#pragma once

#include "fbns/common.hpp"

#include <optional>
#include <string>
#include <vector>

namespace fbns {

// ---------------------------------------------------------------------------
// Flux at the fixed face
// ---------------------------------------------------------------------------

class FluxSpec {
  public:
    enum class Form { Constant, Linear, Exponential, TabulatedForm };

    static FluxSpec constant(double c);
    static FluxSpec linear(double a, double b);        // a + b t
    static FluxSpec exponential(double a, double b);   // a exp(b t)
    static FluxSpec tabulated(Tabulated table);        // piecewise linear, flagged C0

    double operator()(double t) const;
    double value0() const { return (*this)(0.0); }
    /// sup |g| on [0, T]
    double sup_norm(double T) const;
    /// Same flux observed from a later time origin: g'(t) = g(t + dt).
    FluxSpec shifted(double dt) const;

    Form form() const { return form_; }
    bool is_c1() const { return form_ != Form::TabulatedForm; }

  private:
    Form form_ = Form::Constant;
    double a_ = 0.0, b_ = 0.0;
    std::optional<Tabulated> table_;
};

// ---------------------------------------------------------------------------
// Physical problem data
// ---------------------------------------------------------------------------

struct PhysicalProblem {
    double D = 1.0;      // diffusivity, 0 < D < 2
    double beta = 1.0;   // concentration level at the front
    double b = 1.0;      // initial front position
    FluxSpec g;          // flux at x = 0
    Tabulated u0;        // initial profile on [0, b]
};

/// u0 identically beta on [0, b].
PhysicalProblem make_constant_problem(double D, double beta, double b, FluxSpec g,
                                      int samples = 801);

/// u0(x) = beta + a x (1 - x/b)^2 + c x^2 (1 - x/b)^2 — compatible with the
/// flux whenever a = g(0)/D, nonnegative for a, c >= 0.
PhysicalProblem make_bump_problem(double D, double beta, double b, FluxSpec g, double a,
                                  double c = 0.0, int samples = 801);

struct ValidationCheck {
    std::string name;
    bool pass = false;
    double defect = 0.0;
};

struct ValidationReport {
    std::vector<ValidationCheck> checks;
    bool pass = false;
    double g_sup = 0.0;       // sup |g| on [0, 1], used by the constants ledger
    bool g_c1 = true;         // tabulated fluxes are accepted but flagged C0
    std::string to_string() const;
};

ValidationReport validate_problem(const PhysicalProblem& p);

// ---------------------------------------------------------------------------
// Stretch map and transformed data
// ---------------------------------------------------------------------------

/// The strictly increasing map i(x) = C1 + int_0^x dx'/u0 and its inverse.
/// Per-cell integrals of 1/u0 use the exact log antiderivative of the linear
/// interpolant, so tabulated closed forms round-trip at table precision.
class StretchMap {
  public:
    StretchMap(const Tabulated& u0, double C1);

    double operator()(double x) const;
    /// Monotone bisection to 1e-12.
    double inverse(double y) const;
    double C1() const { return C1_; }
    double C2() const { return C2_; }

  private:
    Tabulated u0_;
    VectorXd ivals_;  // i at the u0 abscissae
    double C1_ = 0.0, C2_ = 0.0;
};

struct TransformedProblem {
    double C1 = 0.0;
    double C2 = 0.0;
    Tabulated V0;       // transformed initial datum on [C1, C2]
    Tabulated F;        // heat-frame initial trace on [C1, C2]
    Tabulated Fprime;   // centered differences of F on its table
    double norm_u0 = 0.0;
    double norm_u0p = 0.0;
    double norm_g = 0.0;
    double consistency_defect = 0.0;  // |b - int (V0 + beta)|
};

StretchMap build_stretch_map(const PhysicalProblem& p, double C1);

/// C1 < 0 requests the automatic choice C1 = (1/4) int_0^b dx/u0, which
/// leaves the 3 C1 < C2 constraint satisfied with margin.
TransformedProblem build_transformed_problem(const PhysicalProblem& p, double C1 = -1.0,
                                             int table_size = 0);

/// Assemble a TransformedProblem directly from heat-frame data: V0 sampled on
/// [C1, C2] with F rebuilt from it.  Used when chaining time segments.
TransformedProblem make_transformed_from_V0(double D, double beta, Tabulated V0,
                                            double norm_g);

/// Two-column numeric text (abscissa, value), '#' comments allowed.
Tabulated load_table(const std::string& path);

}  // namespace fbns

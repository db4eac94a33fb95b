#include "fbns/problem.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace fbns {

// ---------------------------------------------------------------------------
// FluxSpec
// ---------------------------------------------------------------------------

FluxSpec FluxSpec::constant(double c) {
    FluxSpec f;
    f.form_ = Form::Constant;
    f.a_ = c;
    return f;
}

FluxSpec FluxSpec::linear(double a, double b) {
    FluxSpec f;
    f.form_ = Form::Linear;
    f.a_ = a;
    f.b_ = b;
    return f;
}

FluxSpec FluxSpec::exponential(double a, double b) {
    FluxSpec f;
    f.form_ = Form::Exponential;
    f.a_ = a;
    f.b_ = b;
    return f;
}

FluxSpec FluxSpec::tabulated(Tabulated table) {
    FluxSpec f;
    f.form_ = Form::TabulatedForm;
    f.table_ = std::move(table);
    return f;
}

double FluxSpec::operator()(double t) const {
    switch (form_) {
        case Form::Constant: return a_;
        case Form::Linear: return a_ + b_ * t;
        case Form::Exponential: return a_ * std::exp(b_ * t);
        case Form::TabulatedForm: return (*table_)(t);
    }
    return 0.0;
}

double FluxSpec::sup_norm(double T) const {
    switch (form_) {
        case Form::Constant:
            return std::abs(a_);
        case Form::Linear:
        case Form::Exponential:
            // monotone between the endpoints
            return std::max(std::abs((*this)(0.0)), std::abs((*this)(T)));
        case Form::TabulatedForm: {
            double m = std::abs((*this)(0.0));
            const auto& x = table_->abscissae();
            const auto& v = table_->values();
            for (Eigen::Index i = 0; i < x.size(); ++i)
                if (x[i] <= T) m = std::max(m, std::abs(v[i]));
            m = std::max(m, std::abs((*this)(T)));
            return m;
        }
    }
    return 0.0;
}

FluxSpec FluxSpec::shifted(double dt) const {
    switch (form_) {
        case Form::Constant:
            return *this;
        case Form::Linear:
            return linear(a_ + b_ * dt, b_);
        case Form::Exponential:
            return exponential(a_ * std::exp(b_ * dt), b_);
        case Form::TabulatedForm: {
            VectorXd x = table_->abscissae().array() - dt;
            return tabulated(Tabulated(x, table_->values()));
        }
    }
    return *this;
}

// ---------------------------------------------------------------------------
// Problem factories
// ---------------------------------------------------------------------------

PhysicalProblem make_constant_problem(double D, double beta, double b, FluxSpec g,
                                      int samples) {
    VectorXd x = linspace(0.0, b, samples);
    VectorXd v = VectorXd::Constant(samples, beta);
    return PhysicalProblem{D, beta, b, std::move(g), Tabulated(x, v)};
}

PhysicalProblem make_bump_problem(double D, double beta, double b, FluxSpec g, double a,
                                  double c, int samples) {
    VectorXd x = linspace(0.0, b, samples);
    VectorXd v(samples);
    for (int i = 0; i < samples; ++i) {
        const double r = 1.0 - x[i] / b;
        v[i] = beta + a * x[i] * r * r + c * x[i] * x[i] * r * r;
    }
    return PhysicalProblem{D, beta, b, std::move(g), Tabulated(x, v)};
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

std::string ValidationReport::to_string() const {
    std::ostringstream os;
    for (const auto& c : checks)
        os << (c.pass ? "[ok]   " : "[FAIL] ") << c.name << "  (defect " << c.defect
           << ")\n";
    os << (pass ? "overall: pass" : "overall: fail") << "\n";
    return os.str();
}

ValidationReport validate_problem(const PhysicalProblem& p) {
    ValidationReport r;
    auto add = [&r](std::string name, bool ok, double defect) {
        r.checks.push_back({std::move(name), ok, defect});
    };

    add("0 < D < 2", p.D > 0.0 && p.D < 2.0,
        p.D <= 0.0 ? -p.D : std::max(0.0, p.D - 2.0));
    add("beta > 0", p.beta > 0.0, std::max(0.0, -p.beta));
    add("b > 0", p.b > 0.0, std::max(0.0, -p.b));

    const double span_defect =
        std::max(std::abs(p.u0.xmin()), std::abs(p.u0.xmax() - p.b));
    add("u0 tabulated on [0, b]", span_defect <= 1e-9 * std::max(1.0, p.b), span_defect);

    const double below = std::max(0.0, p.beta - p.u0.min_value());
    add("u0 >= beta on [0, b]", below <= 1e-12, below);

    const double end_defect = std::abs(p.u0.values()[p.u0.size() - 1] - p.beta);
    add("u0(b) = beta", end_defect <= 1e-10, end_defect);

    const double compat = std::abs(p.D * p.u0.left_derivative() - p.g(0.0));
    add("D u0'(0) = g(0)", compat <= 1e-8, compat);

    r.g_sup = p.g.sup_norm(1.0);
    r.g_c1 = p.g.is_c1();
    r.pass = std::all_of(r.checks.begin(), r.checks.end(),
                         [](const ValidationCheck& c) { return c.pass; });
    return r;
}

// ---------------------------------------------------------------------------
// Stretch map
// ---------------------------------------------------------------------------

namespace {

// Exact integral of 1/(linear interpolant) over one table cell segment.
double inv_linear_integral(double x0, double v0, double x1, double v1, double a,
                           double b) {
    const double m = (v1 - v0) / (x1 - x0);
    const double va = v0 + m * (a - x0);
    const double vb = v0 + m * (b - x0);
    if (std::abs(m) * (b - a) < 1e-12 * std::abs(va))
        return (b - a) * 2.0 / (va + vb);
    return std::log(vb / va) / m;
}

}  // namespace

StretchMap::StretchMap(const Tabulated& u0, double C1) : u0_(u0), C1_(C1) {
    if (u0.min_value() <= 0.0)
        throw InvalidProfileError("stretch map: u0 must be positive");
    const auto& x = u0.abscissae();
    const auto& v = u0.values();
    ivals_.resize(x.size());
    ivals_[0] = C1;
    for (Eigen::Index i = 0; i + 1 < x.size(); ++i)
        ivals_[i + 1] =
            ivals_[i] + inv_linear_integral(x[i], v[i], x[i + 1], v[i + 1], x[i], x[i + 1]);
    C2_ = ivals_[x.size() - 1];
}

double StretchMap::operator()(double xq) const {
    const auto& x = u0_.abscissae();
    const auto& v = u0_.values();
    if (xq <= x[0]) return C1_;
    if (xq >= x[x.size() - 1]) return C2_;
    Eigen::Index lo = 0, hi = x.size() - 2;
    while (lo < hi) {
        const Eigen::Index mid = (lo + hi + 1) / 2;
        if (x[mid] <= xq) lo = mid; else hi = mid - 1;
    }
    return ivals_[lo] + inv_linear_integral(x[lo], v[lo], x[lo + 1], v[lo + 1], x[lo], xq);
}

double StretchMap::inverse(double y) const {
    double lo = u0_.xmin(), hi = u0_.xmax();
    if (y <= C1_) return lo;
    if (y >= C2_) return hi;
    while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        if ((*this)(mid) <= y) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
}

StretchMap build_stretch_map(const PhysicalProblem& p, double C1) {
    return StretchMap(p.u0, C1);
}

// ---------------------------------------------------------------------------
// Transformed problem
// ---------------------------------------------------------------------------

namespace {

// F(y) = V0(y) exp((1/D) int_y^C2 V0) with right-to-left trapezoid cumulative
// integrals on the V0 table, plus centered-difference F'.
void attach_trace(TransformedProblem& tp, double D) {
    const auto& y = tp.V0.abscissae();
    const auto& v = tp.V0.values();
    const Eigen::Index n = y.size();
    VectorXd tail(n);
    tail[n - 1] = 0.0;
    for (Eigen::Index i = n - 2; i >= 0; --i)
        tail[i] = tail[i + 1] + 0.5 * (v[i] + v[i + 1]) * (y[i + 1] - y[i]);
    VectorXd f(n);
    for (Eigen::Index i = 0; i < n; ++i) f[i] = v[i] * std::exp(tail[i] / D);
    tp.F = Tabulated(y, f);

    VectorXd fp(n);
    for (Eigen::Index i = 1; i + 1 < n; ++i) fp[i] = (f[i + 1] - f[i - 1]) / (y[i + 1] - y[i - 1]);
    fp[0] = (f[1] - f[0]) / (y[1] - y[0]);
    fp[n - 1] = (f[n - 1] - f[n - 2]) / (y[n - 1] - y[n - 2]);
    tp.Fprime = Tabulated(y, fp);
}

}  // namespace

TransformedProblem build_transformed_problem(const PhysicalProblem& p, double C1,
                                             int table_size) {
    const StretchMap probe(p.u0, 0.0);
    const double L = probe.C2();  // int_0^b dx/u0
    if (C1 < 0.0) C1 = 0.25 * L;
    const double C2 = C1 + L;
    if (!(3.0 * C1 < C2))
        throw ConstraintViolationError("transformed problem: 3 C1 < C2 violated");

    const StretchMap stretch(p.u0, C1);
    const int n = table_size > 0 ? table_size : std::max<int>(801, int(p.u0.size()));

    TransformedProblem tp;
    tp.C1 = C1;
    tp.C2 = C2;
    VectorXd y = linspace(C1, C2, n);
    VectorXd v0(n);
    for (int i = 0; i < n; ++i) v0[i] = p.u0(stretch.inverse(y[i])) - p.beta;
    tp.V0 = Tabulated(y, v0);
    attach_trace(tp, p.D);

    tp.norm_u0 = p.u0.sup_norm();
    tp.norm_u0p = p.u0.slope_sup_norm();
    tp.norm_g = p.g.sup_norm(1.0);
    tp.consistency_defect =
        std::abs(p.b - (tp.V0.integral() + p.beta * (C2 - C1)));
    return tp;
}

TransformedProblem make_transformed_from_V0(double D, double beta, Tabulated V0,
                                            double norm_g) {
    TransformedProblem tp;
    tp.C1 = V0.xmin();
    tp.C2 = V0.xmax();
    if (!(3.0 * tp.C1 < tp.C2))
        throw ConstraintViolationError("transformed problem: 3 C1 < C2 violated");
    tp.V0 = std::move(V0);
    attach_trace(tp, D);
    tp.norm_u0 = (tp.V0.values().array() + beta).abs().maxCoeff();
    tp.norm_u0p = 0.0;
    {
        // |du0/dx| = |dV/dy| / (V + beta) through the stretch map
        const auto& y = tp.V0.abscissae();
        const auto& v = tp.V0.values();
        for (Eigen::Index i = 0; i + 1 < y.size(); ++i) {
            const double slope = (v[i + 1] - v[i]) / (y[i + 1] - y[i]);
            const double vv = 0.5 * (v[i] + v[i + 1]) + beta;
            if (vv > 0.0) tp.norm_u0p = std::max(tp.norm_u0p, std::abs(slope) / vv);
        }
    }
    tp.norm_g = norm_g;
    tp.consistency_defect = 0.0;
    return tp;
}

// ---------------------------------------------------------------------------
// Table I/O
// ---------------------------------------------------------------------------

Tabulated load_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInputError("load_table: cannot open " + path);
    std::vector<double> xs, vs;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        double x, v;
        if (!(ls >> x)) {
            if (line.find_first_not_of(" \t\r\n") == std::string::npos)
                continue;  // blank or comment-only line
            throw InvalidInputError("load_table: " + path + ":" + std::to_string(lineno) +
                                    ": unparsable line");
        }
        if (!(ls >> v))
            throw InvalidInputError("load_table: " + path + ":" + std::to_string(lineno) +
                                    ": expected two columns");
        xs.push_back(x);
        vs.push_back(v);
    }
    if (xs.size() < 2) throw InvalidInputError("load_table: " + path + ": too few rows");
    VectorXd X = Eigen::Map<VectorXd>(xs.data(), Eigen::Index(xs.size()));
    VectorXd V = Eigen::Map<VectorXd>(vs.data(), Eigen::Index(vs.size()));
    return Tabulated(X, V);
}

}  // namespace fbns

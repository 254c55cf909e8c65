#include "solo/interp/interpolation.hpp"

#include "solo/core/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

namespace solo::interp {

double default_shape_distance(std::span<const Point2> centers)
{
    require(centers.size() >= 2, "need two centers for a default shape distance");
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < centers.size(); ++i)
        for (std::size_t j = i + 1; j < centers.size(); ++j)
            best = std::min(best, std::hypot(centers[i].x - centers[j].x, centers[i].y - centers[j].y));
    return 0.5 * best;
}

namespace {

double gaussian(Point2 a, Point2 b, double d)
{
    const double dx = a.x - b.x, dy = a.y - b.y;
    return std::exp(-(dx * dx + dy * dy) / (d * d));
}

} // namespace

RbfModel rbf_fit(std::span<const Point2> centers, std::span<const double> values, double shape_distance)
{
    const std::size_t n = centers.size();
    require(n >= 1 && values.size() == n, "rbf_fit: centers/values mismatch");
    require(shape_distance > 0.0, "rbf_fit: shape distance must be positive");

    const auto m = static_cast<Eigen::Index>(n + 3);
    Eigen::MatrixXd phi = Eigen::MatrixXd::Zero(m, m);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
    for (std::size_t i = 0; i < n; ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        for (std::size_t j = 0; j < n; ++j)
            phi(ii, static_cast<Eigen::Index>(j)) = gaussian(centers[i], centers[j], shape_distance);
        phi(ii, m - 3) = 1.0;
        phi(ii, m - 2) = centers[i].x;
        phi(ii, m - 1) = centers[i].y;
        phi(m - 3, ii) = 1.0;
        phi(m - 2, ii) = centers[i].x;
        phi(m - 1, ii) = centers[i].y;
        rhs(ii) = values[i];
    }

    Eigen::FullPivLU<Eigen::MatrixXd> lu(phi);
    lu.setThreshold(1e-12);
    if (!lu.isInvertible())
        throw FitError("rbf_fit: singular interpolation system (rank " + std::to_string(lu.rank()) + " of "
                       + std::to_string(m) + "); centers coincident or collinear");
    const Eigen::VectorXd sol = lu.solve(rhs);
    const double resid = (phi * sol - rhs).norm();
    const double scale = std::max(rhs.norm(), 1.0);
    if (!sol.allFinite() || resid > 1e-8 * scale)
        throw FitError("rbf_fit: ill-conditioned system, residual " + std::to_string(resid));

    RbfModel model;
    model.centers.assign(centers.begin(), centers.end());
    model.shape_distance = shape_distance;
    model.lambda.resize(n);
    for (std::size_t i = 0; i < n; ++i) model.lambda[i] = sol(static_cast<Eigen::Index>(i));
    model.a0 = sol(m - 3);
    model.a1 = sol(m - 2);
    model.a2 = sol(m - 1);
    return model;
}

double rbf_eval(const RbfModel& model, Point2 p)
{
    double s = model.a0 + model.a1 * p.x + model.a2 * p.y;
    for (std::size_t i = 0; i < model.centers.size(); ++i)
        s += model.lambda[i] * gaussian(p, model.centers[i], model.shape_distance);
    return s;
}

double area_fraction(std::span<const double> samples, double threshold)
{
    if (samples.empty()) return 0.0;
    const auto hits = std::count_if(samples.begin(), samples.end(), [&](double v) { return v >= threshold; });
    return static_cast<double>(hits) / static_cast<double>(samples.size());
}

ThresholdResult threshold_to_volume(const RbfModel& model, const Rect& domain, std::size_t nx, std::size_t ny,
                                    double target_fraction)
{
    require(target_fraction > 0.0 && target_fraction < 1.0, "threshold_to_volume: target must lie in (0,1)");
    require(nx >= 1 && ny >= 1, "threshold_to_volume: empty sampling grid");

    std::vector<double> samples(nx * ny);
    for (std::size_t j = 0; j < ny; ++j)
        for (std::size_t i = 0; i < nx; ++i) {
            const double x = domain.x_min + (domain.x_max - domain.x_min) * (static_cast<double>(i) + 0.5) / static_cast<double>(nx);
            const double y = domain.y_min + (domain.y_max - domain.y_min) * (static_cast<double>(j) + 0.5) / static_cast<double>(ny);
            samples[j * nx + i] = rbf_eval(model, {x, y});
        }

    const double tol = 0.5 / static_cast<double>(samples.size());
    const auto [mn, mx] = std::minmax_element(samples.begin(), samples.end());
    // fraction(lo) = 1 >= target >= fraction(hi) throughout
    double lo = *mn, hi = std::nextafter(*mx, std::numeric_limits<double>::infinity());
    double thr = 0.5 * (lo + hi);
    double frac = area_fraction(samples, thr);
    int step = 0;
    for (; step < 100 && std::abs(frac - target_fraction) > tol; ++step) {
        if (frac > target_fraction) lo = thr;
        else hi = thr;
        thr = 0.5 * (lo + hi);
        frac = area_fraction(samples, thr);
    }
    if (std::abs(frac - target_fraction) > tol)
        throw FitError("threshold_to_volume: bisection did not reach target fraction "
                       + std::to_string(target_fraction) + " (got " + std::to_string(frac) + ")");

    ThresholdResult out;
    out.threshold = thr;
    out.fraction = frac;
    out.nx = nx;
    out.ny = ny;
    out.binary.resize(samples.size());
    for (std::size_t k = 0; k < samples.size(); ++k) out.binary[k] = samples[k] >= thr ? 1 : 0;
    return out;
}

void write_binary_field(std::ostream& out, const ThresholdResult& field)
{
    for (std::size_t j = 0; j < field.ny; ++j) {
        for (std::size_t i = 0; i < field.nx; ++i) {
            if (i) out << ' ';
            out << static_cast<int>(field.binary[j * field.nx + i]);
        }
        out << '\n';
    }
}

} // namespace solo::interp

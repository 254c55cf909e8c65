#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace solo::interp {

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

struct Rect {
    double x_min = 0.0, x_max = 1.0;
    double y_min = 0.0, y_max = 1.0;
};

/// Nodal values on a regular nx-by-ny grid spanning `bounds`.
/// values[j * nx + i] belongs to node (x_i, y_j).
struct GridField {
    Rect bounds;
    std::size_t nx = 2;
    std::size_t ny = 2;
    std::vector<double> values;

    double node_x(std::size_t i) const;
    double node_y(std::size_t j) const;
    double at(std::size_t i, std::size_t j) const { return values[j * nx + i]; }
};

/// Bilinear interpolation inside the grid cell containing `p`.
/// Throws DomainError outside the rectangle.
double bilinear_interpolate(const GridField& field, Point2 p);

/// Gaussian RBF interpolant with linear polynomial tail:
///   rho(x) = sum_i lambda_i exp(-|x - x_i|^2 / d^2) + a0 + a1 x + a2 y
/// with sum lambda_i = sum lambda_i x_i = sum lambda_i y_i = 0.
struct RbfModel {
    std::vector<Point2> centers;
    double shape_distance = 1.0;
    std::vector<double> lambda;
    double a0 = 0.0, a1 = 0.0, a2 = 0.0;
};

/// Half the minimum pairwise distance between centers.
double default_shape_distance(std::span<const Point2> centers);

/// Solves the (N+3)x(N+3) system. Throws FitError when the system is
/// singular (coincident or collinear centers) or the residual is too large.
RbfModel rbf_fit(std::span<const Point2> centers, std::span<const double> values, double shape_distance);

double rbf_eval(const RbfModel& model, Point2 p);

struct ThresholdResult {
    double threshold = 0.0;
    double fraction = 0.0;      ///< achieved area fraction of rho >= threshold
    std::size_t nx = 0, ny = 0; ///< sampling grid
    std::vector<std::uint8_t> binary; ///< row-major, ny rows of nx
};

/// Samples the model at cell centres of an nx-by-ny grid over `domain` and
/// bisects a threshold so the >= threshold area fraction is within
/// 1/(2 cells) of `target_fraction`.
ThresholdResult threshold_to_volume(const RbfModel& model, const Rect& domain, std::size_t nx, std::size_t ny,
                                    double target_fraction);

/// Fraction of sample values >= threshold.
double area_fraction(std::span<const double> samples, double threshold);

/// Row-major 0/1 text grid.
void write_binary_field(std::ostream& out, const ThresholdResult& field);

} // namespace solo::interp

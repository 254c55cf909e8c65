#include "solo/interp/interpolation.hpp"

#include "solo/core/error.hpp"

#include <algorithm>
#include <string>

namespace solo::interp {

double GridField::node_x(std::size_t i) const
{
    return bounds.x_min + (bounds.x_max - bounds.x_min) * static_cast<double>(i) / static_cast<double>(nx - 1);
}

double GridField::node_y(std::size_t j) const
{
    return bounds.y_min + (bounds.y_max - bounds.y_min) * static_cast<double>(j) / static_cast<double>(ny - 1);
}

namespace {

std::size_t cell_index(double t, double lo, double hi, std::size_t n_nodes)
{
    const double s = (t - lo) / (hi - lo) * static_cast<double>(n_nodes - 1);
    const auto i = static_cast<std::size_t>(std::max(0.0, s));
    return std::min(i, n_nodes - 2);
}

} // namespace

double bilinear_interpolate(const GridField& field, Point2 p)
{
    require(field.nx >= 2 && field.ny >= 2, "grid field needs at least 2x2 nodes");
    require(field.values.size() == field.nx * field.ny, "grid field value count mismatch");
    const Rect& b = field.bounds;
    if (p.x < b.x_min || p.x > b.x_max || p.y < b.y_min || p.y > b.y_max)
        throw DomainError("point (" + std::to_string(p.x) + ", " + std::to_string(p.y) + ") outside grid field");

    const std::size_t i = cell_index(p.x, b.x_min, b.x_max, field.nx);
    const std::size_t j = cell_index(p.y, b.y_min, b.y_max, field.ny);
    const double x1 = field.node_x(i), x2 = field.node_x(i + 1);
    const double y1 = field.node_y(j), y2 = field.node_y(j + 1);
    const double f11 = field.at(i, j), f12 = field.at(i, j + 1);
    const double f21 = field.at(i + 1, j), f22 = field.at(i + 1, j + 1);

    // [x2-x, x-x1] [[F11 F12] [F21 F22]] [y2-y, y-y1]^T / ((x2-x1)(y2-y1))
    const double ax = x2 - p.x, bx = p.x - x1;
    const double ay = y2 - p.y, by = p.y - y1;
    return (ax * (f11 * ay + f12 * by) + bx * (f21 * ay + f22 * by)) / ((x2 - x1) * (y2 - y1));
}

} // namespace solo::interp

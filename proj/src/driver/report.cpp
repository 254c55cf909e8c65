#include "solo/driver/solo.hpp"

#include "solo/core/error.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

namespace solo::driver {

namespace {

constexpr const char* kHeader = "loop,n_train,best_F,F_rho_hat,e_rho_hat,rel_err,eps_mse,t_fem,t_train,t_search";

// shortest round-trip text, so exported series match the report exactly
std::string fmt(double x)
{
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, end);
}

double parse_double(const std::string& s)
{
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) throw DataError("report: bad number '" + s + "'");
    return v;
}

} // namespace

void RunReport::write_csv(std::ostream& out, bool with_timing) const
{
    out << kHeader << '\n';
    for (const auto& r : loops) {
        out << r.loop << ',' << r.n_train << ',' << fmt(r.best_f) << ',' << fmt(r.f_rho_hat) << ','
            << fmt(r.e_rho_hat) << ',' << fmt(r.rel_err) << ',' << fmt(r.eps_mse) << ','
            << fmt(with_timing ? r.t_fem : 0.0) << ',' << fmt(with_timing ? r.t_train : 0.0) << ','
            << fmt(with_timing ? r.t_search : 0.0) << '\n';
    }
}

std::vector<LoopRecord> read_report_csv(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line)) return {};
    if (line != kHeader) throw DataError("report: unexpected header");
    std::vector<LoopRecord> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
        if (cells.size() != 10) throw DataError("report: expected 10 columns, got " + std::to_string(cells.size()));
        LoopRecord r;
        r.loop = static_cast<std::size_t>(parse_double(cells[0]));
        r.n_train = static_cast<std::size_t>(parse_double(cells[1]));
        r.best_f = parse_double(cells[2]);
        r.f_rho_hat = parse_double(cells[3]);
        r.e_rho_hat = parse_double(cells[4]);
        r.rel_err = parse_double(cells[5]);
        r.eps_mse = parse_double(cells[6]);
        r.t_fem = parse_double(cells[7]);
        r.t_train = parse_double(cells[8]);
        r.t_search = parse_double(cells[9]);
        out.push_back(r);
    }
    return out;
}

} // namespace solo::driver

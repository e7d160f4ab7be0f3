#include "singdet/config.hpp"

#include <algorithm>
#include <sstream>

namespace singdet {

void Settings::scale_tolerances(double t) {
    series_tol = t;
    rk_rel_tol = std::clamp(100.0 * t, 1e-13, 1e-6);
    quad_rel_tol = std::clamp(10.0 * t, 1e-13, 1e-6);
}

std::string Settings::dump() const {
    std::ostringstream os;
    os << "x_match                 = " << x_match << "\n"
       << "series_tol              = " << series_tol << "\n"
       << "max_volterra_iters      = " << max_volterra_iters << "\n"
       << "rk_rel_tol              = " << rk_rel_tol << "\n"
       << "rk_abs_tol              = " << rk_abs_tol << "\n"
       << "wronskian_points        = " << wronskian_points << "\n"
       << "wronskian_constancy_tol = " << wronskian_constancy_tol << "\n"
       << "quad_rel_tol            = " << quad_rel_tol << "\n"
       << "contour_cutoff          = " << contour_cutoff << "\n"
       << "oracle_eps              = " << oracle_eps << "\n"
       << "oracle_n                = " << oracle_n << "\n"
       << "eigen_scan_min          = " << eigen_scan_min << "\n";
    return os.str();
}

}  // namespace singdet

#include "rotsmag/model.hpp"

#include <cmath>
#include <sstream>

#include "rotsmag/errors.hpp"

namespace rotsmag {

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

}  // namespace

double ModelParams::coefficient() const {
    return dimensional_closure ? C_alpha * std::pow(v_star, theta) : C_alpha;
}

std::vector<std::string> ModelParams::lab_violations() const {
    std::vector<std::string> v;
    if (!(p > 1.0)) v.push_back("p = " + fmt(p) + " must exceed 1");
    if (!(C_alpha > 0.0)) v.push_back("C_alpha = " + fmt(C_alpha) + " must be > 0");
    if (!(eps_reg >= 0.0)) v.push_back("eps_reg = " + fmt(eps_reg) + " must be >= 0");
    if (dimensional_closure && !(v_star > 0.0)) v.push_back("v_star must be > 0");
    try {
        mixing.validate();
    } catch (const Error& e) {
        v.emplace_back(e.what());
    }
    return v;
}

std::vector<std::string> ModelParams::solver_violations() const {
    std::vector<std::string> v = lab_violations();
    if (!(p >= 3.0)) v.push_back("p = " + fmt(p) + " below 3 is outside the existence range (p >= 3)");
    if (!(alpha >= 0.0 && alpha < p - 1.0)) {
        v.push_back("alpha = " + fmt(alpha) + " outside the solver range α∈[0," + fmt(p - 1.0) + ") for p = " +
                    fmt(p) + " (alpha must stay below p-1)");
    }
    if (dimensional_closure && std::abs(theta - (3.0 - p)) > 1e-12) {
        v.push_back("theta = " + fmt(theta) + " must equal 3 - p = " + fmt(3.0 - p) +
                    " under the dimensional closure");
    }
    return v;
}

void ModelParams::require_solver_range() const {
    const auto v = solver_violations();
    if (v.empty()) return;
    std::string msg = "model parameters invalid for the solver:";
    for (const auto& s : v) msg += "\n  - " + s;
    throw PreconditionError(msg);
}

}  // namespace rotsmag

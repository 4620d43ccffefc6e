#include "covhom/core.hpp"

#include <cmath>

namespace covhom {

Norm parse_norm(const std::string& name) {
    if (name == "l1") return Norm::L1;
    if (name == "l2") return Norm::L2;
    if (name == "linf") return Norm::LInf;
    throw ConfigError("cover.norm", "unknown norm '" + name + "' (expected l1, l2 or linf)");
}

std::string to_string(Norm n) {
    switch (n) {
        case Norm::L1: return "l1";
        case Norm::L2: return "l2";
        case Norm::LInf: return "linf";
    }
    return "l1";
}

double norm(const Vec& v, Norm n) {
    switch (n) {
        case Norm::L1: return v.lpNorm<1>();
        case Norm::L2: return v.norm();
        case Norm::LInf: return v.size() == 0 ? 0.0 : v.lpNorm<Eigen::Infinity>();
    }
    return 0.0;
}

double dual_norm(const Vec& p, Norm n) {
    switch (n) {
        case Norm::L1: return p.size() == 0 ? 0.0 : p.lpNorm<Eigen::Infinity>();
        case Norm::L2: return p.norm();
        case Norm::LInf: return p.lpNorm<1>();
    }
    return 0.0;
}

double norm_over_euclid(Norm n, int dim) {
    switch (n) {
        case Norm::L1: return std::sqrt(static_cast<double>(dim));
        case Norm::L2: return 1.0;
        case Norm::LInf: return 1.0;
    }
    return 1.0;
}

double euclid_over_norm(Norm n, int dim) {
    switch (n) {
        case Norm::L1: return 1.0;
        case Norm::L2: return 1.0;
        case Norm::LInf: return std::sqrt(static_cast<double>(dim));
    }
    return 1.0;
}

Vec to_real(const IntVec& v) { return v.cast<double>(); }

}  // namespace covhom

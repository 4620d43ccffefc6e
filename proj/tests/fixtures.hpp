#pragma once

#include "covhom/homogenize.hpp"

#include <initializer_list>
#include <memory>

namespace fixtures {

inline covhom::Vec vec(std::initializer_list<double> v) {
    covhom::Vec out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) out[i++] = x;
    return out;
}

inline covhom::IntVec ivec(std::initializer_list<std::int64_t> v) {
    covhom::IntVec out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (auto x : v) out[i++] = x;
    return out;
}

inline std::shared_ptr<const covhom::MetricGraph> loop(double length) {
    return std::make_shared<covhom::MetricGraph>(1, std::vector<covhom::Edge>{{0, 0, length}});
}

inline std::shared_ptr<const covhom::MetricGraph> figure_eight(double l1 = 1.0, double l2 = 1.0) {
    return std::make_shared<covhom::MetricGraph>(1, std::vector<covhom::Edge>{{0, 0, l1}, {0, 0, l2}});
}

// two vertices joined by three edges
inline std::shared_ptr<const covhom::MetricGraph> theta(double a = 1.0, double b = 2.0, double c = 1.5) {
    return std::make_shared<covhom::MetricGraph>(2, std::vector<covhom::Edge>{{0, 1, a}, {0, 1, b}, {1, 0, c}});
}

inline covhom::TorusHamiltonian pendulum() {
    using namespace covhom;
    return TorusHamiltonian::mechanical(1, TrigPolynomial(1, {TrigTerm{IntVec::Constant(1, 1), 1.0, 0.0}}));
}

inline covhom::TorusHamiltonian free_torus(int dim) {
    using namespace covhom;
    return TorusHamiltonian::mechanical(dim, TrigPolynomial::constant(dim, 0.0));
}

}  // namespace fixtures

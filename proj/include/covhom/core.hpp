#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace covhom {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using IntVec = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>;
using IntMat = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

/// Raised when a Hamiltonian, graph or cover violates its structural invariants.
class ModelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised on malformed or out-of-range scenario configuration.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string path, const std::string& what)
        : std::runtime_error(path + ": " + what), path_(std::move(path)) {}
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

/// Raised when a numerical routine cannot produce a certified answer.
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A sheet search window was exhausted before the answer could be certified.
class WindowExhausted : public SolverError {
public:
    using SolverError::SolverError;
};

enum class Norm { L1, L2, LInf };

Norm parse_norm(const std::string& name);
std::string to_string(Norm n);

double norm(const Vec& v, Norm n);

/// Dual norm of a covector, i.e. sup of |p.v| over the unit ball of `n`.
double dual_norm(const Vec& p, Norm n);

/// Largest ratio ||v||_n / ||v||_2 over nonzero v of dimension `dim`.
double norm_over_euclid(Norm n, int dim);

/// Largest ratio ||v||_2 / ||v||_n over nonzero v of dimension `dim`.
double euclid_over_norm(Norm n, int dim);

Vec to_real(const IntVec& v);

}  // namespace covhom

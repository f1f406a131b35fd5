#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

namespace swdelay {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

// A finite word over the delay alphabet, newest symbol first.
using Word = std::vector<int>;

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct UnsupportedError : std::runtime_error {
    explicit UnsupportedError(const std::string& msg) : std::runtime_error(msg) {}
};

struct BudgetError : std::runtime_error {
    explicit BudgetError(const std::string& msg) : std::runtime_error(msg) {}
};

struct UnstableError : std::runtime_error {
    explicit UnstableError(const std::string& msg) : std::runtime_error(msg) {}
};

struct GeometryError : std::runtime_error {
    explicit GeometryError(const std::string& msg) : std::runtime_error(msg) {}
};

// Thrown when a spectrum-maximizing-product candidate turns out to
// underestimate the growth rate; the caller retries at a higher depth.
struct NotSmpError : std::runtime_error {
    explicit NotSmpError(const std::string& msg) : std::runtime_error(msg) {}
};

struct LpFailureError : std::runtime_error {
    explicit LpFailureError(const std::string& msg) : std::runtime_error(msg) {}
};

inline double spectral_radius(const Mat& a) {
    if (a.rows() == 0) return 0.0;
    Eigen::EigenSolver<Mat> es(a, /*computeEigenvectors=*/false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

// Largest singular value.
inline double operator_norm2(const Mat& a) {
    if (a.rows() == 0 || a.cols() == 0) return 0.0;
    Eigen::JacobiSVD<Mat> svd(a);
    return svd.singularValues()(0);
}

inline std::string word_to_string(const Word& w) {
    std::string s;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (i) s += ',';
        s += std::to_string(w[i]);
    }
    return s;
}

}  // namespace swdelay

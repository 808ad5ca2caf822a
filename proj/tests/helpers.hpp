#pragma once

// Test-only helpers: finite-difference gradient oracles, comparison with
// mixed absolute/relative tolerance, and scratch files. These stay
// independent of the gradient code they check.

#include <filesystem>
#include <fstream>
#include <string>

#include "conceptseg/conceptseg.hpp"

namespace helpers {

using conceptseg::Index;
using conceptseg::Matrix;
using conceptseg::Vector;

/// Central finite differences of a scalar function over one parameter
/// tensor. The closure reads the tensor by reference, so perturbations are
/// visible to it.
template <typename ParamT, typename F>
ParamT finite_diff(ParamT& param, F&& loss, double h = 1e-5) {
    ParamT grad = ParamT::Zero(param.rows(), param.cols());
    for (Index j = 0; j < param.cols(); ++j) {
        for (Index i = 0; i < param.rows(); ++i) {
            const double orig = param(i, j);
            param(i, j) = orig + h;
            const double up = loss();
            param(i, j) = orig - h;
            const double down = loss();
            param(i, j) = orig;
            grad(i, j) = (up - down) / (2.0 * h);
        }
    }
    return grad;
}

/// Worst-case relative error between two gradient tensors, with an absolute
/// floor below which entries count as equal.
template <typename A, typename B>
double max_rel_error(const A& analytic, const B& numeric, double abs_floor = 1e-7) {
    double worst = 0.0;
    for (Index j = 0; j < analytic.cols(); ++j) {
        for (Index i = 0; i < analytic.rows(); ++i) {
            const double diff = std::abs(analytic(i, j) - numeric(i, j));
            if (diff <= abs_floor) continue;
            const double scale = std::max(std::abs(analytic(i, j)), std::abs(numeric(i, j)));
            worst = std::max(worst, diff / scale);
        }
    }
    return worst;
}

inline Matrix random_matrix(Index rows, Index cols, conceptseg::Rng& rng, double lo = -1.0,
                            double hi = 1.0) {
    Matrix m(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i) m(i, j) = rng.uniform(lo, hi);
    return m;
}

/// Scratch file removed on destruction; lives in the test working directory.
struct ScratchFile {
    std::string path;

    ScratchFile(const std::string& name, const std::string& body) : path(name) {
        std::ofstream out(path, std::ios::binary);
        out << body;
    }
    ~ScratchFile() {
        std::error_code ec;
        std::filesystem::remove(path, ec);
    }
};

}  // namespace helpers

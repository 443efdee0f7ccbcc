#include "graphon/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "graphon/errors.hpp"

namespace graphon {

DualKernel::DualKernel(WeightSpacePtr space, int n, Eigen::MatrixXd values)
    : space_(std::move(space)), n_(n), values_(std::move(values)) {
    require_input(space_ != nullptr, "kernel needs a weight space");
    require_input(n_ >= 1, "kernel needs at least one block");
    require_input(values_.rows() == static_cast<Eigen::Index>(n_) * n_ &&
                      values_.cols() == space_->size(),
                  "kernel value shape does not match the grid and weight space");
    for (Eigen::Index r = 0; r < values_.rows(); ++r)
        for (Eigen::Index c = 0; c < values_.cols(); ++c)
            if (!std::isfinite(values_(r, c)))
                fail_input("kernel values must be finite (bounded test kernels only)");
}

double graphon_entropy(const StepGraphon& w, const FiniteMeasure& nu) {
    require_input(w.space()->same_as(*nu.space()),
                  "entropy needs the reference measure on the graphon's weight space");
    require_input(nu.is_probability(), "entropy reference must be a probability measure");
    const int n = w.n();
    // Summing in sorted order makes the value independent of cell order, so
    // relabeling changes nothing, bit for bit.
    std::vector<double> kls;
    kls.reserve(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double kl = kl_divergence(w.cell_measure(i, j), nu);
            if (std::isinf(kl)) return std::numeric_limits<double>::infinity();
            kls.push_back(kl);
        }
    std::sort(kls.begin(), kls.end());
    double sum = 0.0;
    for (double kl : kls) sum += kl;
    return sum / (static_cast<double>(n) * n);
}

double variational_value(const StepGraphon& w, const FiniteMeasure& nu, const DualKernel& a) {
    require_input(w.space()->same_as(*nu.space()) && w.space()->same_as(*a.space()),
                  "variational value needs matching weight spaces");
    require_input(w.n() == a.n(), "variational value needs a kernel on the graphon's grid");
    require_input(nu.is_probability(), "variational reference must be a probability measure");
    const int n = w.n();
    double sum = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Eigen::VectorXd f = a.cell(i, j).transpose();
            sum += f.dot(w.cell(i, j).transpose()) - log_mgf(f, nu);
        }
    return sum / (static_cast<double>(n) * n);
}

DualKernel optimal_kernel(const StepGraphon& w, const FiniteMeasure& nu) {
    require_input(w.space()->same_as(*nu.space()),
                  "optimal kernel needs the reference measure on the graphon's weight space");
    require_input(nu.is_probability(), "optimal kernel reference must be a probability measure");
    const Eigen::Index s = nu.size();
    for (Eigen::Index z = 0; z < s; ++z)
        if (nu.weight(z) <= 0.0)
            fail_input("optimal kernel needs a strictly positive reference; point " +
                       std::to_string(z) + " has weight zero");
    const int n = w.n();
    const Eigen::Index zero = w.space()->zero_index();
    Eigen::MatrixXd values(static_cast<Eigen::Index>(n) * n, s);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            for (Eigen::Index z = 0; z < s; ++z)
                if (w.cell(i, j)[z] <= 0.0)
                    fail_input("optimal kernel needs strictly positive cells; cell (" +
                               std::to_string(i) + ", " + std::to_string(j) + ") vanishes at point " +
                               std::to_string(z));
            double base = std::log(w.cell(i, j)[zero] / nu.weight(zero));
            for (Eigen::Index z = 0; z < s; ++z)
                values(static_cast<Eigen::Index>(i) * n + j, z) =
                    std::log(w.cell(i, j)[z] / nu.weight(z)) - base;
        }
    return DualKernel(w.space(), n, std::move(values));
}

}  // namespace graphon

#include "fracreg/mesh.hpp"
#include "fracreg/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fracreg {

GradedMesh::GradedMesh(double T, std::size_t N, double gamma)
    : gamma_(gamma)
{
    if (!std::isfinite(T) || T <= 0)
        throw std::invalid_argument("mesh: T must be positive");
    if (N < 1)
        throw std::invalid_argument("mesh: N must be at least 1");
    if (!(gamma >= 1))
        throw std::invalid_argument("mesh: grading exponent must be >= 1");
    nodes_.resize(N + 1);
    nodes_[0] = 0.0;
    for (std::size_t n = 1; n < N; ++n) {
        double s = static_cast<double>(n) / static_cast<double>(N);
        nodes_[n] = gamma == 1.0 ? T * s : T * std::pow(s, gamma);
    }
    nodes_[N] = T;
}

GradedMesh::GradedMesh(std::vector<double> nodes)
    : nodes_(std::move(nodes)), gamma_(std::numeric_limits<double>::quiet_NaN())
{
    if (nodes_.size() < 2 || nodes_[0] != 0.0)
        throw std::invalid_argument("mesh: need at least two nodes starting at 0");
    for (std::size_t n = 1; n < nodes_.size(); ++n)
        if (!(nodes_[n] > nodes_[n - 1]) || !std::isfinite(nodes_[n]))
            throw std::invalid_argument("mesh: nodes must be finite and strictly increasing");
}

std::size_t GradedMesh::lower_index(double t) const
{
    return static_cast<std::size_t>(std::lower_bound(nodes_.begin(), nodes_.end(), t) - nodes_.begin());
}

GradedMesh make_graded_mesh(double T, std::size_t N, double gamma)
{
    return GradedMesh(T, N, gamma);
}

double default_grading(double alpha)
{
    if (!(alpha > 0))
        throw std::invalid_argument("default_grading: alpha must be positive");
    return std::clamp((2.0 - alpha) / alpha, 1.0, 8.0);
}

Series::Series(GradedMesh mesh, Eigen::MatrixXd values, std::size_t first_defined)
    : mesh_(std::move(mesh)), values_(std::move(values)), first_defined_(first_defined)
{
    if (static_cast<std::size_t>(values_.cols()) != mesh_.size())
        throw std::invalid_argument("series: value count does not match mesh size");
    if (values_.rows() < 1)
        throw std::invalid_argument("series: need at least one component");
    for (Eigen::Index n = static_cast<Eigen::Index>(first_defined_); n < values_.cols(); ++n)
        if (!values_.col(n).allFinite())
            throw std::invalid_argument("series: non-finite value at node " + std::to_string(n));
}

Series Series::scalar(GradedMesh mesh, const std::vector<double>& values)
{
    Eigen::MatrixXd v(1, static_cast<Eigen::Index>(values.size()));
    for (std::size_t n = 0; n < values.size(); ++n)
        v(0, static_cast<Eigen::Index>(n)) = values[n];
    return Series(std::move(mesh), std::move(v));
}

void Series::check_index(std::size_t n) const
{
    if (n >= size())
        throw std::out_of_range("series: node index out of range");
    if (n < first_defined_)
        throw SingularAtOrigin("value at node " + std::to_string(n) + " is undefined");
}

Eigen::VectorXd Series::at(std::size_t n) const
{
    check_index(n);
    return values_.col(static_cast<Eigen::Index>(n));
}

double Series::scalar_at(std::size_t n) const
{
    check_index(n);
    if (values_.rows() != 1)
        throw std::invalid_argument("series: scalar access on a vector series");
    return values_(0, static_cast<Eigen::Index>(n));
}

std::vector<double> Series::scalar_values() const
{
    if (values_.rows() != 1)
        throw std::invalid_argument("series: scalar access on a vector series");
    return {values_.data(), values_.data() + values_.cols()};
}

} // namespace fracreg

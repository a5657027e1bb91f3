#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace fracreg {

// Time grid on [0, T] starting at 0.  Usually graded, t_n = T (n/N)^gamma, but any strictly
// increasing node set starting at zero is accepted (refined meshes, sub-sampled meshes).
class GradedMesh {
public:
    GradedMesh(double T, std::size_t N, double gamma);
    explicit GradedMesh(std::vector<double> nodes);

    double T() const { return nodes_.back(); }
    std::size_t N() const { return nodes_.size() - 1; }
    // NaN for meshes built from an explicit node list.
    double gamma() const { return gamma_; }
    std::size_t size() const { return nodes_.size(); }

    const std::vector<double>& nodes() const { return nodes_; }
    double operator[](std::size_t n) const { return nodes_[n]; }
    double step(std::size_t n) const { return nodes_[n] - nodes_[n - 1]; }

    // Index of the first node >= t (size() if none).
    std::size_t lower_index(double t) const;

    bool operator==(const GradedMesh& other) const { return nodes_ == other.nodes_; }

private:
    std::vector<double> nodes_;
    double gamma_;
};

GradedMesh make_graded_mesh(double T, std::size_t N, double gamma);

// (2 - alpha)/alpha clamped to [1, 8].
double default_grading(double alpha);

// Values at mesh nodes, piecewise linear in time.  Column n holds the state at t_n; a scalar
// series has one row.  Entries before first_defined() are placeholders and may not be read.
class Series {
public:
    Series(GradedMesh mesh, Eigen::MatrixXd values, std::size_t first_defined = 0);

    static Series scalar(GradedMesh mesh, const std::vector<double>& values);
    template <class F>
    static Series sample(const GradedMesh& mesh, F&& f)
    {
        Eigen::MatrixXd v(1, mesh.size());
        for (std::size_t n = 0; n < mesh.size(); ++n)
            v(0, static_cast<Eigen::Index>(n)) = f(mesh[n]);
        return Series(mesh, std::move(v));
    }

    const GradedMesh& mesh() const { return mesh_; }
    std::size_t dim() const { return static_cast<std::size_t>(values_.rows()); }
    std::size_t size() const { return static_cast<std::size_t>(values_.cols()); }
    std::size_t first_defined() const { return first_defined_; }

    const Eigen::MatrixXd& values() const { return values_; }
    Eigen::VectorXd at(std::size_t n) const;
    double scalar_at(std::size_t n) const;
    std::vector<double> scalar_values() const;

private:
    void check_index(std::size_t n) const;

    GradedMesh mesh_;
    Eigen::MatrixXd values_;
    std::size_t first_defined_;
};

} // namespace fracreg

#include "fracreg/fractops.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace fracreg {

// Fornberg's recursion for weights on arbitrarily spaced nodes.
std::vector<double> fd_weights(double x0, std::span<const double> x, int order)
{
    const int n = static_cast<int>(x.size());
    if (order < 0 || n <= order)
        throw std::invalid_argument("fd_weights: need more nodes than the derivative order");
    std::vector<std::vector<double>> c(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(order + 1), 0.0));
    double c1 = 1.0;
    double c4 = x[0] - x0;
    c[0][0] = 1.0;
    for (int i = 1; i < n; ++i) {
        const int mn = std::min(i, order);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = x[static_cast<std::size_t>(i)] - x0;
        for (int j = 0; j < i; ++j) {
            const double c3 = x[static_cast<std::size_t>(i)] - x[static_cast<std::size_t>(j)];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k)
                    c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (int k = mn; k >= 1; --k)
                c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        w[static_cast<std::size_t>(i)] = c[i][order];
    return w;
}

Series differentiate(const Series& s, int m, bool include_origin)
{
    if (m < 0)
        throw std::invalid_argument("differentiate: negative order");
    if (m == 0)
        return s;
    const auto& mesh = s.mesh();
    const std::size_t lo = s.first_defined();
    const std::size_t avail = mesh.size() - lo;
    const std::size_t p = static_cast<std::size_t>(m) + 2;
    if (avail < p)
        throw std::invalid_argument("differentiate: too few nodes for the requested order");
    const std::size_t first = include_origin ? lo : std::max<std::size_t>(lo, 1);
    const auto& t = mesh.nodes();
    Eigen::MatrixXd out(s.dim(), static_cast<Eigen::Index>(mesh.size()));
    out.leftCols(static_cast<Eigen::Index>(first)).setConstant(std::numeric_limits<double>::quiet_NaN());
    for (std::size_t n = first; n < mesh.size(); ++n) {
        std::size_t start = n >= p / 2 ? n - p / 2 : 0;
        start = std::clamp(start, lo, mesh.size() - p);
        auto w = fd_weights(t[n], std::span<const double>(t.data() + start, p), m);
        Eigen::Map<const Eigen::VectorXd> wv(w.data(), static_cast<Eigen::Index>(p));
        out.col(static_cast<Eigen::Index>(n)).noalias() =
            s.values().middleCols(static_cast<Eigen::Index>(start), static_cast<Eigen::Index>(p)) * wv;
    }
    return Series(mesh, std::move(out), first);
}

} // namespace fracreg

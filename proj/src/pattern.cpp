#include "pattern.hpp"

#include "syrenn/error.hpp"

#include <cmath>
#include <numbers>

namespace syrenn::detail {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::size_t argmax_in(const Vector& at, const std::vector<std::size_t>& group) {
    std::size_t best = group.front();
    for (std::size_t idx : group) {
        if (at[static_cast<Eigen::Index>(idx)] > at[static_cast<Eigen::Index>(best)]) best = idx;
    }
    return best;
}

} // namespace

AffineMap pattern_affine(const Layer& layer, const Vector& at) {
    const auto n = at.size();
    return std::visit(
        overloaded{
            [&](const AffineLayer& l) { return AffineMap{l.weights, l.bias}; },
            [&](const ReluLayer&) {
                Vector d = (at.array() < 0.0).select(Vector::Zero(n), Vector::Ones(n));
                return AffineMap{d.asDiagonal().toDenseMatrix(), Vector::Zero(n)};
            },
            [&](const LeakyReluLayer& l) {
                Vector d = (at.array() < 0.0).select(Vector::Constant(n, l.alpha), Vector::Ones(n));
                return AffineMap{d.asDiagonal().toDenseMatrix(), Vector::Zero(n)};
            },
            [&](const HardTanhLayer&) {
                AffineMap m{Matrix::Zero(n, n), Vector::Zero(n)};
                for (Eigen::Index i = 0; i < n; ++i) {
                    if (at[i] > 1.0) {
                        m.offset[i] = 1.0;
                    } else if (at[i] < -1.0) {
                        m.offset[i] = -1.0;
                    } else {
                        m.linear(i, i) = 1.0;
                    }
                }
                return m;
            },
            [&](const MaxPoolLayer& l) {
                const auto groups = static_cast<Eigen::Index>(l.groups.size());
                AffineMap m{Matrix::Zero(groups, n), Vector::Zero(groups)};
                for (Eigen::Index g = 0; g < groups; ++g) {
                    m.linear(g, static_cast<Eigen::Index>(argmax_in(at, l.groups[g]))) = 1.0;
                }
                return m;
            },
        },
        layer);
}

Matrix map_columns(const Layer& layer, const Vector& at, const Matrix& columns) {
    return std::visit(
        overloaded{
            [&](const AffineLayer& l) -> Matrix {
                Matrix out = l.weights * columns;
                out.colwise() += l.bias;
                return out;
            },
            [&](const ReluLayer&) -> Matrix {
                Matrix out = columns;
                for (Eigen::Index i = 0; i < at.size(); ++i) {
                    if (at[i] < 0.0) out.row(i).setZero();
                }
                return out;
            },
            [&](const LeakyReluLayer& l) -> Matrix {
                Matrix out = columns;
                for (Eigen::Index i = 0; i < at.size(); ++i) {
                    if (at[i] < 0.0) out.row(i) *= l.alpha;
                }
                return out;
            },
            [&](const HardTanhLayer&) -> Matrix {
                Matrix out = columns;
                for (Eigen::Index i = 0; i < at.size(); ++i) {
                    if (at[i] > 1.0) out.row(i).setConstant(1.0);
                    else if (at[i] < -1.0) out.row(i).setConstant(-1.0);
                }
                return out;
            },
            [&](const MaxPoolLayer& l) -> Matrix {
                Matrix out(static_cast<Eigen::Index>(l.groups.size()), columns.cols());
                for (std::size_t g = 0; g < l.groups.size(); ++g) {
                    out.row(static_cast<Eigen::Index>(g)) =
                        columns.row(static_cast<Eigen::Index>(argmax_in(at, l.groups[g])));
                }
                return out;
            },
        },
        layer);
}

Vector pullback(const Layer& layer, const Vector& at, const Vector& g) {
    return std::visit(
        overloaded{
            [&](const AffineLayer& l) -> Vector { return l.weights.transpose() * g; },
            [&](const ReluLayer&) -> Vector {
                return (at.array() < 0.0).select(Vector::Zero(g.size()), g);
            },
            [&](const LeakyReluLayer& l) -> Vector {
                return (at.array() < 0.0).select(l.alpha * g, g);
            },
            [&](const HardTanhLayer&) -> Vector {
                return (at.array().abs() > 1.0).select(Vector::Zero(g.size()), g);
            },
            [&](const MaxPoolLayer& l) -> Vector {
                Vector out = Vector::Zero(at.size());
                for (std::size_t k = 0; k < l.groups.size(); ++k) {
                    out[static_cast<Eigen::Index>(argmax_in(at, l.groups[k]))] +=
                        g[static_cast<Eigen::Index>(k)];
                }
                return out;
            },
        },
        layer);
}

SeparatorFamily SeparatorFamily::for_layer(const Layer& layer, std::size_t dim) {
    SeparatorFamily f;
    f.dim_ = dim;
    std::visit(overloaded{
                   [&](const AffineLayer&) { f.kind_ = Kind::Empty; },
                   [&](const ReluLayer&) { f.kind_ = Kind::Coordinate; },
                   [&](const LeakyReluLayer&) { f.kind_ = Kind::Coordinate; },
                   [&](const HardTanhLayer&) { f.kind_ = Kind::Band; },
                   [&](const MaxPoolLayer& l) {
                       f.kind_ = Kind::Pairwise;
                       for (const auto& group : l.groups) {
                           for (std::size_t a = 0; a < group.size(); ++a) {
                               for (std::size_t b = a + 1; b < group.size(); ++b) {
                                   f.pairs_.emplace_back(group[a], group[b]);
                               }
                           }
                       }
                   },
               },
               layer);
    return f;
}

SeparatorFamily SeparatorFamily::pairwise(std::vector<std::pair<std::size_t, std::size_t>> pairs,
                                          std::size_t dim) {
    SeparatorFamily f;
    f.kind_ = Kind::Pairwise;
    f.dim_ = dim;
    f.pairs_ = std::move(pairs);
    return f;
}

SeparatorFamily SeparatorFamily::argmax_boundaries(std::size_t dim) {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t a = 0; a < dim; ++a) {
        for (std::size_t b = a + 1; b < dim; ++b) pairs.emplace_back(a, b);
    }
    return pairwise(std::move(pairs), dim);
}

std::size_t SeparatorFamily::size() const noexcept {
    switch (kind_) {
    case Kind::Empty: return 0;
    case Kind::Coordinate: return dim_;
    case Kind::Band: return 2 * dim_;
    case Kind::Pairwise: return pairs_.size();
    }
    return 0;
}

Hyperplane SeparatorFamily::hyperplane(std::size_t k) const {
    const auto n = static_cast<Eigen::Index>(dim_);
    Hyperplane h{Vector::Zero(n), 0.0};
    switch (kind_) {
    case Kind::Empty: throw std::out_of_range("empty hyperplane family");
    case Kind::Coordinate: h.normal[static_cast<Eigen::Index>(k)] = 1.0; break;
    case Kind::Band:
        h.normal[static_cast<Eigen::Index>(k / 2)] = 1.0;
        h.offset = (k % 2 == 0) ? -1.0 : 1.0;
        break;
    case Kind::Pairwise:
        h.normal[static_cast<Eigen::Index>(pairs_.at(k).first)] = 1.0;
        h.normal[static_cast<Eigen::Index>(pairs_.at(k).second)] = -1.0;
        break;
    }
    return h;
}

void SeparatorFamily::classify(const Matrix& points, double eps, Matrix& values,
                               Eigen::MatrixXi& signs) const {
    const auto count = static_cast<Eigen::Index>(size());
    const Eigen::Index cols = points.cols();
    values.resize(count, cols);
    signs.resize(count, cols);
    if (count == 0) return;

    const Eigen::RowVectorXd norms = points.colwise().norm();
    double normal_norm = 1.0;
    double offset_abs = 0.0;
    switch (kind_) {
    case Kind::Empty: return;
    case Kind::Coordinate: values = points; break;
    case Kind::Band:
        for (Eigen::Index i = 0; i < points.rows(); ++i) {
            values.row(2 * i) = points.row(i).array() + 1.0;
            values.row(2 * i + 1) = points.row(i).array() - 1.0;
        }
        offset_abs = 1.0;
        break;
    case Kind::Pairwise:
        for (std::size_t k = 0; k < pairs_.size(); ++k) {
            values.row(static_cast<Eigen::Index>(k)) =
                points.row(static_cast<Eigen::Index>(pairs_[k].first)) -
                points.row(static_cast<Eigen::Index>(pairs_[k].second));
        }
        normal_norm = std::numbers::sqrt2;
        break;
    }
    for (Eigen::Index j = 0; j < cols; ++j) {
        const double band = eps * (1.0 + offset_abs + normal_norm * norms[j]);
        for (Eigen::Index k = 0; k < count; ++k) {
            const double v = values(k, j);
            signs(k, j) = v > band ? 1 : (v < -band ? -1 : 0);
        }
    }
}

bool SeparatorFamily::touches(const Vector& p, double eps) const {
    Matrix values;
    Eigen::MatrixXi signs;
    classify(p, eps, values, signs);
    return (signs.array() == 0).any();
}

} // namespace syrenn::detail

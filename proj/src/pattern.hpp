#pragma once

// Internal helpers shared by the engine and the analyses: activation patterns
// with a total tie-breaking rule, and a compact evaluator for a layer's
// hyperplane family.

#include "syrenn/network.hpp"

#include <utility>
#include <vector>

namespace syrenn::detail {

// Tie rule: ReLU and LeakyReLU are active at 0, HardTanh is the identity on
// the closed interval [-1, 1], MaxPool picks the smallest winning index.
AffineMap pattern_affine(const Layer& layer, const Vector& at);

/// Applies the layer's affine piece selected at `at` to every column.
Matrix map_columns(const Layer& layer, const Vector& at, const Matrix& columns);

/// Vector-Jacobian product g^T J of the layer's piece selected at `at`.
Vector pullback(const Layer& layer, const Vector& at, const Vector& g);

class SeparatorFamily {
public:
    enum class Kind { Empty, Coordinate, Band, Pairwise };

    static SeparatorFamily for_layer(const Layer& layer, std::size_t dim);
    static SeparatorFamily pairwise(std::vector<std::pair<std::size_t, std::size_t>> pairs,
                                    std::size_t dim);
    /// Hyperplanes {y_a = y_b : a < b}; used to split by argmax class.
    static SeparatorFamily argmax_boundaries(std::size_t dim);

    std::size_t size() const noexcept;
    std::size_t dim() const noexcept { return dim_; }
    Hyperplane hyperplane(std::size_t k) const;

    /// values(k, j) = N_k . p_j - b_k and signs(k, j) under the relative band
    /// eps * (1 + |b_k| + |N_k| |p_j|).
    void classify(const Matrix& points, double eps, Matrix& values, Eigen::MatrixXi& signs) const;

    /// True if some hyperplane passes within the band of `p`.
    bool touches(const Vector& p, double eps) const;

private:
    Kind kind_ = Kind::Empty;
    std::size_t dim_ = 0;
    std::vector<std::pair<std::size_t, std::size_t>> pairs_;
};

} // namespace syrenn::detail

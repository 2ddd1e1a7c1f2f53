#pragma once

// Operators stored by diagonal. Every operator of the model (ladder operators,
// atomic transitions and their products) occupies a handful of diagonals of
// the composite index, so products with a dense density matrix reduce to
// scaled row-segment updates.

#include "uscprobe/hilbert.hpp"

#include <vector>

namespace uscprobe {

class BandedOperator {
public:
    // Entry (first_row + i, first_row + i + offset) = values(i).
    struct Band {
        int offset = 0;
        int first_row = 0;
        Eigen::VectorXcd values;
    };

    BandedOperator() = default;
    explicit BandedOperator(const OperatorMatrix& dense);

    int dim() const noexcept { return dim_; }
    const std::vector<Band>& bands() const noexcept { return bands_; }
    OperatorMatrix to_dense() const;

    // out += A rho
    void add_left_product(const OperatorMatrix& rho, OperatorMatrix& out) const;
    // out += scale * (A rho)
    void add_left_product(const OperatorMatrix& rho, double scale, OperatorMatrix& out) const;
    // out += scale * (A rho A^dag)
    void add_sandwich(const OperatorMatrix& rho, double scale, OperatorMatrix& out) const;

private:
    int dim_ = 0;
    std::vector<Band> bands_;
};

}  // namespace uscprobe

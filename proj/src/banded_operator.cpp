#include "uscprobe/banded_operator.hpp"

#include <stdexcept>

namespace uscprobe {

BandedOperator::BandedOperator(const OperatorMatrix& dense) : dim_(static_cast<int>(dense.rows())) {
    if (dense.rows() != dense.cols()) throw std::invalid_argument("BandedOperator: matrix must be square");
    for (int offset = -(dim_ - 1); offset < dim_; ++offset) {
        const int row_begin = offset < 0 ? -offset : 0;
        const int row_end = offset > 0 ? dim_ - offset : dim_;
        int first = -1, last = -1;
        for (int r = row_begin; r < row_end; ++r) {
            if (dense(r, r + offset) != Complex{}) {
                if (first < 0) first = r;
                last = r;
            }
        }
        if (first < 0) continue;
        Band band;
        band.offset = offset;
        band.first_row = first;
        band.values.resize(last - first + 1);
        for (int r = first; r <= last; ++r) band.values(r - first) = dense(r, r + offset);
        bands_.push_back(std::move(band));
    }
}

OperatorMatrix BandedOperator::to_dense() const {
    OperatorMatrix dense = OperatorMatrix::Zero(dim_, dim_);
    for (const Band& b : bands_) {
        for (Eigen::Index i = 0; i < b.values.size(); ++i) {
            dense(b.first_row + i, b.first_row + i + b.offset) = b.values(i);
        }
    }
    return dense;
}

void BandedOperator::add_left_product(const OperatorMatrix& rho, OperatorMatrix& out) const {
    for (const Band& b : bands_) {
        const auto len = b.values.size();
        auto target = out.middleRows(b.first_row, len);
        const auto source = rho.middleRows(b.first_row + b.offset, len);
        for (Eigen::Index c = 0; c < dim_; ++c) {
            target.col(c).array() += b.values.array() * source.col(c).array();
        }
    }
}

void BandedOperator::add_left_product(const OperatorMatrix& rho, double scale, OperatorMatrix& out) const {
    for (const Band& b : bands_) {
        const auto len = b.values.size();
        auto target = out.middleRows(b.first_row, len);
        const auto source = rho.middleRows(b.first_row + b.offset, len);
        for (Eigen::Index c = 0; c < dim_; ++c) {
            target.col(c).array() += scale * (b.values.array() * source.col(c).array());
        }
    }
}

void BandedOperator::add_sandwich(const OperatorMatrix& rho, double scale, OperatorMatrix& out) const {
    // (A rho A^dag)_{rc} = sum over band pairs of v1(r) rho(r+o1, c+o2) conj(v2(c)).
    for (const Band& b1 : bands_) {
        const auto len1 = b1.values.size();
        for (const Band& b2 : bands_) {
            const auto len2 = b2.values.size();
            auto target = out.block(b1.first_row, b2.first_row, len1, len2);
            const auto source = rho.block(b1.first_row + b1.offset, b2.first_row + b2.offset, len1, len2);
            for (Eigen::Index c = 0; c < len2; ++c) {
                const Complex right = scale * std::conj(b2.values(c));
                target.col(c).array() += right * b1.values.array() * source.col(c).array();
            }
        }
    }
}

}  // namespace uscprobe

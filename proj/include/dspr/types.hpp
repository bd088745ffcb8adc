#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <complex>
#include <cstdint>
#include <iterator>
#include <vector>

#include "dspr/errors.hpp"

namespace dspr {

using cplx = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;

// Magnitudes at or below this count as zero for supports and sparsity.
inline constexpr double kZeroTol = 1e-12;

// Sorted, distinct indices into [0, bound). The factory validates; the raw
// vector is exposed read-only.
class IndexSet {
public:
    IndexSet() = default;

    static IndexSet of(std::vector<int> indices, int bound) {
        for (std::size_t i = 0; i < indices.size(); ++i) {
            if (indices[i] < 0 || indices[i] >= bound)
                throw InvalidParameter("IndexSet: index out of range");
            if (i > 0 && indices[i] <= indices[i - 1])
                throw InvalidParameter("IndexSet: indices must be strictly increasing");
        }
        IndexSet s;
        s.idx_ = std::move(indices);
        return s;
    }

    static IndexSet of_unsorted(std::vector<int> indices, int bound) {
        std::sort(indices.begin(), indices.end());
        return of(std::move(indices), bound);
    }

    static IndexSet complement(const IndexSet& s, int bound) {
        std::vector<int> out;
        out.reserve(static_cast<std::size_t>(bound) - s.idx_.size());
        std::size_t p = 0;
        for (int j = 0; j < bound; ++j) {
            if (p < s.idx_.size() && s.idx_[p] == j) {
                ++p;
            } else {
                out.push_back(j);
            }
        }
        return of(std::move(out), bound);
    }

    static IndexSet unite(const IndexSet& a, const IndexSet& b, int bound) {
        std::vector<int> out;
        out.reserve(a.idx_.size() + b.idx_.size());
        std::set_union(a.idx_.begin(), a.idx_.end(), b.idx_.begin(), b.idx_.end(),
                       std::back_inserter(out));
        return of(std::move(out), bound);
    }

    const std::vector<int>& indices() const { return idx_; }
    int size() const { return static_cast<int>(idx_.size()); }
    bool empty() const { return idx_.empty(); }

    bool contains(int j) const {
        return std::binary_search(idx_.begin(), idx_.end(), j);
    }

    bool operator==(const IndexSet& other) const { return idx_ == other.idx_; }

private:
    std::vector<int> idx_;
};

// v restricted to the index set (other entries zeroed), same length.
inline CVec restrict_to(const CVec& v, const IndexSet& s) {
    CVec out = CVec::Zero(v.size());
    for (int j : s.indices()) out(j) = v(j);
    return out;
}

// Block restriction X[rows, cols] embedded back at full size.
inline CMat restrict_block(const CMat& X, const IndexSet& rows, const IndexSet& cols) {
    CMat out = CMat::Zero(X.rows(), X.cols());
    for (int i : rows.indices())
        for (int j : cols.indices()) out(i, j) = X(i, j);
    return out;
}

} // namespace dspr

#include "lmqn/pair_store.hpp"

#include <stdexcept>

namespace lmqn {

LdrSplit GramCache::ldr_views() const {
    const std::size_t k = sty_.rows();
    if (k == 0) throw std::invalid_argument("ldr_views: empty cache");
    LdrSplit out{Matrix(k, k), Matrix(k, k), Matrix(k, k)};
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) {
            if (i > j)
                out.l(i, j) = sty_(i, j);
            else if (i == j)
                out.d(i, j) = sty_(i, j);
            else
                out.r(i, j) = sty_(i, j);
        }
    return out;
}

void GramCache::drop_oldest() {
    const std::size_t k = sts_.rows();
    Matrix sts(k - 1, k - 1), sty(k - 1, k - 1), yty(k - 1, k - 1);
    for (std::size_t i = 1; i < k; ++i)
        for (std::size_t j = 1; j < k; ++j) {
            sts(i - 1, j - 1) = sts_(i, j);
            sty(i - 1, j - 1) = sty_(i, j);
            yty(i - 1, j - 1) = yty_(i, j);
        }
    sts_ = std::move(sts);
    sty_ = std::move(sty);
    yty_ = std::move(yty);
}

PairStore::PairStore(std::size_t dimension, std::size_t memory, double gamma)
    : n_(dimension), m_(memory), gamma_(gamma) {
    if (memory == 0) throw std::invalid_argument("PairStore: memory must be positive");
    if (gamma <= 0.0) throw std::invalid_argument("PairStore: gamma must be positive");
}

void PairStore::set_gamma(double gamma) {
    if (gamma <= 0.0) throw std::invalid_argument("PairStore: gamma must be positive");
    gamma_ = gamma;
    ++revision_;
}

bool PairStore::push(const Vec& s, const Vec& y, bool require_curvature) {
    if (s.size() != n_ || y.size() != n_)
        throw std::invalid_argument("PairStore::push: dimension mismatch");

    const double sty_new = dot(s, y);
    if (require_curvature) {
        if (sty_new <= kCurvatureTol * nrm2(s) * nrm2(y)) return false;
    }

    if (count() == m_) {
        s_cols_.pop_front();
        y_cols_.pop_front();
        gram_.drop_oldest();
    }

    const std::size_t k = count();  // index of the new pair
    Matrix sts(k + 1, k + 1), sty(k + 1, k + 1), yty(k + 1, k + 1);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) {
            sts(i, j) = gram_.sts_(i, j);
            sty(i, j) = gram_.sty_(i, j);
            yty(i, j) = gram_.yty_(i, j);
        }
    for (std::size_t i = 0; i < k; ++i) {
        const double ss = dot(s_cols_[i], s);
        sts(i, k) = ss;
        sts(k, i) = ss;
        const double yy = dot(y_cols_[i], y);
        yty(i, k) = yy;
        yty(k, i) = yy;
        sty(i, k) = dot(s_cols_[i], y);  // s_i' y_new
        sty(k, i) = dot(s, y_cols_[i]);  // s_new' y_i
    }
    sts(k, k) = dot(s, s);
    yty(k, k) = dot(y, y);
    sty(k, k) = sty_new;

    gram_.sts_ = std::move(sts);
    gram_.sty_ = std::move(sty);
    gram_.yty_ = std::move(yty);
    s_cols_.push_back(s);
    y_cols_.push_back(y);
    ++revision_;
    return true;
}

} // namespace lmqn

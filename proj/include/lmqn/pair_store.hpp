#pragma once

#include <cstdint>
#include <deque>

#include "lmqn/matrix.hpp"
#include "lmqn/vec.hpp"

namespace lmqn {

/// Strictly-lower / diagonal / strictly-upper split of S'Y. Entries are
/// copied verbatim from the cached product so that L + D + R reassembles
/// S'Y bit for bit.
struct LdrSplit {
    Matrix l;
    Matrix d;
    Matrix r;
};

/// Gram matrices of the stored pairs, maintained by bordering: each accepted
/// push adds one row/column per matrix from fresh inner products, nothing is
/// recomputed. S'B0S and Y'H0Y are the derived views gamma*StS and
/// (1/gamma)*YtY and are never stored separately.
class GramCache {
public:
    const Matrix& sts() const { return sts_; }
    const Matrix& sty() const { return sty_; }
    const Matrix& yty() const { return yty_; }

    LdrSplit ldr_views() const;

private:
    friend class PairStore;

    void drop_oldest();

    Matrix sts_;
    Matrix sty_;
    Matrix yty_;
};

/// Limited-memory pair history (S, Y) with FIFO eviction, the scale gamma of
/// B0 = gamma*I, and the Gram cache every solver reads.
///
/// Single writer: push() must not race with reads; reads are safe between
/// pushes.
class PairStore {
public:
    static constexpr double kCurvatureTol = 1e-8;

    explicit PairStore(std::size_t dimension, std::size_t memory = 6, double gamma = 1.0);

    /// Appends (s, y), evicting the oldest pair first when full. With
    /// require_curvature set, rejects the pair (leaving the store unchanged)
    /// when s'y <= kCurvatureTol * |s| * |y|. Returns acceptance.
    bool push(const Vec& s, const Vec& y, bool require_curvature = true);

    std::size_t dimension() const { return n_; }
    std::size_t memory() const { return m_; }
    std::size_t count() const { return s_cols_.size(); }
    bool empty() const { return s_cols_.empty(); }

    double gamma() const { return gamma_; }
    void set_gamma(double gamma);

    const Vec& s(std::size_t i) const { return s_cols_.at(i); }
    const Vec& y(std::size_t i) const { return y_cols_.at(i); }

    const GramCache& gram() const { return gram_; }

    /// Bumps on every state-changing call; solver states check it to detect
    /// being used against a store that changed after they were built.
    std::uint64_t revision() const { return revision_; }

private:
    std::size_t n_;
    std::size_t m_;
    double gamma_;
    std::deque<Vec> s_cols_;
    std::deque<Vec> y_cols_;
    GramCache gram_;
    std::uint64_t revision_ = 0;
};

} // namespace lmqn

#pragma once

#include <utility>

#include "swdelay/model.hpp"
#include "swdelay/types.hpp"

namespace swdelay {

// A lifted matrix has a single nonzero block of side `block_dim`, placed at
// block position (row_state, col_state).
struct LiftedBlockMatrix {
    int row_state = 0;
    int col_state = 0;
    Mat block;
};

// Block-structured matrix set whose ordinary joint spectral radius equals the
// growth rate of the admissible products of the underlying family. States are
// the length-d_max delay words; matrix for word w sits at block
// (prefix(w), suffix(w)).
struct LiftedSet {
    int block_dim = 0;
    std::vector<Word> states;
    std::vector<LiftedBlockMatrix> matrices;
    std::vector<Word> labels;  // delay word per matrix; empty for ad-hoc sets

    int num_states() const { return static_cast<int>(states.size()); }
    int dim() const { return block_dim * num_states(); }

    Mat assemble(int k) const {
        const LiftedBlockMatrix& m = matrices[static_cast<std::size_t>(k)];
        Mat full = Mat::Zero(dim(), dim());
        full.block(m.row_state * block_dim, m.col_state * block_dim, block_dim, block_dim) =
            m.block;
        return full;
    }

    // y = M_k x for the full-dimension vector x.
    Vec apply(int k, const Vec& x) const {
        const LiftedBlockMatrix& m = matrices[static_cast<std::size_t>(k)];
        Vec y = Vec::Zero(dim());
        y.segment(m.row_state * block_dim, block_dim) =
            m.block * x.segment(m.col_state * block_dim, block_dim);
        return y;
    }

    // Wrap an ordinary (unconstrained) matrix set: one state, full blocks.
    static LiftedSet unconstrained(std::vector<Mat> ms) {
        LiftedSet set;
        if (ms.empty()) throw ConfigError("unconstrained lifted set: empty matrix list");
        set.block_dim = static_cast<int>(ms.front().rows());
        set.states = {Word{}};
        for (Mat& m : ms) {
            if (m.rows() != set.block_dim || m.cols() != set.block_dim)
                throw ConfigError("unconstrained lifted set: matrices must be square, same size");
            set.matrices.push_back({0, 0, std::move(m)});
        }
        return set;
    }
};

inline LiftedSet lift(const SwitchedErrorSystem& sys) {
    LiftedSet set;
    set.block_dim = sys.dim();
    set.states = detail::enumerate_words(sys.delays, sys.d_max);

    auto state_index = [&](const Word& w) {
        for (std::size_t i = 0; i < set.states.size(); ++i)
            if (set.states[i] == w) return static_cast<int>(i);
        throw ConfigError("lift: unknown state word");
    };

    for (std::size_t k = 0; k < sys.words.size(); ++k) {
        const Word& w = sys.words[k];
        Word prefix(w.begin(), w.end() - 1);
        Word suffix(w.begin() + 1, w.end());
        set.matrices.push_back({state_index(prefix), state_index(suffix), sys.matrices[k]});
        set.labels.push_back(w);
    }
    return set;
}

// Copies of eps0 placed in each block position; every copy has the same
// 2-norm as eps0.
inline std::vector<Vec> lifted_initial_vectors(const Vec& eps0, const LiftedSet& lifted) {
    if (eps0.size() != lifted.block_dim)
        throw ConfigError("lifted_initial_vectors: eps0 must have the block dimension");
    std::vector<Vec> out;
    out.reserve(static_cast<std::size_t>(lifted.num_states()));
    for (int h = 0; h < lifted.num_states(); ++h) {
        Vec v = Vec::Zero(lifted.dim());
        v.segment(h * lifted.block_dim, lifted.block_dim) = eps0;
        out.push_back(std::move(v));
    }
    return out;
}

}  // namespace swdelay

#pragma once

#include <algorithm>
#include <map>
#include <utility>

#include "swdelay/types.hpp"

namespace swdelay {

// Discrete-time LTI plant x(k+1) = A_P x(k) + B_P u(k).
struct Plant {
    Mat a_p;
    Mat b_p;

    int n() const { return static_cast<int>(a_p.rows()); }
    int m() const { return static_cast<int>(b_p.cols()); }

    void validate() const {
        if (a_p.rows() < 1 || a_p.rows() != a_p.cols())
            throw ConfigError("plant: A_P must be square and nonempty");
        if (b_p.rows() != a_p.rows() || b_p.cols() < 1)
            throw ConfigError("plant: B_P must have as many rows as A_P and at least one column");
    }
};

// Admissible actuation delays. By convention the maximum delay is realized:
// max(delays) == d_max.
struct DelaySet {
    std::vector<int> delays;  // sorted, unique
    int d_max = 0;

    void validate() const {
        if (delays.empty()) throw ConfigError("delays: set must be nonempty");
        if (!std::is_sorted(delays.begin(), delays.end()))
            throw ConfigError("delays: set must be sorted ascending");
        if (std::adjacent_find(delays.begin(), delays.end()) != delays.end())
            throw ConfigError("delays: duplicate entries");
        if (delays.front() < 0) throw ConfigError("delays: negative delay");
        if (delays.back() != d_max)
            throw ConfigError("delays: max(delays) must equal d_max");
    }

    static DelaySet from(std::vector<int> d) {
        std::sort(d.begin(), d.end());
        d.erase(std::unique(d.begin(), d.end()), d.end());
        DelaySet s;
        s.delays = std::move(d);
        s.d_max = s.delays.empty() ? 0 : s.delays.back();
        s.validate();
        return s;
    }
};

// Feedback gain blocks K_0 ... K_{d_max}, each m x n, acting on the error
// history e(k), e(k-1), ..., e(k-d_max).
struct Gain {
    std::vector<Mat> blocks;

    void validate(const Plant& plant, const DelaySet& delays) const {
        if (static_cast<int>(blocks.size()) != delays.d_max + 1)
            throw ConfigError("gain: expected d_max+1 blocks");
        for (const Mat& k : blocks)
            if (k.rows() != plant.m() || k.cols() != plant.n())
                throw ConfigError("gain: each block must be m x n");
    }

    static Gain zero(const Plant& plant, const DelaySet& delays) {
        Gain g;
        g.blocks.assign(delays.d_max + 1, Mat::Zero(plant.m(), plant.n()));
        return g;
    }
};

// Open-loop plant augmented with the in-flight actuation values
// u_1 ... u_{d_max}; the input enters through a delay-dependent column.
struct ExtendedOpenLoop {
    Mat a_ext;                 // (n + m*d_max) square
    std::map<int, Mat> b_ext;  // delay -> input column block
};

inline ExtendedOpenLoop build_extended(const Plant& plant, const DelaySet& delays) {
    plant.validate();
    delays.validate();
    const int n = plant.n();
    const int m = plant.m();
    const int d = delays.d_max;
    const int dim = n + m * d;

    ExtendedOpenLoop sys;
    sys.a_ext = Mat::Zero(dim, dim);
    sys.a_ext.topLeftCorner(n, n) = plant.a_p;
    if (d >= 1) {
        sys.a_ext.block(0, n, n, m) = plant.b_p;
        // shift of the actuation pipeline: u_i <- u_{i+1}
        for (int i = 0; i + 1 < d; ++i)
            sys.a_ext.block(n + m * i, n + m * (i + 1), m, m) = Mat::Identity(m, m);
    }
    for (int sigma : delays.delays) {
        Mat col = Mat::Zero(dim, m);
        if (sigma == 0)
            col.topRows(n) = plant.b_p;
        else
            col.block(n + m * (sigma - 1), 0, m, m) = Mat::Identity(m, m);
        sys.b_ext[sigma] = col;
    }
    return sys;
}

namespace detail {

// All words of the given length over the alphabet, lexicographic order.
inline std::vector<Word> enumerate_words(const std::vector<int>& alphabet, int length) {
    std::vector<Word> out;
    if (length == 0) {
        out.push_back({});
        return out;
    }
    Word w(static_cast<std::size_t>(length), alphabet.front());
    std::vector<int> idx(static_cast<std::size_t>(length), 0);
    const int b = static_cast<int>(alphabet.size());
    while (true) {
        for (int i = 0; i < length; ++i) w[static_cast<std::size_t>(i)] = alphabet[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])];
        out.push_back(w);
        int pos = length - 1;
        while (pos >= 0 && ++idx[static_cast<std::size_t>(pos)] == b) {
            idx[static_cast<std::size_t>(pos)] = 0;
            --pos;
        }
        if (pos < 0) break;
    }
    return out;
}

}  // namespace detail

// Error-only switched family: eps(k+1) = N_w eps(k) with
// eps(k) = [e(k); e(k-1); ...; e(k-2*d_max)] and w the last d_max+1 delay
// symbols, newest first. Consecutive words must agree on the overlap, which
// the successor graph encodes.
struct SwitchedErrorSystem {
    int n = 0;
    int d_max = 0;
    std::vector<int> delays;
    std::vector<Word> words;                    // length d_max+1 each
    std::vector<Mat> matrices;                  // parallel to words
    std::vector<std::vector<int>> successors;   // edges w -> w'

    int dim() const { return n * (2 * d_max + 1); }

    int index_of(const Word& w) const {
        auto it = std::find(words.begin(), words.end(), w);
        if (it == words.end()) throw ConfigError("unknown delay word " + word_to_string(w));
        return static_cast<int>(it - words.begin());
    }
};

inline SwitchedErrorSystem build_error_system(const Plant& plant, const DelaySet& delays,
                                              const Gain& gain) {
    plant.validate();
    delays.validate();
    gain.validate(plant, delays);
    if (plant.m() != 1)
        throw UnsupportedError("error-system construction requires a single-input plant (m = 1)");

    const int n = plant.n();
    const int d = delays.d_max;
    SwitchedErrorSystem sys;
    sys.n = n;
    sys.d_max = d;
    sys.delays = delays.delays;
    sys.words = detail::enumerate_words(delays.delays, d + 1);

    const int dim = sys.dim();
    sys.matrices.reserve(sys.words.size());
    for (const Word& w : sys.words) {
        Mat nm = Mat::Zero(dim, dim);
        // e(k+1) = A_P e(k) + B_P * sum_i [w_i == i] * sum_j K_j e(k-i-j)
        nm.topLeftCorner(n, n) = plant.a_p;
        for (int i = 0; i <= d; ++i) {
            if (w[static_cast<std::size_t>(i)] != i) continue;
            for (int j = 0; j <= d; ++j)
                nm.block(0, n * (i + j), n, n) += plant.b_p * gain.blocks[static_cast<std::size_t>(j)];
        }
        // history shift e(k-r+1) <- e(k-r)
        for (int r = 1; r <= 2 * d; ++r)
            nm.block(n * r, n * (r - 1), n, n) = Mat::Identity(n, n);
        sys.matrices.push_back(std::move(nm));
    }

    // edge w -> w' iff w' = (x, w_0, ..., w_{d-1}) for some delay x
    sys.successors.resize(sys.words.size());
    for (std::size_t i = 0; i < sys.words.size(); ++i) {
        for (std::size_t j = 0; j < sys.words.size(); ++j) {
            bool ok = true;
            for (int r = 0; r < d; ++r)
                if (sys.words[j][static_cast<std::size_t>(r + 1)] != sys.words[i][static_cast<std::size_t>(r)]) {
                    ok = false;
                    break;
                }
            if (ok) sys.successors[i].push_back(static_cast<int>(j));
        }
    }
    return sys;
}

// Simulate the closed loop through the explicit extended-state recursion:
// state (e(k), ..., e(k-d_max), u_1(k), ..., u_{d_max}(k)), zero history and
// empty pipeline at k = 0. Returns e(0), ..., e(len(sigma)).
inline std::vector<Vec> simulate(const Plant& plant, const DelaySet& delays, const Gain& gain,
                                 const std::vector<int>& sigma, const Vec& e0) {
    plant.validate();
    delays.validate();
    gain.validate(plant, delays);
    const int n = plant.n();
    const int m = plant.m();
    const int d = delays.d_max;
    if (e0.size() != n) throw ConfigError("simulate: e0 must have plant dimension");

    std::vector<Vec> e_hist(static_cast<std::size_t>(d + 1), Vec::Zero(n));
    e_hist[0] = e0;
    std::vector<Vec> u(static_cast<std::size_t>(d), Vec::Zero(m));

    std::vector<Vec> out;
    out.reserve(sigma.size() + 1);
    out.push_back(e0);
    for (int s : sigma) {
        if (std::find(delays.delays.begin(), delays.delays.end(), s) == delays.delays.end())
            throw ConfigError("simulate: delay value outside the admissible set");
        Vec v = Vec::Zero(m);
        for (int j = 0; j <= d; ++j) v += gain.blocks[static_cast<std::size_t>(j)] * e_hist[static_cast<std::size_t>(j)];

        Vec e_next = plant.a_p * e_hist[0];
        if (d >= 1) e_next += plant.b_p * u[0];
        if (s == 0) e_next += plant.b_p * v;

        std::vector<Vec> u_next(static_cast<std::size_t>(d), Vec::Zero(m));
        for (int i = 1; i <= d; ++i) {
            if (i < d) u_next[static_cast<std::size_t>(i - 1)] = u[static_cast<std::size_t>(i)];
            if (s == i) u_next[static_cast<std::size_t>(i - 1)] += v;
        }
        u = std::move(u_next);
        for (int r = d; r >= 1; --r) e_hist[static_cast<std::size_t>(r)] = e_hist[static_cast<std::size_t>(r - 1)];
        e_hist[0] = e_next;
        out.push_back(e_next);
    }
    return out;
}

// Iterate the error-only recursion along a delay sequence. Delay values at
// negative times are padded with `pad`; they multiply zero history entries,
// so any admissible pad yields the same trajectory. Returns eps(0..len).
inline std::vector<Vec> error_trajectory(const SwitchedErrorSystem& sys,
                                         const std::vector<int>& sigma, const Vec& e0,
                                         int pad = -1) {
    if (e0.size() != sys.n) throw ConfigError("error_trajectory: e0 must have plant dimension");
    if (pad < 0) pad = sys.delays.front();
    Vec eps = Vec::Zero(sys.dim());
    eps.head(sys.n) = e0;
    std::vector<Vec> out;
    out.reserve(sigma.size() + 1);
    out.push_back(eps);
    for (std::size_t k = 0; k < sigma.size(); ++k) {
        Word w(static_cast<std::size_t>(sys.d_max + 1));
        for (int i = 0; i <= sys.d_max; ++i) {
            const long idx = static_cast<long>(k) - i;
            w[static_cast<std::size_t>(i)] = idx >= 0 ? sigma[static_cast<std::size_t>(idx)] : pad;
        }
        eps = sys.matrices[static_cast<std::size_t>(sys.index_of(w))] * eps;
        out.push_back(eps);
    }
    return out;
}

}  // namespace swdelay

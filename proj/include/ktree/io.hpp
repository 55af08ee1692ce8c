#pragma once

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ktree/builder.hpp"
#include "ktree/core.hpp"
#include "ktree/recognition.hpp"

// Text serialization: pre-order tree codes, black-leaf address codes, the
// three-line tree file, point ingestion and recognition-base persistence.

namespace ktree {

// Pre-order code over {0,1,2}: 0 white terminal, 1 black terminal,
// 2 internal followed by the left then right encodings.
inline std::string encode_tree(const Tree& t) {
    std::string out;
    struct Rec {
        std::string& out;
        void operator()(const Node* n) {
            if (n->terminal()) {
                out.push_back(n->color == Color::black ? '1' : '0');
                return;
            }
            out.push_back('2');
            (*this)(n->left.get());
            (*this)(n->right.get());
        }
    } rec{out};
    rec(t.root());
    return out;
}

namespace detail {

inline std::unique_ptr<Node> decode_tree_rec(const std::string& code, std::size_t& pos) {
    if (pos >= code.size()) throw std::invalid_argument("decode_tree: truncated code");
    char c = code[pos++];
    switch (c) {
        case '0': return make_tree(Color::white);
        case '1': return make_tree(Color::black);
        case '2': {
            auto n = std::make_unique<Node>();
            n->left = decode_tree_rec(code, pos);
            n->right = decode_tree_rec(code, pos);
            return n;
        }
        default: throw std::invalid_argument("decode_tree: invalid character");
    }
}

}  // namespace detail

inline Tree decode_tree(const std::string& code) {
    std::size_t pos = 0;
    auto root = detail::decode_tree_rec(code, pos);
    if (pos != code.size()) throw std::invalid_argument("decode_tree: trailing characters");
    return Tree(std::move(root));
}

namespace detail {

// digits 0..2^k-1 as 0-9 then a-v (k <= 5)
inline char digit_char(int d) { return d < 10 ? static_cast<char>('0' + d) : static_cast<char>('a' + d - 10); }

inline int digit_value(char c, int k) {
    int d;
    if (c >= '0' && c <= '9')
        d = c - '0';
    else if (c >= 'a' && c <= 'v')
        d = c - 'a' + 10;
    else
        return -1;
    return d < (1 << k) ? d : -1;
}

struct LeafEncoder {
    int k, depth;
    std::vector<std::string>& out;
    std::string addr;

    // one digit groups k binary levels; a black leaf inside a group is
    // expanded over both bits via the self-child rule
    void rec(const Node* n, int level, int digit) {
        if (is_white(n)) return;
        if (level % k == 0) {
            if (is_black(n) || level == depth) {
                out.push_back(level < depth ? addr + 'X' : addr);
                return;
            }
        }
        int bit = level % k;
        for (int side = 0; side < 2; ++side) {
            const Node* c = child(n, side ? Side::right : Side::left);
            int nd = digit | (side << bit);
            if (bit == k - 1) {
                addr.push_back(digit_char(nd));
                rec(c, level + 1, 0);
                addr.pop_back();
            } else {
                rec(c, level + 1, nd);
            }
        }
    }
};

}  // namespace detail

// Sorted addresses of the black leaves in 2^k-ant digits (bit j of a digit
// is the side along axis j+1), with a trailing X for leaves above full
// precision.
inline std::vector<std::string> encode_leaves(const Tree& t, int k, int r) {
    if (k < 1 || k > 5) throw std::invalid_argument("encode_leaves: k out of range");
    std::vector<std::string> out;
    detail::LeafEncoder enc{k, k * r, out, {}};
    enc.rec(t.root(), 0, 0);
    std::sort(out.begin(), out.end());
    return out;
}

namespace detail {

inline void blacken_address(Node* n, const std::string& addr, std::size_t ndigits, int k, int pos) {
    if (is_black(n)) return;
    if (pos == static_cast<int>(ndigits) * k) {
        recolor(n, Color::black);
        return;
    }
    if (n->terminal()) fission(n);
    int digit = digit_value(addr[pos / k], k);
    bool right = (digit >> (pos % k)) & 1;
    blacken_address(right ? n->right.get() : n->left.get(), addr, ndigits, k, pos + 1);
    merge(n);
}

}  // namespace detail

inline Tree decode_leaves(const std::vector<std::string>& code, int k, int r) {
    if (k < 1 || k > 5) throw std::invalid_argument("decode_leaves: k out of range");
    Tree t(Color::white);
    for (const auto& addr : code) {
        bool early = !addr.empty() && addr.back() == 'X';
        std::size_t nd = addr.size() - (early ? 1 : 0);
        if (!early && static_cast<int>(nd) != r)
            throw std::invalid_argument("decode_leaves: full-precision address needs r digits");
        if (early && static_cast<int>(nd) >= r)
            throw std::invalid_argument("decode_leaves: early-terminated address too deep");
        for (std::size_t i = 0; i < nd; ++i)
            if (detail::digit_value(addr[i], k) < 0)
                throw std::invalid_argument("decode_leaves: invalid digit");
        detail::blacken_address(t.root(), addr, nd, k, 0);
    }
    return t;
}

inline std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct TreeFile {
    int k = 0;
    int r = 0;
    RefBox box;
    Tree tree;
};

// Three lines: "k r", the box corners as 2k reals (min then max), the
// pre-order tree code. Reals print with 17 significant digits so the round
// trip is byte-exact.
inline std::string write_tree_file(const TreeFile& tf) {
    std::string out = std::to_string(tf.k) + " " + std::to_string(tf.r) + "\n";
    for (int i = 0; i < tf.k; ++i) out += (i ? " " : "") + format_real(tf.box.min[i]);
    for (int i = 0; i < tf.k; ++i) out += " " + format_real(tf.box.max[i]);
    out += "\n" + encode_tree(tf.tree) + "\n";
    return out;
}

inline TreeFile read_tree_file(const std::string& text) {
    std::istringstream in(text);
    TreeFile tf;
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("tree file: missing header");
    {
        std::istringstream h(line);
        if (!(h >> tf.k >> tf.r) || tf.k < 1 || tf.r < 0)
            throw std::invalid_argument("tree file: bad header");
        std::string extra;
        if (h >> extra) throw std::invalid_argument("tree file: bad header");
    }
    if (!std::getline(in, line)) throw std::invalid_argument("tree file: missing bounds");
    {
        std::istringstream b(line);
        tf.box.min.resize(tf.k);
        tf.box.max.resize(tf.k);
        for (int i = 0; i < tf.k; ++i)
            if (!(b >> tf.box.min[i])) throw std::invalid_argument("tree file: bad bounds");
        for (int i = 0; i < tf.k; ++i)
            if (!(b >> tf.box.max[i])) throw std::invalid_argument("tree file: bad bounds");
    }
    if (!std::getline(in, line)) throw std::invalid_argument("tree file: missing tree code");
    tf.tree = decode_tree(line);
    return tf;
}

enum class IngestMode { fixed, inductive };

// Parses rows of k whitespace/comma separated reals. Fixed mode keeps the
// unit box and rejects values outside [0,1); inductive mode starts from the
// integer unit box around the first point and grows as needed.
inline std::pair<Tree, RefBox> ingest_points(const std::string& text, int k, int r,
                                             IngestMode mode) {
    Tree t(Color::white);
    RefBox box = RefBox::unit(k);
    std::istringstream in(text);
    std::string line;
    int row = 0;
    bool first = true;
    while (std::getline(in, line)) {
        ++row;
        for (char& c : line)
            if (c == ',') c = ' ';
        std::istringstream fields(line);
        std::vector<double> v(k);
        std::string tok;
        int got = 0;
        while (fields >> tok) {
            if (got == k)
                throw std::runtime_error("row " + std::to_string(row) + ": too many columns");
            std::size_t used = 0;
            try {
                v[got] = std::stod(tok, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != tok.size())
                throw std::runtime_error("row " + std::to_string(row) + ": non-numeric field");
            ++got;
        }
        if (got == 0) continue;  // blank line
        if (got != k) throw std::runtime_error("row " + std::to_string(row) + ": expected " +
                                               std::to_string(k) + " columns");
        if (mode == IngestMode::fixed) {
            for (double x : v)
                if (!(x >= 0.0 && x < 1.0))
                    throw std::runtime_error("row " + std::to_string(row) +
                                             ": value outside [0,1)");
            t = add_real_vector(std::move(t), v, k, r);
        } else {
            if (first) {
                for (int i = 0; i < k; ++i) {
                    box.min[i] = std::floor(v[i]);
                    box.max[i] = box.min[i] + 1.0;
                }
            }
            auto [t2, box2] = add_with_growth(std::move(t), std::move(box), v, k, r);
            t = std::move(t2);
            box = std::move(box2);
        }
        first = false;
    }
    return {std::move(t), std::move(box)};
}

// Spectral bases persist as their training set; learning is deterministic
// so reloading rebuilds the identical tree.
inline std::string write_spectral_base(
    const SpectralBase& base,
    const std::vector<std::pair<std::string, std::vector<double>>>& samples) {
    std::string out = "spectral " + std::to_string(base.dims) + " " + std::to_string(base.r) + "\n";
    out += std::to_string(base.labels.size()) + "\n";
    for (std::size_t i = 0; i < base.labels.size(); ++i)
        out += std::to_string(i) + " " + base.labels[i] + "\n";
    out += std::to_string(samples.size()) + "\n";
    for (const auto& [label, v] : samples) {
        out += label;
        for (double x : v) out += " " + format_real(x);
        out += "\n";
    }
    return out;
}

inline std::pair<SpectralBase, std::vector<std::pair<std::string, std::vector<double>>>>
read_spectral_base(const std::string& text) {
    std::istringstream in(text);
    std::string tag;
    int dims = 0, r = 0;
    if (!(in >> tag >> dims >> r) || tag != "spectral" || dims < 1)
        throw std::invalid_argument("spectral base: bad header");
    std::size_t nlabels = 0;
    if (!(in >> nlabels)) throw std::invalid_argument("spectral base: bad label count");
    for (std::size_t i = 0; i < nlabels; ++i) {
        std::size_t id;
        std::string name;
        if (!(in >> id >> name) || id != i)
            throw std::invalid_argument("spectral base: bad label table");
    }
    std::size_t nsamples = 0;
    if (!(in >> nsamples)) throw std::invalid_argument("spectral base: bad sample count");
    std::vector<std::pair<std::string, std::vector<double>>> samples;
    samples.reserve(nsamples);
    for (std::size_t i = 0; i < nsamples; ++i) {
        std::string label;
        std::vector<double> v(dims);
        if (!(in >> label)) throw std::invalid_argument("spectral base: truncated samples");
        for (int j = 0; j < dims; ++j)
            if (!(in >> v[j])) throw std::invalid_argument("spectral base: truncated samples");
        samples.emplace_back(std::move(label), std::move(v));
    }
    SpectralBase base = spectral_learn(samples, dims, r);
    return {std::move(base), std::move(samples)};
}

inline const char* scale_policy_name(ScalePolicy p) {
    switch (p) {
        case ScalePolicy::sqrt_inertia: return "sqrt";
        case ScalePolicy::linear_inertia: return "linear";
        case ScalePolicy::annex: return "annex";
    }
    return "sqrt";
}

inline ScalePolicy scale_policy_from(const std::string& name) {
    if (name == "sqrt") return ScalePolicy::sqrt_inertia;
    if (name == "linear") return ScalePolicy::linear_inertia;
    if (name == "annex") return ScalePolicy::annex;
    throw std::invalid_argument("unknown scale policy: " + name);
}

// Correlative bases store one tree code per label (labels are single
// tokens); class trees live in the unit box.
inline std::string write_correlative_base(const CorrelativeBase& base) {
    std::string out = "correlative " + std::to_string(base.k) + " " + std::to_string(base.r) +
                      " " + scale_policy_name(base.policy) + "\n";
    out += std::to_string(base.classes.size()) + "\n";
    for (const auto& [label, tree] : base.classes) out += label + " " + encode_tree(tree) + "\n";
    return out;
}

inline CorrelativeBase read_correlative_base(const std::string& text) {
    std::istringstream in(text);
    std::string tag, policy;
    CorrelativeBase base;
    if (!(in >> tag >> base.k >> base.r >> policy) || tag != "correlative" || base.k < 1)
        throw std::invalid_argument("correlative base: bad header");
    base.policy = scale_policy_from(policy);
    std::size_t n = 0;
    if (!(in >> n)) throw std::invalid_argument("correlative base: bad class count");
    for (std::size_t i = 0; i < n; ++i) {
        std::string label, code;
        if (!(in >> label >> code)) throw std::invalid_argument("correlative base: truncated");
        base.classes.emplace_back(std::move(label), decode_tree(code));
    }
    return base;
}

}  // namespace ktree

// Command-line front end: one subcommand per library operation, text
// formats throughout. Exit codes: 0 success, 1 input error, 2 internal
// invariant violation.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "ktree/boolean.hpp"
#include "ktree/builder.hpp"
#include "ktree/core.hpp"
#include "ktree/geometry.hpp"
#include "ktree/io.hpp"
#include "ktree/metric.hpp"
#include "ktree/moments.hpp"
#include "ktree/recognition.hpp"
#include "ktree/segmentation.hpp"
#include "ktree/slices.hpp"

using namespace ktree;

namespace {

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path);
    out << text;
}

TreeFile load_tree(const std::string& path) {
    try {
        return read_tree_file(slurp(path));
    } catch (const std::invalid_argument& e) {
        throw InputError(path + ": " + e.what());
    }
}

void emit(const TreeFile& tf, const std::string& output) {
    std::string text = write_tree_file(tf);
    if (output.empty())
        std::cout << text;
    else
        spit(output, text);
}

HomogeneousMatrix load_matrix(const std::string& path, int k) {
    std::istringstream in(slurp(path));
    HomogeneousMatrix m = HomogeneousMatrix::identity(k);
    for (int i = 0; i <= k; ++i)
        for (int j = 0; j <= k; ++j)
            if (!(in >> m.at(i, j))) throw InputError(path + ": expected (k+1)^2 reals");
    return m;
}

Metric metric_from(const std::string& name) {
    if (name == "d1") return Metric::d1;
    if (name == "dinf") return Metric::dinf;
    throw InputError("unknown metric: " + name);
}

AxesMask mask_from(const std::string& axes, int k) {
    if (int(axes.size()) != k) throw InputError("--axes needs one 0/1 flag per dimension");
    AxesMask mask(k);
    for (int i = 0; i < k; ++i) {
        if (axes[i] != '0' && axes[i] != '1') throw InputError("--axes flags must be 0 or 1");
        mask[i] = axes[i] == '1';
    }
    return mask;
}

std::vector<std::pair<std::string, Tree>> load_samples(const std::string& path, int& k, int& r) {
    std::istringstream in(slurp(path));
    std::vector<std::pair<std::string, Tree>> samples;
    std::string label, treepath;
    k = 0;
    while (in >> label >> treepath) {
        TreeFile tf = load_tree(treepath);
        if (k == 0) {
            k = tf.k;
            r = tf.r;
        } else if (tf.k != k || tf.r != r) {
            throw InputError(treepath + ": sample dimensions differ");
        }
        samples.emplace_back(label, std::move(tf.tree));
    }
    if (samples.empty()) throw InputError(path + ": no samples");
    return samples;
}

int run(int argc, char** argv) {
    CLI::App app{"2^k-tree modeling toolkit"};
    app.require_subcommand(1);

    int dims = 2, precision = -1, precision_build = -1, axis = 1;
    std::string output, input, second, coord_path, matrix_path, axes, metric_name = "d1";
    std::string scale_policy = "sqrt", mode = "fixed", base_path, prefix = "segment_";
    std::vector<std::uint64_t> cell;

    auto* build = app.add_subcommand("build", "build a tree from a points file");
    build->add_option("points", input)->required();
    build->add_option("--dims", dims)->required();
    build->add_option("--precision", precision)->required();
    build->add_option("--mode", mode)->check(CLI::IsMember({"fixed", "inductive"}));
    build->add_option("--output", output);

    auto* cont = app.add_subcommand("contains", "test cell membership");
    cont->add_option("tree", input)->required();
    cont->add_option("cell", cell)->required();

    auto* boolc = app.add_subcommand("bool", "set algebra");
    std::string op;
    boolc->add_option("op", op)
        ->required()
        ->check(CLI::IsMember({"and", "or", "xor", "diff", "not", "assert"}));
    boolc->add_option("a", input)->required();
    boolc->add_option("b", second);
    boolc->add_option("--precision", precision);
    boolc->add_option("--output", output);

    auto* slice = app.add_subcommand("slice", "extract or insert axis-parallel slices");
    std::string slice_op, slice_path;
    slice->add_option("op", slice_op)->required()->check(CLI::IsMember({"extract", "insert"}));
    slice->add_option("space", input)->required();
    slice->add_option("--slice", slice_path);
    slice->add_option("--coord", coord_path)->required();
    slice->add_option("--axes", axes)->required();
    slice->add_option("--output", output);

    auto* poly = app.add_subcommand("polytope", "rasterize the polytope of a homography");
    poly->add_option("--matrix", matrix_path)->required();
    poly->add_option("--dims", dims)->required();
    poly->add_option("--precision", precision)->required();
    poly->add_option("--output", output);

    auto* trans = app.add_subcommand("transform", "homographic image of a tree");
    trans->add_option("tree", input)->required();
    trans->add_option("--matrix", matrix_path)->required();
    trans->add_option("--precision-build", precision_build);
    trans->add_option("--output", output);

    auto* symm = app.add_subcommand("symmetry", "reflect along flagged axes");
    symm->add_option("tree", input)->required();
    symm->add_option("--axes", axes)->required();
    symm->add_option("--output", output);

    auto* hide = app.add_subcommand("hide", "remove cells hidden along an axis");
    hide->add_option("tree", input)->required();
    hide->add_option("--axis", axis)->required();
    hide->add_option("--output", output);

    auto* proj = app.add_subcommand("project", "orthographic projection along an axis");
    proj->add_option("tree", input)->required();
    proj->add_option("--axis", axis)->required();
    proj->add_option("--output", output);

    auto* adj = app.add_subcommand("adjacency", "list adjacent black-leaf pairs");
    adj->add_option("tree", input)->required();
    adj->add_option("--metric", metric_name)->check(CLI::IsMember({"d1", "dinf"}));

    auto* lab = app.add_subcommand("label", "label connected components");
    lab->add_option("tree", input)->required();
    lab->add_option("--metric", metric_name)->check(CLI::IsMember({"d1", "dinf"}));

    auto* segs = app.add_subcommand("segments", "write one tree file per component");
    segs->add_option("tree", input)->required();
    segs->add_option("--metric", metric_name)->check(CLI::IsMember({"d1", "dinf"}));
    segs->add_option("--prefix", prefix);

    auto* moms = app.add_subcommand("moments", "print generalized moments up to order 3");
    moms->add_option("tree", input)->required();

    auto* cent = app.add_subcommand("center", "print centered moments");
    cent->add_option("tree", input)->required();

    auto* norm = app.add_subcommand("normalize", "print the inertial frame");
    norm->add_option("tree", input)->required();
    norm->add_option("--scale-policy", scale_policy)
        ->check(CLI::IsMember({"sqrt", "linear", "annex"}));

    auto* eig = app.add_subcommand("eigen", "tree in its inertial reference frame");
    eig->add_option("tree", input)->required();
    eig->add_option("--scale-policy", scale_policy)
        ->check(CLI::IsMember({"sqrt", "linear", "annex"}));
    eig->add_option("--precision-build", precision_build);
    eig->add_option("--output", output);

    auto* learn = app.add_subcommand("learn", "build a recognition base");
    std::string learn_kind;
    learn->add_option("kind", learn_kind)
        ->required()
        ->check(CLI::IsMember({"spectral", "correlative"}));
    learn->add_option("samples", input)->required();
    learn->add_option("--precision", precision);
    learn->add_option("--scale-policy", scale_policy)
        ->check(CLI::IsMember({"sqrt", "linear", "annex"}));
    learn->add_option("--output", output);

    auto* cls = app.add_subcommand("classify", "classify a tree against a base");
    std::string cls_kind;
    cls->add_option("kind", cls_kind)
        ->required()
        ->check(CLI::IsMember({"spectral", "correlative"}));
    cls->add_option("base", base_path)->required();
    cls->add_option("tree", input)->required();

    auto* enc = app.add_subcommand("encode", "print the tree or leaf code");
    std::string enc_kind;
    enc->add_option("kind", enc_kind)->required()->check(CLI::IsMember({"tree", "leaves"}));
    enc->add_option("tree", input)->required();

    auto* dec = app.add_subcommand("decode", "tree file from a tree code");
    std::string code;
    dec->add_option("code", code)->required();
    dec->add_option("--dims", dims)->required();
    dec->add_option("--precision", precision)->required();
    dec->add_option("--output", output);

    auto* stats = app.add_subcommand("stats", "node count, mass and depth histogram");
    stats->add_option("tree", input)->required();

    CLI11_PARSE(app, argc, argv);

    if (build->parsed()) {
        auto [t, box] = ingest_points(slurp(input), dims, precision,
                                      mode == "fixed" ? IngestMode::fixed : IngestMode::inductive);
        emit(TreeFile{dims, precision, std::move(box), std::move(t)}, output);
    } else if (cont->parsed()) {
        TreeFile tf = load_tree(input);
        std::cout << (contains(tf.tree, cell, tf.k, tf.r) ? "true" : "false") << "\n";
    } else if (boolc->parsed()) {
        TreeFile a = load_tree(input);
        int r = precision > 0 ? precision : a.r;
        Tree result(Color::white);
        if (op == "not" || op == "assert") {
            if (!second.empty()) throw InputError(op + " takes one input tree");
            result = op == "not" ? not_tree(a.tree, a.k, r) : assert_tree(a.tree, a.k, r);
        } else {
            if (second.empty()) throw InputError(op + " takes two input trees");
            TreeFile b = load_tree(second);
            if (b.k != a.k) throw InputError("operand dimensions differ");
            if (!(b.box == a.box)) throw InputError("operand reference boxes differ");
            if (op == "and") result = tree_intersect(a.tree, b.tree, a.k, r);
            else if (op == "or") result = tree_union(a.tree, b.tree, a.k, r);
            else if (op == "xor") result = tree_xor(a.tree, b.tree, a.k, r);
            else result = tree_diff(a.tree, b.tree, a.k, r);
        }
        emit(TreeFile{a.k, r, a.box, std::move(result)}, output);
    } else if (slice->parsed()) {
        TreeFile space = load_tree(input);
        TreeFile coord = load_tree(coord_path);
        AxesMask mask = mask_from(axes, space.k);
        if (slice_op == "extract") {
            Tree out = extract_slice(space.tree, space.k, coord.tree, coord.k, mask, space.r);
            emit(TreeFile{space.k - coord.k, space.r, RefBox::unit(space.k - coord.k),
                          std::move(out)},
                 output);
        } else {
            if (slice_path.empty()) throw InputError("insert needs --slice");
            TreeFile sl = load_tree(slice_path);
            Tree out = insert_slice(std::move(space.tree), sl.tree, sl.k, coord.tree, coord.k,
                                    mask, space.r);
            emit(TreeFile{space.k, space.r, space.box, std::move(out)}, output);
        }
    } else if (poly->parsed()) {
        Polytope p = transform_polytope_of(load_matrix(matrix_path, dims), dims);
        emit(TreeFile{dims, precision, RefBox::unit(dims), polytope_tree(p, dims, precision)},
             output);
    } else if (trans->parsed()) {
        TreeFile tf = load_tree(input);
        int rb = precision_build > 0 ? precision_build : tf.r;
        Tree out = homographic_transform_fast(tf.tree, load_matrix(matrix_path, tf.k), tf.k,
                                              tf.r, rb);
        emit(TreeFile{tf.k, rb, tf.box, std::move(out)}, output);
    } else if (symm->parsed()) {
        TreeFile tf = load_tree(input);
        AxesMask mask = mask_from(axes, tf.k);
        std::vector<bool> flags(mask.begin(), mask.end());
        emit(TreeFile{tf.k, tf.r, tf.box, symmetry_tree(tf.tree, flags, tf.k, tf.r)}, output);
    } else if (hide->parsed()) {
        TreeFile tf = load_tree(input);
        emit(TreeFile{tf.k, tf.r, tf.box, remove_hidden(tf.tree, axis, tf.k, tf.r)}, output);
    } else if (proj->parsed()) {
        TreeFile tf = load_tree(input);
        emit(TreeFile{tf.k - 1, tf.r, RefBox::unit(tf.k - 1), project(tf.tree, axis, tf.k, tf.r)},
             output);
    } else if (adj->parsed()) {
        TreeFile tf = load_tree(input);
        auto g = search_adjacencies(tf.tree, metric_from(metric_name), tf.k, tf.r);
        std::cout << "cells " << g.cells.size() << " edges " << g.edges.size() << "\n";
        for (const auto& e : g.edges)
            std::cout << g.cells[e.first] << " " << g.cells[e.second] << "\n";
    } else if (lab->parsed()) {
        TreeFile tf = load_tree(input);
        auto lt = label_components(tf.tree, metric_from(metric_name), tf.k, tf.r);
        std::cout << "components " << lt.count << "\n";
    } else if (segs->parsed()) {
        TreeFile tf = load_tree(input);
        auto lt = label_components(tf.tree, metric_from(metric_name), tf.k, tf.r);
        auto forest = segment_forest(lt, lt.count, tf.k, tf.r);
        for (int i = 0; i < lt.count; ++i) {
            std::string path = prefix + std::to_string(i + 1) + ".tree";
            spit(path, write_tree_file(TreeFile{tf.k, tf.r, tf.box, std::move(forest[i])}));
            std::cout << path << "\n";
        }
    } else if (moms->parsed()) {
        TreeFile tf = load_tree(input);
        auto m = tree_moments(tf.tree, tf.k, tf.r);
        for (const auto& [key, v] : m.entries)
            std::cout << key[0] << " " << key[1] << " " << key[2] << " " << format_real(v) << "\n";
    } else if (cent->parsed()) {
        TreeFile tf = load_tree(input);
        auto c = center_moments(tree_moments(tf.tree, tf.k, tf.r), tf.k);
        std::cout << "hypervolume " << format_real(c.hypervolume) << "\ncenter";
        for (double x : c.center) std::cout << " " << format_real(x);
        std::cout << "\ncovariance";
        for (double x : c.covariance) std::cout << " " << format_real(x);
        std::cout << "\n";
        for (const auto& [key, v] : c.third)
            std::cout << "third " << key[0] << " " << key[1] << " " << key[2] << " "
                      << format_real(v) << "\n";
    } else if (norm->parsed()) {
        TreeFile tf = load_tree(input);
        auto f = normalize_moments(center_moments(tree_moments(tf.tree, tf.k, tf.r), tf.k), tf.k,
                                   scale_policy_from(scale_policy));
        std::cout << "eigenvalues";
        for (double x : f.eigenvalues) std::cout << " " << format_real(x);
        std::cout << "\nasymmetries";
        for (double x : f.asymmetries) std::cout << " " << format_real(x);
        std::cout << "\ncenter";
        for (double x : f.center) std::cout << " " << format_real(x);
        std::cout << "\nscale " << format_real(f.scale) << "\nrotation";
        for (double x : f.rotation) std::cout << " " << format_real(x);
        std::cout << "\n";
    } else if (eig->parsed()) {
        TreeFile tf = load_tree(input);
        int rb = precision_build > 0 ? precision_build : tf.r;
        auto f = normalize_moments(center_moments(tree_moments(tf.tree, tf.k, tf.r), tf.k), tf.k,
                                   scale_policy_from(scale_policy));
        emit(TreeFile{tf.k, rb, RefBox::unit(tf.k), eigen_tree(tf.tree, f, tf.k, tf.r, rb)},
             output);
    } else if (learn->parsed()) {
        int k = 0, r = 0;
        auto samples = load_samples(input, k, r);
        if (precision > 0) r = precision;
        std::string text;
        if (learn_kind == "correlative") {
            text = write_correlative_base(
                correlative_learn(samples, k, r, scale_policy_from(scale_policy)));
        } else {
            std::vector<std::pair<std::string, std::vector<double>>> attrs;
            for (const auto& [label, t] : samples)
                attrs.emplace_back(label,
                                   attributes_of(eigen_frame_of(t, k, r,
                                                                scale_policy_from(scale_policy)),
                                                 k));
            SpectralBase base = spectral_learn(attrs, 2 * k - 1);
            text = write_spectral_base(base, attrs);
        }
        if (output.empty()) std::cout << text;
        else spit(output, text);
    } else if (cls->parsed()) {
        TreeFile tf = load_tree(input);
        std::string text = slurp(base_path);
        if (cls_kind == "correlative") {
            CorrelativeBase base = read_correlative_base(text);
            if (base.k != tf.k) throw InputError("query dimension differs from the base");
            auto result = correlative_classify(base, tf.tree, tf.k, base.r);
            std::cout << result.label << " " << format_real(result.score) << "\n";
        } else {
            auto [base, samples] = read_spectral_base(text);
            auto attrs = attributes_of(eigen_frame_of(tf.tree, tf.k, tf.r), tf.k);
            auto labels = spectral_classify(base, attrs);
            if (labels.empty()) std::cout << "none\n";
            else {
                bool first = true;
                for (const auto& l : labels) {
                    std::cout << (first ? "" : " ") << l;
                    first = false;
                }
                std::cout << "\n";
            }
        }
    } else if (enc->parsed()) {
        TreeFile tf = load_tree(input);
        if (enc_kind == "tree") {
            std::cout << encode_tree(tf.tree) << "\n";
        } else {
            for (const auto& addr : encode_leaves(tf.tree, tf.k, tf.r)) std::cout << addr << "\n";
        }
    } else if (dec->parsed()) {
        emit(TreeFile{dims, precision, RefBox::unit(dims), decode_tree(code)}, output);
    } else if (stats->parsed()) {
        TreeFile tf = load_tree(input);
        std::cout << "nodes " << node_count(tf.tree.root()) << "\n";
        std::cout << "mass " << format_real(mass(tf.tree, tf.k, tf.r)) << "\n";
        std::vector<std::size_t> hist(tf.k * tf.r + 1, 0);
        struct {
            std::vector<std::size_t>& hist;
            void operator()(const Node* n, int level) {
                if (n->terminal()) {
                    if (n->color == Color::black) ++hist[level];
                    return;
                }
                (*this)(n->left.get(), level + 1);
                (*this)(n->right.get(), level + 1);
            }
        } walk{hist};
        walk(tf.tree.root(), 0);
        for (std::size_t d = 0; d < hist.size(); ++d)
            if (hist[d]) std::cout << "depth " << d << " black-leaves " << hist[d] << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::out_of_range& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 2;
    }
}

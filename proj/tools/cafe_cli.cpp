// cafe: command-line front end for the embedding library.
//
// Every command parses and validates all inputs, computes, and only then
// writes its outputs, so a failing run leaves no partial files behind.
// Exit codes: 0 success (or inapplicable bound), 1 user error, 2 invariant violation.

#include <CLI11.hpp>
#include <json.hpp>
#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cafe/cafe_gcn.hpp"
#include "cafe/dimred.hpp"
#include "cafe/error.hpp"
#include "cafe/evaluate.hpp"
#include "cafe/io.hpp"
#include "cafe/sampled_graph.hpp"
#include "cafe/softmax_cluster.hpp"
#include "cafe/spectral.hpp"
#include "cafe/sphere_gcn.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace cafe;

namespace {

std::string sha256_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read " + path);
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr);
    char buf[1 << 16];
    while (in) {
        in.read(buf, sizeof buf);
        if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf, static_cast<std::size_t>(in.gcount()));
    }
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned len = 0;
    EVP_DigestFinal_ex(ctx.get(), md, &len);
    std::ostringstream hex;
    for (unsigned i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
    return hex.str();
}

json real_array(const std::vector<double>& v) {
    json a = json::array();
    for (double x : v) a.push_back(x);
    return a;
}

/// Collects what a rerun needs; written next to the main output.
struct Manifest {
    json doc = json::object();
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

    explicit Manifest(std::string command) {
        doc["command"] = std::move(command);
        doc["version"] = CAFE_VERSION;
        doc["parameters"] = json::object();
        doc["inputs"] = json::object();
        doc["outputs"] = json::array();
    }
    void input(const std::string& path) { doc["inputs"][path] = sha256_file(path); }
};

/// Buffered output: the text is produced in memory and written at the end.
struct Output {
    std::string path;  // "-" is stdout
    std::ostringstream text;
};

void check_writable(const std::string& path) {
    if (path == "-") return;
    const fs::path parent = fs::path(path).parent_path();
    if (!parent.empty() && !fs::is_directory(parent)) throw InputError("output directory does not exist: " + parent.string());
}

std::string manifest_path(const std::string& out, const std::string& explicit_path, const std::string& command) {
    if (!explicit_path.empty()) return explicit_path;
    if (out == "-") return "cafe-" + command + ".manifest.json";
    return out + ".manifest.json";
}

void write_file(const std::string& path, const std::string& text) {
    if (path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InputError("cannot write " + path);
    f << text;
    if (!f) throw InputError("failed writing " + path);
}

void finish(Manifest& m, const std::vector<Output*>& outputs, const std::string& manifest_file) {
    for (auto* o : outputs) {
        write_file(o->path, o->text.str());
        m.doc["outputs"].push_back(o->path);
    }
    m.doc["wall_clock_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - m.start).count();
    write_file(manifest_file, m.doc.dump(2) + "\n");
}

std::shared_ptr<const SampledGraph> load_graph(const std::string& path, Manifest& m) {
    const auto edges = io::read_edge_list(path);
    m.input(path);
    return std::make_shared<const SampledGraph>(SampledGraph::from_edges(edges));
}

/// Pins from a label file: class names map to cluster ids in sorted order.
std::vector<PinnedLabel> pins_from_labels(const std::string& path, const NodeIndex& nodes, std::size_t k,
                                          Manifest& m) {
    const auto labels = load_labels(path, &nodes);
    m.input(path);
    std::map<std::string, std::size_t> class_id;
    for (const auto& [node, cls] : labels) class_id.emplace(cls, 0);
    std::size_t next = 0;
    for (auto& [cls, id] : class_id) id = next++;
    if (class_id.size() > k) {
        throw InputError("label file has " + std::to_string(class_id.size()) + " classes but --k is " +
                         std::to_string(k));
    }
    std::vector<PinnedLabel> pins;
    for (const auto& [node, cls] : labels) pins.push_back({nodes.at(node), class_id.at(cls)});
    std::sort(pins.begin(), pins.end(), [](const PinnedLabel& a, const PinnedLabel& b) { return a.node < b.node; });
    return pins;
}

/// Rows of an embedding file reordered to the graph's node order.
Matrix align_rows(const io::LabeledMatrix& e, const NodeIndex& nodes, const std::string& path) {
    if (e.labels.size() != nodes.size()) {
        throw InputError(path + ": has " + std::to_string(e.labels.size()) + " rows, graph has " +
                         std::to_string(nodes.size()) + " nodes");
    }
    Matrix out(e.values.rows(), e.values.cols());
    std::vector<char> seen(nodes.size(), 0);
    for (std::size_t i = 0; i < e.labels.size(); ++i) {
        if (!nodes.contains(e.labels[i])) throw InputError(path + ": unknown node " + e.labels[i]);
        const std::size_t u = nodes.at(e.labels[i]);
        if (seen[u]) throw InputError(path + ": duplicate node " + e.labels[i]);
        seen[u] = 1;
        out.row(static_cast<Eigen::Index>(u)) = e.values.row(static_cast<Eigen::Index>(i));
    }
    return out;
}

// ---- option bundles -------------------------------------------------------

struct GcnFlags {
    std::string graph;
    std::size_t k = 2;
    double theta = 1.0;
    double beta = 0.5;
    std::uint64_t seed = 0;
    std::string labels;
    bool full_label = false;
    std::string out = "embedding.tsv";
    std::string manifest;
    double tol = 1e-9;
    std::size_t max_sweeps = 200;
};

void add_gcn_flags(CLI::App* app, GcnFlags& f) {
    app->add_option("--graph", f.graph, "edge list: u w [weight] per line")->required()->check(CLI::ExistingFile);
    app->add_option("--k", f.k, "number of clusters / columns")->capture_default_str();
    app->add_option("--theta", f.theta, "inverse temperature")->capture_default_str();
    app->add_option("--seed", f.seed, "random seed")->capture_default_str();
    app->add_option("--tol", f.tol, "objective change that counts as converged")->capture_default_str();
    app->add_option("--max-sweeps", f.max_sweeps, "sweep cap")->capture_default_str();
    app->add_option("--manifest", f.manifest, "manifest path (default: <out>.manifest.json)");
}

json gcn_parameters(const GcnFlags& f) {
    return json{{"graph", f.graph}, {"k", f.k},       {"theta", f.theta},         {"beta", f.beta},
                {"seed", f.seed},   {"tol", f.tol},   {"max_sweeps", f.max_sweeps}, {"labels", f.labels},
                {"full_label", f.full_label}};
}

ClusterConfig cluster_config(const GcnFlags& f) {
    ClusterConfig c;
    c.k = f.k;
    c.theta = f.theta;
    c.seed = f.seed;
    c.tol = f.tol;
    c.max_sweeps = f.max_sweeps;
    c.validate();
    return c;
}

// ---- commands ---------------------------------------------------------------

int cmd_embed(const std::string& method, const GcnFlags& f) {
    if (f.full_label && f.labels.empty()) throw InputError("--full-label needs --labels");
    if (method != "cafe" && !f.labels.empty()) throw InputError("--labels is only supported by `embed cafe`");
    check_writable(f.out);
    Manifest m("embed " + method);
    m.doc["parameters"] = gcn_parameters(f);
    const auto graph = load_graph(f.graph, m);
    const ModularityMatrix q(graph);
    std::ostream& summary = f.out == "-" ? std::cerr : std::cout;
    Output out{f.out, {}};
    std::vector<Output*> outputs{&out};
    Output levels{f.out == "-" ? std::string("-") : f.out + ".levels.tsv", {}};

    if (method == "cafe") {
        CafeOptions o;
        o.cluster = cluster_config(f);
        std::vector<PinnedLabel> pins;
        if (!f.labels.empty()) {
            pins = pins_from_labels(f.labels, graph->nodes(), f.k, m);
            o.labels = f.full_label ? LabelMode::full : LabelMode::partial;
        }
        const auto r = cafe_gcn(q, o, pins);
        io::write_embedding(out.text, graph->nodes(), r.embedding.h_hat);
        m.doc["objective_trace"] = real_array(r.trace);
        m.doc["result"] = {{"objective", r.objective}, {"clusters", r.clusters}, {"columns", r.embedding.dimension()},
                           {"sweeps", r.sweeps},       {"converged", r.converged}};
        for (const auto& w : r.embedding.warnings) std::cerr << "warning: " << w << "\n";
        summary << "objective\t" << io::format_real(r.objective) << "\n";
        summary << "C\t" << r.embedding.dimension() << "\n";
    } else if (method == "sphere") {
        SphereConfig c;
        c.k = f.k;
        c.beta = f.beta;
        c.seed = f.seed;
        c.tol = f.tol;
        c.max_sweeps = f.max_sweeps;
        c.validate();
        const auto r = sphere_embed(q, c);
        io::write_embedding(out.text, graph->nodes(), r.embedding.h_hat);
        m.doc["objective_trace"] = real_array(r.run.trace);
        m.doc["result"] = {{"objective", r.run.objective},
                           {"columns", r.embedding.dimension()},
                           {"sweeps", r.run.sweeps},
                           {"converged", r.run.converged},
                           {"degenerate_updates", r.run.degenerate_updates}};
        summary << "objective\t" << io::format_real(r.run.objective) << "\n";
        summary << "C\t" << r.embedding.dimension() << "\n";
    } else {
        MultilayerOptions o;
        GcnFlags capped = f;
        capped.k = std::max<std::size_t>(f.k, 1);
        o.cluster = cluster_config(capped);
        o.cluster.k = f.k;  // 0: one cluster per node at level 0
        const auto layers = multilayer(q, o);
        // The embedding output is the coarsest level's, lifted back to the original nodes.
        const auto& top = layers.back();
        Matrix lifted(static_cast<Eigen::Index>(graph->size()), top.embedding.h_hat.cols());
        for (std::size_t u = 0; u < graph->size(); ++u) {
            // Level l embeds the clusters of level l-1; level 0 embeds the nodes.
            std::size_t row = u;
            if (top.level > 0) row = layers[top.level - 1].membership[u];
            lifted.row(static_cast<Eigen::Index>(u)) = top.embedding.h_hat.row(static_cast<Eigen::Index>(row));
        }
        io::write_embedding(out.text, graph->nodes(), lifted);
        levels.text << "node";
        for (const auto& l : layers) levels.text << "\tlevel" << l.level;
        levels.text << "\n";
        for (std::size_t u = 0; u < graph->size(); ++u) {
            levels.text << graph->nodes().label(u);
            for (const auto& l : layers) levels.text << '\t' << l.membership[u];
            levels.text << "\n";
        }
        json lv = json::array();
        for (const auto& l : layers) {
            lv.push_back({{"level", l.level}, {"clusters", l.clusters}, {"modularity", l.modularity}});
            summary << "level\t" << l.level << "\tclusters\t" << l.clusters << "\tmodularity\t"
                      << io::format_real(l.modularity) << "\n";
        }
        m.doc["levels"] = lv;
        std::vector<double> trace;
        for (const auto& l : layers) trace.push_back(l.modularity);
        m.doc["objective_trace"] = real_array(trace);
        summary << "objective\t" << io::format_real(top.modularity) << "\n";
        summary << "C\t" << top.embedding.dimension() << "\n";
        if (levels.path != "-") outputs.push_back(&levels);
    }
    finish(m, outputs, manifest_path(f.out, f.manifest, "embed"));
    return 0;
}

int cmd_cluster(GcnFlags f) {
    check_writable(f.out);
    Manifest m("cluster");
    m.doc["parameters"] = gcn_parameters(f);
    const auto graph = load_graph(f.graph, m);
    const ModularityMatrix q(graph, true);
    std::vector<PinnedLabel> pins;
    if (!f.labels.empty()) pins = pins_from_labels(f.labels, graph->nodes(), f.k, m);
    const auto r = run_softmax(q, cluster_config(f), pins);
    const auto hard = hardmax(r.assignment.h);
    Output out{f.out, {}};
    for (std::size_t u = 0; u < graph->size(); ++u) {
        out.text << graph->nodes().label(u) << '\t' << hard[u];
        for (Eigen::Index k = 0; k < r.assignment.h.cols(); ++k)
            out.text << '\t' << io::format_real(r.assignment.h(static_cast<Eigen::Index>(u), k));
        out.text << "\n";
    }
    m.doc["objective_trace"] = real_array(r.trace);
    m.doc["result"] = {{"objective", r.objective}, {"sweeps", r.sweeps}, {"converged", r.converged}};
    std::cerr << "objective\t" << io::format_real(r.objective) << "\n";
    std::cerr << "sweeps\t" << r.sweeps << "\n";
    finish(m, {&out}, manifest_path(f.out, f.manifest, "cluster"));
    return 0;
}

struct VerifyFlags {
    GcnFlags gcn;
    std::string assignment;
};

int cmd_verify(VerifyFlags v) {
    auto& f = v.gcn;
    if (f.k != 2) throw InputError("verify checks the two-cluster bound; use --k 2");
    check_writable(f.out);
    Manifest m("verify");
    m.doc["parameters"] = gcn_parameters(f);
    m.doc["parameters"]["assignment"] = v.assignment;
    const auto graph = load_graph(f.graph, m);
    const ModularityMatrix q(graph);
    Matrix h;
    if (!v.assignment.empty()) {
        const auto e = io::read_embedding(v.assignment);
        m.input(v.assignment);
        h = align_rows(e, graph->nodes(), v.assignment);
    } else {
        CafeOptions o;
        o.cluster = cluster_config(f);
        h = cafe_gcn(q, o).h;
    }
    const auto r = eigenvector_bound(q, h);
    const bool ok = r.holds();
    const char* status = !r.applicable ? "inapplicable" : (ok ? "holds" : "violated");
    Output out{f.out, {}};
    const std::pair<const char*, double> fields[] = {
        {"lambda1", r.lambda1}, {"delta1", r.delta1}, {"epsilon", r.epsilon},   {"cos_x", r.cos_x},
        {"cos_Qx", r.cos_qx},   {"bound_x", r.bound_x}, {"bound_Qx", r.bound_qx}};
    for (const auto& [name, value] : fields) out.text << name << '\t' << io::format_real(value) << "\n";
    out.text << "spectral_gap\t" << (r.spectral_gap ? "true" : "false") << "\n";
    out.text << "applicable\t" << (r.applicable ? "true" : "false") << "\n";
    out.text << "status\t" << status << "\n";
    m.doc["result"] = {{"status", status}, {"epsilon", r.epsilon}, {"cos_x", r.cos_x}, {"cos_Qx", r.cos_qx}};
    finish(m, {&out}, manifest_path(f.out, f.manifest, "verify"));
    return ok ? 0 : 2;
}

struct EigsFlags {
    std::string graph;
    std::size_t topk = 0;
    std::string vectors;
    std::string out = "-";
    std::string manifest;
};

int cmd_eigs(const EigsFlags& f) {
    check_writable(f.out);
    if (!f.vectors.empty()) check_writable(f.vectors);
    Manifest m("eigs");
    m.doc["parameters"] = {{"graph", f.graph}, {"topk", f.topk}, {"vectors", f.vectors}};
    const auto graph = load_graph(f.graph, m);
    const ModularityMatrix q(graph);
    EigenOptions o;
    if (f.topk > 0) {
        o.mode = SpectrumMode::topk;
        o.k = f.topk;
    }
    const auto s = eigendecompose(q, o);
    Output out{f.out, {}};
    for (Eigen::Index i = 0; i < s.values.size(); ++i) out.text << i + 1 << '\t' << io::format_real(s.values(i)) << "\n";
    Output vec{f.vectors, {}};
    std::vector<Output*> outputs{&out};
    if (!f.vectors.empty()) {
        io::write_embedding(vec.text, graph->nodes(), s.vectors);
        outputs.push_back(&vec);
    }
    finish(m, outputs, manifest_path(f.out, f.manifest, "eigs"));
    return 0;
}

struct ReduceFlags {
    std::string points;
    std::string shape;
    std::size_t n = 200;
    std::size_t lift = 30;
    std::size_t k = 6;
    double theta = 0.01;
    double beta = 0.5;
    std::string method = "cafe";
    std::uint64_t seed = 0;
    std::size_t max_sweeps = 200;
    double tol = 1e-9;
    double residual_tol = 1e-3;
    std::string out = "-";
    std::string embedding_out;
    std::string manifest;
};

int cmd_reduce(const ReduceFlags& f) {
    if (f.points.empty() == f.shape.empty()) throw InputError("give exactly one of --points and --shape");
    check_writable(f.out);
    if (!f.embedding_out.empty()) check_writable(f.embedding_out);
    Manifest m("reduce");
    m.doc["parameters"] = {{"points", f.points}, {"shape", f.shape},   {"n", f.n},         {"lift", f.lift},
                           {"k", f.k},           {"theta", f.theta},   {"beta", f.beta},   {"method", f.method},
                           {"seed", f.seed},     {"max_sweeps", f.max_sweeps}, {"tol", f.tol}};
    Matrix raw;
    if (!f.points.empty()) {
        raw = read_xyz(f.points);
        m.input(f.points);
    } else if (f.shape == "circles") {
        raw = concentric_circles(f.n);
    } else {
        raw = torus();
    }
    PointCloud cloud = center(raw);
    if (f.lift > 0) {
        if (f.lift < cloud.dimension()) throw InputError("--lift must be at least the point dimension");
        cloud = embed_lift(cloud, f.lift, f.seed);
    }
    ReduceOptions o;
    o.k = f.k;
    o.theta = f.theta;
    o.beta = f.beta;
    o.method = f.method == "sphere" ? ReduceMethod::sphere : ReduceMethod::cafe;
    o.seed = f.seed;
    o.max_sweeps = f.max_sweeps;
    o.tol = f.tol;
    const auto r = reduce(cloud, o);
    Output out{f.out, {}};
    for (Eigen::Index j = 0; j < r.residuals.size(); ++j) out.text << j + 1 << '\t' << io::format_real(r.residuals(j)) << "\n";
    std::vector<Output*> outputs{&out};
    Output emb{f.embedding_out, {}};
    if (!f.embedding_out.empty()) {
        io::write_embedding(emb.text, NodeIndex::identity(cloud.size()), r.embedding.h_hat);
        outputs.push_back(&emb);
    }
    const auto low = low_residual_columns(r.residuals, f.residual_tol);
    m.doc["result"] = {{"columns", r.embedding.dimension()}, {"low_residual_columns", low.size()},
                       {"objective", r.objective},           {"sweeps", r.sweeps}};
    std::cerr << "low_residual_columns\t" << low.size() << "\n";
    finish(m, outputs, manifest_path(f.out, f.manifest, "reduce"));
    return 0;
}

struct EvalFlags {
    std::string embeddings;
    std::string labels;
    std::string graph;
    double train = 0.5;
    std::size_t reps = 100;
    std::uint64_t seed = 0;
    std::string out = "-";
    std::string manifest;
};

void metric_line(std::ostream& out, const char* name, const MetricStat& s) {
    out << name << '\t';
    if (s.applicable())
        out << io::format_real(s.mean) << '\t' << io::format_real(s.stddev);
    else
        out << "NA\tNA";
    out << "\n";
}

int cmd_eval(const std::string& task, const EvalFlags& f) {
    if (!(f.train > 0.0 && f.train < 1.0)) throw InputError("--train must lie in (0, 1)");
    if (f.reps == 0) throw InputError("--reps must be positive");
    check_writable(f.out);
    Manifest m("eval " + task);
    m.doc["parameters"] = {{"embeddings", f.embeddings}, {"labels", f.labels}, {"graph", f.graph},
                           {"train", f.train},           {"reps", f.reps},     {"seed", f.seed}};
    const auto e = io::read_embedding(f.embeddings);
    m.input(f.embeddings);
    Output out{f.out, {}};
    if (task == "classify") {
        if (f.labels.empty()) throw InputError("eval classify needs --labels");
        const NodeIndex nodes(e.labels);
        const auto labels = load_labels(f.labels, &nodes);
        m.input(f.labels);
        const auto data = make_dataset(e.values, nodes, labels);
        const auto s = classify(data, f.train, f.reps, f.seed);
        metric_line(out.text, "accuracy", s.accuracy);
        metric_line(out.text, "macro_f1", s.f1);
        metric_line(out.text, "roc_auc_ovr", s.roc_auc);
        if (!s.train_only_classes.empty())
            std::cerr << "warning: " << s.train_only_classes.size() << " singleton class(es) kept in train only\n";
    } else {
        if (f.graph.empty()) throw InputError("eval link needs --graph");
        const auto graph = load_graph(f.graph, m);
        const Matrix h = align_rows(e, graph->nodes(), f.embeddings);
        const auto s = link_predict(*graph, h, f.train, f.reps, f.seed);
        metric_line(out.text, "accuracy", s.accuracy);
        metric_line(out.text, "f1", s.f1);
    }
    finish(m, {&out}, manifest_path(f.out, f.manifest, "eval"));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Graph embeddings from softmax clustering and QR"};
    app.set_version_flag("--version", std::string(CAFE_VERSION));
    app.require_subcommand(1);

    // embed cafe|multilayer|sphere
    auto* embed = app.add_subcommand("embed", "embed the nodes of a graph");
    embed->require_subcommand(1);
    std::map<std::string, GcnFlags> embed_flags;
    std::string embed_method;
    for (const char* name : {"cafe", "multilayer", "sphere"}) {
        auto& f = embed_flags[name];
        auto* sub = embed->add_subcommand(name);
        add_gcn_flags(sub, f);
        sub->add_option("--out", f.out, "embedding TSV")->capture_default_str();
        if (std::string(name) == "sphere") sub->add_option("--beta", f.beta, "step toward z, in [0, 1]")->capture_default_str();
        if (std::string(name) == "cafe") {
            sub->add_option("--labels", f.labels, "node<TAB>class file; pins those nodes")->check(CLI::ExistingFile);
            sub->add_flag("--full-label", f.full_label, "every node is labeled: skip clustering");
        }
        sub->callback([&embed_method, name] { embed_method = name; });
    }

    GcnFlags cluster_flags;
    cluster_flags.out = "-";
    auto* cluster = app.add_subcommand("cluster", "soft clustering only; writes node, cluster, memberships");
    add_gcn_flags(cluster, cluster_flags);
    cluster->add_option("--labels", cluster_flags.labels, "node<TAB>class file")->check(CLI::ExistingFile);
    cluster->add_option("--out", cluster_flags.out, "output TSV ('-' for stdout)")->capture_default_str();

    VerifyFlags verify_flags;
    verify_flags.gcn.out = "-";
    auto* verify = app.add_subcommand("verify", "evaluate the two-cluster eigenvector bound");
    add_gcn_flags(verify, verify_flags.gcn);
    verify->add_option("--assignment", verify_flags.assignment, "n x K matrix TSV; first column is checked")
        ->check(CLI::ExistingFile);
    verify->add_option("--out", verify_flags.gcn.out, "report TSV ('-' for stdout)")->capture_default_str();

    EigsFlags eigs_flags;
    auto* eigs = app.add_subcommand("eigs", "eigenvalues of the modularity matrix");
    eigs->add_option("--graph", eigs_flags.graph)->required()->check(CLI::ExistingFile);
    eigs->add_option("--topk", eigs_flags.topk, "leading pairs only (0 = all)")->capture_default_str();
    eigs->add_option("--vectors", eigs_flags.vectors, "also write eigenvectors here");
    eigs->add_option("--out", eigs_flags.out)->capture_default_str();
    eigs->add_option("--manifest", eigs_flags.manifest);

    ReduceFlags reduce_flags;
    auto* red = app.add_subcommand("reduce", "dimensionality reduction of a point cloud");
    auto* points_opt = red->add_option("--points", reduce_flags.points, "xyz file")->check(CLI::ExistingFile);
    red->add_option("--shape", reduce_flags.shape, "built-in cloud")
        ->check(CLI::IsMember({"circles", "torus"}))
        ->excludes(points_opt);
    red->add_option("--n", reduce_flags.n, "points for --shape circles")->capture_default_str();
    red->add_option("--lift", reduce_flags.lift, "random isometric lift to this dimension (0 = none)")
        ->capture_default_str();
    red->add_option("--k", reduce_flags.k)->capture_default_str();
    red->add_option("--theta", reduce_flags.theta)->capture_default_str();
    red->add_option("--beta", reduce_flags.beta)->capture_default_str();
    red->add_option("--method", reduce_flags.method)->check(CLI::IsMember({"cafe", "sphere"}))->capture_default_str();
    red->add_option("--seed", reduce_flags.seed)->capture_default_str();
    red->add_option("--max-sweeps", reduce_flags.max_sweeps)->capture_default_str();
    red->add_option("--tol", reduce_flags.tol)->capture_default_str();
    red->add_option("--residual-tol", reduce_flags.residual_tol)->capture_default_str();
    red->add_option("--out", reduce_flags.out, "residual TSV")->capture_default_str();
    red->add_option("--embedding-out", reduce_flags.embedding_out, "also write the embedding");
    red->add_option("--manifest", reduce_flags.manifest);

    EvalFlags eval_flags;
    std::string eval_task;
    auto* ev = app.add_subcommand("eval", "downstream evaluation of an embedding");
    ev->require_subcommand(1);
    for (const char* name : {"classify", "link"}) {
        auto* sub = ev->add_subcommand(name);
        sub->add_option("--embeddings", eval_flags.embeddings)->required()->check(CLI::ExistingFile);
        if (std::string(name) == "classify")
            sub->add_option("--labels", eval_flags.labels)->required()->check(CLI::ExistingFile);
        else
            sub->add_option("--graph", eval_flags.graph)->required()->check(CLI::ExistingFile);
        sub->add_option("--train", eval_flags.train)->capture_default_str();
        sub->add_option("--reps", eval_flags.reps)->capture_default_str();
        sub->add_option("--seed", eval_flags.seed)->capture_default_str();
        sub->add_option("--out", eval_flags.out)->capture_default_str();
        sub->add_option("--manifest", eval_flags.manifest);
        sub->callback([&eval_task, name] { eval_task = name; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (embed->parsed()) {
            auto& f = embed_flags.at(embed_method);
            // multilayer's natural default starts from one cluster per node.
            if (embed_method == "multilayer" && embed->get_subcommand("multilayer")->count("--k") == 0) f.k = 0;
            if (embed_method != "multilayer" && f.k == 0) throw InputError("--k must be positive");
            return cmd_embed(embed_method, f);
        }
        if (cluster->parsed()) return cmd_cluster(cluster_flags);
        if (verify->parsed()) return cmd_verify(verify_flags);
        if (eigs->parsed()) return cmd_eigs(eigs_flags);
        if (red->parsed()) return cmd_reduce(reduce_flags);
        if (ev->parsed()) return cmd_eval(eval_task, eval_flags);
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const ConvergenceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const InvariantError& e) {
        std::cerr << "invariant violated: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}

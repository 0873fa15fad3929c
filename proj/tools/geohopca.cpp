// geohopca command-line tool. One JSON line of results goes to stdout, prose
// to stderr. Exit codes: 0 ok, 2 bad input, 3 infeasible / search aborted,
// 4 numeric failure.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "geohopca/archive.hpp"
#include "geohopca/experiments/classifier.hpp"
#include "geohopca/experiments/image.hpp"
#include "geohopca/experiments/synthetic.hpp"
#include "geohopca/geohopca.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace geohopca;
namespace ex = geohopca::experiments;

namespace {

[[noreturn]] void bad(const std::string& msg) { throw Error(ErrorKind::InvalidArgument, msg); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void emit(const json& j) { std::cout << j.dump() << std::endl; }

// Comma-separated nonnegative integers.
std::vector<std::size_t> parse_list(const std::string& text, const char* what) {
    std::vector<std::size_t> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty() || item.size() > 18 || !std::all_of(item.begin(), item.end(), [](char c) { return c >= '0' && c <= '9'; }))
            bad(std::string("--") + what + ": '" + item + "' is not a nonnegative integer");
        out.push_back(std::stoull(item));
    }
    if (out.empty()) bad(std::string("--") + what + ": empty list");
    return out;
}

// A single value applies to every mode.
std::vector<std::size_t> per_mode(const std::string& text, std::size_t N, const char* what) {
    const std::vector<std::size_t> v = parse_list(text, what);
    if (v.size() == 1) return std::vector<std::size_t>(N, v[0]);
    if (v.size() != N)
        bad(std::string("--") + what + ": expected 1 or " + std::to_string(N) + " values, got " + std::to_string(v.size()));
    return v;
}

std::vector<std::optional<double>> parse_eta(const std::string& text, std::size_t N) {
    if (text.empty() || text == "auto") return {};
    std::vector<std::optional<double>> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item == "auto") {
            out.emplace_back();
            continue;
        }
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != item.size() || item.empty()) bad("--eta: cannot parse '" + item + "'");
        out.emplace_back(v);
    }
    if (out.size() == 1) out.resize(N, out[0]);
    if (out.size() != N) bad("--eta: expected 'auto', one value, or " + std::to_string(N) + " values");
    return out;
}

// ---------------------------------------------------------------------------

struct DecomposeArgs {
    std::string input, out, eta = "auto";
    std::string ranks, sparsity;
    std::size_t max_cuts = 500;
    std::uint64_t node_budget = 50'000'000;
    bool parallel = false;
};

ShopcaConfig shopca_config(const DenseTensor& x, const DecomposeArgs& a) {
    ShopcaConfig c;
    const std::size_t N = x.order();
    c.ranks = per_mode(a.ranks, N, "ranks");
    c.sparsity = per_mode(a.sparsity, N, "sparsity");
    c.eta = parse_eta(a.eta, N);
    c.max_cuts = a.max_cuts;
    c.node_budget = a.node_budget;
    c.parallel_modes = a.parallel;
    c.validate(x.shape());
    return c;
}

int cmd_decompose(const DecomposeArgs& a) {
    const DenseTensor x = npy::load_tensor(a.input);
    const ShopcaConfig c = shopca_config(x, a);
    const auto t0 = std::chrono::steady_clock::now();
    const DecompositionResult r = sparse_geo_hopca(x, c);
    const double f = objective_f(x, r.factors);
    const double wall = seconds_since(t0);
    if (!a.out.empty()) archive::write(a.out, r, c, f);

    json j = archive::meta_json(r, c, f);
    j["command"] = "decompose";
    j["total_seconds"] = wall;
    j["supports"] = archive::supports_json(r);
    emit(j);
    std::cerr << "objective f = " << f << ", bound = " << *r.bound << (a.out.empty() ? "" : ", archive in " + a.out) << "\n";
    for (const auto& m : r.modes)
        if (m.status == SelectorStatus::Infeasible) return 3;
    return 0;
}

int cmd_bound(const DecomposeArgs& a) {
    const DenseTensor x = npy::load_tensor(a.input);
    const ShopcaConfig c = shopca_config(x, a);
    const auto terms = mode_error_bounds(x, c.ranks, c.sparsity);
    double total = 0.0;
    for (double t : terms) total += t;
    emit({{"command", "bound"}, {"bound", total}, {"mode_bounds", terms}});
    return 0;
}

// ---------------------------------------------------------------------------

struct SynthArgs {
    int scenario = 1;
    std::size_t replicates = 50, rank = 1;
    std::uint64_t seed = 0;
    std::string k_grid;
    std::string out;
    bool parallel = false;
};

struct ReplicateResult {
    // [mode][method] -> per-k metrics, plus the metrics at k = |truth|
    std::vector<std::array<std::vector<ex::RecoveryMetrics>, 2>> sweeps;
    std::vector<std::array<ex::RecoveryMetrics, 2>> at_truth;
};

ReplicateResult run_replicate(const ex::ScenarioSpec& spec, const std::vector<std::size_t>& modes,
                              const std::vector<std::vector<std::size_t>>& grids, std::size_t rank) {
    const auto inst = ex::gen_synthetic(spec);
    ReplicateResult rr;
    for (std::size_t i = 0; i < modes.size(); ++i) {
        const std::size_t n = modes[i];
        const auto& truth = inst.truth.supports[n];
        const std::size_t J = spec.dims[n];
        const std::size_t kt = std::max<std::size_t>(truth.size(), rank);
        const Matrix hosvd_u = truncated_left_svd(unfold(inst.x, n), rank).u;
        std::array<std::vector<ex::RecoveryMetrics>, 2> s;
        s[0] = ex::sweep(inst.x, n, truth, ex::RocMethod::GeoHopca, grids[i], rank);
        s[1] = ex::sweep(inst.x, n, truth, ex::RocMethod::HosvdThreshold, grids[i], rank);
        rr.sweeps.push_back(std::move(s));
        rr.at_truth.push_back({ex::tp_fp(ex::recover_support(inst.x, n, kt, rank), truth, J),
                               ex::tp_fp(ex::hosvd_threshold_support(hosvd_u, kt), truth, J)});
    }
    return rr;
}

std::pair<double, double> mean_std(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m += x;
    m /= static_cast<double>(v.size());
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return {m, v.size() > 1 ? std::sqrt(s / static_cast<double>(v.size() - 1)) : 0.0};
}

std::ofstream open_out(const fs::path& p) {
    std::ofstream f(p, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorKind::Io, "cannot open for writing: " + p.string());
    f.precision(17);
    return f;
}

int cmd_synth(const SynthArgs& a) {
    ex::ScenarioSpec base = ex::scenario(a.scenario);
    if (a.replicates < 1) bad("--replicates must be at least 1");
    if (a.rank < 1) bad("--rank must be at least 1");
    if (a.out.empty()) bad("--out is required");
    std::vector<std::size_t> modes;
    for (std::size_t n = 0; n < base.dims.size(); ++n)
        if (base.sparse_modes[n]) modes.push_back(n);
    std::vector<std::vector<std::size_t>> grids;
    for (auto n : modes) {
        std::vector<std::size_t> g = a.k_grid.empty() ? ex::default_k_grid(base.dims[n]) : parse_list(a.k_grid, "k-grid");
        for (auto k : g)
            if (k < a.rank || k > base.dims[n]) bad("--k-grid: k=" + std::to_string(k) + " out of range for mode " + std::to_string(n + 1));
        if (!std::is_sorted(g.begin(), g.end())) bad("--k-grid must be ascending");
        grids.push_back(std::move(g));
    }

    const auto t0 = std::chrono::steady_clock::now();
    std::vector<ReplicateResult> reps(a.replicates);
    auto spec_for = [&](std::size_t i) {
        ex::ScenarioSpec s = base;
        s.seed = a.seed + i;
        return s;
    };
    if (a.parallel) {
        std::vector<std::future<ReplicateResult>> jobs;
        for (std::size_t i = 0; i < a.replicates; ++i)
            jobs.push_back(std::async(std::launch::async, run_replicate, spec_for(i), std::cref(modes), std::cref(grids), a.rank));
        for (std::size_t i = 0; i < a.replicates; ++i) reps[i] = jobs[i].get();
    } else {
        for (std::size_t i = 0; i < a.replicates; ++i) reps[i] = run_replicate(spec_for(i), modes, grids, a.rank);
    }

    const ex::RocMethod methods[2] = {ex::RocMethod::GeoHopca, ex::RocMethod::HosvdThreshold};
    const fs::path out(a.out);
    const fs::path stem = out.parent_path() / out.stem();
    {
        auto f = open_out(out);
        f << "scenario,mode,method,replicate,k,tp,fp\n";
        for (std::size_t i = 0; i < modes.size(); ++i)
            for (int m = 0; m < 2; ++m)
                for (std::size_t r = 0; r < reps.size(); ++r)
                    for (std::size_t g = 0; g < grids[i].size(); ++g) {
                        const auto& v = reps[r].sweeps[i][m][g];
                        f << a.scenario << ',' << modes[i] + 1 << ',' << ex::to_string(methods[m]) << ',' << r << ','
                          << grids[i][g] << ',' << v.tp_rate << ',' << v.fp_rate << '\n';
                    }
    }

    json summary = json::array();
    {
        auto f = open_out(fs::path(stem.string() + "_summary.csv"));
        f << "scenario,mode,method,tp_mean,tp_std,fp_mean,fp_std\n";
        for (std::size_t i = 0; i < modes.size(); ++i)
            for (int m = 0; m < 2; ++m) {
                std::vector<double> tp, fp;
                for (const auto& r : reps) {
                    tp.push_back(r.at_truth[i][m].tp_rate);
                    fp.push_back(r.at_truth[i][m].fp_rate);
                }
                const auto [tm, ts] = mean_std(tp);
                const auto [fm, fs_] = mean_std(fp);
                f << a.scenario << ',' << modes[i] + 1 << ',' << ex::to_string(methods[m]) << ',' << tm << ',' << ts << ','
                  << fm << ',' << fs_ << '\n';

                // Mean curve over replicates, one point per grid entry.
                std::vector<std::pair<double, double>> pts;
                for (std::size_t g = 0; g < grids[i].size(); ++g) {
                    double x = 0.0, y = 0.0;
                    for (const auto& r : reps) {
                        x += r.sweeps[i][m][g].fp_rate;
                        y += r.sweeps[i][m][g].tp_rate;
                    }
                    pts.emplace_back(x / reps.size(), y / reps.size());
                }
                const auto curve = ex::roc_from_points(pts);
                auto rf = open_out(fs::path(stem.string() + "_roc_mode" + std::to_string(modes[i] + 1) + "_" +
                                            ex::to_string(methods[m]) + ".csv"));
                rf << "fp,tp\n";
                for (const auto& [x, y] : curve.points) rf << x << ',' << y << '\n';
                summary.push_back({{"mode", modes[i] + 1}, {"method", ex::to_string(methods[m])}, {"tp_mean", tm},
                                   {"tp_std", ts}, {"fp_mean", fm}, {"fp_std", fs_}, {"auc", curve.auc}});
            }
    }
    json j{{"command", "synth"}, {"scenario", a.scenario}, {"replicates", a.replicates}, {"seed", a.seed},
           {"rank", a.rank}, {"results", summary}};
    archive::write_text(fs::path(stem.string() + ".json"), j.dump(2) + "\n");
    j["total_seconds"] = seconds_since(t0);
    emit(j);
    std::cerr << "wrote " << out.string() << " and summary/ROC files next to it\n";
    return 0;
}

// ---------------------------------------------------------------------------

struct ClassifyArgs {
    std::string mnist_dir, out;
    std::size_t per_class = 500, test_per_class = 80, rank = 20;
    double ratio = 1.0;
    std::uint64_t seed = 0;
};

int cmd_classify(const ClassifyArgs& a) {
    if (a.mnist_dir.empty()) bad("--mnist-dir is required");
    const fs::path d(a.mnist_dir);
    const auto train_img = ex::read_idx_images((d / "train-images-idx3-ubyte").string());
    const auto train_lab = ex::read_idx_labels((d / "train-labels-idx1-ubyte").string());
    const auto test_img = ex::read_idx_images((d / "t10k-images-idx3-ubyte").string());
    const auto test_lab = ex::read_idx_labels((d / "t10k-labels-idx1-ubyte").string());
    const auto t0 = std::chrono::steady_clock::now();
    const auto train = ex::sample_per_class(train_img, train_lab, a.per_class, a.seed);
    const auto test = ex::sample_per_class(test_img, test_lab, a.test_per_class, a.seed + 1);
    const auto model = ex::train_classifier(train.class_stacks, train.class_labels, a.ratio, a.rank);
    const auto ev = ex::accuracy_and_confusion(model, test.samples, test.sample_labels);
    if (!a.out.empty()) {
        auto f = open_out(a.out);
        f << "true\\pred";
        for (int l : model.labels) f << ',' << l;
        f << '\n';
        for (std::size_t i = 0; i < model.labels.size(); ++i) {
            f << model.labels[i];
            for (std::size_t j = 0; j < model.labels.size(); ++j) f << ',' << ev.confusion(i, j);
            f << '\n';
        }
    }
    emit({{"command", "classify"}, {"accuracy", ev.accuracy}, {"ratio", a.ratio}, {"rank", a.rank},
          {"per_class", a.per_class}, {"test_per_class", a.test_per_class}, {"seed", a.seed},
          {"total_seconds", seconds_since(t0)}});
    std::cerr << "accuracy " << 100.0 * ev.accuracy << "%\n";
    return 0;
}

// ---------------------------------------------------------------------------

struct ReconstructArgs {
    std::string input, out, orientation = "row";
    std::size_t components = 90, oversample = 2;
};

int cmd_reconstruct(const ReconstructArgs& a) {
    ex::Orientation o;
    if (a.orientation == "row") o = ex::Orientation::RowWise;
    else if (a.orientation == "column") o = ex::Orientation::ColumnWise;
    else bad("--orientation must be 'row' or 'column'");
    const ex::Image img = ex::read_ppm(a.input);
    const auto res = ex::reconstruct_image(img, a.components, a.oversample, o);
    if (!a.out.empty()) ex::write_ppm(a.out, res.image);
    const auto& r = res.report;
    emit({{"command", "reconstruct"}, {"frobenius_error", r.frobenius_error}, {"clamped_error", r.clamped_error},
          {"dense_error", r.dense_error}, {"eta_bound", r.eta_bound}, {"eta_achieved", r.eta_achieved},
          {"runtime_seconds", r.runtime_seconds}, {"components", r.n_components}, {"k", r.k},
          {"orientation", ex::to_string(r.orientation)}, {"status", to_string(r.status)}, {"cuts_used", r.cuts_used},
          {"height", img.height}, {"width", img.width}});
    std::cerr << "error " << r.frobenius_error << " (dense PCA " << r.dense_error << ")\n";
    return 0;
}

// ---------------------------------------------------------------------------

struct OracleArgs {
    std::string input;
    std::size_t mode = 1, k = 1, rank = 1;
};

int cmd_oracle(const OracleArgs& a) {
    const npy::Array arr = npy::load(a.input);
    Matrix m;
    if (arr.shape.size() == 2) {
        m = npy::load_matrix(a.input);
    } else {
        const DenseTensor x = npy::load_tensor(a.input);
        if (a.mode < 1 || a.mode > x.order()) bad("--mode must be in 1.." + std::to_string(x.order()));
        m = unfold(x, a.mode - 1);
    }
    const auto r = brute_force_select(m, a.k, a.rank);
    emit({{"command", "oracle"}, {"support", r.support.one_based()}, {"eta", r.eta}, {"explained_variance", r.explained},
          {"columns", m.cols()}});
    return 0;
}

// ---------------------------------------------------------------------------

// Expands a flat JSON config into flags placed before the user's own, skipping
// any key the user already set: flags win. Keys the subcommand does not know
// are skipped with a warning, so one manifest can serve several commands.
std::vector<std::string> apply_config(const CLI::App& app, const std::vector<std::string>& args) {
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
    }
    if (path.empty() || args.size() < 2) return args;
    std::ifstream f(path);
    if (!f) throw Error(ErrorKind::Io, "cannot open config file: " + path);
    json cfg;
    try {
        f >> cfg;
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Io, path + ": " + e.what());
    }
    if (!cfg.is_object()) throw Error(ErrorKind::Io, path + ": config must be a JSON object");

    auto user_has = [&](const std::string& flag) {
        for (const auto& s : args)
            if (s == flag || s.rfind(flag + "=", 0) == 0) return true;
        return false;
    };
    auto scalar = [&](const json& v, const std::string& key) -> std::string {
        if (v.is_string()) return v.get<std::string>();
        if (v.is_number() || v.is_boolean()) return v.dump();
        throw Error(ErrorKind::Io, path + ": unsupported value for '" + key + "'");
    };
    std::vector<std::string> out{args[0], args[1]};
    for (const auto& [key, v] : cfg.items()) {
        if (key == "config") continue;
        if (key == "input") {
            if (std::none_of(args.begin() + 2, args.end(), [](const std::string& s) { return s.rfind("-", 0) != 0; }))
                out.push_back(scalar(v, key));
            continue;
        }
        const std::string flag = "--" + key;
        const CLI::App* sub = app.get_subcommand_no_throw(args[1]);
        if (!sub || !sub->get_option_no_throw(flag)) {
            std::cerr << "warning: config key '" << key << "' ignored by " << args[1] << "\n";
            continue;
        }
        if (user_has(flag)) continue;
        if (v.is_boolean()) {
            if (v.get<bool>()) out.push_back(flag);
        } else if (v.is_array()) {
            std::string joined;
            for (const auto& e : v) joined += (joined.empty() ? "" : ",") + scalar(e, key);
            out.push_back(flag + "=" + joined);
        } else {
            out.push_back(flag + "=" + scalar(v, key));
        }
    }
    out.insert(out.end(), args.begin() + 2, args.end());
    return out;
}

int exit_code(ErrorKind k) {
    switch (k) {
        case ErrorKind::InvalidArgument:
        case ErrorKind::Io: return 2;
        case ErrorKind::Infeasible:
        case ErrorKind::SearchAborted: return 3;
        case ErrorKind::Numeric: return 4;
    }
    return 4;
}

const char* kind_name(ErrorKind k) {
    switch (k) {
        case ErrorKind::InvalidArgument: return "invalid_argument";
        case ErrorKind::Io: return "io";
        case ErrorKind::Infeasible: return "infeasible";
        case ErrorKind::SearchAborted: return "search_aborted";
        case ErrorKind::Numeric: return "numeric";
    }
    return "unknown";
}

int fail_with(int code, const std::string& kind, const std::string& msg) {
    std::cerr << "error: " << msg << "\n";
    emit({{"error", msg}, {"kind", kind}});
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sparse higher-order PCA by geometric column selection"};
    app.require_subcommand(1);
    std::string config;
    auto add_config = [&](CLI::App* c) { c->add_option("--config", config, "Flat JSON file of flag values; flags win"); };

    DecomposeArgs dec;
    auto* c_dec = app.add_subcommand("decompose", "Sparse Tucker decomposition of an NPY tensor");
    c_dec->add_option("input", dec.input, "Tensor (.npy, float64)")->required();
    c_dec->add_option("--ranks", dec.ranks, "Tucker ranks, one per mode or one for all")->required();
    c_dec->add_option("--sparsity", dec.sparsity, "Column budgets k_n, one per mode or one for all")->required();
    c_dec->add_option("--eta", dec.eta, "'auto' or per-mode tolerances (comma separated, 'auto' allowed)");
    c_dec->add_option("--out", dec.out, "Archive directory");
    c_dec->add_option("--max-cuts", dec.max_cuts, "Cutting-plane iteration cap per mode");
    c_dec->add_option("--node-budget", dec.node_budget, "Tree-search node cap per selection");
    c_dec->add_flag("--parallel", dec.parallel, "Solve modes concurrently");
    add_config(c_dec);

    DecomposeArgs bnd;
    auto* c_bnd = app.add_subcommand("bound", "A-priori error bound for given ranks and sparsity");
    c_bnd->add_option("input", bnd.input, "Tensor (.npy, float64)")->required();
    c_bnd->add_option("--ranks", bnd.ranks)->required();
    c_bnd->add_option("--sparsity", bnd.sparsity)->required();
    add_config(c_bnd);

    SynthArgs syn;
    auto* c_syn = app.add_subcommand("synth", "Synthetic support-recovery experiment");
    c_syn->add_option("--scenario", syn.scenario, "1..4");
    c_syn->add_option("--replicates", syn.replicates);
    c_syn->add_option("--seed", syn.seed, "Replicate i uses seed + i");
    c_syn->add_option("--k-grid", syn.k_grid, "Cardinalities swept for the ROC (default: 10 even steps)");
    c_syn->add_option("--rank", syn.rank, "Rank used for selection and for the HOSVD baseline");
    c_syn->add_option("--out", syn.out, "Per-replicate CSV; summary, ROC and JSON files go next to it")->required();
    c_syn->add_flag("--parallel", syn.parallel, "Run replicates concurrently");
    add_config(c_syn);

    ClassifyArgs cls;
    auto* c_cls = app.add_subcommand("classify", "Nearest-subspace MNIST classification");
    c_cls->add_option("--mnist-dir", cls.mnist_dir, "Directory with the four MNIST IDX files");
    c_cls->add_option("--per-class", cls.per_class, "Training samples per digit");
    c_cls->add_option("--test-per-class", cls.test_per_class, "Test samples per digit");
    c_cls->add_option("--ratio", cls.ratio, "Fraction of training samples kept per class");
    c_cls->add_option("--rank", cls.rank, "Subspace rank per class");
    c_cls->add_option("--seed", cls.seed);
    c_cls->add_option("--out", cls.out, "Normalized confusion matrix CSV");
    add_config(c_cls);

    ReconstructArgs rec;
    auto* c_rec = app.add_subcommand("reconstruct", "Low-rank image reconstruction from selected columns");
    c_rec->add_option("input", rec.input, "Binary PPM (P6)")->required();
    c_rec->add_option("--components", rec.components);
    c_rec->add_option("--oversample", rec.oversample, "k = components * oversample");
    c_rec->add_option("--orientation", rec.orientation, "row or column");
    c_rec->add_option("--out", rec.out, "Output PPM");
    add_config(c_rec);

    OracleArgs orc;
    auto* c_orc = app.add_subcommand("oracle", "Exhaustive column selection for small instances");
    c_orc->add_option("input", orc.input, "Matrix or tensor (.npy)")->required();
    c_orc->add_option("--mode", orc.mode, "Mode to unfold (tensors only, 1-based)");
    c_orc->add_option("--k", orc.k)->required();
    c_orc->add_option("--rank", orc.rank);
    add_config(c_orc);

    try {
        std::vector<std::string> args(argv, argv + argc);
        args = apply_config(app, args);
        std::vector<std::string> rev(args.rbegin(), args.rend() - 1);
        app.parse(std::move(rev));

        if (*c_dec) return cmd_decompose(dec);
        if (*c_bnd) return cmd_bound(bnd);
        if (*c_syn) return cmd_synth(syn);
        if (*c_cls) return cmd_classify(cls);
        if (*c_rec) return cmd_reconstruct(rec);
        if (*c_orc) return cmd_oracle(orc);
        return 2;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        return fail_with(2, "usage", e.what());
    } catch (const Error& e) {
        return fail_with(exit_code(e.kind()), kind_name(e.kind()), e.what());
    } catch (const std::bad_alloc&) {
        return fail_with(2, "invalid_argument", "input too large to hold in memory");
    } catch (const std::exception& e) {
        return fail_with(4, "numeric", e.what());
    }
}

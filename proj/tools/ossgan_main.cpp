// ossgan: build open-set datasets, train any method in the registry,
// evaluate metrics, compare runs, and render figures.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ossgan/dataset.hpp"
#include "ossgan/errors.hpp"
#include "ossgan/experiment.hpp"
#include "ossgan/metrics.hpp"
#include "ossgan/plot.hpp"
#include "ossgan/serialize.hpp"
#include "ossgan/trainer.hpp"

namespace fs = std::filesystem;
using namespace ossgan;

namespace {

// paper-style confidence grid for threshold sweeps
const std::vector<double> kThresholdGrid = {0.1, 0.3, 0.5, 0.7, 0.9, 0.95};

std::string resolve_out(const std::string& path) {
    const char* root = std::getenv("OSSGAN_OUT");
    if (!root || !*root) return path;
    fs::path p(path);
    if (p.is_absolute()) return path;
    return (fs::path(root) / p).string();
}

struct MetricsRow {
    int64_t iter = 0;
    double fid = 0.0, is_score = 0.0, f18 = 0.0, f8 = 0.0, entropy_gap = 0.0;
    int64_t n_samples = 0;
    std::string extractor_hash;
};

constexpr const char* kMetricsHeader = "iter,fid,is,f18,f8,entropy_gap,n_samples,extractor_hash";

// metrics.csv carries a string hash column, so it gets its own parser
std::vector<MetricsRow> read_metrics_file(const std::string& path) {
    std::istringstream is(io::read_text(path));
    std::string line;
    if (!std::getline(is, line)) throw DataError("empty metrics file: " + path);
    if (line != kMetricsHeader) throw DataError("unexpected metrics header in " + path);
    std::vector<MetricsRow> rows;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (cells.size() != 8) throw DataError("malformed metrics row in " + path);
        MetricsRow r;
        try {
            r.iter = std::stoll(cells[0]);
            r.fid = std::stod(cells[1]);
            r.is_score = std::stod(cells[2]);
            r.f18 = std::stod(cells[3]);
            r.f8 = std::stod(cells[4]);
            r.entropy_gap = std::stod(cells[5]);
            r.n_samples = std::stoll(cells[6]);
        } catch (const std::exception&) {
            throw DataError("bad metrics cell in " + path);
        }
        r.extractor_hash = cells[7];
        rows.push_back(std::move(r));
    }
    return rows;
}

struct RunSummary {
    std::string dir;
    std::string name;
    MethodSpec method;
    MetricsRow final_row;
};

RunSummary load_run(const std::string& run_dir) {
    RunSummary s;
    s.dir = run_dir;
    s.name = fs::path(run_dir).filename().string();
    ExperimentConfig cfg = load_experiment(run_dir + "/experiment.json");
    s.method = cfg.method;
    auto rows = read_metrics_file(run_dir + "/metrics.csv");
    if (rows.empty())
        throw DataError("run has no metric rows (trained without an extractor?): " + run_dir);
    s.final_row = rows.back();
    return s;
}

void require_same_extractor(const std::vector<RunSummary>& runs) {
    for (const RunSummary& r : runs)
        if (r.final_row.extractor_hash != runs.front().final_row.extractor_hash)
            throw DataError("extractor hash mismatch: " + runs.front().dir + " has " +
                            runs.front().final_row.extractor_hash + " but " + r.dir + " has " +
                            r.final_row.extractor_hash);
}

std::optional<MetricEmbedder> embedder_next_to(const std::string& manifest_path) {
    std::string dir = fs::path(manifest_path).parent_path().string();
    if (dir.empty()) dir = ".";
    if (!fs::exists(fs::path(dir) / "extractor.json")) return std::nullopt;
    return MetricEmbedder::load(dir);
}

TrainResult run_training(const std::string& manifest_path, ExperimentConfig cfg) {
    cfg.method.validate();
    cfg.train.validate();
    if (cfg.out_dir.empty()) throw ValidationError("no output directory configured");

    OpenSetDataset data = OpenSetDataset::load(manifest_path);
    cfg.split = data.config();
    cfg.out_dir = resolve_out(cfg.out_dir);
    fs::create_directories(cfg.out_dir);
    save_experiment(cfg.out_dir + "/experiment.json", cfg);

    std::optional<MetricEmbedder> embedder = embedder_next_to(manifest_path);
    if (!embedder)
        std::fprintf(stderr,
                     "note: no extractor.json next to the data manifest; "
                     "metrics.csv will stay empty\n");

    TrainResult r = train(data, cfg.method, cfg.train, cfg.out_dir,
                          embedder ? &*embedder : nullptr);
    std::printf("run %s: %lld iterations of %s\n", cfg.out_dir.c_str(),
                static_cast<long long>(cfg.train.total_iters), cfg.method.name.c_str());
    std::printf("final losses: adv_lbl=%.6g adv_unlbl=%.6g cls=%.6g total_d=%.6g total_g=%.6g\n",
                r.final_losses.adv_lbl, r.final_losses.adv_unlbl, r.final_losses.cls,
                r.final_losses.total_d, r.final_g_loss);
    if (r.has_metrics)
        std::printf("final metrics: fid=%.6g is=%.6g f18=%.6g f8=%.6g entropy_gap=%.6g\n",
                    r.final_metrics.fid, r.final_metrics.is_score, r.final_metrics.f_small,
                    r.final_metrics.f_large, r.final_metrics.entropy_gap);
    return r;
}

void write_comparison(const std::vector<RunSummary>& runs, const std::string& csv_path) {
    std::ostringstream ss;
    ss << "run,method,threshold,iter,fid,is,f18,f8,entropy_gap,extractor_hash\n";
    char buf[512];
    for (const RunSummary& r : runs) {
        std::string threshold_cell;
        if (r.method.threshold.has_value()) {
            std::snprintf(buf, sizeof(buf), "%.17g", *r.method.threshold);
            threshold_cell = buf;
        }
        std::snprintf(buf, sizeof(buf), "%s,%s,%s,%lld,%.17g,%.17g,%.17g,%.17g,%.17g,%s\n",
                      r.name.c_str(), r.method.name.c_str(), threshold_cell.c_str(),
                      static_cast<long long>(r.final_row.iter), r.final_row.fid,
                      r.final_row.is_score, r.final_row.f18, r.final_row.f8,
                      r.final_row.entropy_gap, r.final_row.extractor_hash.c_str());
        ss << buf;
    }
    io::write_text(csv_path, ss.str());

    std::printf("%-24s %-11s %-9s %-9s %-8s %-8s %-8s %-8s\n", "run", "method", "threshold",
                "fid", "is", "f18", "f8", "ent_gap");
    for (const RunSummary& r : runs) {
        char th[16] = "-";
        if (r.method.threshold.has_value())
            std::snprintf(th, sizeof(th), "%.2f", *r.method.threshold);
        std::printf("%-24s %-11s %-9s %-9.4g %-8.4g %-8.4g %-8.4g %-8.4g\n", r.name.c_str(),
                    r.method.name.c_str(), th, r.final_row.fid, r.final_row.is_score,
                    r.final_row.f18, r.final_row.f8, r.final_row.entropy_gap);
    }
    std::printf("wrote %s\n", csv_path.c_str());
}

// ---------------------------------------------------------------------------
// subcommand drivers
// ---------------------------------------------------------------------------

struct BuildDataArgs {
    int64_t corpus_classes = 200;
    int64_t corpus_per_class = 500;
    int64_t corpus_eval_per_class = 2;
    int64_t side = 8;
    uint64_t corpus_seed = 1;
    int64_t closed_classes = 0;
    double labeled_ratio = 0.0;
    double open_usage = 1.0;
    uint64_t seed = 0;
    int64_t extractor_iters = 400;
    uint64_t extractor_seed = 11;
    std::string out;
};

void cmd_build_data(const BuildDataArgs& a) {
    std::string out = resolve_out(a.out);
    Corpus corpus = make_toy_corpus(a.corpus_classes, a.corpus_per_class, a.side, a.corpus_seed,
                                    a.corpus_eval_per_class);
    SplitConfig sc{a.closed_classes, a.labeled_ratio, a.open_usage, a.seed};
    sc.validate(corpus.n_classes);
    OpenSetDataset data = build_splits(corpus, sc);

    fs::create_directories(out);
    std::string hash = data.save(out);
    SplitSummary sum = data.summarize();
    std::printf("counts (labeled, unlabeled closed, unlabeled open): (%lld, %lld, %lld)\n",
                static_cast<long long>(sum.n_labeled),
                static_cast<long long>(sum.n_unlabeled_closed),
                static_cast<long long>(sum.n_unlabeled_open));
    std::printf("manifest: %s/manifest.json hash=%s\n", out.c_str(), hash.c_str());

    MetricEmbedder::FitConfig fc;
    fc.iters = a.extractor_iters;
    fc.seed = a.extractor_seed;
    MetricEmbedder embedder = MetricEmbedder::fit(corpus, fc);
    embedder.save(out);
    std::printf("extractor: holdout accuracy %.3f hash=%s\n", embedder.holdout_accuracy(),
                embedder.hash().c_str());
}

struct TrainArgs {
    std::string data;
    std::string config_file;
    ExperimentConfig cfg;
    bool no_entropy_reg = false;
    bool no_fake_cls = false;
    double threshold = -1.0;  // CLI11 writes here; presence tracked via count()
};

struct EvalArgs {
    std::string ckpt;
    std::string data;
    int64_t samples = 2000;
    uint64_t seed = 0;
    std::string out;
};

void cmd_eval(const EvalArgs& a) {
    MethodSpec method;
    int64_t iteration = 0;
    ModelBundle bundle = load_checkpoint(a.ckpt, &method, &iteration);
    OpenSetDataset data = OpenSetDataset::load(a.data);
    std::optional<MetricEmbedder> embedder = embedder_next_to(a.data);
    if (!embedder)
        throw DataError("no extractor.json next to the data manifest; rebuild the dataset");

    metrics::EvalConfig ec;
    ec.n_samples = a.samples;
    ec.seed = a.seed;
    MetricReport r = metrics::compute_metrics(bundle, data, *embedder, ec);
    std::printf("checkpoint %s (iteration %lld, method %s)\n", a.ckpt.c_str(),
                static_cast<long long>(iteration), method.name.c_str());
    std::printf("fid=%.6g is=%.6g f18=%.6g f8=%.6g entropy_gap=%.6g n=%lld extractor=%s\n",
                r.fid, r.is_score, r.f_small, r.f_large, r.entropy_gap,
                static_cast<long long>(r.n_samples), r.extractor_hash.c_str());
    for (const std::string& note : r.provenance) std::printf("note: %s\n", note.c_str());

    if (!a.out.empty()) {
        std::string out = resolve_out(a.out);
        std::ostringstream ss;
        char buf[256];
        std::snprintf(buf, sizeof(buf), "%lld,%.17g,%.17g,%.17g,%.17g,%.17g,%lld,%s\n",
                      static_cast<long long>(iteration), r.fid, r.is_score, r.f_small,
                      r.f_large, r.entropy_gap, static_cast<long long>(r.n_samples),
                      r.extractor_hash.c_str());
        ss << kMetricsHeader << "\n" << buf;
        io::write_text(out, ss.str());
        std::printf("wrote %s\n", out.c_str());
    }
}

struct CompareArgs {
    std::vector<std::string> runs;
    std::string out = "comparison.csv";
    bool sweep = false;
    std::string data;
    std::vector<std::string> methods = {"ossgan", "rejectgan", "opensetgan"};
    int64_t iters = 200;
    uint64_t seed = 0;
    double lambda = 0.2;
    int64_t batch = 32;
    int64_t eval_samples = 2000;
    std::string sweep_out;
};

void cmd_compare(const CompareArgs& a) {
    std::vector<std::string> run_dirs = a.runs;

    if (a.sweep) {
        if (a.data.empty()) throw ValidationError("--sweep needs --data");
        if (a.sweep_out.empty()) throw ValidationError("--sweep needs --sweep-out");
        std::string root = resolve_out(a.sweep_out);
        for (const std::string& name : a.methods) {
            ExperimentConfig cfg;
            cfg.method.name = name;
            cfg.method.lambda = a.lambda;
            cfg.train.total_iters = a.iters;
            cfg.train.seed = a.seed;
            cfg.train.batch_labeled = cfg.train.batch_unlabeled = cfg.train.batch_fake =
                a.batch;
            cfg.train.eval_samples = a.eval_samples;
            if (cfg.method.uses_threshold()) {
                for (double c : kThresholdGrid) {
                    ExperimentConfig run = cfg;
                    run.method.threshold = c;
                    char leaf[64];
                    std::snprintf(leaf, sizeof(leaf), "%s_c%.2f", name.c_str(), c);
                    run.out_dir = root + "/" + leaf;
                    run_training(a.data, run);
                    run_dirs.push_back(run.out_dir);
                }
            } else {
                cfg.out_dir = root + "/" + name;
                run_training(a.data, cfg);
                run_dirs.push_back(cfg.out_dir);
            }
        }
    }

    if (run_dirs.size() < 2)
        throw ValidationError("compare needs at least two runs");
    std::vector<RunSummary> runs;
    for (const std::string& dir : run_dirs) runs.push_back(load_run(dir));
    require_same_extractor(runs);

    std::string csv_path = a.sweep ? resolve_out(a.sweep_out) + "/" + a.out : resolve_out(a.out);
    write_comparison(runs, csv_path);
}

struct PlotArgs {
    std::vector<std::string> runs;
    std::string out;
};

void cmd_plot(const PlotArgs& a) {
    std::string out = resolve_out(a.out);
    fs::create_directories(out);

    for (const std::string& run : a.runs) {
        io::Csv losses = io::read_csv(run + "/losses.csv");
        if (losses.rows.empty()) throw DataError("no loss rows in " + run + "/losses.csv");
        std::string name = fs::path(run).filename().string();

        plot::ChartSpec spec;
        spec.title = "losses: " + name;
        spec.x_label = "iteration";
        spec.y_label = "loss";
        for (const char* col : {"total_d", "total_g", "adv_lbl", "adv_unlbl", "cls"}) {
            int64_t ci = losses.column_index(col);
            if (ci < 0) throw DataError(std::string("losses.csv misses column ") + col);
            plot::Series s;
            s.label = col;
            for (const auto& row : losses.rows) {
                s.x.push_back(row[0]);
                s.y.push_back(row[static_cast<size_t>(ci)]);
            }
            spec.series.push_back(std::move(s));
        }
        std::string path = out + "/losses_" + name + ".png";
        img::write_png_gray(path, plot::render_chart(spec));
        std::printf("wrote %s\n", path.c_str());
    }

    if (a.runs.size() < 2) return;

    std::vector<RunSummary> runs;
    for (const std::string& dir : a.runs) runs.push_back(load_run(dir));
    require_same_extractor(runs);

    // FID against the confidence threshold, one line per method (flat for
    // threshold-free methods)
    double c_lo = 1.0, c_hi = 0.0;
    for (const RunSummary& r : runs)
        if (r.method.threshold.has_value()) {
            c_lo = std::min(c_lo, *r.method.threshold);
            c_hi = std::max(c_hi, *r.method.threshold);
        }
    if (c_lo < c_hi) {
        plot::ChartSpec spec;
        spec.title = "fid vs threshold";
        spec.x_label = "threshold c";
        spec.y_label = "fid";
        for (const std::string& name : method_names()) {
            std::vector<std::pair<double, double>> pts;
            double flat = 0.0;
            int64_t n_flat = 0;
            for (const RunSummary& r : runs) {
                if (r.method.name != name) continue;
                if (r.method.threshold.has_value())
                    pts.emplace_back(*r.method.threshold, r.final_row.fid);
                else {
                    flat += r.final_row.fid;
                    ++n_flat;
                }
            }
            plot::Series s;
            s.label = name;
            if (!pts.empty()) {
                std::sort(pts.begin(), pts.end());
                for (auto& [c, fid] : pts) {
                    s.x.push_back(c);
                    s.y.push_back(fid);
                }
                s.style = plot::SeriesStyle::line_and_points;
            } else if (n_flat > 0) {
                s.x = {c_lo, c_hi};
                double v = flat / static_cast<double>(n_flat);
                s.y = {v, v};
            } else {
                continue;
            }
            spec.series.push_back(std::move(s));
        }
        std::string path = out + "/fid_vs_threshold.png";
        img::write_png_gray(path, plot::render_chart(spec));
        std::printf("wrote %s\n", path.c_str());
    }

    // fidelity/diversity scatter over every recorded evaluation
    plot::ChartSpec scatter;
    scatter.title = "precision proxy f1/8 vs recall proxy f8";
    scatter.x_label = "f1/8";
    scatter.y_label = "f8";
    for (const std::string& name : method_names()) {
        plot::Series s;
        s.label = name;
        s.style = plot::SeriesStyle::points;
        s.mean_crosshair = true;
        for (const RunSummary& r : runs) {
            if (r.method.name != name) continue;
            for (const MetricsRow& row : read_metrics_file(r.dir + "/metrics.csv")) {
                s.x.push_back(row.f18);
                s.y.push_back(row.f8);
            }
        }
        if (!s.x.empty()) scatter.series.push_back(std::move(s));
    }
    if (!scatter.series.empty()) {
        std::string path = out + "/pr_scatter.png";
        img::write_png_gray(path, plot::render_chart(scatter));
        std::printf("wrote %s\n", path.c_str());
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"open-set semi-supervised GAN workbench"};
    app.require_subcommand(1);

    BuildDataArgs bd;
    CLI::App* build = app.add_subcommand("build-data",
                                         "generate a toy corpus and carve the open-set split");
    build->add_option("--corpus-classes", bd.corpus_classes, "total classes in the corpus");
    build->add_option("--corpus-per-class", bd.corpus_per_class, "training samples per class");
    build->add_option("--corpus-eval-per-class", bd.corpus_eval_per_class,
                      "held-out samples per class");
    build->add_option("--side", bd.side, "image side length");
    build->add_option("--corpus-seed", bd.corpus_seed, "corpus generation seed");
    build->add_option("--classes", bd.closed_classes, "closed-set class count")->required();
    build->add_option("--labeled-ratio", bd.labeled_ratio, "labeled fraction per closed class")
        ->required();
    build->add_option("--open-usage", bd.open_usage, "fraction of open-class samples used");
    build->add_option("--seed", bd.seed, "split seed");
    build->add_option("--extractor-iters", bd.extractor_iters, "metric extractor fit steps");
    build->add_option("--extractor-seed", bd.extractor_seed, "metric extractor fit seed");
    build->add_option("--out", bd.out, "output directory")->required();
    build->callback([&] { cmd_build_data(bd); });

    TrainArgs ta;
    CLI::App* tr = app.add_subcommand("train", "train one method on a built dataset");
    tr->add_option("--data", ta.data, "path to manifest.json")->required();
    tr->add_option("--config", ta.config_file, "experiment file; flags override its values");
    tr->add_option("--method", ta.cfg.method.name, "one of the method registry");
    tr->add_option("--lambda", ta.cfg.method.lambda, "classifier loss weight");
    tr->add_option("--threshold", ta.threshold, "confidence threshold (rejectgan/opensetgan)");
    tr->add_flag("--no-entropy-reg", ta.no_entropy_reg, "drop the entropy terms");
    tr->add_flag("--no-fake-cls", ta.no_fake_cls, "drop the fake classifier group");
    tr->add_flag("--detach-condition", ta.cfg.method.detach_condition,
                 "block gradients through the soft condition");
    tr->add_option("--iters", ta.cfg.train.total_iters, "training iterations");
    tr->add_option("--seed", ta.cfg.train.seed, "run seed");
    tr->add_option("--batch-labeled", ta.cfg.train.batch_labeled, "labeled batch size");
    tr->add_option("--batch-unlabeled", ta.cfg.train.batch_unlabeled, "unlabeled batch size");
    tr->add_option("--batch-fake", ta.cfg.train.batch_fake, "generated batch size");
    tr->add_option("--lr-g", ta.cfg.train.lr_g, "generator learning rate");
    tr->add_option("--lr-d", ta.cfg.train.lr_d, "discriminator learning rate");
    tr->add_option("--eval-every", ta.cfg.train.eval_every,
                   "evaluation period (0: final only)");
    tr->add_option("--eval-samples", ta.cfg.train.eval_samples, "generated samples per eval");
    tr->add_flag("--augment", ta.cfg.train.augment, "differentiable batch augmentation");
    tr->add_option("--out", ta.cfg.out_dir, "run output directory");
    tr->callback([&] {
        ExperimentConfig cfg;
        if (!ta.config_file.empty()) cfg = load_experiment(ta.config_file);
        // explicit flags win over the file, the file over defaults
        if (tr->count("--method")) cfg.method.name = ta.cfg.method.name;
        if (tr->count("--lambda")) cfg.method.lambda = ta.cfg.method.lambda;
        if (tr->count("--threshold")) cfg.method.threshold = ta.threshold;
        if (ta.no_entropy_reg) cfg.method.flags.use_entropy_reg = false;
        if (ta.no_fake_cls) cfg.method.flags.use_fake_cls = false;
        if (tr->count("--detach-condition"))
            cfg.method.detach_condition = ta.cfg.method.detach_condition;
        if (tr->count("--iters")) cfg.train.total_iters = ta.cfg.train.total_iters;
        if (tr->count("--seed")) cfg.train.seed = ta.cfg.train.seed;
        if (tr->count("--batch-labeled")) cfg.train.batch_labeled = ta.cfg.train.batch_labeled;
        if (tr->count("--batch-unlabeled"))
            cfg.train.batch_unlabeled = ta.cfg.train.batch_unlabeled;
        if (tr->count("--batch-fake")) cfg.train.batch_fake = ta.cfg.train.batch_fake;
        if (tr->count("--lr-g")) cfg.train.lr_g = ta.cfg.train.lr_g;
        if (tr->count("--lr-d")) cfg.train.lr_d = ta.cfg.train.lr_d;
        if (tr->count("--eval-every")) cfg.train.eval_every = ta.cfg.train.eval_every;
        if (tr->count("--eval-samples")) cfg.train.eval_samples = ta.cfg.train.eval_samples;
        if (tr->count("--augment")) cfg.train.augment = ta.cfg.train.augment;
        if (tr->count("--out")) cfg.out_dir = ta.cfg.out_dir;
        run_training(ta.data, cfg);
    });

    EvalArgs ea;
    CLI::App* ev = app.add_subcommand("eval", "recompute metrics from a checkpoint");
    ev->add_option("--ckpt", ea.ckpt, "path to ckpt_<iter>.bin")->required();
    ev->add_option("--data", ea.data, "path to manifest.json")->required();
    ev->add_option("--samples", ea.samples, "generated sample count");
    ev->add_option("--seed", ea.seed, "evaluation seed");
    ev->add_option("--out", ea.out, "write the report as a one-row csv");
    ev->callback([&] { cmd_eval(ea); });

    CompareArgs ca;
    CLI::App* cm = app.add_subcommand("compare", "tabulate finished runs side by side");
    cm->add_option("--run", ca.runs, "run directory (repeatable)");
    cm->add_option("--out", ca.out, "comparison csv path (relative to sweep root in sweeps)");
    cm->add_flag("--sweep", ca.sweep, "train the threshold grid before comparing");
    cm->add_option("--data", ca.data, "manifest for sweep training");
    cm->add_option("--methods", ca.methods, "methods included in the sweep");
    cm->add_option("--iters", ca.iters, "iterations per sweep run");
    cm->add_option("--seed", ca.seed, "seed for every sweep run");
    cm->add_option("--lambda", ca.lambda, "classifier loss weight for sweep runs");
    cm->add_option("--batch", ca.batch, "batch size for sweep runs");
    cm->add_option("--eval-samples", ca.eval_samples, "generated samples per evaluation");
    cm->add_option("--sweep-out", ca.sweep_out, "root directory for sweep runs");
    cm->callback([&] { cmd_compare(ca); });

    PlotArgs pa;
    CLI::App* pl = app.add_subcommand("plot", "render loss curves and metric figures");
    pl->add_option("--run", pa.runs, "run directory (repeatable)")->required();
    pl->add_option("--out", pa.out, "figure output directory")->required();
    pl->callback([&] { cmd_plot(pa); });

    try {
        app.parse(argc, argv);
        return 0;
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const DataError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const NumericError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 4;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
}

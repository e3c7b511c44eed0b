#include "ossgan/experiment.hpp"

#include <json.hpp>

#include "ossgan/errors.hpp"
#include "ossgan/serialize.hpp"

namespace ossgan {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, const char* object,
                    std::initializer_list<const char*> known) {
    for (const auto& [key, value] : j.items()) {
        bool found = false;
        for (const char* k : known)
            if (key == k) found = true;
        if (!found)
            throw ConfigError(std::string("unknown key '") + key + "' in " + object);
    }
}

template <class T>
void read_into(const json& j, const char* key, T& out) {
    if (j.contains(key)) {
        try {
            out = j.at(key).get<T>();
        } catch (const json::exception& e) {
            throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
        }
    }
}

}  // namespace

std::string serialize_experiment(const ExperimentConfig& cfg) {
    json j;
    j["split"] = {{"n_closed_classes", cfg.split.n_closed_classes},
                  {"labeled_ratio", cfg.split.labeled_ratio},
                  {"open_usage_ratio", cfg.split.open_usage_ratio},
                  {"seed", cfg.split.seed}};
    j["method"] = {{"name", cfg.method.name},
                   {"lambda", cfg.method.lambda},
                   {"use_entropy_reg", cfg.method.flags.use_entropy_reg},
                   {"use_fake_cls", cfg.method.flags.use_fake_cls},
                   {"detach_condition", cfg.method.detach_condition}};
    if (cfg.method.threshold.has_value()) j["method"]["threshold"] = *cfg.method.threshold;
    j["train"] = {{"total_iters", cfg.train.total_iters},
                  {"batch_labeled", cfg.train.batch_labeled},
                  {"batch_unlabeled", cfg.train.batch_unlabeled},
                  {"batch_fake", cfg.train.batch_fake},
                  {"lr_g", cfg.train.lr_g},
                  {"lr_d", cfg.train.lr_d},
                  {"beta1", cfg.train.beta1},
                  {"beta2", cfg.train.beta2},
                  {"seed", cfg.train.seed},
                  {"eval_every", cfg.train.eval_every},
                  {"augment", cfg.train.augment},
                  {"eval_samples", cfg.train.eval_samples}};
    j["out_dir"] = cfg.out_dir;
    return j.dump(2) + "\n";
}

ExperimentConfig parse_experiment(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad experiment file: ") + e.what());
    }
    reject_unknown(j, "experiment", {"split", "method", "train", "out_dir"});

    ExperimentConfig cfg;
    if (j.contains("split")) {
        const json& js = j.at("split");
        reject_unknown(js, "split",
                       {"n_closed_classes", "labeled_ratio", "open_usage_ratio", "seed"});
        read_into(js, "n_closed_classes", cfg.split.n_closed_classes);
        read_into(js, "labeled_ratio", cfg.split.labeled_ratio);
        read_into(js, "open_usage_ratio", cfg.split.open_usage_ratio);
        read_into(js, "seed", cfg.split.seed);
    }
    if (j.contains("method")) {
        const json& jm = j.at("method");
        reject_unknown(jm, "method", {"name", "lambda", "threshold", "use_entropy_reg",
                                      "use_fake_cls", "detach_condition"});
        read_into(jm, "name", cfg.method.name);
        read_into(jm, "lambda", cfg.method.lambda);
        read_into(jm, "use_entropy_reg", cfg.method.flags.use_entropy_reg);
        read_into(jm, "use_fake_cls", cfg.method.flags.use_fake_cls);
        read_into(jm, "detach_condition", cfg.method.detach_condition);
        if (jm.contains("threshold")) {
            double c = 0.0;
            read_into(jm, "threshold", c);
            cfg.method.threshold = c;
        }
    }
    if (j.contains("train")) {
        const json& jt = j.at("train");
        reject_unknown(jt, "train",
                       {"total_iters", "batch_labeled", "batch_unlabeled", "batch_fake",
                        "lr_g", "lr_d", "beta1", "beta2", "seed", "eval_every", "augment",
                        "eval_samples"});
        read_into(jt, "total_iters", cfg.train.total_iters);
        read_into(jt, "batch_labeled", cfg.train.batch_labeled);
        read_into(jt, "batch_unlabeled", cfg.train.batch_unlabeled);
        read_into(jt, "batch_fake", cfg.train.batch_fake);
        read_into(jt, "lr_g", cfg.train.lr_g);
        read_into(jt, "lr_d", cfg.train.lr_d);
        read_into(jt, "beta1", cfg.train.beta1);
        read_into(jt, "beta2", cfg.train.beta2);
        read_into(jt, "seed", cfg.train.seed);
        read_into(jt, "eval_every", cfg.train.eval_every);
        read_into(jt, "augment", cfg.train.augment);
        read_into(jt, "eval_samples", cfg.train.eval_samples);
    }
    read_into(j, "out_dir", cfg.out_dir);
    return cfg;
}

void save_experiment(const std::string& path, const ExperimentConfig& cfg) {
    io::write_text(path, serialize_experiment(cfg));
}

ExperimentConfig load_experiment(const std::string& path) {
    return parse_experiment(io::read_text(path));
}

}  // namespace ossgan

// psaw: learn, evaluate, and export regular-expression text classifiers.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "psaw/annealer.hpp"
#include "psaw/corpus.hpp"
#include "psaw/embeddings.hpp"
#include "psaw/errors.hpp"
#include "psaw/evaluator.hpp"
#include "psaw/regex_model.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

psaw::CorpusFormat format_for(const std::string& flag, const std::string& path) {
    if (flag == "tsv") return psaw::CorpusFormat::Tsv;
    if (flag == "jsonl") return psaw::CorpusFormat::Jsonl;
    if (flag == "auto") {
        return path.size() >= 6 && path.compare(path.size() - 6, 6, ".jsonl") == 0
                   ? psaw::CorpusFormat::Jsonl
                   : psaw::CorpusFormat::Tsv;
    }
    throw psaw::ConfigError("unknown corpus format: " + flag);
}

std::string safe_filename(const std::string& name) {
    std::string out = name;
    for (char& c : out) {
        if (c == '/' || c == '\\' || c == ':' || c == ' ' || c == '\t') c = '_';
    }
    return out;
}

struct TrainOptions {
    std::string corpus_path;
    std::string test_corpus_path;
    std::string format = "auto";
    std::vector<std::string> classes;
    std::string embeddings_path = "fallback";
    std::string strategy = "psaw";
    std::string tokenizer = "whitespace";
    std::string stopwords_path;
    std::string out_dir = ".";
    int fallback_window = 5;
    int fallback_dim = 256;
    psaw::AnnealConfig anneal;
};

psaw::TokenizerConfig tokenizer_config(const TrainOptions& opt) {
    psaw::TokenizerConfig config;
    if (opt.tokenizer == "character") {
        config.mode = psaw::TokenizerMode::Character;
    } else if (opt.tokenizer != "whitespace") {
        throw psaw::ConfigError("unknown tokenizer mode: " + opt.tokenizer);
    }
    if (!opt.stopwords_path.empty()) config.stop_words = psaw::load_stop_words(opt.stopwords_path);
    return config;
}

psaw::EmbeddingTable resolve_embeddings(const TrainOptions& opt,
                                        const psaw::LabeledCorpus& corpus) {
    if (opt.embeddings_path == "fallback") {
        return psaw::build_fallback_embeddings(corpus, opt.fallback_window, opt.fallback_dim);
    }
    std::vector<std::string> warnings;
    psaw::EmbeddingTable table = psaw::load_embeddings(opt.embeddings_path, &warnings);
    for (const std::string& w : warnings) std::cerr << "warning: " << w << "\n";
    return table;
}

json metrics_to_json(const psaw::EvalMetrics& m) {
    return json{{"precision", m.precision},
                {"recall", m.recall},
                {"f_beta", m.f_beta},
                {"beta", m.beta},
                {"true_matches", m.counts.true_matches},
                {"false_matches", m.counts.false_matches},
                {"positives_total", m.counts.positives_total}};
}

int cmd_train(const TrainOptions& opt) {
    const psaw::TokenizerConfig tok = tokenizer_config(opt);
    const psaw::LabeledCorpus corpus =
        psaw::load_corpus(opt.corpus_path, format_for(opt.format, opt.corpus_path), tok);

    std::vector<std::string> targets = opt.classes;
    if (targets.empty()) targets.assign(corpus.classes.begin(), corpus.classes.end());
    for (const std::string& cls : targets) {
        if (!corpus.classes.count(cls)) throw psaw::DataError("unknown class: " + cls);
    }

    std::optional<psaw::LabeledCorpus> test_corpus;
    if (!opt.test_corpus_path.empty()) {
        test_corpus = psaw::load_corpus(opt.test_corpus_path,
                                        format_for(opt.format, opt.test_corpus_path), tok);
    }

    const psaw::EmbeddingTable embeddings = resolve_embeddings(opt, corpus);
    fs::create_directories(opt.out_dir);

    for (const std::string& cls : targets) {
        const psaw::BinaryDataset dataset = psaw::split_binary(corpus, cls);
        psaw::TrainResult result;
        if (opt.strategy == "psaw") {
            result = psaw::run_psaw(dataset, embeddings, opt.anneal);
        } else if (opt.strategy == "psaw-i") {
            result = psaw::run_psaw_i(dataset, embeddings, opt.anneal);
        } else if (opt.strategy == "psaw-p-kmeans") {
            result = psaw::run_psaw_p(dataset, embeddings, opt.anneal,
                                      psaw::PartitionMode::KMeans);
        } else if (opt.strategy == "psaw-p-random") {
            result = psaw::run_psaw_p(dataset, embeddings, opt.anneal,
                                      psaw::PartitionMode::Random);
        } else {
            throw psaw::ConfigError("unknown strategy: " + opt.strategy);
        }

        const std::string stem = (fs::path(opt.out_dir) / safe_filename(cls)).string();
        psaw::ClassifierFile file;
        file.target_class = cls;
        file.beta = opt.anneal.beta;
        file.seed = opt.anneal.seed;
        file.strategy = opt.strategy;
        file.classifier = result.best;
        psaw::save_classifier(file, stem + ".classifier.json");
        psaw::save_history(result.history, stem + ".history.tsv");

        std::ofstream patterns(stem + ".patterns.txt", std::ios::binary);
        for (std::size_t r = 0; r < result.best.rules.size(); ++r) {
            const psaw::DecodedRule decoded = psaw::decode(result.best.rules[r]);
            patterns << "rule " << r << " positive: " << decoded.positive_pattern << "\n";
            patterns << "rule " << r << " negative: " << decoded.negative_pattern << "\n";
        }
        patterns << "accept: positive matches AND negative does not\n";

        json report;
        report["class"] = cls;
        report["strategy"] = opt.strategy;
        report["seed"] = opt.anneal.seed;
        report["train"] = metrics_to_json(result.metrics);
        if (test_corpus.has_value()) {
            const psaw::BinaryDataset test_ds = psaw::split_binary(*test_corpus, cls);
            const psaw::Evaluator ev(test_ds, {true, opt.anneal.workers});
            report["test"] = metrics_to_json(ev.evaluate(result.best, opt.anneal.beta));
        }
        std::ofstream metrics(stem + ".metrics.json", std::ios::binary);
        metrics << report.dump(2) << '\n';

        std::cout << psaw::format_metrics_line(cls, result.metrics) << "\n";
        for (const std::string& note : result.notes) std::cerr << cls << ": " << note << "\n";
        std::cerr << cls << ": trained in " << result.wall_time_seconds << " s\n";
    }
    return 0;
}

struct EvalOptionsCli {
    std::vector<std::string> classifier_paths;
    std::string corpus_path;
    std::string format = "auto";
    std::string report_path;
    double beta = 0.2;
};

std::vector<double> deciles(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    std::vector<double> out;
    for (int d = 0; d <= 10; ++d) {
        const double pos = d / 10.0 * static_cast<double>(values.size() - 1);
        const std::size_t lo = static_cast<std::size_t>(pos);
        const std::size_t hi = std::min(values.size() - 1, lo + 1);
        const double frac = pos - static_cast<double>(lo);
        out.push_back(values[lo] * (1 - frac) + values[hi] * frac);
    }
    return out;
}

int cmd_eval(const EvalOptionsCli& opt) {
    const psaw::LabeledCorpus corpus =
        psaw::load_corpus(opt.corpus_path, format_for(opt.format, opt.corpus_path));
    json report;
    report["corpus"] = opt.corpus_path;
    report["beta"] = opt.beta;
    json classes = json::array();
    std::vector<double> precisions, recalls;

    for (const std::string& path : opt.classifier_paths) {
        const psaw::ClassifierFile file = psaw::load_classifier(path);
        const psaw::BinaryDataset dataset = psaw::split_binary(corpus, file.target_class);
        const psaw::Evaluator ev(dataset);
        const psaw::EvalMetrics m = ev.evaluate(file.classifier, opt.beta);
        std::cout << psaw::format_metrics_line(file.target_class, m) << "\n";
        json entry = metrics_to_json(m);
        entry["class"] = file.target_class;
        entry["classifier"] = path;
        classes.push_back(std::move(entry));
        precisions.push_back(m.precision);
        recalls.push_back(m.recall);
    }
    report["classes"] = std::move(classes);

    if (!precisions.empty()) {
        report["deciles"] = {{"precision", deciles(precisions)}, {"recall", deciles(recalls)}};
        auto print_deciles = [](const char* name, const std::vector<double>& values) {
            std::cout << name << " deciles:";
            char buf[16];
            for (double v : deciles(values)) {
                std::snprintf(buf, sizeof(buf), " %.3f", v);
                std::cout << buf;
            }
            std::cout << "\n";
        };
        print_deciles("precision", precisions);
        print_deciles("recall", recalls);
    }
    if (!opt.report_path.empty()) {
        std::ofstream out(opt.report_path, std::ios::binary);
        if (!out) throw psaw::DataError("cannot write report: " + opt.report_path);
        out << report.dump(2) << '\n';
    }
    return 0;
}

int cmd_export(const std::string& classifier_path, const std::string& dialect) {
    if (dialect != "default") throw psaw::ConfigError("unknown dialect: " + dialect);
    const psaw::ClassifierFile file = psaw::load_classifier(classifier_path);
    std::cout << "class: " << file.target_class << "\n";
    for (std::size_t r = 0; r < file.classifier.rules.size(); ++r) {
        const psaw::DecodedRule decoded = psaw::decode(file.classifier.rules[r]);
        std::cout << "rule " << r << " positive: " << decoded.positive_pattern << "\n";
        std::cout << "rule " << r << " negative: " << decoded.negative_pattern << "\n";
    }
    std::cout << "accept: positive matches AND negative does not\n";
    return 0;
}

int cmd_synth(const std::string& spec_path, std::uint64_t seed, const std::string& out_path,
              const std::string& format) {
    const psaw::SyntheticSpec spec = psaw::load_synthetic_spec(spec_path);
    const psaw::LabeledCorpus corpus = psaw::generate_synthetic_corpus(spec, seed);
    psaw::save_corpus(corpus, out_path, format_for(format, out_path));
    std::cerr << "wrote " << corpus.documents.size() << " documents, "
              << corpus.classes.size() << " classes to " << out_path << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"learn fully interpretable regular-expression text classifiers"};
    app.require_subcommand(1);
    app.set_config("--config");

    TrainOptions train;
    CLI::App* train_cmd = app.add_subcommand("train", "learn classifiers for target classes");
    train_cmd->add_option("--corpus", train.corpus_path, "training corpus file")->required();
    train_cmd->add_option("--test-corpus", train.test_corpus_path, "held-out corpus file");
    train_cmd->add_option("--format", train.format, "corpus format: auto|tsv|jsonl");
    train_cmd->add_option("--class", train.classes, "target class (repeatable; default: all)");
    train_cmd->add_option("--embeddings", train.embeddings_path,
                          "embedding file, or 'fallback' for corpus co-occurrence vectors");
    train_cmd->add_option("--strategy", train.strategy,
                          "psaw|psaw-i|psaw-p-kmeans|psaw-p-random");
    train_cmd->add_option("--seed", train.anneal.seed, "random seed");
    train_cmd->add_option("--beta", train.anneal.beta, "F-measure beta");
    train_cmd->add_option("--pool", train.anneal.pool_capacity, "solution pool capacity");
    train_cmd->add_option("--iterations", train.anneal.total_iterations, "total iterations");
    train_cmd->add_option("--rules", train.anneal.rules_per_solution, "rules per classifier");
    train_cmd->add_option("--t-start", train.anneal.t_start, "starting temperature");
    train_cmd->add_option("--t-end", train.anneal.t_end, "stopping temperature");
    train_cmd->add_option("--td-f", train.anneal.td_f, "keyword frequency-ratio threshold");
    train_cmd->add_option("--n-w", train.anneal.n_w, "keyword pool size");
    train_cmd->add_option("--td-s", train.anneal.td_s, "subject-word similarity threshold");
    train_cmd->add_option("--stall", train.anneal.stall_limit,
                          "stop after this many rounds without improvement");
    train_cmd->add_option("--complexity-cap", train.anneal.complexity_cap,
                          "maximum word occurrences per rule");
    train_cmd->add_option("--workers", train.anneal.workers, "evaluation worker threads");
    train_cmd->add_option("--tokenizer", train.tokenizer, "whitespace|character");
    train_cmd->add_option("--stopwords", train.stopwords_path, "stop-word list file");
    train_cmd->add_option("--fallback-window", train.fallback_window,
                          "co-occurrence window for fallback embeddings");
    train_cmd->add_option("--fallback-dim", train.fallback_dim,
                          "dimension cap for fallback embeddings");
    train_cmd->add_option("--out", train.out_dir, "output directory");

    EvalOptionsCli eval;
    CLI::App* eval_cmd = app.add_subcommand("eval", "evaluate classifiers on a corpus");
    eval_cmd->add_option("--classifier", eval.classifier_paths, "classifier file (repeatable)")
        ->required();
    eval_cmd->add_option("--corpus", eval.corpus_path, "corpus file")->required();
    eval_cmd->add_option("--format", eval.format, "corpus format: auto|tsv|jsonl");
    eval_cmd->add_option("--beta", eval.beta, "F-measure beta");
    eval_cmd->add_option("--out", eval.report_path, "machine-readable JSON report path");

    std::string export_classifier, export_dialect = "default";
    CLI::App* export_cmd = app.add_subcommand("export", "print decoded patterns");
    export_cmd->add_option("--classifier", export_classifier, "classifier file")->required();
    export_cmd->add_option("--dialect", export_dialect, "pattern dialect (default)");

    std::string synth_spec, synth_out, synth_format = "auto";
    std::uint64_t synth_seed = 0;
    CLI::App* synth_cmd = app.add_subcommand("synth", "generate a synthetic corpus");
    synth_cmd->add_option("--spec", synth_spec, "generator spec (JSON)")->required();
    synth_cmd->add_option("--seed", synth_seed, "random seed");
    synth_cmd->add_option("--out", synth_out, "output corpus path")->required();
    synth_cmd->add_option("--format", synth_format, "corpus format: auto|tsv|jsonl");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (train_cmd->parsed()) return cmd_train(train);
        if (eval_cmd->parsed()) return cmd_eval(eval);
        if (export_cmd->parsed()) return cmd_export(export_classifier, export_dialect);
        if (synth_cmd->parsed()) return cmd_synth(synth_spec, synth_seed, synth_out, synth_format);
    } catch (const psaw::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const psaw::TrainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) { // DataError, OovError, io failures
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

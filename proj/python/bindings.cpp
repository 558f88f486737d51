#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "psaw/annealer.hpp"
#include "psaw/corpus.hpp"
#include "psaw/embeddings.hpp"
#include "psaw/errors.hpp"
#include "psaw/evaluator.hpp"
#include "psaw/regex_model.hpp"

namespace py = pybind11;
using namespace psaw;

namespace {

CorpusFormat parse_format(const std::string& name) {
    if (name == "tsv") return CorpusFormat::Tsv;
    if (name == "jsonl") return CorpusFormat::Jsonl;
    throw ConfigError("unknown corpus format: " + name);
}

TokenizerConfig make_tokenizer(const std::string& mode,
                               const std::vector<std::string>& stop_words) {
    TokenizerConfig config;
    if (mode == "character") config.mode = TokenizerMode::Character;
    else if (mode != "whitespace") throw ConfigError("unknown tokenizer mode: " + mode);
    config.stop_words.insert(stop_words.begin(), stop_words.end());
    return config;
}

TrainResult dispatch_train(const BinaryDataset& dataset, const EmbeddingTable& embeddings,
                           const AnnealConfig& config, const std::string& strategy) {
    if (strategy == "psaw") return run_psaw(dataset, embeddings, config);
    if (strategy == "psaw-i") return run_psaw_i(dataset, embeddings, config);
    if (strategy == "psaw-p-kmeans") {
        return run_psaw_p(dataset, embeddings, config, PartitionMode::KMeans);
    }
    if (strategy == "psaw-p-random") {
        return run_psaw_p(dataset, embeddings, config, PartitionMode::Random);
    }
    throw ConfigError("unknown strategy: " + strategy);
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Regular-expression classifier learning via pool-based simulated annealing";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
    py::register_exception<OovError>(m, "OovError", PyExc_KeyError);
    py::register_exception<TrainError>(m, "TrainError", PyExc_RuntimeError);

    py::class_<Document>(m, "Document")
        .def(py::init<>())
        .def_readwrite("id", &Document::id)
        .def_readwrite("text", &Document::text)
        .def_readwrite("tokens", &Document::tokens)
        .def_readwrite("label", &Document::label)
        .def("__repr__", [](const Document& d) {
            return "<Document id=" + std::to_string(d.id) + " label='" + d.label + "'>";
        });

    py::class_<LabeledCorpus>(m, "LabeledCorpus")
        .def(py::init<>())
        .def_readwrite("documents", &LabeledCorpus::documents)
        .def_readwrite("classes", &LabeledCorpus::classes)
        .def("__len__", [](const LabeledCorpus& c) { return c.documents.size(); });

    py::class_<BinaryDataset>(m, "BinaryDataset")
        .def(py::init<>())
        .def_readwrite("positive", &BinaryDataset::positive)
        .def_readwrite("negative", &BinaryDataset::negative)
        .def_readwrite("target_class", &BinaryDataset::target_class);

    py::class_<EmbeddingTable>(m, "EmbeddingTable")
        .def(py::init<>())
        .def_readonly("dimension", &EmbeddingTable::dimension)
        .def("contains", &EmbeddingTable::contains)
        .def("__len__", [](const EmbeddingTable& t) { return t.vectors.size(); });

    py::class_<RegexRule>(m, "RegexRule")
        .def(py::init<>())
        .def("__eq__", [](const RegexRule& a, const RegexRule& b) { return a == b; })
        .def("__str__", [](const RegexRule& r) { return to_canonical(r); });

    py::class_<Classifier>(m, "Classifier")
        .def(py::init<>())
        .def_readwrite("rules", &Classifier::rules)
        .def("matches", [](const Classifier& c, const std::string& text) {
            return match_classifier(c, text);
        })
        .def("__len__", [](const Classifier& c) { return c.rules.size(); });

    py::class_<ConfusionCounts>(m, "ConfusionCounts")
        .def(py::init<>())
        .def_readwrite("true_matches", &ConfusionCounts::true_matches)
        .def_readwrite("false_matches", &ConfusionCounts::false_matches)
        .def_readwrite("positives_total", &ConfusionCounts::positives_total);

    py::class_<EvalMetrics>(m, "EvalMetrics")
        .def_readonly("counts", &EvalMetrics::counts)
        .def_readonly("precision", &EvalMetrics::precision)
        .def_readonly("recall", &EvalMetrics::recall)
        .def_readonly("f_beta", &EvalMetrics::f_beta)
        .def_readonly("beta", &EvalMetrics::beta);

    py::class_<AnnealConfig>(m, "AnnealConfig")
        .def(py::init<>())
        .def_readwrite("t_start", &AnnealConfig::t_start)
        .def_readwrite("t_end", &AnnealConfig::t_end)
        .def_readwrite("pool_capacity", &AnnealConfig::pool_capacity)
        .def_readwrite("total_iterations", &AnnealConfig::total_iterations)
        .def_readwrite("beta", &AnnealConfig::beta)
        .def_readwrite("rules_per_solution", &AnnealConfig::rules_per_solution)
        .def_readwrite("td_f", &AnnealConfig::td_f)
        .def_readwrite("n_w", &AnnealConfig::n_w)
        .def_readwrite("td_s", &AnnealConfig::td_s)
        .def_readwrite("stall_limit", &AnnealConfig::stall_limit)
        .def_readwrite("seed", &AnnealConfig::seed)
        .def_readwrite("complexity_cap", &AnnealConfig::complexity_cap)
        .def_readwrite("workers", &AnnealConfig::workers);

    py::class_<HistoryRecord>(m, "HistoryRecord")
        .def_readonly("round", &HistoryRecord::round)
        .def_readonly("temperature", &HistoryRecord::temperature)
        .def_readonly("best_objective", &HistoryRecord::best_objective)
        .def_readonly("mean_elite_objective", &HistoryRecord::mean_elite_objective)
        .def_readonly("accepted", &HistoryRecord::accepted);

    py::class_<TrainResult>(m, "TrainResult")
        .def_readonly("best", &TrainResult::best)
        .def_readonly("metrics", &TrainResult::metrics)
        .def_readonly("history", &TrainResult::history)
        .def_readonly("wall_time_seconds", &TrainResult::wall_time_seconds)
        .def_readonly("notes", &TrainResult::notes);

    m.def(
        "tokenize",
        [](const std::string& text, const std::string& mode,
           const std::vector<std::string>& stop_words) {
            return tokenize(text, make_tokenizer(mode, stop_words));
        },
        py::arg("text"), py::arg("mode") = "whitespace",
        py::arg("stop_words") = std::vector<std::string>{});

    m.def(
        "load_corpus",
        [](const std::string& path, const std::string& format, const std::string& tokenizer,
           const std::vector<std::string>& stop_words) {
            return load_corpus(path, parse_format(format), make_tokenizer(tokenizer, stop_words));
        },
        py::arg("path"), py::arg("format") = "tsv", py::arg("tokenizer") = "whitespace",
        py::arg("stop_words") = std::vector<std::string>{});

    m.def(
        "save_corpus",
        [](const LabeledCorpus& corpus, const std::string& path, const std::string& format) {
            save_corpus(corpus, path, parse_format(format));
        },
        py::arg("corpus"), py::arg("path"), py::arg("format") = "tsv");

    m.def("split_binary", &split_binary, py::arg("corpus"), py::arg("target_class"));

    m.def(
        "generate_synthetic_corpus",
        [](const std::string& spec_path, std::uint64_t seed) {
            return generate_synthetic_corpus(load_synthetic_spec(spec_path), seed);
        },
        py::arg("spec_path"), py::arg("seed"));

    m.def("load_embeddings",
          [](const std::string& path) { return load_embeddings(path, nullptr); },
          py::arg("path"));
    m.def("build_fallback_embeddings", &build_fallback_embeddings, py::arg("corpus"),
          py::arg("window") = 5, py::arg("dimension_cap") = 256);
    m.def("cosine_similarity", &cosine_similarity, py::arg("table"), py::arg("w1"),
          py::arg("w2"));

    m.def(
        "train",
        [](const BinaryDataset& dataset, const EmbeddingTable& embeddings,
           const AnnealConfig& config, const std::string& strategy) {
            return dispatch_train(dataset, embeddings, config, strategy);
        },
        py::arg("dataset"), py::arg("embeddings"), py::arg("config") = AnnealConfig{},
        py::arg("strategy") = "psaw");

    m.def(
        "evaluate",
        [](const Classifier& classifier, const BinaryDataset& dataset, double beta) {
            return Evaluator(dataset).evaluate(classifier, beta);
        },
        py::arg("classifier"), py::arg("dataset"), py::arg("beta") = 0.2);

    m.def("match_rule", &match_rule, py::arg("rule"), py::arg("text"));
    m.def("rule_to_canonical", &to_canonical, py::arg("rule"));
    m.def("rule_from_canonical", &parse_canonical, py::arg("text"));
    m.def(
        "decode",
        [](const RegexRule& rule) {
            const DecodedRule d = decode(rule);
            return py::make_tuple(d.positive_pattern, d.negative_pattern);
        },
        py::arg("rule"));

    m.def(
        "save_classifier",
        [](const Classifier& classifier, const std::string& path,
           const std::string& target_class, double beta, std::uint64_t seed,
           const std::string& strategy) {
            save_classifier({target_class, beta, seed, strategy, classifier}, path);
        },
        py::arg("classifier"), py::arg("path"), py::arg("target_class"),
        py::arg("beta") = 0.2, py::arg("seed") = 0, py::arg("strategy") = "psaw");
    m.def(
        "load_classifier",
        [](const std::string& path) {
            const ClassifierFile file = load_classifier(path);
            return py::make_tuple(file.classifier, file.target_class, file.beta, file.seed,
                                  file.strategy);
        },
        py::arg("path"));
}

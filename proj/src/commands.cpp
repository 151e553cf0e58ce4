#include "udseg/commands.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "udseg/evaluator.hpp"
#include "udseg/model_io.hpp"
#include "udseg/pipeline.hpp"
#include "udseg/typology.hpp"

namespace udseg {

namespace {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open input file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write output file: " + path);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw DataError("write failed for: " + path);
}

void emit(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-")
        std::cout << content;
    else
        write_text_file(path, content);
}

std::string dataset_name(const std::string& path) {
    return std::filesystem::path(path).stem().string();
}

std::map<std::string, std::string> parse_settings_file(const std::string& path) {
    std::map<std::string, std::string> kv;
    std::istringstream in(read_text_file(path));
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) throw DataError("settings file: malformed line '" + line + "'");
        kv[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return kv;
}

bool parse_bool(const std::string& v, const std::string& what) {
    if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
    if (v == "0" || v == "false" || v == "no" || v == "off") return false;
    throw DataError(what + ": expected a boolean, got '" + v + "'");
}

struct ResolvedSettings {
    UnitMode unit_mode = UnitMode::Character;
    bool uses_ngrams = false;
    std::optional<bool> forced_encdec;  // only when a file or flag pinned it
};

// flags > settings file > recommendation from the training corpus
ResolvedSettings resolve_settings(const RunConfig& cfg, const Document& train) {
    SettingsThresholds thr;
    if (cfg.mwt_threshold) thr.mwt_threshold = *cfg.mwt_threshold;
    const RecommendedSettings rec = recommend_settings(compute_factors(train), thr);

    ResolvedSettings out;
    out.unit_mode = rec.unit_mode;
    out.uses_ngrams = rec.uses_ngrams;

    if (!cfg.settings_path.empty()) {
        const auto kv = parse_settings_file(cfg.settings_path);
        if (auto it = kv.find("unit_mode"); it != kv.end())
            out.unit_mode = unit_mode_from_name(it->second);
        if (auto it = kv.find("uses_ngrams"); it != kv.end())
            out.uses_ngrams = parse_bool(it->second, "uses_ngrams");
        if (auto it = kv.find("train_encdec"); it != kv.end())
            out.forced_encdec = parse_bool(it->second, "train_encdec");
    }
    if (cfg.unit_mode) out.unit_mode = unit_mode_from_name(*cfg.unit_mode);
    if (cfg.ngrams) out.uses_ngrams = *cfg.ngrams;
    return out;
}

// Raw input when the content does not parse as CoNLL-U with tokens.
std::vector<std::string> input_sentences(const std::string& path) {
    const std::string text = read_text_file(path);
    bool conllu = false;
    std::vector<std::string> sentences;
    try {
        Document doc = parse_document(text, path);
        for (const auto& s : doc.sentences)
            if (!s.tokens.empty()) conllu = true;
        if (conllu)
            for (const auto& s : doc.sentences) sentences.push_back(reconstruct_text(s));
    } catch (const std::runtime_error&) {
        conllu = false;
    }
    if (!conllu) {
        sentences.clear();
        std::istringstream in(text);
        std::string line;
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (!line.empty()) sentences.push_back(line);
        }
    }
    return sentences;
}

}  // namespace

void cmd_train(const RunConfig& cfg) {
    if (cfg.train_path.empty()) throw UsageError("train: --train is required");
    if (cfg.model_dir.empty()) throw UsageError("train: --model is required");

    Document train = parse_document_file(cfg.train_path);
    Document dev;
    if (!cfg.dev_path.empty()) {
        dev = parse_document_file(cfg.dev_path);
    } else {
        // deterministic tail split: the last 10% becomes development data
        if (train.sentences.size() < 2)
            throw DataError("train: need at least 2 sentences to carve a development split");
        const std::size_t n_dev = std::max<std::size_t>(1, train.sentences.size() / 10);
        dev.sentences.assign(train.sentences.end() - static_cast<std::ptrdiff_t>(n_dev),
                             train.sentences.end());
        train.sentences.resize(train.sentences.size() - n_dev);
    }

    const ResolvedSettings settings = resolve_settings(cfg, train);

    TrainConfig tc;
    tc.seed = cfg.seed;
    if (cfg.epochs) tc.main_epochs = *cfg.epochs;
    if (cfg.encdec_epochs) tc.encdec_epochs = *cfg.encdec_epochs;

    Segmenter seg;
    seg.table = build_table(train);
    seg.policy = decide_policy(seg.table, cfg.mwt_threshold.value_or(200));
    if (settings.forced_encdec) seg.policy.has_encdec = *settings.forced_encdec;

    EncdecResult enc_result;
    if (seg.policy.has_encdec) {
        std::vector<MwtPair> pairs(seg.table.chosen.begin(), seg.table.chosen.end());
        seg.encdec = init_transducer(pairs, tc);
        enc_result = train_encdec(*seg.encdec, pairs, tc);
    }

    std::vector<Tag> tagset = select_tagset(train);
    std::vector<UnitSequence> unit_seqs = unitize_corpus(train, settings.unit_mode);
    Vocab vocab = build_vocab(unit_seqs, settings.uses_ngrams);
    seg.model.init(std::move(vocab), settings.unit_mode, settings.uses_ngrams, std::move(tagset),
                   tc);

    const TrainResult result = train_main(seg.model, train, dev, seg.transduce_fn());

    std::vector<std::pair<std::string, std::string>> extra;
    extra.emplace_back("best_epoch", std::to_string(result.best_epoch));
    extra.emplace_back("best_dev_f1", format_double(result.best_f1));
    if (seg.policy.has_encdec) {
        extra.emplace_back("encdec_best_epoch", std::to_string(enc_result.best_epoch));
        extra.emplace_back("encdec_val_acc", format_double(enc_result.best_val_acc));
    }
    save_segmenter(cfg.model_dir, seg, extra);

    std::string log = "# epoch\tdev_f1\tmean_loss\n";
    for (const auto& e : result.log)
        log += std::to_string(e.epoch) + "\t" + format_double(e.dev_f1) + "\t" +
               format_double(e.mean_loss) + "\n";
    log += "# best_epoch\t" + std::to_string(result.best_epoch) + "\n";
    log += "# best_dev_f1\t" + format_double(result.best_f1) + "\n";
    if (seg.policy.has_encdec)
        log += "# encdec_val_acc\t" + format_double(enc_result.best_val_acc) + "\n";
    write_text_file(cfg.model_dir + "/train_log.tsv", log);
}

void cmd_segment(const RunConfig& cfg) {
    if (cfg.model_dir.empty()) throw UsageError("segment: --model is required");
    if (cfg.input_path.empty()) throw UsageError("segment: --input is required");

    Segmenter seg = load_segmenter(cfg.model_dir);
    const std::vector<std::string> sentences = input_sentences(cfg.input_path);
    const Document out = segment_document(seg, sentences);
    emit(cfg.output_path, serialize_document(out));

    if (!cfg.dump_tags_path.empty()) {
        std::string dump;
        for (const auto& raw : sentences) {
            UnitSequence units = unitize(raw, seg.model.unit_mode);
            if (units.size() == 0) continue;
            const Sentence resegmented = segment_sentence(seg, raw);
            dump += to_debug_text(units, encode_tags(resegmented, units));
        }
        write_text_file(cfg.dump_tags_path, dump);
    }
}

void cmd_evaluate(const RunConfig& cfg) {
    if (cfg.gold_path.empty() || cfg.system_path.empty())
        throw UsageError("evaluate: --gold and --system are required");
    const Document gold = parse_document_file(cfg.gold_path);
    const Document system = parse_document_file(cfg.system_path);
    const EvalResult r = corpus_prf(system, gold);
    std::string tsv = "dataset\tprecision\trecall\tf1\tmatched\tcand\tref\n";
    tsv += dataset_name(cfg.gold_path) + "\t" + format_double(r.precision) + "\t" +
           format_double(r.recall) + "\t" + format_double(r.f1) + "\t" +
           std::to_string(r.matched) + "\t" + std::to_string(r.candidate_len) + "\t" +
           std::to_string(r.reference_len) + "\n";
    emit(cfg.report_path.empty() ? cfg.output_path : cfg.report_path, tsv);
}

void cmd_analyze(const RunConfig& cfg) {
    std::vector<std::string> inputs = cfg.analyze_inputs;
    if (!cfg.input_path.empty()) inputs.insert(inputs.begin(), cfg.input_path);
    if (inputs.empty()) throw UsageError("analyze: at least one --input corpus is required");
    const std::string out_dir = cfg.output_path.empty() ? "." : cfg.output_path;
    std::filesystem::create_directories(out_dir);

    std::vector<std::string> names;
    std::vector<TypoProfile> profiles;
    std::vector<double> single_rates;
    for (const auto& path : inputs) {
        const Document doc = parse_document_file(path);
        names.push_back(dataset_name(path));
        profiles.push_back(compute_factors(doc));
        single_rates.push_back(build_table(doc).single_transduction_rate());
    }

    std::string factors = "dataset\tTS\tCS\tLS\tAL\tSF\tMP\tMS\n";
    for (std::size_t i = 0; i < names.size(); ++i) {
        const auto& p = profiles[i];
        factors += names[i] + "\t" + std::to_string(p.train_size) + "\t" + std::to_string(p.cs) +
                   "\t" + std::to_string(p.ls) + "\t" + format_double(p.al) + "\t" +
                   format_double(p.sf) + "\t" + format_double(p.mp) + "\t" + std::to_string(p.ms) +
                   "\n";
    }
    write_text_file(out_dir + "/factors.tsv", factors);

    std::string mwt_stats = "dataset\tunique_mwts\tsingle_transduction_rate\n";
    for (std::size_t i = 0; i < names.size(); ++i)
        mwt_stats += names[i] + "\t" + std::to_string(profiles[i].ms) + "\t" +
                     format_double(single_rates[i]) + "\n";
    write_text_file(out_dir + "/mwt_stats.tsv", mwt_stats);

    const char* kFeatureNames[] = {"TS", "CS", "LS", "AL", "SF", "MP", "MS"};
    auto feature_row = [](const TypoProfile& p) {
        return std::vector<double>{static_cast<double>(p.train_size), static_cast<double>(p.cs),
                                   static_cast<double>(p.ls),         p.al,
                                   p.sf,                              p.mp,
                                   static_cast<double>(p.ms)};
    };

    // drop constant features before standardizing
    std::vector<std::vector<double>> raw_rows;
    for (const auto& p : profiles) raw_rows.push_back(feature_row(p));
    std::vector<std::size_t> active;
    if (raw_rows.size() >= 2) {
        for (std::size_t j = 0; j < 7; ++j) {
            bool varies = false;
            for (const auto& r : raw_rows)
                if (r[j] != raw_rows[0][j]) varies = true;
            if (varies) active.push_back(j);
        }
    }
    std::vector<std::vector<double>> rows;
    for (const auto& r : raw_rows) {
        std::vector<double> row;
        for (std::size_t j : active) row.push_back(r[j]);
        rows.push_back(std::move(row));
    }

    if (!active.empty()) {
        const Standardizer st = Standardizer::fit(rows);
        std::vector<std::vector<double>> z;
        for (const auto& r : rows) z.push_back(st.apply(r));

        if (z.size() >= 6) {
            const KMeansResult km = kmeans(z, 6, cfg.seed);
            std::string clusters = "dataset\tcluster\n";
            for (std::size_t i = 0; i < names.size(); ++i)
                clusters += names[i] + "\t" + std::to_string(km.assignment[i]) + "\n";
            write_text_file(out_dir + "/clusters.tsv", clusters);
        }
        if (!z.empty() && z[0].size() >= 2) {
            const PcaResult pca = pca_project(z, 2);
            std::string out = "# explained_variance_ratio\t" +
                              format_double(pca.explained_ratio[0]) + "\t" +
                              format_double(pca.explained_ratio[1]) + "\n";
            out += "dataset\tpc1\tpc2\n";
            for (std::size_t i = 0; i < names.size(); ++i)
                out += names[i] + "\t" + format_double(pca.projected[i][0]) + "\t" +
                       format_double(pca.projected[i][1]) + "\n";
            write_text_file(out_dir + "/pca.tsv", out);
        }

        if (!cfg.f1_table_path.empty()) {
            std::map<std::string, double> f1_of;
            std::istringstream in(read_text_file(cfg.f1_table_path));
            std::string line;
            while (std::getline(in, line)) {
                if (line.empty() || line[0] == '#') continue;
                const std::size_t tab = line.find('\t');
                if (tab == std::string::npos)
                    throw DataError("f1 table: malformed line '" + line + "'");
                f1_of[line.substr(0, tab)] = std::strtod(line.c_str() + tab + 1, nullptr);
            }
            std::vector<std::vector<double>> xs;
            std::vector<double> ys;
            for (std::size_t i = 0; i < names.size(); ++i) {
                auto it = f1_of.find(names[i]);
                if (it == f1_of.end()) continue;
                xs.push_back(z[i]);
                ys.push_back(it->second);
            }
            if (!xs.empty() && xs.size() >= xs[0].size() + 1) {
                const HuberFit fit = huber_regress(xs, ys);
                std::string reg = "feature\tcoefficient\n";
                for (std::size_t j = 0; j < active.size(); ++j)
                    reg += std::string(kFeatureNames[active[j]]) + "\t" +
                           format_double(fit.coefficients[j]) + "\n";
                reg += "intercept\t" + format_double(fit.intercept) + "\n";
                write_text_file(out_dir + "/regression.tsv", reg);
            }
        }
    }
}

void cmd_recommend(const RunConfig& cfg) {
    const std::string path = !cfg.train_path.empty() ? cfg.train_path : cfg.input_path;
    if (path.empty()) throw UsageError("recommend: --train (or --input) is required");
    const Document doc = parse_document_file(path);
    SettingsThresholds thr;
    if (cfg.mwt_threshold) thr.mwt_threshold = *cfg.mwt_threshold;
    const RecommendedSettings rec = recommend_settings(compute_factors(doc), thr);
    std::string out;
    out += "unit_mode=" + std::string(unit_mode_name(rec.unit_mode)) + "\n";
    out += "uses_ngrams=" + std::string(rec.uses_ngrams ? "true" : "false") + "\n";
    out += "train_encdec=" + std::string(rec.train_encdec ? "true" : "false") + "\n";
    emit(cfg.output_path, out);
}

}  // namespace udseg

#include "udseg/model_io.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace udseg {

namespace {

constexpr const char* kFormatVersion = "udseg-model/1";

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ModelError("cannot write " + path);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw ModelError("write failed for " + path);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ModelError("cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void put_u64(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out += static_cast<char>((v >> (8 * i)) & 0xFF);
}

void put_f32(std::string& out, float f) {
    std::uint32_t bits;
    std::memcpy(&bits, &f, 4);
    for (int i = 0; i < 4; ++i) out += static_cast<char>((bits >> (8 * i)) & 0xFF);
}

struct BinReader {
    const std::string& data;
    std::size_t pos = 0;
    std::uint64_t u64() {
        if (pos + 8 > data.size()) throw ModelError("params.bin truncated");
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i)
            v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data[pos + i])) << (8 * i);
        pos += 8;
        return v;
    }
    float f32() {
        if (pos + 4 > data.size()) throw ModelError("params.bin truncated");
        std::uint32_t bits = 0;
        for (int i = 0; i < 4; ++i)
            bits |= static_cast<std::uint32_t>(static_cast<unsigned char>(data[pos + i])) << (8 * i);
        pos += 4;
        float f;
        std::memcpy(&f, &bits, 4);
        return f;
    }
    std::string bytes(std::size_t n) {
        if (pos + n > data.size()) throw ModelError("params.bin truncated");
        std::string s = data.substr(pos, n);
        pos += n;
        return s;
    }
};

std::vector<std::pair<std::string, Parameter*>> all_parameters(Segmenter& seg) {
    auto params = seg.model.parameters();
    if (seg.encdec) {
        auto extra = seg.encdec->parameters();
        params.insert(params.end(), extra.begin(), extra.end());
    }
    return params;
}

std::string tagset_string(const std::vector<Tag>& tags) {
    std::string out;
    for (std::size_t i = 0; i < tags.size(); ++i) {
        if (i) out += ',';
        out += tag_name(tags[i]);
    }
    return out;
}

std::vector<Tag> tagset_from_string(const std::string& s) {
    std::vector<Tag> tags;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        std::size_t comma = s.find(',', pos);
        if (comma == std::string::npos) comma = s.size();
        tags.push_back(tag_from_name(s.substr(pos, comma - pos)));
        pos = comma + 1;
    }
    return tags;
}

}  // namespace

std::string escape_tsv(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '\\': out += "\\\\"; break;
            case '\t': out += "\\t"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            default: out += c;
        }
    }
    return out;
}

std::string unescape_tsv(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] != '\\' || i + 1 == s.size()) {
            out += s[i];
            continue;
        }
        ++i;
        switch (s[i]) {
            case '\\': out += '\\'; break;
            case 't': out += '\t'; break;
            case 'n': out += '\n'; break;
            case 'r': out += '\r'; break;
            default: out += s[i];
        }
    }
    return out;
}

void save_segmenter(const std::string& dir, Segmenter& seg,
                    const std::vector<std::pair<std::string, std::string>>& extra_meta) {
    std::filesystem::create_directories(dir);
    const SegModel& m = seg.model;

    std::string meta;
    auto kv = [&meta](const std::string& k, const std::string& v) { meta += k + "=" + v + "\n"; };
    kv("format", kFormatVersion);
    kv("unit_mode", std::string(unit_mode_name(m.unit_mode)));
    kv("uses_ngrams", m.uses_ngrams ? "1" : "0");
    kv("tagset", tagset_string(m.tagset));
    kv("vocab_uni", std::to_string(m.vocab.unigrams.table_size()));
    kv("vocab_bi", std::to_string(m.uses_ngrams ? m.vocab.bigrams.table_size() : 0));
    kv("vocab_tri", std::to_string(m.uses_ngrams ? m.vocab.trigrams.table_size() : 0));
    kv("has_encdec", seg.encdec ? "1" : "0");
    kv("encdec_vocab", std::to_string(seg.encdec ? seg.encdec->vocab_size() : 0));
    kv("encdec_state_size", std::to_string(seg.encdec ? seg.encdec->state_size : 0));
    kv("share_encdec_weights", seg.encdec && !seg.encdec->share_weights ? "0" : "1");
    kv("cfg_char_embedding_size", std::to_string(m.cfg.char_embedding_size));
    kv("cfg_rnn_state_size", std::to_string(m.cfg.rnn_state_size));
    kv("cfg_initial_lr_main", format_double(m.cfg.initial_lr_main));
    kv("cfg_decay_rate", format_double(m.cfg.decay_rate));
    kv("cfg_grad_clip_norm", format_double(m.cfg.grad_clip_norm));
    kv("cfg_initial_lr_encdec", format_double(m.cfg.initial_lr_encdec));
    kv("cfg_dropout_rate", format_double(m.cfg.dropout_rate));
    kv("cfg_batch_size", std::to_string(m.cfg.batch_size));
    kv("cfg_main_epochs", std::to_string(m.cfg.main_epochs));
    kv("cfg_encdec_epochs", std::to_string(m.cfg.encdec_epochs));
    kv("cfg_seed", std::to_string(m.cfg.seed));
    for (const auto& [k, v] : extra_meta) kv(k, v);
    write_file(dir + "/meta", meta);

    std::string vocab;
    auto write_order = [&vocab](const char* order, const Vocab::Order& o) {
        std::vector<std::pair<int, const std::string*>> rows;
        for (const auto& [surface, idx] : o.index) rows.emplace_back(idx, &surface);
        std::sort(rows.begin(), rows.end());
        for (const auto& [idx, surface] : rows)
            vocab += std::string(order) + "\t" + escape_tsv(*surface) + "\t" + std::to_string(idx) +
                     "\n";
    };
    write_order("1", m.vocab.unigrams);
    if (m.uses_ngrams) {
        write_order("2", m.vocab.bigrams);
        write_order("3", m.vocab.trigrams);
    }
    if (seg.encdec)
        for (std::size_t i = 0; i < seg.encdec->alphabet.size(); ++i)
            vocab += "t\t" + escape_tsv(seg.encdec->alphabet[i]) + "\t" +
                     std::to_string(i + TransducerModel::kFirstChar) + "\n";
    write_file(dir + "/vocab.tsv", vocab);

    std::string bin;
    for (auto& [name, p] : all_parameters(seg)) {
        put_u64(bin, name.size());
        bin += name;
        const auto& shape = p->value.shape();
        put_u64(bin, shape.size());
        for (std::size_t d : shape) put_u64(bin, d);
        for (std::size_t i = 0; i < p->value.numel(); ++i)
            put_f32(bin, static_cast<float>(p->value[i]));
    }
    write_file(dir + "/params.bin", bin);

    std::string mwt;
    for (const auto& [surface, components] : seg.table.chosen) {
        mwt += escape_tsv(surface);
        mwt += '\t';
        for (std::size_t i = 0; i < components.size(); ++i) {
            if (i) mwt += '\x1f';
            mwt += escape_tsv(components[i]);
        }
        mwt += '\n';
    }
    write_file(dir + "/mwt.tsv", mwt);
}

Segmenter load_segmenter(const std::string& dir) {
    std::map<std::string, std::string> meta;
    {
        const std::string text = read_file(dir + "/meta");
        std::size_t pos = 0;
        while (pos < text.size()) {
            std::size_t nl = text.find('\n', pos);
            if (nl == std::string::npos) nl = text.size();
            const std::string line = text.substr(pos, nl - pos);
            pos = nl + 1;
            if (line.empty()) continue;
            const std::size_t eq = line.find('=');
            if (eq == std::string::npos) throw ModelError("meta: malformed line '" + line + "'");
            meta[line.substr(0, eq)] = line.substr(eq + 1);
        }
    }
    auto need = [&meta](const std::string& k) {
        auto it = meta.find(k);
        if (it == meta.end()) throw ModelError("meta: missing key '" + k + "'");
        return it->second;
    };
    if (need("format") != kFormatVersion)
        throw ModelError("unsupported model format '" + meta["format"] + "' (expected " +
                         kFormatVersion + ")");

    TrainConfig cfg;
    cfg.char_embedding_size = std::stoi(need("cfg_char_embedding_size"));
    cfg.rnn_state_size = std::stoi(need("cfg_rnn_state_size"));
    cfg.initial_lr_main = std::strtod(need("cfg_initial_lr_main").c_str(), nullptr);
    cfg.decay_rate = std::strtod(need("cfg_decay_rate").c_str(), nullptr);
    cfg.grad_clip_norm = std::strtod(need("cfg_grad_clip_norm").c_str(), nullptr);
    cfg.initial_lr_encdec = std::strtod(need("cfg_initial_lr_encdec").c_str(), nullptr);
    cfg.dropout_rate = std::strtod(need("cfg_dropout_rate").c_str(), nullptr);
    cfg.batch_size = std::stoi(need("cfg_batch_size"));
    cfg.main_epochs = std::stoi(need("cfg_main_epochs"));
    cfg.encdec_epochs = std::stoi(need("cfg_encdec_epochs"));
    cfg.seed = std::stoull(need("cfg_seed"));

    Vocab vocab;
    vocab.has_ngrams = need("uses_ngrams") == "1";
    std::vector<std::pair<int, std::string>> transducer_chars;
    {
        const std::string text = read_file(dir + "/vocab.tsv");
        std::size_t pos = 0;
        while (pos < text.size()) {
            std::size_t nl = text.find('\n', pos);
            if (nl == std::string::npos) nl = text.size();
            const std::string line = text.substr(pos, nl - pos);
            pos = nl + 1;
            if (line.empty()) continue;
            const std::size_t t1 = line.find('\t');
            const std::size_t t2 = line.find('\t', t1 + 1);
            if (t1 == std::string::npos || t2 == std::string::npos)
                throw ModelError("vocab.tsv: malformed line");
            const std::string order = line.substr(0, t1);
            const std::string surface = unescape_tsv(line.substr(t1 + 1, t2 - t1 - 1));
            const int idx = std::stoi(line.substr(t2 + 1));
            if (order == "1")
                vocab.unigrams.index.emplace(surface, idx);
            else if (order == "2")
                vocab.bigrams.index.emplace(surface, idx);
            else if (order == "3")
                vocab.trigrams.index.emplace(surface, idx);
            else if (order == "t")
                transducer_chars.emplace_back(idx, surface);
            else
                throw ModelError("vocab.tsv: unknown order '" + order + "'");
        }
    }
    if (vocab.unigrams.table_size() != std::stoull(need("vocab_uni")))
        throw ModelError("vocab.tsv does not match meta vocab_uni");

    Segmenter seg;
    seg.model.init(std::move(vocab), unit_mode_from_name(need("unit_mode")),
                   need("uses_ngrams") == "1", tagset_from_string(need("tagset")), cfg);

    if (need("has_encdec") == "1") {
        std::sort(transducer_chars.begin(), transducer_chars.end());
        std::vector<std::string> alphabet;
        for (auto& [idx, c] : transducer_chars) {
            if (idx != static_cast<int>(alphabet.size()) + TransducerModel::kFirstChar)
                throw ModelError("vocab.tsv: non-contiguous transducer alphabet ids");
            alphabet.push_back(std::move(c));
        }
        seg.encdec = make_transducer(std::move(alphabet), cfg.char_embedding_size,
                                     std::stoi(need("encdec_state_size")),
                                     need("share_encdec_weights") == "1", cfg.seed);
        seg.policy.has_encdec = true;
    }

    {
        const std::string bin = read_file(dir + "/params.bin");
        BinReader r{bin};
        for (auto& [name, p] : all_parameters(seg)) {
            const std::uint64_t name_len = r.u64();
            const std::string got = r.bytes(name_len);
            if (got != name)
                throw ModelError("params.bin: expected parameter '" + name + "', found '" + got +
                                 "'");
            const std::uint64_t rank = r.u64();
            if (rank != p->value.shape().size())
                throw ModelError("params.bin: rank mismatch for '" + name + "'");
            for (std::size_t d = 0; d < rank; ++d)
                if (r.u64() != p->value.shape()[d])
                    throw ModelError("params.bin: shape mismatch for '" + name + "'");
            for (std::size_t i = 0; i < p->value.numel(); ++i)
                p->value[i] = static_cast<double>(r.f32());
        }
        if (r.pos != bin.size()) throw ModelError("params.bin: trailing bytes");
    }

    {
        const std::string text = read_file(dir + "/mwt.tsv");
        std::size_t pos = 0;
        while (pos < text.size()) {
            std::size_t nl = text.find('\n', pos);
            if (nl == std::string::npos) nl = text.size();
            const std::string line = text.substr(pos, nl - pos);
            pos = nl + 1;
            if (line.empty()) continue;
            const std::size_t tab = line.find('\t');
            if (tab == std::string::npos) throw ModelError("mwt.tsv: malformed line");
            const std::string surface = unescape_tsv(line.substr(0, tab));
            std::vector<std::string> components;
            std::size_t cpos = tab + 1;
            while (cpos <= line.size()) {
                std::size_t us = line.find('\x1f', cpos);
                if (us == std::string::npos) us = line.size();
                components.push_back(unescape_tsv(line.substr(cpos, us - cpos)));
                cpos = us + 1;
            }
            seg.table.counts[surface][components] = 1;
            seg.table.chosen.emplace(surface, std::move(components));
        }
    }
    return seg;
}

}  // namespace udseg
